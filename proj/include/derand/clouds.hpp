#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "derand/graph.hpp"

// Clouds of codewords and the lifted vector solution, all in inner-product
// space. Codewords are packed words (n <= 6) read as +-1 vectors of length N.
namespace derand {

// <u, v> of the +-1 views.
inline int signed_correlation(uint64_t u, uint64_t v, int N) {
    return N - 2 * __builtin_popcountll(u ^ v);
}

struct NearOrthogonality {
    bool ok = false;
    int max_corr = 0;        // max over b != 0 of |<v, pi_b v>|
    double threshold = 0;    // N^(2/3) / 2
};
NearOrthogonality near_orthogonality(uint64_t v, int n);

struct NearOrthogonalityScan {
    uint64_t codewords = 0;
    uint64_t nearly_orthogonal = 0;
    double fraction = 0;
};
// Exhaustive over the code.
NearOrthogonalityScan near_orthogonality_scan(const CodeSpace& space);

struct MemberGramBound {
    double max_eigenvalue = 0;
    double gershgorin = 0;
    size_t members = 0;      // distinct orbit members
};
// Largest eigenvalue of M_ab = <pi_a v, pi_b v>^3 / N^3 over distinct members.
MemberGramBound member_gram_bound(uint64_t v, int n);
// Same, refusing codewords that are not nearly orthogonal.
MemberGramBound cloud_gram_eigen_bound(uint64_t v, int n);

struct MatchingAudit {
    bool pass = false;
    uint32_t shift = 0;      // tau: member rho(u) is matched to (rho + tau)(v)
    int max_abs_corr = 0;
    int members_checked = 0;
};
// Checks that rho(u) -> (rho + tau)(v) hits an argmax of |<rho(u), .>| over
// the cloud of v for every rho; tau is the smallest shift attaining the maximum.
MatchingAudit matching_audit(uint64_t u, uint64_t v, int n);

// S_uv = sum over shifts s of (<u, pi_s v> / N)^(3t): the inner product of the
// cloud sums c_u = N^(-1/2) sum_pi (pi u / sqrt N)^(tensor 3t).
double cloud_sum_product(uint64_t u, uint64_t v, int n, int t);
// ||c_u||.
double cloud_norm(uint64_t u, int n, int t);

struct CloudInnerProduct {
    double value = 0;        // S_uv / sqrt(S_uu S_vv)
    double s_uv = 0;
    double norm_u = 0, norm_v = 0;
    bool nearly_orthogonal = false;  // both inputs
};
CloudInnerProduct cloud_inner_product(uint64_t u, uint64_t v, int n, int t);

// 10 R^2 exp(-t / (16 R)), unclamped.
double cloud_perturbation(int t, int rounds);

struct LiftedOptions {
    // Forces delta (e.g. 0 for the t -> infinity limit).
    std::optional<double> delta;
};

struct LiftedSolution {
    int n = 0;
    int tensor = 1;
    int rounds = 1;
    double delta_schedule = 0;   // unclamped formula value
    double delta = 0;            // used: min(1, schedule) unless forced
    bool delta_clamped = false;
    bool delta_forced = false;
    std::vector<uint64_t> bases;            // one per cloud
    std::vector<char> nearly_orthogonal;    // per cloud
    std::vector<uint64_t> effective_bases;  // bad clouds replaced by the anchor's base
    int anchor = -1;                        // the fixed good cloud
    Eigen::MatrixXd gram;
    double min_eigenvalue = 0;
};

// gram(B, B') = (1 - delta) cloud_inner_product for B != B', 1 on the diagonal.
// Throws ConstructionError when no cloud is nearly orthogonal or the Gram is
// not PSD within 1e-8.
LiftedSolution lifted_gram(std::span<const uint64_t> bases, int n, int tensor, int rounds,
                           const LiftedOptions& opts = {});

// Rows X with X X^T = gram (negative eigenvalues clipped to 0).
Eigen::MatrixXd realize_vectors(const Eigen::MatrixXd& gram);

// E over independent stationary orbit pairs of ||v_B - v_B'||^2 / 4.
double balance_value(const LiftedSolution& sol, const FoldedGraph& folded);
// Edge-weighted average of ||v_B - v_B'||^2 / 4.
double sdp_objective(const LiftedSolution& sol, const FoldedGraph& folded);
// The same two quantities from explicit vectors.
double balance_value(const Eigen::MatrixXd& vectors, std::span<const double> stationary);
double sdp_objective(const Eigen::MatrixXd& vectors, const WeightedGraph& graph);

struct GapParams {
    int n = 4;
    int d = 2;
    double eps = 0.1;
    int rounds = 2;
    double b = 1.0 / 3;
    int tensor = 3;
    GraphOptions graph;
    LiftedOptions lifted;
    SeparatorOptions separator;
    // Exhaustive matching audit over cloud pairs up to this many clouds; sampled above.
    size_t matching_pairs_cap = 100000;
};

struct GapReport {
    GapParams params;
    size_t folded_vertices = 0;
    SeparatorResult integral;
    double balance = 0;
    double balance_threshold = 0;  // 2 b (1 - b)
    bool feasible = false;
    double sdp = 0;
    std::optional<double> gap;     // integral / sdp, never clamped
    std::string gap_status;        // "ok", "infeasible", "sdp is zero"
    LiftedSolution solution;
    // Audit trail.
    NearOrthogonalityScan near_orth_codewords;
    size_t near_orth_clouds = 0;
    double cloud_gram_max_eigenvalue = 0;  // over nearly-orthogonal clouds
    size_t matching_pairs = 0;
    size_t matching_failures = 0;
    double vector_balance_diff = 0;     // |Gram-based - realized|
    double vector_objective_diff = 0;
};

GapReport gap_report(const GapParams& params);

// Runs gap_report per eps and re-evaluates every separator with all witnesses
// found across the sweep as extra candidates.
std::vector<GapReport> gap_sweep(const GapParams& base, std::span<const double> eps_values);

}  // namespace derand
