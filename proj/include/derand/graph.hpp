#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "derand/bitvector.hpp"
#include "derand/gf2.hpp"
#include "derand/kernels.hpp"
#include "derand/reed_muller.hpp"

namespace derand {

// x -> v(x + b) on points of F2^n.
BitVector affine_shift(const BitVector& v, uint32_t b);
uint64_t affine_shift_word(uint64_t w, int n, uint32_t b);

// RM(n, d) as the group F2^k of messages (n <= 6), with decoding, the
// character map F2^N -> F2^k and minimum-weight coset representatives.
//
// A character alpha in F2^N restricts to the code as the message-space
// character beta with bit (k-1-j) = <row_j, alpha>; its kernel is the dual
// code, so beta indexes F2^N / RM(n, n-d-1).
class CodeSpace {
public:
    CodeSpace(int n, int d);

    int n() const noexcept { return code_.n; }
    int d() const noexcept { return code_.d; }
    int k() const noexcept { return k_; }
    int length() const noexcept { return 1 << code_.n; }
    uint64_t vertex_count() const noexcept { return uint64_t{1} << k_; }
    const RMCode& code() const noexcept { return code_; }

    uint64_t word(uint64_t message) const { return words_[message]; }
    const std::vector<uint64_t>& words() const noexcept { return words_; }
    // Inverse of word(); throws ParameterError for a non-codeword.
    uint64_t message(uint64_t word) const;
    uint64_t character(uint64_t alpha) const;
    uint64_t character(const BitVector& alpha) const { return character(alpha.word()); }
    // Message of pi_b(word(m)).
    uint64_t shift_message(uint64_t message, uint32_t b) const;

    // Lexicographically smallest minimum-weight member of coset beta.
    uint64_t min_weight_rep(uint64_t beta) const { return cosets_.rep[beta]; }
    // Coset degree of beta.
    int degree(uint64_t beta) const { return cosets_.dist[beta]; }
    // Lexicographically smallest member of coset beta (the CharacterIndex form).
    uint64_t canonical_rep(uint64_t beta) const;

private:
    RMCode code_;
    int k_ = 0;
    std::vector<uint64_t> words_;
    std::vector<uint64_t> cols_;        // cols_[p]: character of the point indicator e_p
    std::vector<int> info_set_;
    std::vector<uint64_t> decode_rows_; // message bit r = parity(decode_rows_[r] & info bits)
    gf2::WordBasis dual_;
    kernels::CosetTable cosets_;
};

enum class EdgeFilter { Auto, Always, Never };

struct GraphOptions {
    // Reject steps with <u, v> <= 3N/4 and renormalize. Auto applies it when
    // d >= 4, where a single minimum-weight step passes the threshold.
    EdgeFilter filter = EdgeFilter::Auto;
    // Accept eps in [1/8, 1).
    bool allow_wide_eps = false;
};

// Cayley graph on RM(n, d): u ~ u + z with z drawn from the step law, a
// Poisson(eps 2^(d-1)) number of independent uniform minimum-weight codewords
// truncated at floor(16 eps 2^d) steps. Edge weights w(u, v) = step(u + v) / |V|.
struct ShortCodeGraph {
    std::shared_ptr<const CodeSpace> space;
    double eps = 0;
    double rho = 1;
    double step_mean = 0;       // eps 2^(d-1)
    int max_steps = 0;          // M_max
    uint64_t min_weight_count = 0;
    bool filter_applied = false;
    double rejected_mass = 0;   // step mass removed by the filter
    std::vector<double> step;   // indexed by message
    std::vector<double> lambda; // indexed by message-space character

    int n() const noexcept { return space->n(); }
    int d() const noexcept { return space->d(); }
    uint64_t vertex_count() const noexcept { return space->vertex_count(); }
    double weight(uint64_t u, uint64_t v) const { return step[u ^ v] / static_cast<double>(vertex_count()); }
};

ShortCodeGraph build_short_code_graph(int n, int d, double eps, const GraphOptions& opts = {});

// Eigenvalue of the character chi_alpha; any coset member gives the same value.
double eigenvalue(const ShortCodeGraph& g, const BitVector& alpha);
double eigenvalue(const ShortCodeGraph& g, const CharacterIndex& alpha);

struct SpectrumRow {
    uint64_t beta = 0;
    uint64_t rep = 0;  // lexicographically smallest coset member
    int degree = 0;
    double lambda = 0;
};
// One row per coset, ordered by (degree, rep).
std::vector<SpectrumRow> spectrum(const ShortCodeGraph& g);
// CSV with header coset_rep_hex,degree,lambda.
std::string spectrum_csv(const ShortCodeGraph& g);

struct SpectrumAuditRow {
    int degree = 0;
    double lambda = 0;
    double rho_k = 0;
    double gap = 0;
};

struct SpectrumAudit {
    std::vector<SpectrumAuditRow> rows;     // one per coset, ordered like spectrum()
    std::vector<double> gap_by_degree;  // max |lambda - rho^k| per degree k
    double delta = 0;
    double degree_limit = 0;          // delta^2 2^(d+1)
    size_t low_degree_checked = 0;
    size_t low_degree_violations = 0;
    bool low_degree_ok = true;
    // Smallest delta whose window k < delta^2 2^(d+1) contains degree 1 and for
    // which the low-degree bullet holds; empty if none up to 1.
    std::optional<double> delta_fit;
    // Largest mu0 with lambda <= max(rho^(k/2), rho^(mu0 2^d)) for every
    // character; empty when no character exceeds rho^(k/2).
    std::optional<double> mu0_fit;
    double expected_inner = 0;
    double expected_inner_bound = 0;  // (1 - eps) N
    bool expected_inner_ok = false;
    double min_adjacent_inner = 0;
    bool filter_applied = false;
    bool adjacency_ok = false;        // min adjacent inner product > 3N/4
    bool degenerate = false;          // eps == 0
    bool pass = false;
};

SpectrumAudit spectrum_audit(const ShortCodeGraph& g, double delta);

// Dense symmetric nonnegative weights. degree = row sums (self-loops counted once).
class WeightedGraph {
public:
    WeightedGraph() = default;
    explicit WeightedGraph(int vertices);
    WeightedGraph(int vertices, std::vector<double> weights);

    int size() const noexcept { return V_; }
    double weight(int u, int v) const { return w_[static_cast<size_t>(u) * V_ + v]; }
    // Sets w(u, v) and w(v, u).
    void set_weight(int u, int v, double x);
    void add_weight(int u, int v, double x);
    const std::vector<double>& weights() const noexcept { return w_; }
    std::vector<double> degrees() const;
    double total_weight() const;
    // degree / total degree
    std::vector<double> stationary() const;

private:
    int V_ = 0;
    std::vector<double> w_;
};

// Probability that a stationary step from S leaves S, i.e. cut(S) / vol(S).
// `in_set` holds one flag per vertex; S must be nonempty and proper.
double conductance(const WeightedGraph& g, std::span<const char> in_set);
double conductance(const ShortCodeGraph& g, std::span<const char> in_set);

// Orbits of messages under all affine shifts, ordered by smallest member.
struct Orbits {
    std::vector<std::vector<uint64_t>> members;  // sorted
    std::vector<uint32_t> orbit_of;             // per message
};
Orbits orbits(const CodeSpace& space);

struct FoldedGraph {
    Orbits orbits;
    WeightedGraph graph;
    std::vector<double> stationary;  // |orbit| / |V|
};

FoldedGraph fold(const ShortCodeGraph& g);

// Per-message flags of the union of the chosen orbits.
std::vector<char> lift_cut(const FoldedGraph& f, std::span<const char> in_set);

struct SeparatorOptions {
    // Exhaustive search up to this many vertices.
    int brute_force_cap = 24;
    // Heuristic search above the cap.
    int restarts = 64;
    uint64_t rng_seed = 1;
    // Extra candidate sets (one flag per vertex) evaluated as-is and as local-search starts.
    std::vector<std::vector<char>> candidates;
};

struct SeparatorResult {
    bool feasible = false;
    bool optimal = false;
    double phi = 0;
    std::vector<char> witness;   // one flag per vertex
    double lower_bound = 0;      // certified: optimum >= lower_bound
    std::string method;          // "brute_force" or "heuristic"
};

// min { phi(S) : stationary mass of S in [b, 1 - b] }.
SeparatorResult balanced_separator_opt(const WeightedGraph& g, double b, const SeparatorOptions& opts = {});

// A real function on the codewords, indexed by message, with its Fourier table
// fhat[beta] = E_m f(m) (-1)^{beta . m}.
struct CodeFunction {
    std::shared_ptr<const CodeSpace> space;
    std::vector<double> values;
    std::vector<double> fhat;

    CodeFunction(std::shared_ptr<const CodeSpace> s, std::vector<double> v);
    double mean() const { return fhat[0]; }
    double second_moment() const;
};

// Sum of fhat(beta)^2 over cosets of degree <= ell whose minimum-weight
// representative contains point `point` (0-based).
double influence(const CodeFunction& f, int point, int ell);
double noise_stability(const CodeFunction& f, const ShortCodeGraph& g);

struct GaussianStability {
    double value = 0;
    bool degenerate = false;  // mu in {0, 1}
};
// P[X <= t, Y <= t] for standard normals of correlation rho, t = Phi^-1(mu).
GaussianStability gaussian_stability(double rho, double mu);

struct MisAudit {
    int ell = 0;                 // floor(log2(1 / tau))
    double max_influence = 0;
    bool hypothesis_met = false;
    double mu = 0;
    double lhs = 0;              // noise stability
    double rhs_main = 0;         // Gamma_rho(mu)
    double slack = 0;            // lhs - rhs_main
    std::string status;          // "ok" or "hypothesis not met"
};
MisAudit mis_audit(const CodeFunction& f, const ShortCodeGraph& g, double tau);

// <f, T f> for the cube kernel rho^{d_H}(1 - rho)^{n - d_H}: sum over S of
// (1 - 2 rho)^{|S|} fhat(S)^2. values has 2^n entries, n <= 20.
double boolean_noise_stability(std::span<const double> values, double rho);

}  // namespace derand
