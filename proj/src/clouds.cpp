#include "derand/clouds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "derand/errors.hpp"
#include "derand/kernels.hpp"

namespace derand {

namespace {

void check_n(int n) {
    if (n < 1 || n > 6) throw ParameterError("clouds: n must lie in [1, 6]");
}

void check_tensor(int t) {
    if (t < 1 || t % 2 == 0) throw ParameterError("clouds: tensor power must be a positive odd integer");
}

std::vector<uint64_t> shifted_copies(uint64_t v, int n) {
    std::vector<uint64_t> out(size_t{1} << n);
    for (uint32_t b = 0; b < out.size(); ++b) out[b] = affine_shift_word(v, n, b);
    return out;
}

std::vector<uint64_t> distinct_members(uint64_t v, int n) {
    auto m = shifted_copies(v, n);
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

}  // namespace

NearOrthogonality near_orthogonality(uint64_t v, int n) {
    check_n(n);
    const int N = 1 << n;
    NearOrthogonality r;
    r.threshold = std::pow(static_cast<double>(N), 2.0 / 3.0) / 2;
    for (uint32_t b = 1; b < static_cast<uint32_t>(N); ++b)
        r.max_corr = std::max(r.max_corr, std::abs(signed_correlation(v, affine_shift_word(v, n, b), N)));
    r.ok = r.max_corr <= r.threshold;
    return r;
}

NearOrthogonalityScan near_orthogonality_scan(const CodeSpace& space) {
    NearOrthogonalityScan s;
    s.codewords = space.vertex_count();
    for (uint64_t w : space.words())
        if (near_orthogonality(w, space.n()).ok) ++s.nearly_orthogonal;
    s.fraction = static_cast<double>(s.nearly_orthogonal) / static_cast<double>(s.codewords);
    return s;
}

MemberGramBound member_gram_bound(uint64_t v, int n) {
    check_n(n);
    const int N = 1 << n;
    const auto members = distinct_members(v, n);
    const int m = static_cast<int>(members.size());
    Eigen::MatrixXd M(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) M(a, b) = kernels::ipow(signed_correlation(members[a], members[b], N) / double(N), 3);
    MemberGramBound r;
    r.members = members.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    r.max_eigenvalue = es.eigenvalues()(m - 1);
    for (int a = 0; a < m; ++a) r.gershgorin = std::max(r.gershgorin, M.row(a).cwiseAbs().sum());
    return r;
}

MemberGramBound cloud_gram_eigen_bound(uint64_t v, int n) {
    if (!near_orthogonality(v, n).ok)
        throw ParameterError("cloud_gram_eigen_bound: codeword is not nearly orthogonal; bound not claimed");
    return member_gram_bound(v, n);
}

MatchingAudit matching_audit(uint64_t u, uint64_t v, int n) {
    check_n(n);
    const int N = 1 << n;
    const auto su = shifted_copies(u, n);
    const auto sv = shifted_copies(v, n);
    MatchingAudit r;
    r.max_abs_corr = -1;
    for (uint32_t tau = 0; tau < static_cast<uint32_t>(N); ++tau) {
        const int c = std::abs(signed_correlation(u, sv[tau], N));
        if (c > r.max_abs_corr) {
            r.max_abs_corr = c;
            r.shift = tau;
        }
    }
    r.pass = true;
    for (uint32_t rho = 0; rho < static_cast<uint32_t>(N); ++rho) {
        int best = 0;
        for (uint32_t s = 0; s < static_cast<uint32_t>(N); ++s)
            best = std::max(best, std::abs(signed_correlation(su[rho], sv[s], N)));
        const int matched = std::abs(signed_correlation(su[rho], sv[rho ^ r.shift], N));
        r.pass = r.pass && matched == best;
        ++r.members_checked;
    }
    return r;
}

double cloud_sum_product(uint64_t u, uint64_t v, int n, int t) {
    check_n(n);
    check_tensor(t);
    const int N = 1 << n;
    double s = 0;
    for (uint32_t b = 0; b < static_cast<uint32_t>(N); ++b)
        s += kernels::ipow(signed_correlation(u, affine_shift_word(v, n, b), N) / double(N), 3 * t);
    return s;
}

double cloud_norm(uint64_t u, int n, int t) { return std::sqrt(cloud_sum_product(u, u, n, t)); }

CloudInnerProduct cloud_inner_product(uint64_t u, uint64_t v, int n, int t) {
    CloudInnerProduct r;
    r.s_uv = cloud_sum_product(u, v, n, t);
    r.norm_u = cloud_norm(u, n, t);
    r.norm_v = cloud_norm(v, n, t);
    if (!(r.norm_u > 0) || !(r.norm_v > 0)) throw ConstructionError("cloud_inner_product: zero cloud norm");
    r.value = r.s_uv / (r.norm_u * r.norm_v);
    r.nearly_orthogonal = near_orthogonality(u, n).ok && near_orthogonality(v, n).ok;
    return r;
}

double cloud_perturbation(int t, int rounds) {
    if (rounds < 1) throw ParameterError("cloud_perturbation: rounds must be positive");
    check_tensor(t);
    return 10.0 * rounds * rounds * std::exp(-t / (16.0 * rounds));
}

LiftedSolution lifted_gram(std::span<const uint64_t> bases, int n, int tensor, int rounds, const LiftedOptions& opts) {
    check_n(n);
    check_tensor(tensor);
    if (bases.empty()) throw ParameterError("lifted_gram: no clouds");
    LiftedSolution sol;
    sol.n = n;
    sol.tensor = tensor;
    sol.rounds = rounds;
    sol.delta_schedule = cloud_perturbation(tensor, rounds);
    if (opts.delta) {
        if (!(*opts.delta >= 0 && *opts.delta <= 1)) throw ParameterError("lifted_gram: delta must lie in [0, 1]");
        sol.delta = *opts.delta;
        sol.delta_forced = true;
    } else {
        sol.delta = std::min(1.0, sol.delta_schedule);
        sol.delta_clamped = sol.delta_schedule > 1;
    }

    const size_t C = bases.size();
    sol.bases.assign(bases.begin(), bases.end());
    sol.nearly_orthogonal.resize(C);
    for (size_t i = 0; i < C; ++i) {
        sol.nearly_orthogonal[i] = near_orthogonality(bases[i], n).ok;
        if (sol.nearly_orthogonal[i] && sol.anchor < 0) sol.anchor = static_cast<int>(i);
    }
    if (sol.anchor < 0) throw ConstructionError("lifted_gram: no nearly-orthogonal cloud to anchor the construction");
    sol.effective_bases.resize(C);
    for (size_t i = 0; i < C; ++i) sol.effective_bases[i] = sol.nearly_orthogonal[i] ? bases[i] : bases[sol.anchor];

    std::vector<std::vector<uint64_t>> shifted(C);
    for (size_t i = 0; i < C; ++i) shifted[i] = shifted_copies(sol.effective_bases[i], n);
    const int N = 1 << n;
    const auto S = kernels::parallel::cloud_sums(sol.effective_bases, shifted, N, 3 * tensor);

    const int c = static_cast<int>(C);
    sol.gram.resize(c, c);
    for (int i = 0; i < c; ++i) {
        sol.gram(i, i) = 1.0;
        for (int j = i + 1; j < c; ++j) {
            const double s = 0.5 * (S[i * C + j] + S[j * C + i]);
            const double v = (1 - sol.delta) * s / std::sqrt(S[i * C + i] * S[j * C + j]);
            sol.gram(i, j) = sol.gram(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.gram, Eigen::EigenvaluesOnly);
    sol.min_eigenvalue = es.eigenvalues()(0);
    if (sol.min_eigenvalue < -1e-8)
        throw ConstructionError("lifted_gram: Gram is not PSD (min eigenvalue " + std::to_string(sol.min_eigenvalue) +
                                ")");
    return sol;
}

Eigen::MatrixXd realize_vectors(const Eigen::MatrixXd& gram) {
    // LDL^T stalls on the rank-deficient Grams that remapped clouds produce.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw ConstructionError("realize_vectors: eigendecomposition failed");
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

double balance_value(const LiftedSolution& sol, const FoldedGraph& folded) {
    const int C = static_cast<int>(sol.gram.rows());
    if (static_cast<size_t>(C) != folded.stationary.size()) throw ParameterError("balance_value: cloud count mismatch");
    double s = 0;
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j)
            s += folded.stationary[i] * folded.stationary[j] * (2 - 2 * sol.gram(i, j)) / 4;
    return s;
}

double sdp_objective(const LiftedSolution& sol, const FoldedGraph& folded) {
    const int C = static_cast<int>(sol.gram.rows());
    if (C != folded.graph.size()) throw ParameterError("sdp_objective: cloud count mismatch");
    double s = 0, total = 0;
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j) {
            const double w = folded.graph.weight(i, j);
            s += w * (2 - 2 * sol.gram(i, j)) / 4;
            total += w;
        }
    return s / total;
}

double balance_value(const Eigen::MatrixXd& x, std::span<const double> stationary) {
    const int C = static_cast<int>(x.rows());
    if (static_cast<size_t>(C) != stationary.size()) throw ParameterError("balance_value: size mismatch");
    double s = 0;
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j) s += stationary[i] * stationary[j] * (x.row(i) - x.row(j)).squaredNorm() / 4;
    return s;
}

double sdp_objective(const Eigen::MatrixXd& x, const WeightedGraph& graph) {
    const int C = static_cast<int>(x.rows());
    if (C != graph.size()) throw ParameterError("sdp_objective: size mismatch");
    double s = 0, total = 0;
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j) {
            s += graph.weight(i, j) * (x.row(i) - x.row(j)).squaredNorm() / 4;
            total += graph.weight(i, j);
        }
    return s / total;
}

namespace {

void finish_gap(GapReport& r) {
    r.gap.reset();
    if (!r.feasible) {
        r.gap_status = "infeasible";
    } else if (!r.integral.feasible) {
        r.gap_status = "no balanced cut";
    } else if (!(r.sdp > 0)) {
        r.gap_status = "sdp is zero";
    } else {
        r.gap = r.integral.phi / r.sdp;
        r.gap_status = "ok";
    }
}

}  // namespace

GapReport gap_report(const GapParams& p) {
    if (!(p.b > 0 && p.b <= 0.5)) throw ParameterError("gap_report: b must lie in (0, 1/2]");
    GapReport r;
    r.params = p;
    const auto g = build_short_code_graph(p.n, p.d, p.eps, p.graph);
    const auto folded = fold(g);
    r.folded_vertices = static_cast<size_t>(folded.graph.size());

    std::vector<uint64_t> bases;
    for (const auto& orb : folded.orbits.members) bases.push_back(g.space->word(orb[0]));
    r.solution = lifted_gram(bases, p.n, p.tensor, p.rounds, p.lifted);

    r.balance = balance_value(r.solution, folded);
    r.balance_threshold = 2 * p.b * (1 - p.b);
    r.feasible = r.balance >= r.balance_threshold - 1e-12;
    r.sdp = sdp_objective(r.solution, folded);
    r.integral = balanced_separator_opt(folded.graph, p.b, p.separator);
    finish_gap(r);

    r.near_orth_codewords = near_orthogonality_scan(*g.space);
    for (size_t i = 0; i < bases.size(); ++i) {
        if (!r.solution.nearly_orthogonal[i]) continue;
        ++r.near_orth_clouds;
        r.cloud_gram_max_eigenvalue = std::max(r.cloud_gram_max_eigenvalue, member_gram_bound(bases[i], p.n).max_eigenvalue);
    }

    const size_t C = bases.size();
    auto audit_pair = [&](size_t i, size_t j) {
        ++r.matching_pairs;
        if (!matching_audit(bases[i], bases[j], p.n).pass) ++r.matching_failures;
    };
    if (C * C <= p.matching_pairs_cap) {
        for (size_t i = 0; i < C; ++i)
            for (size_t j = 0; j < C; ++j) audit_pair(i, j);
    } else {
        std::mt19937_64 rng(p.separator.rng_seed);
        std::uniform_int_distribution<size_t> pick(0, C - 1);
        for (size_t s = 0; s < p.matching_pairs_cap; ++s) audit_pair(pick(rng), pick(rng));
    }

    const auto x = realize_vectors(r.solution.gram);
    r.vector_balance_diff = std::abs(balance_value(x, folded.stationary) - r.balance);
    r.vector_objective_diff = std::abs(sdp_objective(x, folded.graph) - r.sdp);
    return r;
}

std::vector<GapReport> gap_sweep(const GapParams& base, std::span<const double> eps_values) {
    std::vector<GapReport> out;
    for (double eps : eps_values) {
        GapParams p = base;
        p.eps = eps;
        out.push_back(gap_report(p));
    }
    SeparatorOptions shared = base.separator;
    for (const auto& r : out)
        if (r.integral.feasible) shared.candidates.push_back(r.integral.witness);
    for (auto& r : out) {
        if (r.integral.optimal) continue;
        const auto g = build_short_code_graph(base.n, base.d, r.params.eps, base.graph);
        const auto folded = fold(g);
        auto better = balanced_separator_opt(folded.graph, base.b, shared);
        if (better.feasible && (!r.integral.feasible || better.phi < r.integral.phi)) {
            better.lower_bound = std::max(better.lower_bound, r.integral.lower_bound);
            r.integral = std::move(better);
        }
        finish_gap(r);
    }
    return out;
}

}  // namespace derand
