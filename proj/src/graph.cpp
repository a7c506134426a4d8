#include "derand/graph.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "derand/config.hpp"
#include "derand/errors.hpp"
#include "derand/kernels.hpp"

namespace derand {

namespace {

using i128 = __int128;

template <class T>
void wht_generic(std::vector<T>& a) {
    for (size_t h = 1; h < a.size(); h <<= 1)
        for (size_t i = 0; i < a.size(); i += h << 1)
            for (size_t j = i; j < i + h; ++j) {
                const T x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
}

double total_of(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

BitVector affine_shift(const BitVector& v, uint32_t b) {
    if (b >= v.size()) throw ParameterError("affine_shift: shift outside F2^n");
    BitVector out(v.n());
    for (size_t x = 0; x < v.size(); ++x) out.set(x, v.get(x ^ b));
    return out;
}

uint64_t affine_shift_word(uint64_t w, int n, uint32_t b) {
    if (n < 0 || n > 6) throw ParameterError("affine_shift_word: n must lie in [0, 6]");
    const uint32_t N = 1u << n;
    if (b >= N) throw ParameterError("affine_shift_word: shift outside F2^n");
    uint64_t out = 0;
    for (uint32_t x = 0; x < N; ++x) out |= ((w >> (x ^ b)) & 1u) << x;
    return out;
}

CodeSpace::CodeSpace(int n, int d) {
    if (n < 1 || n > 6) throw ParameterError("CodeSpace: n must lie in [1, 6]");
    if (d < 0 || d > n) throw ParameterError("CodeSpace: d must lie in [0, n]");
    code_ = rm_generator_matrix(n, d);
    k_ = static_cast<int>(code_.dimension());
    require_within_cap(std::ldexp(1.0, k_), "CodeSpace: codewords");
    const int N = 1 << n;

    cols_.assign(static_cast<size_t>(N), 0);
    for (int j = 0; j < k_; ++j)
        for (int p = 0; p < N; ++p)
            if (code_.rows[j].get(static_cast<size_t>(p))) cols_[p] |= uint64_t{1} << (k_ - 1 - j);

    // Gray-code fill of the codeword table.
    words_.assign(static_cast<size_t>(vertex_count()), 0);
    uint64_t g = 0, w = 0;
    for (uint64_t i = 1; i < vertex_count(); ++i) {
        const int bit = std::countr_zero(i);
        g ^= uint64_t{1} << bit;
        w ^= code_.rows[k_ - 1 - bit].word();
        words_[g] = w;
    }

    gf2::WordBasis seen;
    std::vector<uint64_t> a;
    for (int p = 0; p < N && static_cast<int>(info_set_.size()) < k_; ++p)
        if (seen.insert(cols_[p])) {
            info_set_.push_back(p);
            a.push_back(cols_[p]);
        }
    auto inv = gf2::invert(a, k_);
    if (!inv) throw ConstructionError("CodeSpace: information set is singular");
    decode_rows_ = std::move(*inv);

    for (const auto& row : dual_code(n, d).rows) dual_.insert(row.word());
    cosets_ = kernels::parallel::coset_table(cols_, k_);
}

uint64_t CodeSpace::message(uint64_t word) const {
    uint64_t y = 0;
    for (size_t i = 0; i < info_set_.size(); ++i) y |= ((word >> info_set_[i]) & 1u) << i;
    uint64_t m = 0;
    for (int r = 0; r < k_; ++r) m |= static_cast<uint64_t>(std::popcount(decode_rows_[r] & y) & 1) << r;
    if (words_[m] != word) throw ParameterError("CodeSpace::message: not a codeword");
    return m;
}

uint64_t CodeSpace::character(uint64_t alpha) const {
    uint64_t beta = 0;
    for (int p = 0; p < length(); ++p)
        if ((alpha >> p) & 1u) beta ^= cols_[p];
    return beta;
}

uint64_t CodeSpace::shift_message(uint64_t message, uint32_t b) const {
    return this->message(affine_shift_word(words_[message], n(), b));
}

uint64_t CodeSpace::canonical_rep(uint64_t beta) const { return dual_.reduce(cosets_.rep[beta]); }

ShortCodeGraph build_short_code_graph(int n, int d, double eps, const GraphOptions& opts) {
    if (!(eps >= 0) || !(eps < 1)) throw ParameterError("build_short_code_graph: eps must lie in [0, 1)");
    if (eps >= 0.125 && !opts.allow_wide_eps)
        throw ParameterError("build_short_code_graph: eps must be < 1/8 (allow_wide_eps lifts this)");

    ShortCodeGraph g;
    auto space = std::make_shared<CodeSpace>(n, d);
    g.space = space;
    g.eps = eps;
    g.rho = std::exp(-eps);
    g.step_mean = eps * std::ldexp(1.0, d - 1);
    g.max_steps = static_cast<int>(std::floor(16.0 * eps * std::ldexp(1.0, d) + 1e-9));

    const int k = space->k();
    const size_t V = static_cast<size_t>(space->vertex_count());
    const int N = space->length();

    const auto flats = min_weight_codewords(n, d);
    g.min_weight_count = flats.size();
    const double A = static_cast<double>(flats.size());
    if (k + g.max_steps * std::log2(A) >= 125)
        throw ParameterError("build_short_code_graph: step counts would overflow 128 bits");

    // Truncated Poisson weights over the number of steps.
    std::vector<long double> pois(static_cast<size_t>(g.max_steps) + 1);
    {
        long double term = 1, sum = 0;
        for (int m = 0; m <= g.max_steps; ++m) {
            if (m > 0) term *= static_cast<long double>(g.step_mean) / m;
            pois[m] = term;
            sum += term;
        }
        for (auto& p : pois) p /= sum;
    }

    // cnt_m(z) = # ordered m-tuples of flats summing to z, via exact transforms.
    std::vector<i128> ind(V, 0);
    for (const auto& f : flats) ind[space->message(f.word())] += 1;
    wht_generic(ind);

    std::vector<long double> acc(V, 0);
    std::vector<i128> power(V, 1), cnt(V);
    long double a_pow = 1;
    for (int m = 0; m <= g.max_steps; ++m) {
        cnt = power;
        wht_generic(cnt);
        for (size_t z = 0; z < V; ++z) {
            const i128 c = cnt[z] >> k;  // exact: divisible by 2^k
            if (c != 0) acc[z] += pois[m] * (static_cast<long double>(c) / a_pow);
        }
        for (size_t b = 0; b < V; ++b) power[b] *= ind[b];
        a_pow *= A;
    }

    g.step.assign(V, 0);
    for (size_t z = 0; z < V; ++z) g.step[z] = static_cast<double>(acc[z]);

    g.filter_applied = opts.filter == EdgeFilter::Always || (opts.filter == EdgeFilter::Auto && d >= 4);
    if (g.filter_applied) {
        double kept = 0, removed = 0;
        for (size_t z = 0; z < V; ++z) {
            if (z != 0 && 8 * std::popcount(space->word(z)) >= N) {
                removed += g.step[z];
                g.step[z] = 0;
            } else {
                kept += g.step[z];
            }
        }
        g.rejected_mass = removed;
        for (auto& s : g.step) s /= kept;
    }

    g.lambda = g.step;
    kernels::parallel::wht(g.lambda);
    return g;
}

double eigenvalue(const ShortCodeGraph& g, const BitVector& alpha) {
    if (alpha.n() != g.n()) throw ParameterError("eigenvalue: character length mismatch");
    return g.lambda[g.space->character(alpha)];
}

double eigenvalue(const ShortCodeGraph& g, const CharacterIndex& alpha) { return eigenvalue(g, alpha.alpha); }

std::vector<SpectrumRow> spectrum(const ShortCodeGraph& g) {
    const auto& s = *g.space;
    std::vector<SpectrumRow> rows(static_cast<size_t>(s.vertex_count()));
    for (uint64_t beta = 0; beta < s.vertex_count(); ++beta)
        rows[beta] = {beta, s.canonical_rep(beta), s.degree(beta), g.lambda[beta]};
    std::sort(rows.begin(), rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) {
        if (a.degree != b.degree) return a.degree < b.degree;
        return lex_less_word(a.rep, b.rep);
    });
    return rows;
}

std::string spectrum_csv(const ShortCodeGraph& g) {
    std::ostringstream out;
    out << "coset_rep_hex,degree,lambda\n";
    char buf[64];
    for (const auto& r : spectrum(g)) {
        std::snprintf(buf, sizeof buf, "%.17g", r.lambda);
        out << BitVector::from_word(g.n(), r.rep).to_hex() << ',' << r.degree << ',' << buf << '\n';
    }
    return out.str();
}

SpectrumAudit spectrum_audit(const ShortCodeGraph& g, double delta) {
    if (!(delta > 0)) throw ParameterError("spectrum_audit: delta must be positive");
    const auto& s = *g.space;
    const int N = s.length();
    const double scale = std::ldexp(1.0, g.d() + 1);

    SpectrumAudit a;
    a.delta = delta;
    a.degree_limit = delta * delta * scale;
    a.filter_applied = g.filter_applied;
    a.degenerate = g.eps == 0;

    int max_degree = 0;
    for (const auto& r : spectrum(g)) {
        const double rk = std::pow(g.rho, r.degree);
        const double gap = std::abs(r.lambda - rk);
        a.rows.push_back({r.degree, r.lambda, rk, gap});
        max_degree = std::max(max_degree, r.degree);
        if (r.degree < a.degree_limit) {
            ++a.low_degree_checked;
            if (gap > delta) ++a.low_degree_violations;
        }
        if (r.degree >= 1 && r.lambda > std::pow(g.rho, r.degree / 2.0) && g.eps > 0) {
            const double mu0 = -std::log(r.lambda) / (g.eps * std::ldexp(1.0, g.d()));
            a.mu0_fit = a.mu0_fit ? std::min(*a.mu0_fit, mu0) : mu0;
        }
    }
    a.low_degree_ok = a.low_degree_violations == 0;

    a.gap_by_degree.assign(static_cast<size_t>(max_degree) + 1, 0.0);
    for (const auto& r : a.rows) a.gap_by_degree[r.degree] = std::max(a.gap_by_degree[r.degree], r.gap);

    // Window for delta in (sqrt(K / scale), sqrt((K + 1) / scale)] is {k <= K}.
    double prefix = a.gap_by_degree[0];
    for (int K = 1; K <= max_degree || std::sqrt(K / scale) < 1; ++K) {
        if (K <= max_degree) prefix = std::max(prefix, a.gap_by_degree[K]);
        const double lo = std::sqrt(K / scale), hi = std::sqrt((K + 1) / scale);
        if (lo >= 1) break;
        const double cand = std::max(prefix, lo);
        if (cand <= std::min(hi, 1.0)) {
            a.delta_fit = cand;
            break;
        }
    }

    double expected = 0;
    int max_wt = 0;
    for (uint64_t z = 0; z < s.vertex_count(); ++z) {
        if (g.step[z] <= 0) continue;
        const int wt = std::popcount(s.word(z));
        expected += g.step[z] * (N - 2 * wt);
        max_wt = std::max(max_wt, wt);
    }
    a.expected_inner = expected;
    a.expected_inner_bound = (1 - g.eps) * N;
    a.expected_inner_ok = expected >= a.expected_inner_bound - 1e-9 * N;
    a.min_adjacent_inner = N - 2 * max_wt;
    a.adjacency_ok = a.min_adjacent_inner > 0.75 * N;
    a.pass = a.low_degree_ok && a.expected_inner_ok && (!a.filter_applied || a.adjacency_ok);
    return a;
}

WeightedGraph::WeightedGraph(int vertices) : V_(vertices), w_(static_cast<size_t>(vertices) * vertices, 0.0) {
    if (vertices < 0) throw ParameterError("WeightedGraph: negative size");
}

WeightedGraph::WeightedGraph(int vertices, std::vector<double> weights) : V_(vertices), w_(std::move(weights)) {
    if (vertices < 0 || w_.size() != static_cast<size_t>(vertices) * vertices)
        throw ParameterError("WeightedGraph: weight matrix has the wrong size");
    for (int u = 0; u < V_; ++u)
        for (int v = 0; v < V_; ++v) {
            if (!(weight(u, v) >= 0)) throw ParameterError("WeightedGraph: negative weight");
            if (weight(u, v) != weight(v, u)) throw ParameterError("WeightedGraph: weights must be symmetric");
        }
}

void WeightedGraph::set_weight(int u, int v, double x) {
    if (!(x >= 0)) throw ParameterError("WeightedGraph: negative weight");
    w_[static_cast<size_t>(u) * V_ + v] = x;
    w_[static_cast<size_t>(v) * V_ + u] = x;
}

void WeightedGraph::add_weight(int u, int v, double x) { set_weight(u, v, weight(u, v) + x); }

std::vector<double> WeightedGraph::degrees() const {
    std::vector<double> d(static_cast<size_t>(V_), 0.0);
    for (int u = 0; u < V_; ++u) d[u] = total_of(std::span(w_).subspan(static_cast<size_t>(u) * V_, V_));
    return d;
}

double WeightedGraph::total_weight() const { return total_of(degrees()); }

std::vector<double> WeightedGraph::stationary() const {
    auto d = degrees();
    const double t = total_of(d);
    if (!(t > 0)) throw ParameterError("WeightedGraph: no edges");
    for (auto& x : d) x /= t;
    return d;
}

namespace {

void check_set(std::span<const char> in_set, size_t size) {
    if (in_set.size() != size) throw ParameterError("conductance: set has the wrong length");
    const auto count = std::count_if(in_set.begin(), in_set.end(), [](char c) { return c != 0; });
    if (count == 0 || static_cast<size_t>(count) == size)
        throw ParameterError("conductance: set must be nonempty and proper");
}

}  // namespace

double conductance(const WeightedGraph& g, std::span<const char> in_set) {
    check_set(in_set, static_cast<size_t>(g.size()));
    double cut = 0, vol = 0;
    for (int u = 0; u < g.size(); ++u) {
        if (!in_set[u]) continue;
        for (int v = 0; v < g.size(); ++v) {
            vol += g.weight(u, v);
            if (!in_set[v]) cut += g.weight(u, v);
        }
    }
    if (!(vol > 0)) throw ParameterError("conductance: set has zero volume");
    return cut / vol;
}

double conductance(const ShortCodeGraph& g, std::span<const char> in_set) {
    const uint64_t V = g.vertex_count();
    check_set(in_set, static_cast<size_t>(V));
    // Extended accumulators: the double sum has |V|^2 terms.
    long double total = 0;
    for (double s : g.step) total += s;
    long double cut = 0;
    uint64_t inside = 0;
    for (uint64_t u = 0; u < V; ++u) {
        if (!in_set[u]) continue;
        ++inside;
        long double row = 0;
        for (uint64_t v = 0; v < V; ++v)
            if (!in_set[v]) row += g.step[u ^ v];
        cut += row;
    }
    return static_cast<double>(cut / (total * static_cast<long double>(inside)));
}

Orbits orbits(const CodeSpace& space) {
    const uint64_t V = space.vertex_count();
    const uint32_t N = static_cast<uint32_t>(space.length());
    Orbits o;
    constexpr uint32_t unset = ~0u;
    o.orbit_of.assign(static_cast<size_t>(V), unset);
    for (uint64_t m = 0; m < V; ++m) {
        if (o.orbit_of[m] != unset) continue;
        const auto id = static_cast<uint32_t>(o.members.size());
        std::vector<uint64_t> orb;
        for (uint32_t b = 0; b < N; ++b) orb.push_back(space.shift_message(m, b));
        std::sort(orb.begin(), orb.end());
        orb.erase(std::unique(orb.begin(), orb.end()), orb.end());
        for (uint64_t x : orb) o.orbit_of[x] = id;
        o.members.push_back(std::move(orb));
    }
    return o;
}

FoldedGraph fold(const ShortCodeGraph& g) {
    FoldedGraph f;
    f.orbits = orbits(*g.space);
    const int C = static_cast<int>(f.orbits.members.size());
    const double V = static_cast<double>(g.vertex_count());

    // Shifts are automorphisms, so every member of A sees the same weight into B.
    std::vector<double> w(static_cast<size_t>(C) * C, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < C; ++a) {
        const uint64_t rep = f.orbits.members[a][0];
        std::vector<double> row(static_cast<size_t>(C), 0.0);
        for (uint64_t v = 0; v < g.vertex_count(); ++v) row[f.orbits.orbit_of[v]] += g.step[rep ^ v];
        const double size = static_cast<double>(f.orbits.members[a].size());
        for (int b = a; b < C; ++b) w[static_cast<size_t>(a) * C + b] = size * row[b] / V;
    }
    for (int a = 0; a < C; ++a)
        for (int b = 0; b < a; ++b) w[static_cast<size_t>(a) * C + b] = w[static_cast<size_t>(b) * C + a];
    f.graph = WeightedGraph(C, std::move(w));
    f.stationary.resize(static_cast<size_t>(C));
    for (int a = 0; a < C; ++a) f.stationary[a] = static_cast<double>(f.orbits.members[a].size()) / V;
    return f;
}

std::vector<char> lift_cut(const FoldedGraph& f, std::span<const char> in_set) {
    if (in_set.size() != f.orbits.members.size()) throw ParameterError("lift_cut: set has the wrong length");
    std::vector<char> out(f.orbits.orbit_of.size(), 0);
    for (size_t m = 0; m < out.size(); ++m) out[m] = in_set[f.orbits.orbit_of[m]] ? 1 : 0;
    return out;
}

namespace {

// Incremental cut state for local search over one vertex set.
class CutState {
public:
    CutState(const WeightedGraph& g, const std::vector<double>& deg, double total, std::vector<char> set)
        : g_(g), deg_(deg), total_(total), set_(std::move(set)), s_in_(static_cast<size_t>(g.size()), 0.0) {
        const int V = g.size();
        for (int x = 0; x < V; ++x) {
            if (!set_[x]) continue;
            ++count_;
            vol_ += deg_[x];
            for (int y = 0; y < V; ++y) s_in_[y] += g.weight(y, x);
        }
        for (int x = 0; x < V; ++x)
            if (set_[x]) cut_ += deg_[x] - s_in_[x];
    }

    double phi() const { return cut_ / vol_; }
    double mass() const { return vol_ / total_; }
    int count() const { return count_; }
    const std::vector<char>& set() const { return set_; }

    // (cut, vol) after flipping x, without applying it.
    std::pair<double, double> preview(int x) const {
        const double self = g_.weight(x, x);
        if (!set_[x]) return {cut_ + (deg_[x] - s_in_[x] - self) - s_in_[x], vol_ + deg_[x]};
        return {cut_ + (s_in_[x] - self) - (deg_[x] - s_in_[x]), vol_ - deg_[x]};
    }

    void flip(int x) {
        auto [c, v] = preview(x);
        const double sign = set_[x] ? -1.0 : 1.0;
        cut_ = c;
        vol_ = v;
        count_ += set_[x] ? -1 : 1;
        set_[x] = !set_[x];
        for (int y = 0; y < g_.size(); ++y) s_in_[y] += sign * g_.weight(y, x);
    }

private:
    const WeightedGraph& g_;
    const std::vector<double>& deg_;
    double total_;
    std::vector<char> set_;
    std::vector<double> s_in_;
    double cut_ = 0, vol_ = 0;
    int count_ = 0;
};

struct Search {
    const WeightedGraph& g;
    std::vector<double> deg;
    double total = 0;
    double lo = 0, hi = 1;
    SeparatorResult best;

    bool feasible_mass(double m) const { return m >= lo - 1e-12 && m <= hi + 1e-12; }

    void offer(const CutState& s) {
        if (s.count() == 0 || s.count() == g.size() || !feasible_mass(s.mass())) return;
        // Exact recomputation so that reported values do not carry drift.
        const double phi = conductance(g, s.set());
        if (!best.feasible || phi < best.phi || (phi == best.phi && s.set() < best.witness)) {
            best.feasible = true;
            best.phi = phi;
            best.witness = s.set();
        }
    }

    // Best-improvement single-vertex flips that keep the mass feasible.
    void local_search(std::vector<char> start) {
        CutState s(g, deg, total, std::move(start));
        if (s.count() == 0 || s.count() == g.size() || !feasible_mass(s.mass())) return;
        for (int iter = 0; iter < 20 * g.size(); ++iter) {
            int pick = -1;
            double pick_phi = s.phi();
            for (int x = 0; x < g.size(); ++x) {
                const int cnt = s.count() + (s.set()[x] ? -1 : 1);
                if (cnt == 0 || cnt == g.size()) continue;
                auto [c, v] = s.preview(x);
                if (!(v > 0) || !feasible_mass(v / total)) continue;
                if (c / v < pick_phi - 1e-14) {
                    pick_phi = c / v;
                    pick = x;
                }
            }
            if (pick < 0) break;
            s.flip(pick);
        }
        offer(s);
    }

    // Feasible prefixes of a vertex order; the best one is polished locally.
    void sweep(const std::vector<int>& order) {
        CutState s(g, deg, total, std::vector<char>(static_cast<size_t>(g.size()), 0));
        double best_phi = 0;
        std::vector<char> best_set;
        for (size_t i = 0; i + 1 < order.size(); ++i) {
            s.flip(order[i]);
            if (!feasible_mass(s.mass())) continue;
            if (best_set.empty() || s.phi() < best_phi) {
                best_phi = s.phi();
                best_set = s.set();
            }
        }
        if (!best_set.empty()) local_search(std::move(best_set));
    }
};

}  // namespace

SeparatorResult balanced_separator_opt(const WeightedGraph& g, double b, const SeparatorOptions& opts) {
    if (!(b >= 0 && b <= 0.5)) throw ParameterError("balanced_separator_opt: b must lie in [0, 1/2]");
    if (g.size() < 2) throw ParameterError("balanced_separator_opt: need at least two vertices");
    if (opts.brute_force_cap > 30) throw ParameterError("balanced_separator_opt: brute-force cap above 30");
    const int V = g.size();
    const auto deg = g.degrees();
    const double total = total_of(deg);
    if (!(total > 0)) throw ParameterError("balanced_separator_opt: graph has no edges");

    if (V <= opts.brute_force_cap) {
        const kernels::DenseGraphView view{V, g.weights(), deg};
        const auto scan = kernels::parallel::balanced_cut_scan(view, b, 1 - b);
        SeparatorResult r;
        r.method = "brute_force";
        r.optimal = true;
        r.feasible = scan.feasible;
        if (scan.feasible) {
            r.witness.assign(static_cast<size_t>(V), 0);
            for (int v = 0; v < V; ++v) r.witness[v] = (scan.mask >> v) & 1u;
            r.phi = conductance(g, r.witness);
            r.lower_bound = r.phi;
        }
        return r;
    }

    Search s{g, deg, total, b, 1 - b, {}};
    s.best.method = "heuristic";

    for (const auto& c : opts.candidates) {
        if (c.size() != static_cast<size_t>(V)) throw ParameterError("balanced_separator_opt: candidate length");
        s.offer(CutState(g, deg, total, c));
        s.local_search(c);
    }

    // Spectral sweeps along the top nontrivial eigenvectors of D^-1/2 W D^-1/2.
    bool positive = std::all_of(deg.begin(), deg.end(), [](double x) { return x > 0; });
    if (positive && V <= 4096) {
        Eigen::MatrixXd m(V, V);
        for (int u = 0; u < V; ++u)
            for (int v = 0; v < V; ++v) m(u, v) = g.weight(u, v) / std::sqrt(deg[u] * deg[v]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() == Eigen::Success) {
            const auto& vals = es.eigenvalues();  // ascending
            const double lambda2 = vals(V - 2);
            s.best.lower_bound = std::max(0.0, (1 - lambda2) * b);
            for (int e = 2; e <= std::min(V, 6); ++e) {
                std::vector<double> f(static_cast<size_t>(V));
                for (int u = 0; u < V; ++u) f[u] = es.eigenvectors()(u, V - e) / std::sqrt(deg[u]);
                std::vector<int> order(static_cast<size_t>(V));
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return f[x] < f[y]; });
                s.sweep(order);
                std::reverse(order.begin(), order.end());
                s.sweep(order);
            }
        }
    }

    std::mt19937_64 rng(opts.rng_seed);
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<int> order(static_cast<size_t>(V));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<char> set(static_cast<size_t>(V), 0);
        double mass = 0;
        for (int v : order) {
            if (mass >= b - 1e-12) break;
            set[v] = 1;
            mass += deg[v] / total;
        }
        s.local_search(std::move(set));
    }

    if (s.best.feasible) s.best.lower_bound = std::min(s.best.lower_bound, s.best.phi);
    return s.best;
}

CodeFunction::CodeFunction(std::shared_ptr<const CodeSpace> s, std::vector<double> v)
    : space(std::move(s)), values(std::move(v)) {
    if (!space || values.size() != space->vertex_count())
        throw ParameterError("CodeFunction: one value per codeword required");
    fhat = values;
    kernels::parallel::wht(fhat);
    const double inv = 1.0 / static_cast<double>(values.size());
    for (auto& x : fhat) x *= inv;
}

double CodeFunction::second_moment() const {
    double s = 0;
    for (double x : values) s += x * x;
    return s / static_cast<double>(values.size());
}

double influence(const CodeFunction& f, int point, int ell) {
    const auto& s = *f.space;
    if (point < 0 || point >= s.length()) throw ParameterError("influence: point out of range");
    double sum = 0;
    for (uint64_t beta = 0; beta < s.vertex_count(); ++beta)
        if (s.degree(beta) <= ell && ((s.min_weight_rep(beta) >> point) & 1u)) sum += f.fhat[beta] * f.fhat[beta];
    return sum;
}

double noise_stability(const CodeFunction& f, const ShortCodeGraph& g) {
    if (f.space->n() != g.n() || f.space->d() != g.d()) throw ParameterError("noise_stability: code mismatch");
    double sum = 0;
    for (size_t beta = 0; beta < f.fhat.size(); ++beta) sum += g.lambda[beta] * f.fhat[beta] * f.fhat[beta];
    return sum;
}

GaussianStability gaussian_stability(double rho, double mu) {
    if (!(rho >= 0 && rho <= 1)) throw ParameterError("gaussian_stability: rho must lie in [0, 1]");
    if (!(mu >= 0 && mu <= 1)) throw ParameterError("gaussian_stability: mu must lie in [0, 1]");
    if (mu == 0) return {0.0, true};
    if (mu == 1) return {1.0, true};
    if (rho == 0) return {mu * mu, false};
    if (rho == 1) return {mu, false};
    const double t = boost::math::quantile(boost::math::normal_distribution<double>(), mu);
    const double t2 = t * t;
    auto integrand = [t2](double theta) { return std::exp(-t2 / (1 + std::sin(theta))); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::asin(rho), 15, 1e-13);
    return {mu * mu + integral / (2 * std::numbers::pi), false};
}

MisAudit mis_audit(const CodeFunction& f, const ShortCodeGraph& g, double tau) {
    if (!(tau > 0 && tau < 1)) throw ParameterError("mis_audit: tau must lie in (0, 1)");
    MisAudit a;
    a.ell = static_cast<int>(std::floor(std::log2(1 / tau)));
    for (int p = 0; p < f.space->length(); ++p) a.max_influence = std::max(a.max_influence, influence(f, p, a.ell));
    a.hypothesis_met = a.max_influence <= tau;
    a.mu = f.mean();
    a.lhs = noise_stability(f, g);
    a.rhs_main = gaussian_stability(g.rho, std::clamp(a.mu, 0.0, 1.0)).value;
    a.slack = a.lhs - a.rhs_main;
    a.status = a.hypothesis_met ? "ok" : "hypothesis not met";
    return a;
}

double boolean_noise_stability(std::span<const double> values, double rho) {
    if (!(rho >= 0 && rho <= 1)) throw ParameterError("boolean_noise_stability: rho must lie in [0, 1]");
    if (values.empty() || !std::has_single_bit(values.size()) || values.size() > (size_t{1} << 20))
        throw ParameterError("boolean_noise_stability: need 2^n values with n <= 20");
    std::vector<double> fhat(values.begin(), values.end());
    kernels::parallel::wht(fhat);
    const double inv = 1.0 / static_cast<double>(values.size());
    const double r = 1 - 2 * rho;
    double sum = 0;
    for (size_t s = 0; s < fhat.size(); ++s) {
        const double c = fhat[s] * inv;
        sum += kernels::ipow(r, std::popcount(s)) * c * c;
    }
    return sum;
}

}  // namespace derand
