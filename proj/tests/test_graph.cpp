#include <algorithm>
#include <bit>
#include <boost/math/special_functions/owens_t.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "derand/errors.hpp"
#include "derand/graph.hpp"
#include "derand/reed_muller.hpp"
#include "doctest.h"

using namespace derand;

namespace {

int parity(uint64_t x) { return std::popcount(x) & 1; }

// Oracle step law: enumerate every ordered tuple of at most M_max flats.
std::map<uint64_t, double> step_law_oracle(int n, int d, double eps) {
    const auto flats = min_weight_codewords(n, d);
    const double mean = eps * std::ldexp(1.0, d - 1);
    const int mmax = static_cast<int>(std::floor(16 * eps * std::ldexp(1.0, d) + 1e-9));
    std::vector<double> pois(mmax + 1);
    double norm = 0;
    for (int m = 0; m <= mmax; ++m) norm += pois[m] = std::exp(-mean) * std::pow(mean, m) / std::tgamma(m + 1.0);
    std::map<uint64_t, double> law;
    std::map<uint64_t, double> layer{{0, 1.0}};  // law of the sum of m flats
    for (int m = 0; m <= mmax; ++m) {
        for (auto [z, p] : layer) law[z] += pois[m] / norm * p;
        std::map<uint64_t, double> next;
        for (auto [z, p] : layer)
            for (const auto& f : flats) next[z ^ f.word()] += p / flats.size();
        layer.swap(next);
    }
    return law;
}

struct WalkSampler {
    std::vector<uint64_t> flats;
    double mean;
    int mmax;
    std::mt19937_64 rng;

    WalkSampler(int n, int d, double eps, uint64_t seed) : rng(seed) {
        for (const auto& f : min_weight_codewords(n, d)) flats.push_back(f.word());
        mean = eps * std::ldexp(1.0, d - 1);
        mmax = static_cast<int>(std::floor(16 * eps * std::ldexp(1.0, d) + 1e-9));
    }

    uint64_t operator()() {
        std::poisson_distribution<int> pois(mean);
        int m;
        do m = pois(rng);
        while (m > mmax);
        std::uniform_int_distribution<size_t> pick(0, flats.size() - 1);
        uint64_t z = 0;
        for (int i = 0; i < m; ++i) z ^= flats[pick(rng)];
        return z;
    }
};

std::vector<double> random_values(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Direct E_x f(x) (G f)(x) with (G f)(x) = sum_z step(z) f(x + z).
double direct_stability(const CodeFunction& f, const ShortCodeGraph& g) {
    const uint64_t V = g.vertex_count();
    double s = 0;
    for (uint64_t x = 0; x < V; ++x) {
        double gf = 0;
        for (uint64_t z = 0; z < V; ++z) gf += g.step[z] * f.values[x ^ z];
        s += f.values[x] * gf;
    }
    return s / static_cast<double>(V);
}

WeightedGraph cycle4() {
    WeightedGraph g(4);
    for (int i = 0; i < 4; ++i) g.set_weight(i, (i + 1) % 4, 1);
    return g;
}

}  // namespace

TEST_CASE("affine shifts") {
    std::mt19937_64 rng(1);
    const auto v = BitVector::from_word(4, rng() & 0xFFFF);
    CHECK(affine_shift(v, 0) == v);
    for (uint32_t b = 0; b < 16; ++b) {
        CHECK(affine_shift(affine_shift(v, b), b) == v);
        CHECK(affine_shift(v, b).word() == affine_shift_word(v.word(), 4, b));
        CHECK(affine_shift(v, b).weight() == v.weight());
        CHECK(affine_shift_word(0xFFFF, 4, b) == 0xFFFF);
        CHECK(affine_shift_word(0, 4, b) == 0);
    }
    // Point x of the result holds the old value at x + b.
    const auto e3 = BitVector::from_word(3, 1u << 3);
    CHECK(affine_shift(e3, 5).word() == (1u << (3 ^ 5)));
    CHECK_THROWS_AS(affine_shift(e3, 8), ParameterError);
    // Shifts preserve RM(4, 2).
    const CodeSpace s(4, 2);
    for (uint64_t m = 0; m < s.vertex_count(); m += 37)
        for (uint32_t b = 0; b < 16; ++b) CHECK_NOTHROW(s.message(affine_shift_word(s.word(m), 4, b)));
}

TEST_CASE("code space decoding, characters and cosets") {
    const CodeSpace s(4, 2);
    CHECK(s.k() == 11);
    for (uint64_t m = 0; m < s.vertex_count(); ++m) {
        REQUIRE(s.message(s.word(m)) == m);
        REQUIRE(s.word(m) == encode_message(s.code(), m).word());
    }
    CHECK_THROWS_AS(s.message(1), ParameterError);  // weight 1 is not in RM(4,2)

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const uint64_t alpha = rng() & 0xFFFF;
        uint64_t beta = 0;
        for (int j = 0; j < s.k(); ++j)
            if (parity(s.code().rows[j].word() & alpha)) beta |= uint64_t{1} << (s.k() - 1 - j);
        CHECK(s.character(alpha) == beta);
        const auto a = BitVector::from_word(4, alpha);
        CHECK(s.degree(beta) == coset_degree(a, 4, 2).value);
        CHECK(s.canonical_rep(beta) == make_character_index(a, 4, 2).alpha.word());
        CHECK(std::popcount(s.min_weight_rep(beta)) == s.degree(beta));
        CHECK(s.character(s.min_weight_rep(beta)) == beta);
    }
}

TEST_CASE("build validates its parameters") {
    CHECK_THROWS_AS(build_short_code_graph(3, 1, 0.125), ParameterError);
    CHECK_THROWS_AS(build_short_code_graph(3, 1, -0.1), ParameterError);
    CHECK_THROWS_AS(build_short_code_graph(3, 1, 1.0, {EdgeFilter::Auto, true}), ParameterError);
    CHECK_NOTHROW(build_short_code_graph(3, 1, 0.2, {EdgeFilter::Auto, true}));
    CHECK_THROWS_AS(build_short_code_graph(7, 1, 0.1), ParameterError);
}

TEST_CASE("step law equals tuple enumeration") {
    for (auto [n, d, eps] : {std::tuple{3, 1, 0.1}, std::tuple{4, 2, 0.05}, std::tuple{3, 2, 0.07}}) {
        const auto g = build_short_code_graph(n, d, eps);
        const auto oracle = step_law_oracle(n, d, eps);
        double total = 0;
        for (uint64_t z = 0; z < g.vertex_count(); ++z) {
            const uint64_t w = g.space->word(z);
            const double expect = oracle.count(w) ? oracle.at(w) : 0.0;
            CHECK(g.step[z] == doctest::Approx(expect).epsilon(1e-12).scale(1));
            total += g.step[z];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        CHECK_FALSE(g.filter_applied);
    }
}

TEST_CASE("eigenvalue basics") {
    const auto g = build_short_code_graph(4, 2, 0.1);
    CHECK(g.lambda[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (double l : g.lambda) CHECK(std::abs(l) <= 1 + 1e-12);
    CHECK(eigenvalue(g, BitVector(4)) == doctest::Approx(1.0).epsilon(1e-13));
    // Characters in the dual code are trivial on the code.
    for (const auto& y : enumerate_codewords(dual_code(4, 2))) CHECK(eigenvalue(g, y) == doctest::Approx(1.0));
    std::mt19937_64 rng(3);
    const auto dual = enumerate_codewords(dual_code(4, 2));
    for (int t = 0; t < 30; ++t) {
        const auto a = BitVector::from_word(4, rng() & 0xFFFF);
        const auto& y = dual[rng() % dual.size()];
        CHECK(eigenvalue(g, a) == eigenvalue(g, a ^ y));
        CHECK(eigenvalue(g, make_character_index(a, 4, 2)) == eigenvalue(g, a));
    }
}

TEST_CASE("eigenvalues match the Poisson closed form up to truncation") {
    for (double eps : {0.05, 0.1}) {
        const auto g = build_short_code_graph(4, 2, eps);
        const auto flats = min_weight_codewords(4, 2);
        const double mean = eps * 2;
        double tail = 0;  // P[Poisson(mean) > M_max]
        {
            double head = 0;
            for (int m = 0; m <= g.max_steps; ++m) head += std::exp(-mean) * std::pow(mean, m) / std::tgamma(m + 1.0);
            tail = 1 - head;
        }
        std::mt19937_64 rng(4);
        for (int t = 0; t < 50; ++t) {
            const uint64_t alpha = t < 16 ? (uint64_t{1} << t) : (rng() & 0xFFFF);
            double q = 0;
            for (const auto& f : flats) q += parity(f.word() & alpha) ? -1.0 : 1.0;
            q /= flats.size();
            const double closed = std::exp(mean * (q - 1));
            CHECK(std::abs(eigenvalue(g, BitVector::from_word(4, alpha)) - closed) <= 2 * tail + 1e-12);
        }
        // Low-degree profile: every character of degree <= 2 is within 0.05 of rho^k.
        size_t checked = 0;
        for (const auto& r : spectrum(g)) {
            if (r.degree > 2) continue;
            ++checked;
            CHECK(std::abs(r.lambda - std::pow(g.rho, r.degree)) <= 0.05);
        }
        CHECK(checked == 1 + 16 + 120);
    }
}

TEST_CASE("eigenvalue spot values match a simulated walk") {
    const auto g = build_short_code_graph(4, 2, 0.1);
    WalkSampler walk(4, 2, 0.1, 99);
    const std::vector<uint64_t> alphas{0x1, 0x3, 0x8001, 0x0116, 0x7FFE};
    std::vector<double> sum(alphas.size(), 0);
    const int steps = 1000000;
    for (int i = 0; i < steps; ++i) {
        const uint64_t z = walk();
        for (size_t a = 0; a < alphas.size(); ++a) sum[a] += parity(z & alphas[a]) ? -1.0 : 1.0;
    }
    for (size_t a = 0; a < alphas.size(); ++a)
        CHECK(std::abs(sum[a] / steps - eigenvalue(g, BitVector::from_word(4, alphas[a]))) < 0.006);
}

TEST_CASE("edge filter") {
    // At d = 1 every nonzero step has weight N/2: the filtered graph is all self-loops.
    const auto g = build_short_code_graph(3, 1, 0.1, {EdgeFilter::Always, false});
    CHECK(g.filter_applied);
    CHECK(g.step[0] == 1.0);
    CHECK(g.rejected_mass > 0);
    for (double l : g.lambda) CHECK(l == 1.0);
    // d = 4 at n = 4: steps are point flips, sums of two or more are dropped.
    const auto h = build_short_code_graph(4, 4, 0.05);
    CHECK(h.filter_applied);
    for (uint64_t z = 0; z < h.vertex_count(); ++z)
        if (h.step[z] > 0) CHECK(std::popcount(h.space->word(z)) <= 1);
    const auto a = spectrum_audit(h, 0.1);
    CHECK(a.adjacency_ok);
    CHECK(a.min_adjacent_inner == 14);
}

TEST_CASE("spectrum audit") {
    SUBCASE("zero noise is degenerate and passes") {
        const auto g = build_short_code_graph(4, 2, 0.0);
        for (double l : g.lambda) CHECK(l == 1.0);
        const auto a = spectrum_audit(g, 0.05);
        CHECK(a.degenerate);
        CHECK(a.pass);
        CHECK(a.expected_inner == 16);
        CHECK_FALSE(a.mu0_fit.has_value());
    }
    SUBCASE("full table at (4,2), eps = 0.1") {
        const auto g = build_short_code_graph(4, 2, 0.1);
        const auto a = spectrum_audit(g, 0.5);
        CHECK(a.rows.size() == 2048);
        CHECK(a.degree_limit == doctest::Approx(2.0));
        CHECK(a.low_degree_checked == 17);  // degrees 0 and 1
        CHECK(a.low_degree_ok);
        // E<u,v> = N - 2 E wt(z), each point flipped with probability (1 - lambda_{e_p}) / 2.
        double flip = 0;
        for (int p = 0; p < 16; ++p) flip += (1 - eigenvalue(g, BitVector::from_word(4, uint64_t{1} << p))) / 2;
        CHECK(a.expected_inner == doctest::Approx(16 - 2 * flip).epsilon(1e-12));
        CHECK(a.expected_inner_ok);
        CHECK(a.min_adjacent_inner < 12);  // unfiltered: weight-4 flats give <u,v> = 8
        CHECK_FALSE(a.filter_applied);
        CHECK(a.pass);
        REQUIRE(a.delta_fit.has_value());
        // The fit satisfies its own definition.
        for (const auto& r : a.rows)
            if (r.degree < *a.delta_fit * *a.delta_fit * 8) CHECK(r.gap <= *a.delta_fit + 1e-15);
        CHECK(*a.delta_fit * *a.delta_fit * 8 >= 1 - 1e-12);
        for (size_t k = 0; k < a.gap_by_degree.size(); ++k) CHECK(a.gap_by_degree[k] >= 0);
        if (a.mu0_fit)
            for (const auto& r : a.rows)
                CHECK(r.lambda <= std::max(std::pow(g.rho, r.degree / 2.0),
                                           std::pow(g.rho, *a.mu0_fit * 4)) + 1e-12);
    }
    SUBCASE("tiny delta flags violations") {
        const auto g = build_short_code_graph(4, 2, 0.1);
        const auto a = spectrum_audit(g, 1e-6);
        CHECK(a.low_degree_checked == 1);
        CHECK(a.low_degree_ok);
        const auto b = spectrum_audit(g, 1.2);  // window reaches degree 11 where gaps are larger than 0
        CHECK(b.low_degree_checked > 17);
    }
}

TEST_CASE("affine shifts are automorphisms") {
    for (auto [n, d] : {std::pair{3, 1}, std::pair{4, 2}}) {
        const auto g = build_short_code_graph(n, d, 0.1);
        const uint64_t V = g.vertex_count();
        for (uint32_t b = 0; b < (1u << n); ++b) {
            std::vector<uint64_t> perm(V);
            for (uint64_t m = 0; m < V; ++m) perm[m] = g.space->shift_message(m, b);
            bool same = true;
            for (uint64_t u = 0; u < V; ++u)
                for (uint64_t v = 0; v < V; ++v) same = same && g.weight(perm[u], perm[v]) == g.weight(u, v);
            CHECK(same);
        }
    }
}

TEST_CASE("orbits") {
    // Oracle: orbits of BitVector codewords under affine_shift.
    for (auto [n, d] : {std::pair{3, 1}, std::pair{3, 2}, std::pair{4, 2}}) {
        const auto words = enumerate_codewords(rm_generator_matrix(n, d));
        std::set<std::set<uint64_t>> oracle;
        for (const auto& w : words) {
            std::set<uint64_t> orb;
            for (uint32_t b = 0; b < (1u << n); ++b) orb.insert(affine_shift(w, b).word());
            oracle.insert(orb);
        }
        const CodeSpace s(n, d);
        const auto o = orbits(s);
        CHECK(o.members.size() == oracle.size());
        size_t total = 0;
        for (size_t i = 0; i < o.members.size(); ++i) {
            std::set<uint64_t> orb;
            for (uint64_t m : o.members[i]) {
                orb.insert(s.word(m));
                CHECK(o.orbit_of[m] == i);
            }
            CHECK(oracle.count(orb) == 1);
            CHECK((1u << n) % o.members[i].size() == 0);
            if (i > 0) CHECK(o.members[i - 1][0] < o.members[i][0]);
            total += o.members[i].size();
        }
        CHECK(total == s.vertex_count());
        // Constants are singletons.
        CHECK(o.members[o.orbit_of[0]].size() == 1);
        CHECK(o.members[o.orbit_of[s.message((uint64_t{1} << (1 << n)) - 1)]].size() == 1);
    }
    // RM(3,1): two constants, and {l, l + 1} for the seven nonzero linear forms.
    CHECK(orbits(CodeSpace(3, 1)).members.size() == 9);
}

TEST_CASE("folding") {
    for (auto [n, d] : {std::pair{3, 1}, std::pair{4, 2}}) {
        const auto g = build_short_code_graph(n, d, 0.1);
        const auto f = fold(g);
        const int C = f.graph.size();
        const uint64_t V = g.vertex_count();
        // Oracle: sum over all parent edges.
        std::vector<double> full(static_cast<size_t>(C) * C, 0);
        for (uint64_t u = 0; u < V; ++u)
            for (uint64_t v = 0; v < V; ++v) full[f.orbits.orbit_of[u] * C + f.orbits.orbit_of[v]] += g.weight(u, v);
        for (int a = 0; a < C; ++a)
            for (int b = 0; b < C; ++b) CHECK(f.graph.weight(a, b) == doctest::Approx(full[a * C + b]).epsilon(1e-12));
        double parent = 0;
        for (double s : g.step) parent += s;
        CHECK(f.graph.total_weight() == doctest::Approx(parent).epsilon(1e-12));
        // Stationary law: orbit of a uniform codeword.
        const auto st = f.graph.stationary();
        for (int a = 0; a < C; ++a) {
            CHECK(f.stationary[a] == static_cast<double>(f.orbits.members[a].size()) / V);
            CHECK(st[a] == doctest::Approx(f.stationary[a]).epsilon(1e-12));
        }
    }
}

TEST_CASE("folded weights match a projected random walk") {
    const auto g = build_short_code_graph(3, 1, 0.1);
    const auto f = fold(g);
    const int C = f.graph.size();
    WalkSampler walk(3, 1, 0.1, 7);
    std::mt19937_64 rng(8);
    std::vector<double> freq(static_cast<size_t>(C) * C, 0);
    const int steps = 400000;
    for (int i = 0; i < steps; ++i) {
        const uint64_t u = rng() % g.vertex_count();
        const uint64_t v = u ^ g.space->message(walk());
        freq[f.orbits.orbit_of[u] * C + f.orbits.orbit_of[v]] += 1.0 / steps;
    }
    for (int a = 0; a < C; ++a)
        for (int b = 0; b < C; ++b) CHECK(std::abs(freq[a * C + b] - f.graph.weight(a, b)) < 0.005);
}

TEST_CASE("only self-loops fold to only self-loops") {
    const auto g = build_short_code_graph(3, 1, 0.1, {EdgeFilter::Always, false});
    const auto f = fold(g);
    for (int a = 0; a < f.graph.size(); ++a)
        for (int b = 0; b < f.graph.size(); ++b)
            if (a != b) CHECK(f.graph.weight(a, b) == 0.0);
}

TEST_CASE("conductance examples") {
    WeightedGraph two(2);
    two.set_weight(0, 1, 1);
    const std::vector<char> s0{1, 0};
    CHECK(conductance(two, s0) == 1.0);
    const std::vector<char> adj{1, 1, 0, 0};
    CHECK(conductance(cycle4(), adj) == 0.5);
    // A vertex with only a self-loop contributes nothing to the cut.
    WeightedGraph g(3);
    g.set_weight(0, 1, 1);
    g.set_weight(2, 2, 5);
    const std::vector<char> s{1, 1, 0};
    CHECK(conductance(g, s) == 0.0);
    CHECK_THROWS_AS(conductance(g, std::vector<char>{0, 0, 0}), ParameterError);
    CHECK_THROWS_AS(conductance(g, std::vector<char>{1, 1, 1}), ParameterError);
    CHECK_THROWS_AS(WeightedGraph(2, {0, 1, 2, 0}), ParameterError);
}

TEST_CASE("folding preserves conductance of orbit-respecting cuts") {
    const auto g = build_short_code_graph(4, 2, 0.1);
    const auto f = fold(g);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        std::vector<char> s(static_cast<size_t>(f.graph.size()));
        for (auto& x : s) x = rng() & 1;
        s[0] = 1;
        s[1] = 0;
        const double a = conductance(f.graph, s), b = conductance(g, lift_cut(f, s));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("balanced separator examples") {
    WeightedGraph k4(4);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) k4.set_weight(a, b, 1);
    auto r = balanced_separator_opt(k4, 0.5);
    CHECK(r.feasible);
    CHECK(r.optimal);
    CHECK(r.phi == doctest::Approx(2.0 / 3));
    CHECK(std::count(r.witness.begin(), r.witness.end(), 1) == 2);

    WeightedGraph two_parts(4);
    two_parts.set_weight(0, 1, 1);
    two_parts.set_weight(2, 3, 1);
    CHECK(balanced_separator_opt(two_parts, 0.5).phi == 0.0);

    CHECK(balanced_separator_opt(cycle4(), 0.5).phi == doctest::Approx(0.5));

    WeightedGraph heavy(3);
    heavy.set_weight(0, 0, 10);
    heavy.set_weight(0, 1, 1);
    heavy.set_weight(0, 2, 1);
    const auto inf = balanced_separator_opt(heavy, 0.5);
    CHECK_FALSE(inf.feasible);
    CHECK_THROWS_AS(balanced_separator_opt(heavy, 0.6), ParameterError);
}

TEST_CASE("balanced separator equals naive enumeration on folded graphs") {
    for (auto [n, d, b] : {std::tuple{3, 1, 0.2}, std::tuple{3, 1, 1.0 / 3}, std::tuple{4, 1, 0.25}, std::tuple{4, 1, 0.45}}) {
        const auto f = fold(build_short_code_graph(n, d, 0.1));
        const int C = f.graph.size();
        REQUIRE(C <= 20);
        double best = 1e300;
        bool found = false;
        for (uint64_t mask = 1; mask + 1 < (uint64_t{1} << C); ++mask) {
            double mass = 0;
            std::vector<char> s(C);
            for (int v = 0; v < C; ++v) {
                s[v] = (mask >> v) & 1u;
                if (s[v]) mass += f.stationary[v];
            }
            if (mass < b - 1e-12 || mass > 1 - b + 1e-12) continue;
            found = true;
            best = std::min(best, conductance(f.graph, s));
        }
        const auto r = balanced_separator_opt(f.graph, b);
        CHECK(r.feasible == found);
        if (found) {
            CHECK(r.phi == doctest::Approx(best).epsilon(1e-10));
            CHECK(conductance(f.graph, r.witness) == doctest::Approx(r.phi).epsilon(1e-12));
        }
    }
}

TEST_CASE("heuristic separator is feasible and its lower bound is valid") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 4; ++trial) {
        const int V = 14;
        WeightedGraph g(V);
        for (int a = 0; a < V; ++a)
            for (int b = a; b < V; ++b)
                if (u(rng) < 0.35 || b == a + 1) g.set_weight(a, b, u(rng));
        const auto exact = balanced_separator_opt(g, 0.3);
        SeparatorOptions opts;
        opts.brute_force_cap = 4;
        opts.rng_seed = 5 + trial;
        const auto h = balanced_separator_opt(g, 0.3, opts);
        REQUIRE(exact.feasible);
        REQUIRE(h.feasible);
        CHECK_FALSE(h.optimal);
        CHECK(h.method == "heuristic");
        CHECK(h.phi >= exact.phi - 1e-12);
        CHECK(h.lower_bound <= exact.phi + 1e-12);
        CHECK(conductance(g, h.witness) == doctest::Approx(h.phi).epsilon(1e-12));
        double mass = 0;
        const auto st = g.stationary();
        for (int v = 0; v < V; ++v)
            if (h.witness[v]) mass += st[v];
        CHECK(mass >= 0.3 - 1e-12);
        CHECK(mass <= 0.7 + 1e-12);
        // Supplying the optimum as a candidate recovers it.
        opts.candidates.push_back(exact.witness);
        CHECK(balanced_separator_opt(g, 0.3, opts).phi <= exact.phi + 1e-12);
    }
}

TEST_CASE("Fourier table and Parseval") {
    auto s = std::make_shared<const CodeSpace>(3, 1);
    const CodeFunction f(s, random_values(s->vertex_count(), 5));
    double parseval = 0;
    for (double c : f.fhat) parseval += c * c;
    CHECK(parseval == doctest::Approx(f.second_moment()).epsilon(1e-12));
    for (uint64_t beta = 0; beta < s->vertex_count(); ++beta) {
        double direct = 0;
        for (uint64_t m = 0; m < s->vertex_count(); ++m) direct += f.values[m] * (parity(beta & m) ? -1.0 : 1.0);
        CHECK(f.fhat[beta] == doctest::Approx(direct / s->vertex_count()).epsilon(1e-12));
    }
}

TEST_CASE("influence") {
    auto s = std::make_shared<const CodeSpace>(4, 2);
    const CodeFunction constant(s, std::vector<double>(s->vertex_count(), 0.7));
    for (int p = 0; p < 16; ++p) CHECK(influence(constant, p, 3) == 0.0);

    // Dictator on point p.
    for (int p : {0, 5, 15}) {
        std::vector<double> v(s->vertex_count());
        for (uint64_t m = 0; m < v.size(); ++m) v[m] = (s->word(m) >> p) & 1u ? 0.0 : 1.0;
        const CodeFunction dict(s, v);
        CHECK(influence(dict, p, 1) == doctest::Approx(0.25));
        CHECK(influence(dict, (p + 1) % 16, 1) == doctest::Approx(0.0));
    }

    // Total influence is at most ell E[f^2].
    const CodeFunction f(s, random_values(s->vertex_count(), 6));
    for (int ell = 0; ell <= 5; ++ell) {
        double total = 0;
        for (int p = 0; p < 16; ++p) total += influence(f, p, ell);
        CHECK(total <= ell * f.second_moment() + 1e-12);
    }
}

TEST_CASE("influence against a brute-force representative oracle") {
    auto s = std::make_shared<const CodeSpace>(3, 1);
    const CodeFunction f(s, random_values(s->vertex_count(), 7));
    // Min-weight, then lexicographically smallest alpha per coset, over all 2^8 alphas.
    std::map<uint64_t, uint64_t> rep;
    for (uint64_t alpha = 0; alpha < 256; ++alpha) {
        const uint64_t beta = s->character(alpha);
        auto it = rep.find(beta);
        if (it == rep.end() || std::popcount(alpha) < std::popcount(it->second) ||
            (std::popcount(alpha) == std::popcount(it->second) && lex_less_word(alpha, it->second)))
            rep[beta] = alpha;
    }
    for (int ell = 0; ell <= 4; ++ell)
        for (int p = 0; p < 8; ++p) {
            double expect = 0;
            for (auto [beta, a] : rep) {
                double c = 0;
                for (uint64_t m = 0; m < s->vertex_count(); ++m) c += f.values[m] * (parity(beta & m) ? -1.0 : 1.0);
                c /= s->vertex_count();
                if (std::popcount(a) <= ell && ((a >> p) & 1u)) expect += c * c;
            }
            CHECK(influence(f, p, ell) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("lifted functions have symmetric low-degree influences") {
    for (auto [n, d, max_ell] : {std::tuple{3, 1, 1}, std::tuple{4, 2, 3}}) {
        const auto g = build_short_code_graph(n, d, 0.1);
        const auto folded = fold(g);
        std::mt19937_64 rng(13);
        for (int t = 0; t < 3; ++t) {
            std::vector<char> s(folded.graph.size());
            for (auto& x : s) x = rng() & 1;
            const auto lifted = lift_cut(folded, s);
            const CodeFunction f(g.space, std::vector<double>(lifted.begin(), lifted.end()));
            for (int ell = 0; ell <= max_ell; ++ell) {
                const double i0 = influence(f, 0, ell);
                for (int p = 1; p < (1 << n); ++p) CHECK(std::abs(influence(f, p, ell) - i0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("noise stability") {
    for (auto [n, d] : {std::pair{3, 1}, std::pair{4, 2}, std::pair{3, 2}}) {
        const auto g = build_short_code_graph(n, d, 0.1);
        for (uint64_t seed = 0; seed < 5; ++seed) {
            const CodeFunction f(g.space, random_values(g.vertex_count(), 100 + seed));
            CHECK(std::abs(noise_stability(f, g) - direct_stability(f, g)) <= 1e-9);
        }
        const CodeFunction c(g.space, std::vector<double>(g.vertex_count(), 0.3));
        CHECK(noise_stability(c, g) == doctest::Approx(0.09).epsilon(1e-12));
    }
    const auto id = build_short_code_graph(3, 1, 0.0);
    const CodeFunction f(id.space, random_values(id.vertex_count(), 3));
    CHECK(noise_stability(f, id) == doctest::Approx(f.second_moment()).epsilon(1e-12));
}

TEST_CASE("gaussian stability") {
    CHECK(gaussian_stability(0.0, 0.3).value == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(gaussian_stability(1.0, 0.3).value == 0.3);
    CHECK(std::abs(gaussian_stability(0.5, 0.5).value - 1.0 / 3) <= 1e-12);
    CHECK(gaussian_stability(0.4, 0.0).degenerate);
    CHECK(gaussian_stability(0.4, 1.0).value == 1.0);
    CHECK_THROWS_AS(gaussian_stability(1.5, 0.5), ParameterError);
    CHECK_THROWS_AS(gaussian_stability(0.5, -0.1), ParameterError);

    // Orthant identity at mu = 1/2.
    for (double rho : {0.1, 0.3, 0.77, 0.99})
        CHECK(std::abs(gaussian_stability(rho, 0.5).value - (0.25 + std::asin(rho) / (2 * std::numbers::pi))) <= 1e-10);

    // Owen's T: P[X <= h, Y <= h] = Phi(h) - 2 T(h, sqrt((1 - rho) / (1 + rho))).
    for (double rho : {0.05, 0.2, 0.5, 0.8, 0.95})
        for (double mu : {0.02, 0.1, 0.35, 0.6, 0.9}) {
            const double h = [&] {
                // Phi^-1 by bisection, independent of the library quantile.
                double lo = -10, hi = 10;
                for (int i = 0; i < 200; ++i) {
                    const double mid = (lo + hi) / 2;
                    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < mu ? lo : hi) = mid;
                }
                return (lo + hi) / 2;
            }();
            const double expect = mu - 2 * boost::math::owens_t(h, std::sqrt((1 - rho) / (1 + rho)));
            CHECK(std::abs(gaussian_stability(rho, mu).value - expect) <= 1e-9);
            CHECK(gaussian_stability(rho, mu).value >= mu * mu - 1e-15);
        }
}

TEST_CASE("mis audit") {
    const auto g = build_short_code_graph(4, 2, 0.1);
    const CodeFunction c(g.space, std::vector<double>(g.vertex_count(), 0.4));
    const auto a = mis_audit(c, g, 0.1);
    CHECK(a.ell == 3);
    CHECK(a.hypothesis_met);
    CHECK(a.status == "ok");
    CHECK(a.lhs == doctest::Approx(0.16));
    CHECK(a.slack <= 1e-12);

    std::vector<double> v(g.vertex_count());
    for (uint64_t m = 0; m < v.size(); ++m) v[m] = (g.space->word(m) >> 3) & 1u ? 0.0 : 1.0;
    const auto dict = mis_audit(CodeFunction(g.space, v), g, 0.1);
    CHECK_FALSE(dict.hypothesis_met);
    CHECK(dict.status == "hypothesis not met");

    const auto folded = fold(g);
    std::vector<char> s(folded.graph.size(), 0);
    for (size_t i = 0; i < s.size(); i += 2) s[i] = 1;
    const auto lifted = lift_cut(folded, s);
    const auto cut = mis_audit(CodeFunction(g.space, std::vector<double>(lifted.begin(), lifted.end())), g, 0.05);
    CHECK(std::isfinite(cut.slack));
    CHECK(cut.max_influence >= 0);
}

TEST_CASE("boolean noise stability") {
    // Oracle: direct double sum with the kernel rho^{d_H} (1 - rho)^{n - d_H}.
    auto direct = [](const std::vector<double>& f, int n, double rho) {
        double s = 0;
        for (size_t x = 0; x < f.size(); ++x)
            for (size_t y = 0; y < f.size(); ++y) {
                const int dh = std::popcount(x ^ y);
                s += f[x] * f[y] * std::pow(rho, dh) * std::pow(1 - rho, n - dh);
            }
        return s / f.size();
    };
    std::vector<double> maj(32);
    for (size_t x = 0; x < 32; ++x) maj[x] = std::popcount(x) >= 3 ? 1.0 : 0.0;
    CHECK(boolean_noise_stability(maj, 0.5) == doctest::Approx(direct(maj, 5, 0.5)).epsilon(1e-12));
    CHECK(boolean_noise_stability(maj, 0.5) == doctest::Approx(0.25));
    for (double rho : {0.0, 0.1, 0.3, 0.8}) {
        const auto f = random_values(64, 9);
        CHECK(boolean_noise_stability(f, rho) == doctest::Approx(direct(f, 6, rho)).epsilon(1e-12));
        CHECK(boolean_noise_stability(maj, rho) == doctest::Approx(direct(maj, 5, rho)).epsilon(1e-12));
    }
    const std::vector<double> c(16, 0.3);
    CHECK(boolean_noise_stability(c, 0.2) == doctest::Approx(0.09));
    CHECK_THROWS_AS(boolean_noise_stability(std::vector<double>(6), 0.2), ParameterError);
}

TEST_CASE("spectrum csv") {
    const auto g = build_short_code_graph(3, 1, 0.1);
    const auto csv = spectrum_csv(g);
    CHECK(csv.rfind("coset_rep_hex,degree,lambda\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 16);
    CHECK(csv.find("\n00,0,") != std::string::npos);
    // The first degree-1 row is the indicator of point 7 (hex 01), the lex-smallest weight-1 word.
    const auto rows = spectrum(g);
    CHECK(rows[1].degree == 1);
    CHECK(rows[1].rep == (uint64_t{1} << 7));
}
