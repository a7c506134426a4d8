#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "derand/errors.hpp"
#include "derand/gf2m.hpp"
#include "derand/pseudorandom.hpp"
#include "doctest.h"

using namespace derand;

namespace {

// Polynomial remainder over F2 (bit i = coefficient of x^i).
uint64_t poly_mod(uint64_t a, uint64_t m) {
    const int dm = 63 - __builtin_clzll(m);
    while (a && 63 - __builtin_clzll(a) >= dm) a ^= m << ((63 - __builtin_clzll(a)) - dm);
    return a;
}

SeedBits index_to_bits(uint64_t idx, size_t nbits) {
    SeedBits s(nbits);
    for (size_t i = 0; i < nbits; ++i) s[i] = (idx >> (nbits - 1 - i)) & 1u;
    return s;
}

// Oracle: carry-less product reduced afterwards.
uint64_t slow_mul(uint64_t a, uint64_t b, uint64_t m) {
    uint64_t r = 0;
    for (int i = 0; i < 32; ++i)
        if ((b >> i) & 1u) r ^= a << i;
    return poly_mod(r, m);
}

}  // namespace

TEST_CASE("field moduli are irreducible") {
    for (int m = 1; m <= BinaryField::kMaxDegree; ++m) {
        const uint64_t f = irreducible_modulus(m);
        CHECK(63 - __builtin_clzll(f) == m);
        bool irreducible = true;
        // Trial division by every polynomial of degree 1..m/2.
        for (uint64_t g = 2; g < (uint64_t{1} << (m / 2 + 1)); ++g)
            if (poly_mod(f, g) == 0) irreducible = false;
        CHECK_MESSAGE(irreducible, "degree ", m);
    }
}

TEST_CASE("field multiplication matches reduction oracle and has inverses") {
    std::mt19937_64 rng(9);
    for (int m : {1, 2, 3, 5, 8, 13, 24}) {
        const BinaryField f(m);
        for (int trial = 0; trial < 200; ++trial) {
            const uint64_t a = rng() & (f.size() - 1), b = rng() & (f.size() - 1);
            CHECK(f.mul(a, b) == slow_mul(a, b, f.modulus()));
        }
    }
    const BinaryField f(4);
    for (uint64_t a = 1; a < 16; ++a) {
        int inverses = 0;
        for (uint64_t b = 1; b < 16; ++b) inverses += f.mul(a, b) == 1;
        CHECK(inverses == 1);
    }
}

TEST_CASE("seed hex parsing") {
    const auto bits = parse_seed_hex("a", 3);
    CHECK(bits == SeedBits{1, 0, 1});
    CHECK(format_seed_hex(bits) == "a");
    CHECK_THROWS_AS(parse_seed_hex("b", 3), SeedError);  // padding bit set
    CHECK_THROWS_AS(parse_seed_hex("ab", 3), SeedError);
    CHECK_THROWS_AS(parse_seed_hex("g", 4), SeedError);
    CHECK(parse_seed_hex("0x0f", 8) == SeedBits{0, 0, 0, 0, 1, 1, 1, 1});
    CHECK(read_bits(SeedBits{1, 1, 0}, 0, 3) == 6);
}

TEST_CASE("pairwise hash family") {
    SUBCASE("single bucket is constant") {
        const PairwiseHashFamily fam(8, 1);
        for (uint64_t s = 0; s < (uint64_t{1} << fam.seed_bits()); ++s)
            for (uint32_t b : fam.function(s)) CHECK(b == 0);
    }
    SUBCASE("exact pair uniformity n=8 t=4") {
        const PairwiseHashFamily fam(8, 4);
        const uint64_t seeds = uint64_t{1} << fam.seed_bits();
        std::map<std::tuple<int, int, uint32_t, uint32_t>, uint64_t> counts;
        for (uint64_t s = 0; s < seeds; ++s) {
            const auto h = pairwise_hash_sample(fam, index_to_bits(s, fam.seed_bits()));
            CHECK(h == fam.function(s));
            for (int i = 0; i < 8; ++i)
                for (int j = i + 1; j < 8; ++j) ++counts[{i, j, h[i], h[j]}];
        }
        CHECK(counts.size() == 28 * 16);
        for (const auto& [k, c] : counts) CHECK(c * 16 == seeds);
    }
    SUBCASE("non power-of-two domain, larger range") {
        const PairwiseHashFamily fam(5, 8);
        const uint64_t seeds = uint64_t{1} << fam.seed_bits();
        std::map<std::tuple<int, int, uint32_t, uint32_t>, uint64_t> counts;
        for (uint64_t s = 0; s < seeds; ++s) {
            const auto h = fam.function(s);
            for (int i = 0; i < 5; ++i)
                for (int j = i + 1; j < 5; ++j) ++counts[{i, j, h[i], h[j]}];
        }
        for (const auto& [k, c] : counts) CHECK(c * 64 == seeds);
        CHECK(counts.size() == 10 * 64);
    }
    SUBCASE("determinism and errors") {
        const PairwiseHashFamily fam(8, 4);
        const auto seed = parse_seed_hex("5c", fam.seed_bits());
        CHECK(pairwise_hash_sample(fam, seed) == pairwise_hash_sample(fam, seed));
        CHECK_THROWS_AS(pairwise_hash_sample(fam, SeedBits(3)), SeedError);
        CHECK_THROWS_AS(PairwiseHashFamily(8, 3), ParameterError);
    }
}

namespace {

// Checks every restriction to <= k coordinates is uniform over the full seed space.
bool kwise_uniform_by_enumeration(const KWiseSource& src, int k) {
    const uint64_t seeds = uint64_t{1} << src.seed_bits();
    std::vector<uint64_t> outs;
    for (uint64_t s = 0; s < seeds; ++s) {
        const auto x = kwise_sample(src, index_to_bits(s, src.seed_bits()));
        uint64_t w = 0;
        for (size_t i = 0; i < x.size(); ++i) w |= uint64_t{x[i] == -1} << i;
        outs.push_back(w);
    }
    const uint64_t n = src.n();
    for (uint64_t sub = 1; sub < (uint64_t{1} << n); ++sub) {
        const int sz = __builtin_popcountll(sub);
        if (sz > k) continue;
        std::map<uint64_t, uint64_t> joint;
        for (uint64_t w : outs) ++joint[w & sub];
        if (joint.size() != (uint64_t{1} << sz)) return false;
        for (const auto& [v, c] : joint)
            if (c << sz != seeds) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("k-wise source") {
    CHECK(kwise_uniform_by_enumeration(KWiseSource(8, 4), 4));
    CHECK(kwise_uniform_by_enumeration(KWiseSource(8, 1), 1));
    CHECK(kwise_uniform_by_enumeration(KWiseSource(6, 6), 6));
    CHECK(kwise_uniform_by_enumeration(KWiseSource(5, 3), 3));
    CHECK(KWiseSource(8, 20).k_effective() == 8);
    CHECK(kwise_uniform_by_enumeration(KWiseSource(4, 20), 4));
    // Order 2 at n=8 has a 4-dimensional image, too small for 4-wise independence.
    CHECK_FALSE(kwise_uniform_by_enumeration(KWiseSource(8, 2), 4));

    const KWiseSource src(8, 4);
    CHECK(src.seed_bits() == 12);
    const auto seed = parse_seed_hex("9f1", 12);
    CHECK(kwise_sample(src, seed) == kwise_sample(src, seed));
    CHECK(kwise_sample(src, SeedBits(12, 0)) == SignVector(8, 1));
    CHECK_THROWS_AS(kwise_sample(src, SeedBits(11)), SeedError);
}

TEST_CASE("k-wise exact law equals uniform on the image subspace") {
    for (auto [n, k] : std::vector<std::pair<int, int>>{{8, 2}, {8, 4}, {7, 3}, {6, 6}}) {
        const KWiseSource src(n, k);
        const uint64_t seeds = uint64_t{1} << src.seed_bits();
        std::map<uint64_t, uint64_t> law;
        for (uint64_t s = 0; s < seeds; ++s) {
            const auto bits = src.output_bits(index_to_bits(s, src.seed_bits()));
            uint64_t w = 0;
            for (size_t i = 0; i < bits.size(); ++i) w |= uint64_t{bits[i]} << i;
            ++law[w];
        }
        const auto basis = src.image_basis();
        CHECK(law.size() == (uint64_t{1} << basis.rank()));
        for (const auto& [w, c] : law) {
            CHECK(basis.contains(w));
            CHECK(c * law.size() == seeds);
        }
    }
}

TEST_CASE("generator_parameters schedule") {
    const auto p = generator_parameters(2, 0.5, 64);
    CHECK(p.t_schedule == 256);
    CHECK(p.t == 256);
    CHECK(p.delta == doctest::Approx(1.0 / 4096).epsilon(1e-15));
    CHECK(p.k_mask == 4);
    CHECK(p.on_schedule);

    const auto q = generator_parameters(1, 0.5, 64);
    CHECK(q.t == 64);
    CHECK(q.delta == doctest::Approx(std::pow(0.5, 4) / 64.0));

    // k_h schedule: ceil(c ln^2(1/delta) / delta^2) with natural log, c = 4.
    const double d = 1.0 / 4096;
    CHECK(p.k_h_schedule == std::ceil(4 * std::log(1 / d) * std::log(1 / d) / (d * d)));
    CHECK(p.k_h == 64);

    CHECK(generator_parameters(1, 0.1, 64).t_schedule == 1600);
    CHECK(generator_parameters(1, 0.1, 64).t == 2048);

    CHECK_THROWS_AS(generator_parameters(1, 1.0, 8), ParameterError);
    CHECK_THROWS_AS(generator_parameters(1, 0.0, 8), ParameterError);
    CHECK_THROWS_AS(generator_parameters(0, 0.5, 8), ParameterError);

    const auto o = generator_parameters(1, 0.5, 8, 4, {.t = 2, .delta = 0.25, .k_h = 2});
    CHECK_FALSE(o.on_schedule);
    CHECK(o.t == 2);
    CHECK(o.k_h == 2);
    // hash over GF(2^3): 6 bits; inner: 2 coefficients of 3 bits; mask: 2 of 3 bits.
    CHECK(o.seed_bits_total == 6 + 2 * 6 + 6);
}

TEST_CASE("generator_parameters is monotone in eps") {
    for (int ell = 1; ell <= 3; ++ell)
        for (uint64_t n : {8u, 100u, 5000u}) {
            GeneratorParameters prev{};
            bool first = true;
            for (double eps = 0.95; eps > 0.02; eps *= 0.9) {
                const auto p = generator_parameters(ell, eps, n);
                if (!first) {
                    CHECK(p.t >= prev.t);
                    CHECK(p.k_h >= prev.k_h);
                    CHECK(p.seed_bits_total >= prev.seed_bits_total);
                }
                prev = p;
                first = false;
            }
        }
}

TEST_CASE("hashing generator composition") {
    SUBCASE("t=1 and zero mask seed gives the inner sample") {
        const auto p = generator_parameters(1, 0.5, 8, 4, {.t = 1, .k_h = 3});
        const HashingGenerator gen(p);
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            SeedBits seed(gen.seed_bits(), 0);
            for (size_t i = p.hash_seed_bits; i < p.hash_seed_bits + p.inner_seed_bits; ++i) seed[i] = rng() & 1u;
            const SeedBits inner_seed(seed.begin() + p.hash_seed_bits, seed.begin() + p.hash_seed_bits + p.inner_seed_bits);
            CHECK(hashing_generator_sample(gen, seed) == kwise_sample(gen.inner(), inner_seed));
        }
    }
    SUBCASE("replay and malformed seeds") {
        const auto p = generator_parameters(1, 0.5, 8, 4, {.t = 2, .k_h = 2});
        const HashingGenerator gen(p);
        SeedBits seed(gen.seed_bits());
        for (size_t i = 0; i < seed.size(); ++i) seed[i] = (i * 7 + 3) % 5 < 2;
        CHECK(gen.sample(seed) == gen.sample(seed));
        CHECK_THROWS_AS(gen.sample(SeedBits(gen.seed_bits() + 1)), SeedError);
    }
    SUBCASE("coordinate rule: inner value at bucket position times mask") {
        const auto p = generator_parameters(2, 0.5, 8, 4, {.t = 4, .k_h = 2});
        const HashingGenerator gen(p);
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 50; ++trial) {
            SeedBits seed(gen.seed_bits());
            for (auto& b : seed) b = rng() & 1u;
            const auto out = gen.sample(seed);
            const SeedBits hs(seed.begin(), seed.begin() + p.hash_seed_bits);
            const auto h = pairwise_hash_sample(gen.hash(), hs);
            const size_t moff = p.hash_seed_bits + p.t * p.inner_seed_bits;
            const auto mask = kwise_sample(gen.mask(), SeedBits(seed.begin() + moff, seed.end()));
            std::vector<int> fill(p.t, 0);
            for (size_t i = 0; i < 8; ++i) {
                const size_t off = p.hash_seed_bits + h[i] * p.inner_seed_bits;
                const auto inner = kwise_sample(gen.inner(), SeedBits(seed.begin() + off, seed.begin() + off + p.inner_seed_bits));
                CHECK(out[i] == inner[fill[h[i]]++] * mask[i]);
            }
        }
    }
}

TEST_CASE("full generator output is 2ell-wise independent (seed enumeration)") {
    const auto p = generator_parameters(1, 0.5, 8, 4, {.t = 2, .k_h = 1});
    const HashingGenerator gen(p);
    REQUIRE(gen.seed_bits() <= 22);
    const uint64_t seeds = uint64_t{1} << gen.seed_bits();
    std::vector<uint64_t> outs;
    outs.reserve(seeds);
    for (uint64_t s = 0; s < seeds; ++s) {
        const auto x = gen.sample(index_to_bits(s, gen.seed_bits()));
        uint64_t w = 0;
        for (size_t i = 0; i < 8; ++i) w |= uint64_t{x[i] == -1} << i;
        outs.push_back(w);
    }
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) {
            uint64_t c[4] = {0, 0, 0, 0};
            for (uint64_t w : outs) ++c[((w >> i) & 1u) * 2 + ((w >> j) & 1u)];
            for (uint64_t v : c) CHECK(v * 4 == seeds);
        }
}

TEST_CASE("conditional basis matches the law for a fixed hash") {
    const auto p = generator_parameters(1, 0.5, 8, 4, {.t = 2, .k_h = 2});
    const HashingGenerator gen(p);
    const size_t rest = gen.seed_bits() - p.hash_seed_bits;
    for (uint64_t hs : {0ull, 5ull, 37ull}) {
        const auto h = gen.hash_function(hs);
        const auto basis = gen.conditional_basis(h);
        std::set<uint64_t> support;
        for (uint64_t r = 0; r < (uint64_t{1} << rest); ++r) {
            SeedBits seed = index_to_bits(hs, p.hash_seed_bits);
            const auto tail = index_to_bits(r, rest);
            seed.insert(seed.end(), tail.begin(), tail.end());
            const auto x = gen.sample(seed);
            uint64_t w = 0;
            for (size_t i = 0; i < 8; ++i) w |= uint64_t{x[i] == -1} << i;
            support.insert(w);
            CHECK(basis.contains(w));
        }
        CHECK(support.size() == (uint64_t{1} << basis.rank()));
    }
}

TEST_CASE("halfspace error of a k-wise source") {
    const KWiseSource full(6, 6);
    const std::vector<double> w{1, 2, -1, 0.5, 3, 1};
    CHECK(halfspace_error(full, w, 0.7) == 0.0);
    const KWiseSource weak(6, 1);
    const std::vector<double> ones(6, 1.0);
    // Oracle: enumerate seeds of the weak source directly.
    uint64_t hit = 0, seeds = uint64_t{1} << weak.seed_bits();
    for (uint64_t s = 0; s < seeds; ++s) {
        const auto x = kwise_sample(weak, index_to_bits(s, weak.seed_bits()));
        double v = 0;
        for (int xi : x) v += xi;
        hit += v >= 6;
    }
    CHECK(halfspace_error(weak, ones, 6) == doctest::Approx(std::abs(1.0 / 64 - double(hit) / seeds)));
}
