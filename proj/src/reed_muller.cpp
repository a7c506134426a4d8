#include "derand/reed_muller.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <unordered_set>

#include "derand/config.hpp"
#include "derand/errors.hpp"
#include "derand/gf2.hpp"

namespace derand {

namespace {

void check_n(int n) {
    if (n < 0 || n > kMaxRmVariables) throw ParameterError("Reed-Muller: n must lie in [0, 16]");
}

BitVector monomial_row(int n, MonomialMask mask) {
    BitVector row(n);
    const size_t len = size_t{1} << n;
    for (size_t p = 0; p < len; ++p)
        if ((p & mask) == mask) row.set(p, true);
    return row;
}

bool affine_form(uint64_t linear, bool constant, uint64_t point) {
    return (std::popcount(linear & point) & 1) ^ static_cast<int>(constant);
}

}  // namespace

uint64_t rm_dimension(int n, int d) {
    if (d < 0) return 0;
    uint64_t s = 0, c = 1;
    for (int i = 0; i <= std::min(d, n); ++i) {
        c = (i == 0) ? 1 : c * static_cast<uint64_t>(n - i + 1) / static_cast<uint64_t>(i);
        s += c;
    }
    return s;
}

std::vector<int> monomial_variables(int n, MonomialMask m) {
    std::vector<int> vars;
    for (int i = 1; i <= n; ++i)
        if ((m >> (n - i)) & 1u) vars.push_back(i);
    return vars;
}

RMCode rm_generator_matrix(int n, int d) {
    check_n(n);
    if (d < 0 || d > n) throw ParameterError("rm_generator_matrix: d must lie in [0, n]");

    std::vector<MonomialMask> masks;
    for (MonomialMask m = 0; m < (MonomialMask{1} << n); ++m)
        if (std::popcount(m) <= d) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [n](MonomialMask a, MonomialMask b) {
        const int da = std::popcount(a), db = std::popcount(b);
        if (da != db) return da < db;
        return monomial_variables(n, a) < monomial_variables(n, b);
    });

    RMCode code;
    code.n = n;
    code.d = d;
    code.monomials = masks;
    code.rows.reserve(masks.size());
    for (MonomialMask m : masks) code.rows.push_back(monomial_row(n, m));
    return code;
}

RMCode dual_code(int n, int d) {
    check_n(n);
    if (d < 0 || d > n) throw ParameterError("dual_code: d must lie in [0, n]");
    const int dd = n - d - 1;
    if (dd < 0) {
        RMCode zero;
        zero.n = n;
        zero.d = -1;
        return zero;
    }
    return rm_generator_matrix(n, dd);
}

BitVector encode_message(const RMCode& code, uint64_t message) {
    const size_t k = code.dimension();
    BitVector cw(code.n);
    for (size_t j = 0; j < k; ++j)
        if ((message >> (k - 1 - j)) & 1u) cw ^= code.rows[j];
    return cw;
}

void for_each_codeword(const RMCode& code, const std::function<void(uint64_t, const BitVector&)>& fn) {
    const size_t k = code.dimension();
    require_within_cap(std::ldexp(1.0, static_cast<int>(k)), "enumerate_codewords");

    // flip[j]: XOR of the rows selected by message bits 0..j.
    std::vector<BitVector> flip(k, BitVector(code.n));
    for (size_t j = 0; j < k; ++j) {
        if (j > 0) flip[j] = flip[j - 1];
        flip[j] ^= code.rows[k - 1 - j];
    }

    BitVector cw(code.n);
    const uint64_t total = uint64_t{1} << k;
    for (uint64_t m = 0; m < total; ++m) {
        fn(m, cw);
        if (m + 1 < total) cw ^= flip[static_cast<size_t>(std::countr_zero(m + 1))];
    }
}

std::vector<BitVector> enumerate_codewords(const RMCode& code) {
    std::vector<BitVector> out;
    for_each_codeword(code, [&](uint64_t, const BitVector& cw) { out.push_back(cw); });
    return out;
}

BitVector encode_polynomial(std::span<const std::vector<int>> monomials, int n) {
    check_n(n);
    std::set<MonomialMask> present;
    for (const auto& mono : monomials) {
        MonomialMask mask = 0;
        for (int v : mono) {
            if (v < 1 || v > n) throw ParameterError("encode_polynomial: variable index out of range");
            mask |= MonomialMask{1} << (n - v);
        }
        if (!present.erase(mask)) present.insert(mask);
    }
    BitVector out(n);
    for (MonomialMask m : present) out ^= monomial_row(n, m);
    return out;
}

bool verify_duality(int n, int d) {
    const RMCode code = rm_generator_matrix(n, d);
    const RMCode dual = dual_code(n, d);
    if (code.dimension() + dual.dimension() != code.length()) return false;
    for (const auto& a : code.rows)
        for (const auto& b : dual.rows)
            if (a.dot(b)) return false;
    return true;
}

CosetDegree coset_degree(const BitVector& alpha, int n, int d, uint64_t samples, std::mt19937_64* rng) {
    if (alpha.n() != n) throw ParameterError("coset_degree: alpha length does not match n");
    const RMCode dual = dual_code(n, d);
    const double count = std::ldexp(1.0, static_cast<int>(dual.dimension()));

    if (count <= static_cast<double>(enumeration_cap())) {
        int best = alpha.weight();
        for_each_codeword(dual, [&](uint64_t, const BitVector& y) { best = std::min(best, (alpha ^ y).weight()); });
        return {best, true};
    }
    if (samples == 0 || rng == nullptr) throw CapExceeded("coset_degree: dual code not enumerable", count, enumeration_cap());

    const size_t k = dual.dimension();
    int best = alpha.weight();
    for (uint64_t s = 0; s < samples; ++s) {
        BitVector y(n);
        for (size_t j = 0; j < k; ++j)
            if ((*rng)() & 1u) y ^= dual.rows[j];
        best = std::min(best, (alpha ^ y).weight());
    }
    return {best, false};
}

CharacterIndex make_character_index(const BitVector& alpha, int n, int d) {
    const RMCode dual = dual_code(n, d);
    gf2::Basis<BitVector> basis;
    for (const auto& r : dual.rows) basis.insert(r);
    CharacterIndex ci;
    ci.alpha = basis.reduce(alpha);
    ci.coset_degree = coset_degree(alpha, n, d).value;
    return ci;
}

BitVector sample_min_weight_codeword(int n, int d, std::mt19937_64& rng) {
    check_n(n);
    if (d < 1 || d > n) throw ParameterError("sample_min_weight_codeword: d must lie in [1, n]");

    constexpr int kMaxAttempts = 1'000'000;
    std::uniform_int_distribution<uint64_t> linear_dist(1, (uint64_t{1} << n) - 1);
    std::vector<uint64_t> linear;
    int attempts = 0;
    while (static_cast<int>(linear.size()) < d) {
        gf2::WordBasis basis;
        linear.clear();
        for (int j = 0; j < d; ++j) {
            const uint64_t a = linear_dist(rng);
            if (!basis.insert(a)) break;
            linear.push_back(a);
        }
        if (++attempts > kMaxAttempts) throw ConstructionError("sample_min_weight_codeword: rejection limit reached");
    }
    std::vector<bool> constants(d);
    for (int j = 0; j < d; ++j) constants[j] = rng() & 1u;

    BitVector out(n);
    for (uint64_t p = 0; p < (uint64_t{1} << n); ++p) {
        bool v = true;
        for (int j = 0; j < d && v; ++j) v = affine_form(linear[j], constants[j], p);
        out.set(p, v);
    }
    return out;
}

std::vector<BitVector> min_weight_codewords(int n, int d) {
    check_n(n);
    if (d < 0 || d > n) throw ParameterError("min_weight_codewords: d must lie in [0, n]");

    // Increasing tuples of independent linear parts; every flat is reached at least once.
    double tuples = 1;
    for (int j = 0; j < d; ++j) tuples *= std::ldexp(1.0, n) - std::ldexp(1.0, j);
    require_within_cap(tuples * std::ldexp(1.0, d), "min_weight_codewords");

    const uint64_t points = uint64_t{1} << n;
    std::unordered_set<BitVector> seen;
    std::vector<uint64_t> linear(d);

    std::function<void(int, gf2::WordBasis)> choose = [&](int j, gf2::WordBasis basis) {
        if (j == d) {
            for (uint64_t c = 0; c < (uint64_t{1} << d); ++c) {
                BitVector v(n);
                for (uint64_t p = 0; p < points; ++p) {
                    bool on = true;
                    for (int i = 0; i < d && on; ++i) on = affine_form(linear[i], (c >> i) & 1u, p);
                    v.set(p, on);
                }
                seen.insert(std::move(v));
            }
            return;
        }
        for (uint64_t a = (j == 0 ? 1 : linear[j - 1] + 1); a < points; ++a) {
            if (basis.contains(a)) continue;
            gf2::WordBasis next = basis;
            next.insert(a);
            linear[j] = a;
            choose(j + 1, next);
        }
    };
    choose(0, gf2::WordBasis{});

    std::vector<BitVector> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

}  // namespace derand
