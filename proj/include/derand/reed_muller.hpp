#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "derand/bitvector.hpp"

namespace derand {

// Largest n accepted by the Reed-Muller constructors (N = 2^16).
inline constexpr int kMaxRmVariables = 16;

// Monomials are variable masks aligned with point bits: x_i is bit (n - i),
// so a monomial evaluates to 1 at point p iff (p & mask) == mask.
using MonomialMask = uint32_t;

// RM(n, d): evaluations of all F2-polynomials of degree <= d over F2^n.
//
// Rows are ordered by degree, then lexicographically by the sorted list of
// variable indices: 1, x1, x2, ..., x1x2, x1x3, ... Message bit (k-1-j)
// selects row j, so message-lexicographic order is integer order.
// d == -1 denotes the zero code (only produced by dual_code()).
struct RMCode {
    int n = 0;
    int d = 0;
    std::vector<MonomialMask> monomials;
    std::vector<BitVector> rows;

    size_t length() const noexcept { return size_t{1} << n; }
    size_t dimension() const noexcept { return rows.size(); }
};

// sum_{i<=d} C(n, i); 0 for d < 0.
uint64_t rm_dimension(int n, int d);

RMCode rm_generator_matrix(int n, int d);

// RM(n, n-d-1), which may be the zero code.
RMCode dual_code(int n, int d);

// 1-indexed variable list of a monomial.
std::vector<int> monomial_variables(int n, MonomialMask m);

BitVector encode_message(const RMCode& code, uint64_t message);

// Visits all 2^k codewords in message order; refuses above the enumeration cap.
void for_each_codeword(const RMCode& code, const std::function<void(uint64_t, const BitVector&)>& fn);
std::vector<BitVector> enumerate_codewords(const RMCode& code);

// Evaluation vector of sum of the given monomials over F2 (each monomial is a
// list of 1-indexed variables; repeated monomials cancel).
BitVector encode_polynomial(std::span<const std::vector<int>> monomials, int n);

// Checks RM(n, d)^perp == RM(n, n-d-1): the generator rows are pairwise
// orthogonal and the dimensions add up to 2^n. Orthogonality of all codeword
// pairs follows from bilinearity.
bool verify_duality(int n, int d);

struct CosetDegree {
    int value = 0;
    bool exact = true;  // false: sampled minimum, an upper bound on the true degree
};

// min{wt(alpha + y) : y in RM(n, n-d-1)}. Enumerates the dual code when it fits
// under the cap; otherwise requires `samples` > 0 and returns a flagged upper bound.
CosetDegree coset_degree(const BitVector& alpha, int n, int d, uint64_t samples = 0,
                         std::mt19937_64* rng = nullptr);

// A character chi_alpha of F2^N modulo the dual of RM(n, d), held by its
// lexicographically smallest coset member.
struct CharacterIndex {
    BitVector alpha;
    int coset_degree = 0;
};

CharacterIndex make_character_index(const BitVector& alpha, int n, int d);

// Evaluation vector of a product of d uniformly random affine forms whose
// linear parts are linearly independent; weight is exactly 2^(n-d).
BitVector sample_min_weight_codeword(int n, int d, std::mt19937_64& rng);

// Every indicator of an (n-d)-dimensional affine subspace, i.e. the support
// of the sampler above, sorted lexicographically.
std::vector<BitVector> min_weight_codewords(int n, int d);

}  // namespace derand
