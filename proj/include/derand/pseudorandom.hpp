#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "derand/gf2.hpp"
#include "derand/gf2m.hpp"

namespace derand {

// Seed bits, one per byte, most significant (first) bit at index 0.
using SeedBits = std::vector<uint8_t>;
// Entries are +1 or -1.
using SignVector = std::vector<int>;

// Hex digits, bit 0 as the MSB of the first digit; bits past nbits must be 0.
SeedBits parse_seed_hex(std::string_view hex, size_t nbits);
std::string format_seed_hex(std::span<const uint8_t> bits);
// Big-endian integer value of up to 64 bits.
uint64_t read_bits(std::span<const uint8_t> bits, size_t offset, size_t count);
void write_bits(std::span<uint8_t> bits, size_t offset, size_t count, uint64_t value);

// h_{a,b}(i) = top log2(t) bits of a*i + b in GF(2^m), m = max(ceil log2 n, log2 t, 1).
// Seed layout: a then b, m bits each.
class PairwiseHashFamily {
public:
    // t must be a power of two.
    PairwiseHashFamily(uint64_t n, uint64_t t);

    uint64_t n() const noexcept { return n_; }
    uint64_t t() const noexcept { return t_; }
    int field_degree() const noexcept { return field_.degree(); }
    size_t seed_bits() const noexcept { return 2 * static_cast<size_t>(field_.degree()); }

    uint64_t apply(uint64_t a, uint64_t b, uint64_t i) const noexcept;
    // Bucket of every i in [n]; seed_index packs (a, b) as a*2^m + b.
    std::vector<uint32_t> function(uint64_t seed_index) const;

private:
    uint64_t n_;
    uint64_t t_;
    int log_t_;
    BinaryField field_;
};

std::vector<uint32_t> pairwise_hash_sample(const PairwiseHashFamily& family, std::span<const uint8_t> seed);

// x_i = (-1)^{lowbit p(i)} for a random polynomial p of degree < k_eff over
// GF(2^q), q = max(1, ceil log2 n), k_eff = min(k, n). Seed: coefficients
// c_0, ..., c_{k_eff-1}, q bits each.
class KWiseSource {
public:
    KWiseSource(uint64_t n, uint64_t k);

    uint64_t n() const noexcept { return n_; }
    uint64_t k() const noexcept { return k_; }
    uint64_t k_effective() const noexcept { return k_eff_; }
    int field_degree() const noexcept { return field_.degree(); }
    size_t seed_bits() const noexcept { return static_cast<size_t>(k_eff_) * field_.degree(); }

    // Output bits (1 means -1) for the seed stored at `offset` in `bits`.
    std::vector<uint8_t> output_bits(std::span<const uint8_t> bits, size_t offset = 0) const;

    // The map seed -> output bits is F2-linear. Image of seed bit j, n <= 64
    // (bit i of the word is coordinate i).
    std::vector<uint64_t> seed_images() const;
    // Span of the images: the output law is uniform on it.
    gf2::WordBasis image_basis() const;

private:
    uint64_t n_;
    uint64_t k_;
    uint64_t k_eff_;
    BinaryField field_;
};

SignVector kwise_sample(const KWiseSource& src, std::span<const uint8_t> seed);

struct GeneratorOverrides {
    std::optional<uint64_t> t;
    std::optional<double> delta;
    std::optional<uint64_t> k_h;
};

struct GeneratorParameters {
    uint64_t n = 0;
    int ell = 0;
    double eps = 0;
    double c = 4;

    uint64_t t_schedule = 0;      // ceil(16 ell^2 / eps^2)
    double delta_schedule = 0;    // eps^4 / (64 ell^2)
    double k_h_schedule = 0;      // ceil(c ln^2(1/delta) / delta^2), may be astronomically large

    uint64_t t = 0;               // realized bucket count (power of two)
    double delta = 0;
    uint64_t k_h = 0;             // requested inner order
    uint64_t k_mask = 0;          // 2 ell

    size_t hash_seed_bits = 0;
    size_t inner_seed_bits = 0;   // per bucket
    size_t mask_seed_bits = 0;
    size_t seed_bits_total = 0;
    bool on_schedule = true;
};

// Requires ell >= 1, 0 < eps < 1, n >= 1, c > 0.
GeneratorParameters generator_parameters(int ell, double eps, uint64_t n, double c = 4,
                                         const GeneratorOverrides& overrides = {});

// Output coordinate i = inner_{h(i)}[rank of i within its bucket] * mask_i.
// Every inner sample has length n. Seed layout: hash | inner_1..inner_t | mask.
class HashingGenerator {
public:
    explicit HashingGenerator(const GeneratorParameters& params);

    const GeneratorParameters& params() const noexcept { return params_; }
    const PairwiseHashFamily& hash() const noexcept { return hash_; }
    const KWiseSource& inner() const noexcept { return inner_; }
    const KWiseSource& mask() const noexcept { return mask_; }
    size_t seed_bits() const noexcept { return params_.seed_bits_total; }

    SignVector sample(std::span<const uint8_t> seed) const;
    // Hash bucket of each coordinate for a hash seed index.
    std::vector<uint32_t> hash_function(uint64_t hash_seed_index) const { return hash_.function(hash_seed_index); }
    uint64_t hash_family_size() const noexcept { return uint64_t{1} << hash_.seed_bits(); }

    // For a fixed hash function the output is F2-linear in the remaining
    // seed bits; this is the span of its image (n <= 64).
    gf2::WordBasis conditional_basis(std::span<const uint32_t> h) const;

private:
    GeneratorParameters params_;
    PairwiseHashFamily hash_;
    KWiseSource inner_;
    KWiseSource mask_;
};

SignVector hashing_generator_sample(const HashingGenerator& gen, std::span<const uint8_t> seed);

// Position of each coordinate within its bucket (0-based, increasing i).
std::vector<uint32_t> bucket_positions(std::span<const uint32_t> h);

// Halfspace error |P_U[w.x >= theta] - P_S[w.x >= theta]| between the uniform
// cube and the exact law of `src`, both enumerated (n <= 24).
double halfspace_error(const KWiseSource& src, std::span<const double> w, double theta);

}  // namespace derand
