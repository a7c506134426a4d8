#include "derand/pseudorandom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "derand/config.hpp"
#include "derand/errors.hpp"

namespace derand {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

int field_degree_for(uint64_t n) { return std::max(1, ceil_log2(n)); }

// ceil() that ignores floating noise just above an integer.
uint64_t robust_ceil(double x) { return static_cast<uint64_t>(std::ceil(x * (1.0 - 1e-12))); }

}  // namespace

SeedBits parse_seed_hex(std::string_view hex, size_t nbits) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    const size_t digits = (nbits + 3) / 4;
    if (hex.size() != digits)
        throw SeedError("seed hex has " + std::to_string(hex.size()) + " digits, expected " + std::to_string(digits));
    SeedBits bits(nbits, 0);
    for (size_t d = 0; d < digits; ++d) {
        const int v = hex_value(hex[d]);
        if (v < 0) throw SeedError("seed hex: invalid digit");
        for (int b = 0; b < 4; ++b) {
            const size_t pos = 4 * d + b;
            const uint8_t bit = (v >> (3 - b)) & 1;
            if (pos < nbits)
                bits[pos] = bit;
            else if (bit)
                throw SeedError("seed hex: padding bits must be zero");
        }
    }
    return bits;
}

std::string format_seed_hex(std::span<const uint8_t> bits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (size_t d = 0; 4 * d < bits.size(); ++d) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            const size_t pos = 4 * d + b;
            v = (v << 1) | (pos < bits.size() ? bits[pos] & 1 : 0);
        }
        out.push_back(kDigits[v]);
    }
    return out;
}

uint64_t read_bits(std::span<const uint8_t> bits, size_t offset, size_t count) {
    uint64_t v = 0;
    for (size_t i = 0; i < count; ++i) v = (v << 1) | (bits[offset + i] & 1u);
    return v;
}

void write_bits(std::span<uint8_t> bits, size_t offset, size_t count, uint64_t value) {
    for (size_t i = 0; i < count; ++i) bits[offset + i] = (value >> (count - 1 - i)) & 1u;
}

// ---------------------------------------------------------------- hashing

PairwiseHashFamily::PairwiseHashFamily(uint64_t n, uint64_t t)
    : n_(n), t_(t), log_t_(0), field_(1) {
    if (n < 1) throw ParameterError("hash family: n must be >= 1");
    if (t < 1 || !std::has_single_bit(t)) throw ParameterError("hash family: t must be a power of two");
    log_t_ = std::countr_zero(t);
    const int m = std::max({ceil_log2(n), log_t_, 1});
    if (m > BinaryField::kMaxDegree) throw ParameterError("hash family: domain or range too large");
    field_ = BinaryField(m);
}

uint64_t PairwiseHashFamily::apply(uint64_t a, uint64_t b, uint64_t i) const noexcept {
    return (field_.mul(a, i) ^ b) >> (field_.degree() - log_t_);
}

std::vector<uint32_t> PairwiseHashFamily::function(uint64_t seed_index) const {
    const int m = field_.degree();
    const uint64_t a = seed_index >> m;
    const uint64_t b = seed_index & ((uint64_t{1} << m) - 1);
    std::vector<uint32_t> h(n_);
    for (uint64_t i = 0; i < n_; ++i) h[i] = static_cast<uint32_t>(apply(a, b, i));
    return h;
}

std::vector<uint32_t> pairwise_hash_sample(const PairwiseHashFamily& family, std::span<const uint8_t> seed) {
    if (seed.size() != family.seed_bits())
        throw SeedError("hash seed has " + std::to_string(seed.size()) + " bits, expected " +
                        std::to_string(family.seed_bits()));
    return family.function(read_bits(seed, 0, family.seed_bits()));
}

// ---------------------------------------------------------------- k-wise

KWiseSource::KWiseSource(uint64_t n, uint64_t k) : n_(n), k_(k), k_eff_(std::min(k, n)), field_(1) {
    if (n < 1) throw ParameterError("k-wise source: n must be >= 1");
    if (k < 1) throw ParameterError("k-wise source: k must be >= 1");
    const int q = field_degree_for(n);
    if (q > BinaryField::kMaxDegree) throw ParameterError("k-wise source: n too large");
    field_ = BinaryField(q);
}

std::vector<uint8_t> KWiseSource::output_bits(std::span<const uint8_t> bits, size_t offset) const {
    const int q = field_.degree();
    std::vector<uint64_t> coef(k_eff_);
    for (uint64_t j = 0; j < k_eff_; ++j) coef[j] = read_bits(bits, offset + j * q, q);
    std::vector<uint8_t> out(n_);
    for (uint64_t i = 0; i < n_; ++i) {
        uint64_t acc = 0;
        for (uint64_t j = k_eff_; j-- > 0;) acc = field_.mul(acc, i) ^ coef[j];
        out[i] = acc & 1u;
    }
    return out;
}

std::vector<uint64_t> KWiseSource::seed_images() const {
    if (n_ > 64) throw ParameterError("seed_images: n must be <= 64");
    const int q = field_.degree();
    std::vector<uint64_t> images;
    images.reserve(seed_bits());
    for (uint64_t j = 0; j < k_eff_; ++j) {
        for (int b = q - 1; b >= 0; --b) {
            const uint64_t c = uint64_t{1} << b;
            uint64_t img = 0;
            for (uint64_t i = 0; i < n_; ++i) {
                uint64_t pw = 1;
                for (uint64_t e = 0; e < j; ++e) pw = field_.mul(pw, i);
                img |= (field_.mul(c, pw) & 1u) << i;
            }
            images.push_back(img);
        }
    }
    return images;
}

gf2::WordBasis KWiseSource::image_basis() const {
    gf2::WordBasis basis;
    for (uint64_t v : seed_images()) basis.insert(v);
    return basis;
}

SignVector kwise_sample(const KWiseSource& src, std::span<const uint8_t> seed) {
    if (seed.size() != src.seed_bits())
        throw SeedError("k-wise seed has " + std::to_string(seed.size()) + " bits, expected " +
                        std::to_string(src.seed_bits()));
    const auto bits = src.output_bits(seed);
    SignVector out(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? -1 : 1;
    return out;
}

// ---------------------------------------------------------------- generator

GeneratorParameters generator_parameters(int ell, double eps, uint64_t n, double c, const GeneratorOverrides& ov) {
    if (ell < 1) throw ParameterError("generator_parameters: ell must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("generator_parameters: eps must lie in (0, 1)");
    if (n < 1) throw ParameterError("generator_parameters: n must be >= 1");
    if (!(c > 0.0)) throw ParameterError("generator_parameters: c must be positive");

    GeneratorParameters p;
    p.n = n;
    p.ell = ell;
    p.eps = eps;
    p.c = c;
    const double l2 = static_cast<double>(ell) * ell;
    p.t_schedule = robust_ceil(16.0 * l2 / (eps * eps));
    p.delta_schedule = std::pow(eps, 4) / (64.0 * l2);
    const double lg = std::log(1.0 / p.delta_schedule);
    p.k_h_schedule = std::ceil(c * lg * lg / (p.delta_schedule * p.delta_schedule));

    if (ov.t && *ov.t < 1) throw ParameterError("generator_parameters: t override must be >= 1");
    if (ov.delta && !(*ov.delta > 0.0 && *ov.delta < 1.0))
        throw ParameterError("generator_parameters: delta override must lie in (0, 1)");
    if (ov.k_h && *ov.k_h < 1) throw ParameterError("generator_parameters: k_h override must be >= 1");

    const uint64_t t_req = ov.t.value_or(p.t_schedule);
    if (t_req > (uint64_t{1} << BinaryField::kMaxDegree)) throw ParameterError("generator_parameters: t too large");
    p.t = std::bit_ceil(t_req);
    p.delta = ov.delta.value_or(p.delta_schedule);
    if (ov.k_h) {
        p.k_h = *ov.k_h;
    } else {
        const double lgd = std::log(1.0 / p.delta);
        const double kh = std::ceil(c * lgd * lgd / (p.delta * p.delta));
        // An order >= n already makes the inner source fully independent.
        p.k_h = kh >= static_cast<double>(n) ? n : static_cast<uint64_t>(kh);
    }
    p.k_mask = 2 * static_cast<uint64_t>(ell);
    p.on_schedule = !(ov.t || ov.delta || ov.k_h);

    const PairwiseHashFamily hash(n, p.t);
    p.hash_seed_bits = hash.seed_bits();
    p.inner_seed_bits = KWiseSource(n, p.k_h).seed_bits();
    p.mask_seed_bits = KWiseSource(n, p.k_mask).seed_bits();
    p.seed_bits_total = p.hash_seed_bits + static_cast<size_t>(p.t) * p.inner_seed_bits + p.mask_seed_bits;
    return p;
}

HashingGenerator::HashingGenerator(const GeneratorParameters& params)
    : params_(params), hash_(params.n, params.t), inner_(params.n, params.k_h), mask_(params.n, params.k_mask) {}

std::vector<uint32_t> bucket_positions(std::span<const uint32_t> h) {
    std::vector<uint32_t> pos(h.size());
    std::vector<uint32_t> fill;
    for (size_t i = 0; i < h.size(); ++i) {
        if (h[i] >= fill.size()) fill.resize(h[i] + 1, 0);
        pos[i] = fill[h[i]]++;
    }
    return pos;
}

SignVector HashingGenerator::sample(std::span<const uint8_t> seed) const {
    if (seed.size() != params_.seed_bits_total)
        throw SeedError("generator seed has " + std::to_string(seed.size()) + " bits, expected " +
                        std::to_string(params_.seed_bits_total));
    const size_t hb = params_.hash_seed_bits, ib = params_.inner_seed_bits;
    const auto h = hash_.function(read_bits(seed, 0, hb));
    const auto pos = bucket_positions(h);
    const auto mask = mask_.output_bits(seed, hb + static_cast<size_t>(params_.t) * ib);

    std::vector<std::vector<uint8_t>> inner(params_.t);
    SignVector out(params_.n);
    for (uint64_t i = 0; i < params_.n; ++i) {
        auto& in = inner[h[i]];
        if (in.empty()) in = inner_.output_bits(seed, hb + static_cast<size_t>(h[i]) * ib);
        out[i] = (in[pos[i]] ^ mask[i]) ? -1 : 1;
    }
    return out;
}

gf2::WordBasis HashingGenerator::conditional_basis(std::span<const uint32_t> h) const {
    if (params_.n > 64) throw ParameterError("conditional_basis: n must be <= 64");
    const auto pos = bucket_positions(h);
    const auto inner_images = inner_.seed_images();
    gf2::WordBasis basis;
    std::vector<uint8_t> used(params_.t, 0);
    for (uint32_t b : h) used[b] = 1;
    for (uint64_t j = 0; j < params_.t; ++j) {
        if (!used[j]) continue;
        for (uint64_t img : inner_images) {
            uint64_t v = 0;
            for (size_t i = 0; i < h.size(); ++i)
                if (h[i] == j && ((img >> pos[i]) & 1u)) v |= uint64_t{1} << i;
            basis.insert(v);
        }
    }
    for (uint64_t img : mask_.seed_images()) basis.insert(img);
    return basis;
}

SignVector hashing_generator_sample(const HashingGenerator& gen, std::span<const uint8_t> seed) {
    return gen.sample(seed);
}

double halfspace_error(const KWiseSource& src, std::span<const double> w, double theta) {
    const uint64_t n = src.n();
    if (w.size() != n) throw ParameterError("halfspace_error: weight length must equal n");
    if (n > 24) throw ParameterError("halfspace_error: n must be <= 24");
    require_within_cap(std::ldexp(1.0, static_cast<int>(n)), "halfspace_error");

    auto value = [&](uint64_t bits) {
        double s = 0;
        for (uint64_t i = 0; i < n; ++i) s += ((bits >> i) & 1u) ? -w[i] : w[i];
        return s;
    };
    uint64_t hit_u = 0;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) hit_u += value(x) >= theta;
    const auto members = gf2::span_members(src.image_basis());
    uint64_t hit_s = 0;
    for (uint64_t x : members) hit_s += value(x) >= theta;
    return std::abs(std::ldexp(static_cast<double>(hit_u), -static_cast<int>(n)) -
                    static_cast<double>(hit_s) / static_cast<double>(members.size()));
}

}  // namespace derand
