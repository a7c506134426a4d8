#include "derand/gf2m.hpp"

#include "derand/errors.hpp"

namespace derand {

namespace {

// Low-weight irreducible polynomials over F2, indexed by degree.
constexpr uint64_t kModuli[] = {
    0,
    0x3,        // x + 1
    0x7,        // x^2 + x + 1
    0xB,        // x^3 + x + 1
    0x13,       // x^4 + x + 1
    0x25,       // x^5 + x^2 + 1
    0x43,       // x^6 + x + 1
    0x83,       // x^7 + x + 1
    0x11B,      // x^8 + x^4 + x^3 + x + 1
    0x211,      // x^9 + x^4 + 1
    0x409,      // x^10 + x^3 + 1
    0x805,      // x^11 + x^2 + 1
    0x1009,     // x^12 + x^3 + 1
    0x201B,     // x^13 + x^4 + x^3 + x + 1
    0x4021,     // x^14 + x^5 + 1
    0x8003,     // x^15 + x + 1
    0x1002B,    // x^16 + x^5 + x^3 + x + 1
    0x20009,    // x^17 + x^3 + 1
    0x40009,    // x^18 + x^3 + 1
    0x80027,    // x^19 + x^5 + x^2 + x + 1
    0x100009,   // x^20 + x^3 + 1
    0x200005,   // x^21 + x^2 + 1
    0x400003,   // x^22 + x + 1
    0x800021,   // x^23 + x^5 + 1
    0x100001B,  // x^24 + x^4 + x^3 + x + 1
};

}  // namespace

uint64_t irreducible_modulus(int m) {
    if (m < 1 || m > BinaryField::kMaxDegree) throw ParameterError("GF(2^m): degree out of range");
    return kModuli[m];
}

BinaryField::BinaryField(int m) : m_(m), modulus_(irreducible_modulus(m)) {}

uint64_t BinaryField::mul(uint64_t a, uint64_t b) const noexcept {
    uint64_t r = 0;
    const uint64_t top = uint64_t{1} << m_;
    while (b) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= modulus_;
    }
    return r;
}

int ceil_log2(uint64_t x) {
    int r = 0;
    while ((uint64_t{1} << r) < x) ++r;
    return r;
}

}  // namespace derand
