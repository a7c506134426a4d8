#pragma once

#include <cstdint>

namespace derand {

// GF(2^m) for 1 <= m <= 24 with a fixed irreducible modulus per degree.
class BinaryField {
public:
    static constexpr int kMaxDegree = 24;

    explicit BinaryField(int m);

    int degree() const noexcept { return m_; }
    uint64_t size() const noexcept { return uint64_t{1} << m_; }
    // Modulus including the x^m term.
    uint64_t modulus() const noexcept { return modulus_; }

    uint64_t add(uint64_t a, uint64_t b) const noexcept { return a ^ b; }
    uint64_t mul(uint64_t a, uint64_t b) const noexcept;

private:
    int m_;
    uint64_t modulus_;
};

// Table entry used by BinaryField, exposed for the irreducibility test.
uint64_t irreducible_modulus(int m);

// ceil(log2(x)) for x >= 1.
int ceil_log2(uint64_t x);

}  // namespace derand
