#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace derand {

// A word of length N = 2^n over F2, indexed by points of F2^n.
//
// Points are ordered lexicographically with x1 as the most significant bit,
// so point p has x_i = bit (n - i) of p. Storage is bit-packed: point p lives
// in word p / 64 at bit p % 64.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(int n);

    // n <= 6; bit p of `w` is point p.
    static BitVector from_word(int n, uint64_t w);
    // Hex with point 0 as the most significant bit of the first digit.
    static BitVector from_hex(int n, std::string_view hex);
    // '0'/'1' characters in point order.
    static BitVector from_string(int n, std::string_view bits);

    int n() const noexcept { return n_; }
    size_t size() const noexcept { return size_t{1} << n_; }

    bool get(size_t p) const noexcept { return (words_[p >> 6] >> (p & 63)) & 1u; }
    void set(size_t p, bool v) noexcept {
        const uint64_t m = uint64_t{1} << (p & 63);
        if (v)
            words_[p >> 6] |= m;
        else
            words_[p >> 6] &= ~m;
    }
    void flip(size_t p) noexcept { words_[p >> 6] ^= uint64_t{1} << (p & 63); }

    int weight() const noexcept;
    bool is_zero() const noexcept;
    // Parity of |supp(a) ∩ supp(b)|, i.e. the F2 inner product.
    bool dot(const BitVector& other) const;

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }
    bool operator==(const BitVector&) const = default;

    // Requires n <= 6.
    uint64_t word() const;
    const std::vector<uint64_t>& words() const noexcept { return words_; }

    // First point set, or size() if zero.
    size_t first_set() const noexcept;

    std::string to_hex() const;
    std::string to_string() const;
    // (-1)^bit per point.
    std::vector<int> signs() const;

private:
    int n_ = 0;
    std::vector<uint64_t> words_ = std::vector<uint64_t>(1, 0);
};

// Lexicographic order over point sequences (point 0 compared first, 0 < 1).
bool lex_less(const BitVector& a, const BitVector& b);

// Same order for packed words of a length <= 64 code.
inline bool lex_less_word(uint64_t a, uint64_t b) noexcept {
    const uint64_t diff = a ^ b;
    if (diff == 0) return false;
    return ((a >> __builtin_ctzll(diff)) & 1u) == 0;
}

}  // namespace derand

template <>
struct std::hash<derand::BitVector> {
    size_t operator()(const derand::BitVector& v) const noexcept {
        size_t h = static_cast<size_t>(v.n()) * 0x9E3779B97F4A7C15ull;
        for (uint64_t w : v.words()) h ^= std::hash<uint64_t>{}(w) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return h;
    }
};
