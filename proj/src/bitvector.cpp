#include "derand/bitvector.hpp"

#include <bit>

#include "derand/errors.hpp"

namespace derand {

namespace {

constexpr int kMaxBitVectorVariables = 24;

size_t word_count(int n) { return n >= 6 ? (size_t{1} << (n - 6)) : 1; }

uint64_t tail_mask(int n) { return n >= 6 ? ~uint64_t{0} : ((uint64_t{1} << (size_t{1} << n)) - 1); }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitVector::BitVector(int n) : n_(n) {
    if (n < 0 || n > kMaxBitVectorVariables) throw ParameterError("BitVector: n out of range");
    words_.assign(word_count(n), 0);
}

BitVector BitVector::from_word(int n, uint64_t w) {
    if (n > 6) throw ParameterError("BitVector::from_word requires n <= 6");
    BitVector v(n);
    v.words_[0] = w & tail_mask(n);
    return v;
}

BitVector BitVector::from_hex(int n, std::string_view hex) {
    BitVector v(n);
    const size_t digits = (v.size() + 3) / 4;
    if (hex.size() != digits) throw ParameterError("BitVector::from_hex: expected " + std::to_string(digits) + " hex digits");
    for (size_t i = 0; i < digits; ++i) {
        const int x = hex_value(hex[i]);
        if (x < 0) throw ParameterError("BitVector::from_hex: invalid digit");
        for (int b = 0; b < 4; ++b) {
            const size_t p = 4 * i + b;
            const bool bit = (x >> (3 - b)) & 1;
            if (p < v.size())
                v.set(p, bit);
            else if (bit)
                throw ParameterError("BitVector::from_hex: nonzero padding bits");
        }
    }
    return v;
}

BitVector BitVector::from_string(int n, std::string_view bits) {
    BitVector v(n);
    if (bits.size() != v.size()) throw ParameterError("BitVector::from_string: length mismatch");
    for (size_t p = 0; p < bits.size(); ++p) {
        if (bits[p] != '0' && bits[p] != '1') throw ParameterError("BitVector::from_string: invalid character");
        v.set(p, bits[p] == '1');
    }
    return v;
}

int BitVector::weight() const noexcept {
    int w = 0;
    for (uint64_t x : words_) w += std::popcount(x);
    return w;
}

bool BitVector::is_zero() const noexcept {
    for (uint64_t x : words_)
        if (x) return false;
    return true;
}

bool BitVector::dot(const BitVector& other) const {
    if (other.n_ != n_) throw ParameterError("BitVector::dot: length mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.n_ != n_) throw ParameterError("BitVector::xor: length mismatch");
    for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

uint64_t BitVector::word() const {
    if (n_ > 6) throw ParameterError("BitVector::word requires n <= 6");
    return words_[0];
}

size_t BitVector::first_set() const noexcept {
    for (size_t i = 0; i < words_.size(); ++i)
        if (words_[i]) return 64 * i + static_cast<size_t>(std::countr_zero(words_[i]));
    return size();
}

std::string BitVector::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    const size_t digits = (size() + 3) / 4;
    std::string out(digits, '0');
    for (size_t i = 0; i < digits; ++i) {
        int x = 0;
        for (int b = 0; b < 4; ++b) {
            const size_t p = 4 * i + b;
            if (p < size() && get(p)) x |= 1 << (3 - b);
        }
        out[i] = kDigits[x];
    }
    return out;
}

std::string BitVector::to_string() const {
    std::string out(size(), '0');
    for (size_t p = 0; p < size(); ++p)
        if (get(p)) out[p] = '1';
    return out;
}

std::vector<int> BitVector::signs() const {
    std::vector<int> s(size());
    for (size_t p = 0; p < size(); ++p) s[p] = get(p) ? -1 : 1;
    return s;
}

bool lex_less(const BitVector& a, const BitVector& b) {
    if (a.n() != b.n()) return a.n() < b.n();
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (size_t i = 0; i < wa.size(); ++i) {
        const uint64_t diff = wa[i] ^ wb[i];
        if (diff) return ((wa[i] >> std::countr_zero(diff)) & 1u) == 0;
    }
    return false;
}

}  // namespace derand
