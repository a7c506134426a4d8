#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "derand/bitvector.hpp"

namespace derand::gf2 {

inline int pivot_of(uint64_t v) noexcept { return v ? __builtin_ctzll(v) : -1; }
inline bool has_bit(uint64_t v, int p) noexcept { return (v >> p) & 1u; }

inline int pivot_of(const BitVector& v) noexcept {
    const size_t p = v.first_set();
    return p == v.size() ? -1 : static_cast<int>(p);
}
inline bool has_bit(const BitVector& v, int p) noexcept { return v.get(static_cast<size_t>(p)); }

// Reduced row-echelon basis of a subspace of F2^m. Each basis vector's pivot
// is its lowest set position and every other basis vector is zero there, so
// reduce() returns the lexicographically smallest member of a coset (with
// position 0 compared first).
template <class Row>
class Basis {
public:
    // Returns true if `v` enlarged the span.
    bool insert(Row v) {
        v = reduce(std::move(v));
        const int p = pivot_of(v);
        if (p < 0) return false;
        for (auto& b : rows_)
            if (has_bit(b, p)) b ^= v;
        auto it = rows_.begin();
        while (it != rows_.end() && pivot_of(*it) < p) ++it;
        rows_.insert(it, std::move(v));
        return true;
    }

    Row reduce(Row v) const {
        for (const auto& b : rows_)
            if (has_bit(v, pivot_of(b))) v ^= b;
        return v;
    }

    bool contains(const Row& v) const { return pivot_of(reduce(v)) < 0; }
    size_t rank() const noexcept { return rows_.size(); }
    const std::vector<Row>& rows() const noexcept { return rows_; }

private:
    std::vector<Row> rows_;
};

using WordBasis = Basis<uint64_t>;

// All 2^rank members of a word span, in order of the coefficient index
// (coefficient bit j selects rows()[j]).
std::vector<uint64_t> span_members(const WordBasis& basis);

// Inverse of a square matrix given as rows of packed bits (row i, bit j =
// entry (i, j)); std::nullopt if singular. k <= 64.
std::optional<std::vector<uint64_t>> invert(std::vector<uint64_t> rows, int k);

}  // namespace derand::gf2
