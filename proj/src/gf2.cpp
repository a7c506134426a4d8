#include "derand/gf2.hpp"

#include "derand/errors.hpp"

namespace derand::gf2 {

std::vector<uint64_t> span_members(const WordBasis& basis) {
    const auto& rows = basis.rows();
    if (rows.size() > 40) throw ParameterError("span_members: rank too large");
    std::vector<uint64_t> out(size_t{1} << rows.size());
    for (size_t j = 0; j < rows.size(); ++j) {
        const size_t half = size_t{1} << j;
        for (size_t c = 0; c < half; ++c) out[c | half] = out[c] ^ rows[j];
    }
    return out;
}

std::optional<std::vector<uint64_t>> invert(std::vector<uint64_t> rows, int k) {
    if (k < 0 || k > 64 || rows.size() != static_cast<size_t>(k)) throw ParameterError("gf2::invert: bad shape");
    std::vector<uint64_t> inv(k);
    for (int i = 0; i < k; ++i) inv[i] = uint64_t{1} << i;
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int r = col; r < k; ++r)
            if ((rows[r] >> col) & 1u) {
                piv = r;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(rows[piv], rows[col]);
        std::swap(inv[piv], inv[col]);
        for (int r = 0; r < k; ++r)
            if (r != col && ((rows[r] >> col) & 1u)) {
                rows[r] ^= rows[col];
                inv[r] ^= inv[col];
            }
    }
    return inv;
}

}  // namespace derand::gf2
