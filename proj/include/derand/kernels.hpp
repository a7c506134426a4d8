#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

// Hot loops in two flavours: serial:: reference implementations and
// parallel:: OpenMP versions. Both produce bit-identical results.
namespace derand::kernels {

// Result of a balanced-cut scan over vertex subsets.
struct CutScan {
    double phi = 0;
    uint64_t mask = 0;     // bit v set: vertex v in S
    bool feasible = false;
};

// Dense symmetric weights, row-major, size V*V.
struct DenseGraphView {
    int V = 0;
    std::span<const double> w;
    std::span<const double> degree;  // row sums
};

// Subsets are visited in fixed-size blocks, each starting from a fresh
// state, so floating-point results do not depend on the thread count.
inline constexpr int kCutBlockBits = 14;

// Min-weight representatives of all cosets of a map F2^N -> F2^k given by
// its columns (col[p] = image of point p). rep[beta] is the lexicographically
// smallest minimum-weight preimage (bit p = point p), dist[beta] its weight.
struct CosetTable {
    std::vector<uint64_t> rep;
    std::vector<int> dist;
};

namespace serial {
// In-place unnormalized Walsh-Hadamard transform; size must be a power of two.
void wht(std::span<double> a);
// Histogram of sum_j s_j * images[j] over all seeds s, sorted by output word.
std::vector<std::pair<uint64_t, uint64_t>> output_histogram(std::span<const uint64_t> images);
CosetTable coset_table(std::span<const uint64_t> cols, int k);
// out[i*C + j] = sum_s (corr(i, j, s) / N)^power with corr = N - 2 popcount(base_i ^ shifted_j[s]).
std::vector<double> cloud_sums(std::span<const uint64_t> bases, std::span<const std::vector<uint64_t>> shifted, int N,
                               int power);
// Minimum conductance over all S with stationary mass in [lo, hi]; ties -> smallest mask.
CutScan balanced_cut_scan(const DenseGraphView& g, double lo, double hi);
}  // namespace serial

namespace parallel {
void wht(std::span<double> a);
std::vector<std::pair<uint64_t, uint64_t>> output_histogram(std::span<const uint64_t> images);
CosetTable coset_table(std::span<const uint64_t> cols, int k);
std::vector<double> cloud_sums(std::span<const uint64_t> bases, std::span<const std::vector<uint64_t>> shifted, int N,
                               int power);
CutScan balanced_cut_scan(const DenseGraphView& g, double lo, double hi);
}  // namespace parallel

// x^e for small nonnegative e by repeated squaring.
inline double ipow(double x, int e) {
    double r = 1;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

}  // namespace derand::kernels
