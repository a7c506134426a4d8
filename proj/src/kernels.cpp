#include "derand/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

#include "derand/bitvector.hpp"

namespace derand::kernels {

namespace {

void check_pow2(size_t n) {
    if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("transform length must be a power of two");
}

using Histogram = std::map<uint64_t, uint64_t>;

// Gray-code walk over seed indices [begin, end).
void histogram_range(std::span<const uint64_t> images, uint64_t begin, uint64_t end, Histogram& hist) {
    const uint64_t g = begin ^ (begin >> 1);
    uint64_t out = 0;
    for (size_t j = 0; j < images.size(); ++j)
        if ((g >> j) & 1u) out ^= images[j];
    for (uint64_t i = begin; i < end; ++i) {
        ++hist[out];
        if (i + 1 < end) out ^= images[static_cast<size_t>(std::countr_zero(i + 1))];
    }
}

void check_images(std::span<const uint64_t> images) {
    if (images.size() > 40) throw std::invalid_argument("output_histogram: too many seed bits");
}

void check_cosets(std::span<const uint64_t> cols, int k) {
    if (cols.size() > 64) throw std::invalid_argument("coset_table: at most 64 points");
    if (k < 0 || k > 30) throw std::invalid_argument("coset_table: bad dimension");
}

// Cut state of one block of the Gray-code subset walk.
struct CutWalker {
    const DenseGraphView& g;
    std::vector<double> s_in;  // s_in[y] = sum over x in S of w(y, x)
    uint64_t mask = 0;
    double cut = 0, vol = 0;

    CutWalker(const DenseGraphView& graph, uint64_t start) : g(graph), s_in(static_cast<size_t>(graph.V), 0.0) {
        mask = start;
        const int V = g.V;
        for (int x = 0; x < V; ++x) {
            if (!((mask >> x) & 1u)) continue;
            vol += g.degree[x];
            for (int y = 0; y < V; ++y) s_in[y] += g.w[static_cast<size_t>(y) * V + x];
        }
        for (int x = 0; x < V; ++x)
            if ((mask >> x) & 1u) cut += g.degree[x] - s_in[x];
    }

    void flip(int x) {
        const int V = g.V;
        const double self = g.w[static_cast<size_t>(x) * V + x];
        const double sign = ((mask >> x) & 1u) ? -1.0 : 1.0;
        if (sign > 0)
            cut += (g.degree[x] - s_in[x] - self) - s_in[x];
        else
            cut += (s_in[x] - self) - (g.degree[x] - s_in[x]);
        vol += sign * g.degree[x];
        const double* col = g.w.data() + static_cast<size_t>(x) * V;  // symmetric: row x == column x
        for (int y = 0; y < V; ++y) s_in[y] += sign * col[y];
        mask ^= uint64_t{1} << x;
    }
};

bool cut_better(const CutScan& a, const CutScan& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.phi != b.phi) return a.phi < b.phi;
    return a.mask < b.mask;
}

CutScan scan_block(const DenseGraphView& g, uint64_t block, double lo, double hi, double total) {
    const uint64_t count = uint64_t{1} << g.V;
    const uint64_t begin = block << kCutBlockBits;
    const uint64_t end = std::min(count, begin + (uint64_t{1} << kCutBlockBits));
    CutScan best;
    CutWalker walk(g, begin ^ (begin >> 1));
    for (uint64_t i = begin; i < end; ++i) {
        if (walk.mask != 0 && walk.mask != count - 1) {
            const double mass = walk.vol / total;
            if (mass >= lo - 1e-12 && mass <= hi + 1e-12 && walk.vol > 0) {
                const CutScan cand{walk.cut / walk.vol, walk.mask, true};
                if (cut_better(cand, best)) best = cand;
            }
        }
        if (i + 1 < end) walk.flip(std::countr_zero(i + 1));
    }
    return best;
}

void check_cut(const DenseGraphView& g) {
    if (g.V < 1 || g.V > 40) throw std::invalid_argument("balanced_cut_scan: vertex count out of range");
    if (g.w.size() != static_cast<size_t>(g.V) * g.V || g.degree.size() != static_cast<size_t>(g.V))
        throw std::invalid_argument("balanced_cut_scan: inconsistent graph view");
}

double total_degree(const DenseGraphView& g) {
    double t = 0;
    for (double d : g.degree) t += d;
    return t;
}

uint64_t block_count(int V) {
    const uint64_t count = uint64_t{1} << V;
    return (count + (uint64_t{1} << kCutBlockBits) - 1) >> kCutBlockBits;
}

double cloud_entry(uint64_t base, const std::vector<uint64_t>& shifted, int N, int power) {
    double s = 0;
    const double inv = 1.0 / N;
    for (uint64_t w : shifted) {
        const int corr = N - 2 * std::popcount(base ^ w);
        s += ipow(corr * inv, power);
    }
    return s;
}

void check_cloud(std::span<const uint64_t> bases, std::span<const std::vector<uint64_t>> shifted, int N) {
    if (bases.size() != shifted.size()) throw std::invalid_argument("cloud_sums: size mismatch");
    if (N < 1 || N > 64) throw std::invalid_argument("cloud_sums: N out of range");
}

}  // namespace

namespace serial {

void wht(std::span<double> a) {
    check_pow2(a.size());
    for (size_t h = 1; h < a.size(); h <<= 1)
        for (size_t i = 0; i < a.size(); i += h << 1)
            for (size_t j = i; j < i + h; ++j) {
                const double x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
}

std::vector<std::pair<uint64_t, uint64_t>> output_histogram(std::span<const uint64_t> images) {
    check_images(images);
    Histogram h;
    histogram_range(images, 0, uint64_t{1} << images.size(), h);
    return {h.begin(), h.end()};
}

CosetTable coset_table(std::span<const uint64_t> cols, int k) {
    check_cosets(cols, k);
    const size_t size = size_t{1} << k;
    CosetTable t{std::vector<uint64_t>(size, 0), std::vector<int>(size, -1)};
    t.dist[0] = 0;
    std::vector<uint64_t> layer{0};
    for (int w = 0; !layer.empty(); ++w) {
        std::vector<uint64_t> next;
        for (uint64_t from : layer) {
            const uint64_t rep = t.rep[from];
            for (size_t x = 0; x < cols.size(); ++x) {
                if ((rep >> x) & 1u) continue;
                const uint64_t to = from ^ cols[x];
                const uint64_t cand = rep | (uint64_t{1} << x);
                if (t.dist[to] < 0) {
                    t.dist[to] = w + 1;
                    t.rep[to] = cand;
                    next.push_back(to);
                } else if (t.dist[to] == w + 1 && lex_less_word(cand, t.rep[to])) {
                    t.rep[to] = cand;
                }
            }
        }
        layer.swap(next);
    }
    return t;
}

std::vector<double> cloud_sums(std::span<const uint64_t> bases, std::span<const std::vector<uint64_t>> shifted, int N,
                               int power) {
    check_cloud(bases, shifted, N);
    const size_t C = bases.size();
    std::vector<double> out(C * C);
    for (size_t i = 0; i < C; ++i)
        for (size_t j = 0; j < C; ++j) out[i * C + j] = cloud_entry(bases[i], shifted[j], N, power);
    return out;
}

CutScan balanced_cut_scan(const DenseGraphView& g, double lo, double hi) {
    check_cut(g);
    const double total = total_degree(g);
    CutScan best;
    const uint64_t blocks = block_count(g.V);
    for (uint64_t b = 0; b < blocks; ++b) {
        const CutScan c = scan_block(g, b, lo, hi, total);
        if (cut_better(c, best)) best = c;
    }
    return best;
}

}  // namespace serial

namespace parallel {

void wht(std::span<double> a) {
    check_pow2(a.size());
    const int64_t n = static_cast<int64_t>(a.size());
    if (n < 4096) return serial::wht(a);
    for (int64_t h = 1; h < n; h <<= 1) {
#pragma omp parallel for schedule(static)
        for (int64_t q = 0; q < n / 2; ++q) {
            const int64_t j = (q / h) * (2 * h) + (q % h);
            const double x = a[j], y = a[j + h];
            a[j] = x + y;
            a[j + h] = x - y;
        }
    }
}

std::vector<std::pair<uint64_t, uint64_t>> output_histogram(std::span<const uint64_t> images) {
    check_images(images);
    const uint64_t total = uint64_t{1} << images.size();
    const int64_t chunks = static_cast<int64_t>(std::min<uint64_t>(total, 256));
    std::vector<Histogram> parts(static_cast<size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
    for (int64_t c = 0; c < chunks; ++c) {
        const uint64_t begin = total / chunks * c + std::min<uint64_t>(c, total % chunks);
        const uint64_t len = total / chunks + (static_cast<uint64_t>(c) < total % chunks ? 1 : 0);
        histogram_range(images, begin, begin + len, parts[static_cast<size_t>(c)]);
    }
    Histogram merged;
    for (const auto& p : parts)
        for (const auto& [k, v] : p) merged[k] += v;
    return {merged.begin(), merged.end()};
}

CosetTable coset_table(std::span<const uint64_t> cols, int k) {
    check_cosets(cols, k);
    const int64_t size = int64_t{1} << k;
    CosetTable t{std::vector<uint64_t>(static_cast<size_t>(size), 0), std::vector<int>(static_cast<size_t>(size), -1)};
    t.dist[0] = 0;
    std::vector<uint64_t> found_rep(static_cast<size_t>(size));
    std::vector<char> found(static_cast<size_t>(size));
    for (int w = 0;; ++w) {
        int64_t added = 0;
#pragma omp parallel for schedule(static) reduction(+ : added)
        for (int64_t beta = 0; beta < size; ++beta) {
            found[beta] = 0;
            if (t.dist[beta] >= 0) continue;
            uint64_t best = 0;
            bool have = false;
            for (size_t x = 0; x < cols.size(); ++x) {
                const uint64_t from = static_cast<uint64_t>(beta) ^ cols[x];
                if (t.dist[from] != w || ((t.rep[from] >> x) & 1u)) continue;
                const uint64_t cand = t.rep[from] | (uint64_t{1} << x);
                if (!have || lex_less_word(cand, best)) best = cand;
                have = true;
            }
            if (have) {
                found[beta] = 1;
                found_rep[beta] = best;
                ++added;
            }
        }
        if (added == 0) break;
#pragma omp parallel for schedule(static)
        for (int64_t beta = 0; beta < size; ++beta)
            if (found[beta]) {
                t.dist[beta] = w + 1;
                t.rep[beta] = found_rep[beta];
            }
    }
    return t;
}

std::vector<double> cloud_sums(std::span<const uint64_t> bases, std::span<const std::vector<uint64_t>> shifted, int N,
                               int power) {
    check_cloud(bases, shifted, N);
    const int64_t C = static_cast<int64_t>(bases.size());
    std::vector<double> out(static_cast<size_t>(C * C));
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < C; ++i)
        for (int64_t j = 0; j < C; ++j) out[i * C + j] = cloud_entry(bases[i], shifted[j], N, power);
    return out;
}

CutScan balanced_cut_scan(const DenseGraphView& g, double lo, double hi) {
    check_cut(g);
    const double total = total_degree(g);
    const int64_t blocks = static_cast<int64_t>(block_count(g.V));
    CutScan best;
#pragma omp parallel
    {
        CutScan local;
#pragma omp for schedule(dynamic)
        for (int64_t b = 0; b < blocks; ++b) {
            const CutScan c = scan_block(g, static_cast<uint64_t>(b), lo, hi, total);
            if (cut_better(c, local)) local = c;
        }
#pragma omp critical
        if (cut_better(local, best)) best = local;
    }
    return best;
}

}  // namespace parallel

}  // namespace derand::kernels
