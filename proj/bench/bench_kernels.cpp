#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "derand/kernels.hpp"

namespace k = derand::kernels;

namespace {

std::vector<uint64_t> random_words(size_t count, int bits, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const uint64_t mask = bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
    std::vector<uint64_t> v(count);
    for (auto& x : v) x = rng() & mask;
    return v;
}

template <bool Par>
void BM_wht(benchmark::State& st) {
    std::vector<double> a(size_t{1} << st.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (auto& x : a) x = g(rng);
    for (auto _ : st) {
        auto b = a;
        if constexpr (Par) k::parallel::wht(b);
        else k::serial::wht(b);
        benchmark::DoNotOptimize(b.data());
    }
}

template <bool Par>
void BM_output_histogram(benchmark::State& st) {
    const auto images = random_words(static_cast<size_t>(st.range(0)), 16, 2);
    for (auto _ : st) {
        auto h = Par ? k::parallel::output_histogram(images) : k::serial::output_histogram(images);
        benchmark::DoNotOptimize(h.data());
    }
}

template <bool Par>
void BM_coset_table(benchmark::State& st) {
    const int kbits = static_cast<int>(st.range(0));
    const auto cols = random_words(32, kbits, 3);
    for (auto _ : st) {
        auto t = Par ? k::parallel::coset_table(cols, kbits) : k::serial::coset_table(cols, kbits);
        benchmark::DoNotOptimize(t.rep.data());
    }
}

template <bool Par>
void BM_cloud_sums(benchmark::State& st) {
    const int C = static_cast<int>(st.range(0));
    const auto bases = random_words(static_cast<size_t>(C), 64, 4);
    std::vector<std::vector<uint64_t>> shifted(C);
    for (int i = 0; i < C; ++i) shifted[i] = random_words(64, 64, 100 + i);
    for (auto _ : st) {
        auto s = Par ? k::parallel::cloud_sums(bases, shifted, 64, 9) : k::serial::cloud_sums(bases, shifted, 64, 9);
        benchmark::DoNotOptimize(s.data());
    }
}

template <bool Par>
void BM_balanced_cut_scan(benchmark::State& st) {
    const int V = static_cast<int>(st.range(0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u;
    std::vector<double> w(static_cast<size_t>(V) * V, 0.0), deg(V, 0.0);
    for (int i = 0; i < V; ++i)
        for (int j = i + 1; j < V; ++j) w[i * V + j] = w[j * V + i] = u(rng);
    double total = 0;
    for (int i = 0; i < V; ++i) {
        for (int j = 0; j < V; ++j) deg[i] += w[i * V + j];
        total += deg[i];
    }
    for (auto& x : w) x /= total;
    for (auto& x : deg) x /= total;
    const k::DenseGraphView g{V, w, deg};
    for (auto _ : st) {
        auto r = Par ? k::parallel::balanced_cut_scan(g, 0.25, 0.75) : k::serial::balanced_cut_scan(g, 0.25, 0.75);
        benchmark::DoNotOptimize(r.phi);
    }
}

}  // namespace

BENCHMARK(BM_wht<false>)->Name("wht/serial")->Arg(16)->Arg(20);
BENCHMARK(BM_wht<true>)->Name("wht/parallel")->Arg(16)->Arg(20);
BENCHMARK(BM_output_histogram<false>)->Name("output_histogram/serial")->Arg(16)->Arg(20);
BENCHMARK(BM_output_histogram<true>)->Name("output_histogram/parallel")->Arg(16)->Arg(20);
BENCHMARK(BM_coset_table<false>)->Name("coset_table/serial")->Arg(12)->Arg(16);
BENCHMARK(BM_coset_table<true>)->Name("coset_table/parallel")->Arg(12)->Arg(16);
BENCHMARK(BM_cloud_sums<false>)->Name("cloud_sums/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_cloud_sums<true>)->Name("cloud_sums/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_balanced_cut_scan<false>)->Name("balanced_cut_scan/serial")->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balanced_cut_scan<true>)->Name("balanced_cut_scan/parallel")->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
