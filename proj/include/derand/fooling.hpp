#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "derand/gf2.hpp"
#include "derand/polynomial.hpp"
#include "derand/pseudorandom.hpp"

namespace derand {

// Finite law on the real line. Support points are snapped to a 2^-32 grid so
// that mathematically equal values computed along different paths coincide.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    // Weights must be positive and sum to 1 within 1e-12; duplicates merge.
    DiscreteDistribution(std::vector<double> values, std::vector<double> weights);
    // Equal-weight empirical law.
    static DiscreteDistribution uniform_over(std::span<const double> values);
    static DiscreteDistribution point_mass(double v);
    // Weighted mixture; weights must sum to 1.
    static DiscreteDistribution mixture(std::span<const std::pair<double, DiscreteDistribution>> parts);

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    size_t size() const noexcept { return support_.size(); }
    double mean() const;

    // 0 for an exact law; otherwise the number of samples it was built from.
    uint64_t samples = 0;

private:
    std::vector<double> support_;
    std::vector<double> weights_;
};

double snap_value(double v);

// Law of P(x) for x uniform on {1,-1}^n (n >= max variable); refuses above the cap.
DiscreteDistribution pushforward_cube(const MultilinearPolynomial& p, int n);
// Law of P(x) for x uniform on a subspace of packed points (bit i-1 set: x_i = -1).
DiscreteDistribution pushforward_subspace(const MultilinearPolynomial& p, const gf2::WordBasis& basis);
// Empirical law from `samples` draws of a packed-point sampler.
template <class Sampler>
DiscreteDistribution pushforward_sampled(const MultilinearPolynomial& p, Sampler&& draw, uint64_t samples) {
    const CompiledPolynomial cp(p);
    std::vector<double> vals(samples);
    for (uint64_t s = 0; s < samples; ++s) vals[s] = cp(draw());
    auto d = DiscreteDistribution::uniform_over(vals);
    d.samples = samples;
    return d;
}

double wasserstein1(const DiscreteDistribution& a, const DiscreteDistribution& b);
double kolmogorov(const DiscreteDistribution& a, const DiscreteDistribution& b);

// The exact output law of a generator: a mixture over hash partitions of
// uniform laws on subspaces.
struct LawComponent {
    double weight = 0;
    std::vector<uint32_t> h;  // bucket of each coordinate
    gf2::WordBasis basis;
};
struct GeneratorLaw {
    uint64_t n = 0;
    int ell = 0;
    uint64_t t = 1;
    // max over occurring bucket sizes c of TV(inner restricted to c coords, uniform)
    double delta_observed = 0;
    std::vector<LawComponent> components;
};

// Groups hash functions by the partition they induce; refuses above the cap.
GeneratorLaw exact_generator_law(const HashingGenerator& gen);
// The uniform cube as a one-component law with singleton buckets.
GeneratorLaw uniform_law(uint64_t n, int ell);
// 1 - 2^(rank_c - c) maximized over the given bucket sizes.
double inner_tv_distance(const KWiseSource& inner, std::span<const uint64_t> bucket_sizes);

enum class FoolingMode { Auto, Exact, MonteCarlo };

struct FoolingOptions {
    FoolingMode mode = FoolingMode::Auto;
    uint64_t samples = 0;
    uint64_t rng_seed = 1;
    int batches = 20;
};

struct Decomposition {
    double pruning_x = 0;        // E_h E_X |P - P_h|
    double pruning_y = 0;        // E_h E_Y |P - P_h|
    double pruning_bound = 0;    // ell / sqrt(t)
    double hybrid_avg = 0;       // E_h W1(P_h(X), P_h(Y_h))
    double hybrid_max = 0;
    double hybrid_bound = 0;     // 4 sqrt(t delta_observed)
    double kolmogorov_max = 0;   // max_h Kolmogorov(P_h(X), P_h(Y_h))
    double kolmogorov_bound = 0; // t delta_observed
    double delta_observed = 0;
    bool triangle_ok = false;
    bool pruning_ok = false;
    bool hybrid_ok = false;
    bool kolmogorov_ok = false;
    size_t partitions = 0;
};

struct FoolingResult {
    double w1 = 0;               // for P / ||P||
    double w1_unnormalized = 0;
    double scale = 1;            // ||P||
    bool exact = true;
    uint64_t samples = 0;
    double std_error = 0;
    double ci_low = 0, ci_high = 0;
    std::optional<Decomposition> decomposition;
};

FoolingResult lipschitz_fooling_error(const MultilinearPolynomial& p, const HashingGenerator& gen,
                                      const FoolingOptions& opts = {});
// Exact evaluation against a prepared law (used for the uniform baseline).
FoolingResult lipschitz_fooling_error(const MultilinearPolynomial& p, const GeneratorLaw& law);

struct TailBoundAudit {
    double lhs = 0;
    double rhs = 0;
    bool ok = false;
    bool exact = true;
    uint64_t samples = 0;
};

// P[|sum X_i| >= thr sqrt(N)] for the k-wise source of length N vs k^{k/2} / thr^k.
TailBoundAudit tail_bound_audit(int k, uint64_t N, double thr, uint64_t trials = 0, uint64_t rng_seed = 1);

double zeta(double x);

struct InvarianceGap {
    double gap = 0;
    double e_cube = 0;
    double e_code = 0;
    bool cube_exact = true;
    uint64_t samples = 0;
};

// |E_X zeta(P(X)) - E_{Y in RM(n_rm, d)} zeta(P(Y))| with coordinate p of a
// codeword feeding variable p + 1.
InvarianceGap invariance_gap(const MultilinearPolynomial& p, int n_rm, int d, uint64_t samples = 0,
                             uint64_t rng_seed = 1);

// Max over random Gaussian halfspaces of the inner source's exact error.
double inner_halfspace_audit(const KWiseSource& inner, int trials, uint64_t rng_seed);

}  // namespace derand
