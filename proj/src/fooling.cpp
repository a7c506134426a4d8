#include "derand/fooling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "derand/config.hpp"
#include "derand/errors.hpp"
#include "derand/reed_muller.hpp"

namespace derand {

namespace {

constexpr double kGrid = 4294967296.0;  // 2^32
constexpr double kZ99 = 2.5758293035489004;

void check_fooling_inputs(const MultilinearPolynomial& p, uint64_t n, int ell) {
    if (p.degree() > ell) throw ParameterError("fooling error: polynomial degree exceeds the generator's ell");
    if (static_cast<uint64_t>(p.max_variable()) > n) throw ParameterError("fooling error: polynomial uses variables beyond n");
    if (!(p.l2_norm() > 0)) throw ParameterError("fooling error: polynomial must be nonzero");
}

}  // namespace

double snap_value(double v) { return std::nearbyint(v * kGrid) / kGrid; }

// ---------------------------------------------------------------- distributions

DiscreteDistribution::DiscreteDistribution(std::vector<double> values, std::vector<double> weights) {
    if (values.size() != weights.size()) throw ParameterError("distribution: values and weights differ in length");
    if (values.empty()) throw ParameterError("distribution: empty support");
    std::vector<size_t> order(values.size());
    double total = 0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ParameterError("distribution: non-finite support point");
        if (!(weights[i] >= 0)) throw ParameterError("distribution: negative weight");
        values[i] = snap_value(values[i]);
        total += weights[i];
        order[i] = i;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("distribution: weights do not sum to 1");
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    for (size_t i : order) {
        if (weights[i] == 0) continue;
        if (!support_.empty() && support_.back() == values[i])
            weights_.back() += weights[i];
        else {
            support_.push_back(values[i]);
            weights_.push_back(weights[i]);
        }
    }
}

DiscreteDistribution DiscreteDistribution::uniform_over(std::span<const double> values) {
    if (values.empty()) throw ParameterError("distribution: empty sample");
    std::vector<double> v(values.begin(), values.end());
    for (double& x : v) {
        if (!std::isfinite(x)) throw ParameterError("distribution: non-finite support point");
        x = snap_value(x);
    }
    std::sort(v.begin(), v.end());
    DiscreteDistribution d;
    const double inv = 1.0 / static_cast<double>(v.size());
    for (size_t i = 0; i < v.size();) {
        size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        d.support_.push_back(v[i]);
        d.weights_.push_back(static_cast<double>(j - i) * inv);
        i = j;
    }
    return d;
}

DiscreteDistribution DiscreteDistribution::point_mass(double v) { return DiscreteDistribution({v}, {1.0}); }

DiscreteDistribution DiscreteDistribution::mixture(std::span<const std::pair<double, DiscreteDistribution>> parts) {
    std::vector<double> vals, ws;
    for (const auto& [w, d] : parts)
        for (size_t i = 0; i < d.size(); ++i) {
            vals.push_back(d.support_[i]);
            ws.push_back(w * d.weights_[i]);
        }
    return DiscreteDistribution(std::move(vals), std::move(ws));
}

double DiscreteDistribution::mean() const {
    double m = 0;
    for (size_t i = 0; i < size(); ++i) m += support_[i] * weights_[i];
    return m;
}

DiscreteDistribution pushforward_cube(const MultilinearPolynomial& p, int n) {
    if (n < p.max_variable()) throw ParameterError("pushforward: n below the polynomial's max variable");
    if (n > 40) throw CapExceeded("pushforward_cube: cube not enumerable", std::ldexp(1.0, n), enumeration_cap());
    require_within_cap(std::ldexp(1.0, n), "pushforward_cube");
    const CompiledPolynomial cp(p);
    const uint64_t total = uint64_t{1} << n;
    std::vector<double> vals(total);
    for (uint64_t x = 0; x < total; ++x) vals[x] = cp(x);
    return DiscreteDistribution::uniform_over(vals);
}

DiscreteDistribution pushforward_subspace(const MultilinearPolynomial& p, const gf2::WordBasis& basis) {
    require_within_cap(std::ldexp(1.0, static_cast<int>(basis.rank())), "pushforward_subspace");
    const CompiledPolynomial cp(p);
    const auto members = gf2::span_members(basis);
    std::vector<double> vals(members.size());
    for (size_t i = 0; i < members.size(); ++i) vals[i] = cp(members[i]);
    return DiscreteDistribution::uniform_over(vals);
}

namespace {

// Walks the merged support calling fn(point, F_a, F_b, next_point_or_same).
template <class Fn>
void walk_cdfs(const DiscreteDistribution& a, const DiscreteDistribution& b, Fn&& fn) {
    size_t i = 0, j = 0;
    double fa = 0, fb = 0;
    const auto& sa = a.support();
    const auto& sb = b.support();
    while (i < sa.size() || j < sb.size()) {
        double z;
        if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j]))
            z = sa[i];
        else
            z = sb[j];
        while (i < sa.size() && sa[i] == z) fa += a.weights()[i++];
        while (j < sb.size() && sb[j] == z) fb += b.weights()[j++];
        double next = z;
        if (i < sa.size()) next = sa[i];
        if (j < sb.size()) next = (i < sa.size()) ? std::min(next, sb[j]) : sb[j];
        fn(z, fa, fb, next);
    }
}

}  // namespace

double wasserstein1(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.size() == 0 || b.size() == 0) throw ParameterError("wasserstein1: empty distribution");
    double area = 0;
    walk_cdfs(a, b, [&](double z, double fa, double fb, double next) { area += std::abs(fa - fb) * (next - z); });
    return area;
}

double kolmogorov(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.size() == 0 || b.size() == 0) throw ParameterError("kolmogorov: empty distribution");
    double best = 0;
    walk_cdfs(a, b, [&](double, double fa, double fb, double) { best = std::max(best, std::abs(fa - fb)); });
    return std::min(best, 1.0);
}

// ---------------------------------------------------------------- generator laws

double inner_tv_distance(const KWiseSource& inner, std::span<const uint64_t> bucket_sizes) {
    const auto images = inner.seed_images();
    double worst = 0;
    for (uint64_t c : bucket_sizes) {
        if (c == 0) continue;
        const uint64_t mask = c >= 64 ? ~uint64_t{0} : (uint64_t{1} << c) - 1;
        gf2::WordBasis b;
        for (uint64_t v : images) b.insert(v & mask);
        worst = std::max(worst, 1.0 - std::ldexp(1.0, static_cast<int>(b.rank()) - static_cast<int>(c)));
    }
    return worst;
}

GeneratorLaw exact_generator_law(const HashingGenerator& gen) {
    const auto& prm = gen.params();
    if (prm.n > 64) throw CapExceeded("exact_generator_law: n > 64", std::ldexp(1.0, 64), enumeration_cap());
    const uint64_t members = gen.hash_family_size();
    require_within_cap(static_cast<double>(members), "exact_generator_law (hash family)");

    std::map<std::vector<uint32_t>, std::pair<uint64_t, std::vector<uint32_t>>> parts;
    for (uint64_t s = 0; s < members; ++s) {
        auto h = gen.hash_function(s);
        std::vector<uint32_t> key(h.size());
        std::map<uint32_t, uint32_t> relabel;
        for (size_t i = 0; i < h.size(); ++i) {
            auto it = relabel.try_emplace(h[i], static_cast<uint32_t>(relabel.size())).first;
            key[i] = it->second;
        }
        auto& slot = parts[key];
        if (slot.first++ == 0) slot.second = std::move(h);
    }

    GeneratorLaw law;
    law.n = prm.n;
    law.ell = prm.ell;
    law.t = prm.t;
    std::vector<uint64_t> sizes;
    double points = 0;
    for (auto& [key, entry] : parts) {
        LawComponent c;
        c.weight = static_cast<double>(entry.first) / static_cast<double>(members);
        c.h = std::move(entry.second);
        c.basis = gen.conditional_basis(c.h);
        points += std::ldexp(1.0, static_cast<int>(c.basis.rank()));
        require_within_cap(points, "exact_generator_law (support)");
        std::map<uint32_t, uint64_t> bucket;
        for (uint32_t b : c.h) ++bucket[b];
        for (const auto& [b, sz] : bucket) sizes.push_back(sz);
        law.components.push_back(std::move(c));
    }
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    law.delta_observed = inner_tv_distance(gen.inner(), sizes);
    return law;
}

GeneratorLaw uniform_law(uint64_t n, int ell) {
    if (n < 1 || n > 64) throw ParameterError("uniform_law: n must lie in [1, 64]");
    GeneratorLaw law;
    law.n = n;
    law.ell = ell;
    law.t = n;
    LawComponent c;
    c.weight = 1;
    for (uint64_t i = 0; i < n; ++i) {
        c.h.push_back(static_cast<uint32_t>(i));
        c.basis.insert(uint64_t{1} << i);
    }
    law.components.push_back(std::move(c));
    return law;
}

FoolingResult lipschitz_fooling_error(const MultilinearPolynomial& p, const GeneratorLaw& law) {
    check_fooling_inputs(p, law.n, law.ell);
    const int n = static_cast<int>(law.n);
    require_within_cap(std::ldexp(1.0, n) * static_cast<double>(law.components.size()), "fooling error (cube x partitions)");

    FoolingResult r;
    r.scale = p.l2_norm();
    const auto q = p.scaled(1.0 / r.scale);
    const CompiledPolynomial cq(q);
    const auto x_law = pushforward_cube(q, n);
    const uint64_t cube = uint64_t{1} << n;

    Decomposition dec;
    dec.delta_observed = law.delta_observed;
    dec.partitions = law.components.size();
    std::vector<std::pair<double, DiscreteDistribution>> y_parts;
    for (const auto& c : law.components) {
        const auto qh = prune_h_bad(q, c.h);
        const CompiledPolynomial cqh(qh);

        double px = 0;
        std::vector<double> xh(cube);
        for (uint64_t x = 0; x < cube; ++x) {
            xh[x] = cqh(x);
            px += std::abs(cq(x) - xh[x]);
        }
        px /= static_cast<double>(cube);

        const auto members = gf2::span_members(c.basis);
        std::vector<double> y(members.size()), yh(members.size());
        double py = 0;
        for (size_t k = 0; k < members.size(); ++k) {
            y[k] = cq(members[k]);
            yh[k] = cqh(members[k]);
            py += std::abs(y[k] - yh[k]);
        }
        py /= static_cast<double>(members.size());

        const auto xh_law = DiscreteDistribution::uniform_over(xh);
        const auto yh_law = DiscreteDistribution::uniform_over(yh);
        const double hyb = wasserstein1(xh_law, yh_law);
        dec.pruning_x += c.weight * px;
        dec.pruning_y += c.weight * py;
        dec.hybrid_avg += c.weight * hyb;
        dec.hybrid_max = std::max(dec.hybrid_max, hyb);
        dec.kolmogorov_max = std::max(dec.kolmogorov_max, kolmogorov(xh_law, yh_law));
        y_parts.emplace_back(c.weight, DiscreteDistribution::uniform_over(y));
    }
    double wsum = 0;
    for (const auto& part : y_parts) wsum += part.first;
    for (auto& part : y_parts) part.first /= wsum;
    const auto y_law = DiscreteDistribution::mixture(y_parts);

    r.w1 = wasserstein1(x_law, y_law);
    r.w1_unnormalized = r.w1 * r.scale;
    r.exact = true;
    r.ci_low = r.ci_high = r.w1;

    const double t = static_cast<double>(law.t);
    dec.pruning_bound = law.ell / std::sqrt(t);
    dec.hybrid_bound = 4.0 * std::sqrt(t * law.delta_observed);
    dec.kolmogorov_bound = t * law.delta_observed;
    constexpr double slack = 1e-12;
    dec.pruning_ok = dec.pruning_x <= dec.pruning_bound + slack && dec.pruning_y <= dec.pruning_bound + slack;
    dec.hybrid_ok = dec.hybrid_max <= dec.hybrid_bound + slack;
    dec.kolmogorov_ok = dec.kolmogorov_max <= dec.kolmogorov_bound + slack;
    dec.triangle_ok = r.w1 <= dec.pruning_x + dec.hybrid_avg + dec.pruning_y + slack;
    r.decomposition = dec;
    return r;
}

namespace {

FoolingResult monte_carlo_fooling(const MultilinearPolynomial& p, const HashingGenerator& gen, const FoolingOptions& opts) {
    if (opts.samples == 0) throw ParameterError("fooling error: Monte Carlo mode needs a sample count");
    const int batches = std::max(2, opts.batches);
    const uint64_t per = std::max<uint64_t>(1, opts.samples / batches);
    const uint64_t total = per * batches;
    const uint64_t n = gen.params().n;

    FoolingResult r;
    r.scale = p.l2_norm();
    const auto q = p.scaled(1.0 / r.scale);
    std::mt19937_64 rng(opts.rng_seed);

    std::vector<double> xs(total), ys(total);
    SignVector x(n);
    SeedBits seed(gen.seed_bits());
    for (uint64_t s = 0; s < total; ++s) {
        for (auto& xi : x) xi = (rng() & 1u) ? -1 : 1;
        xs[s] = q.evaluate(x);
        for (auto& b : seed) b = rng() & 1u;
        ys[s] = q.evaluate(gen.sample(seed));
    }
    r.w1 = wasserstein1(DiscreteDistribution::uniform_over(xs), DiscreteDistribution::uniform_over(ys));

    std::vector<double> bw(batches);
    for (int b = 0; b < batches; ++b) {
        const std::span<const double> bx(xs.data() + b * per, per), by(ys.data() + b * per, per);
        bw[b] = wasserstein1(DiscreteDistribution::uniform_over(bx), DiscreteDistribution::uniform_over(by));
    }
    const double mean = std::accumulate(bw.begin(), bw.end(), 0.0) / batches;
    double var = 0;
    for (double v : bw) var += (v - mean) * (v - mean);
    var /= (batches - 1);
    r.std_error = std::sqrt(var / batches);
    r.ci_low = std::max(0.0, r.w1 - kZ99 * r.std_error);
    r.ci_high = r.w1 + kZ99 * r.std_error;
    r.w1_unnormalized = r.w1 * r.scale;
    r.exact = false;
    r.samples = total;
    return r;
}

}  // namespace

FoolingResult lipschitz_fooling_error(const MultilinearPolynomial& p, const HashingGenerator& gen,
                                      const FoolingOptions& opts) {
    check_fooling_inputs(p, gen.params().n, gen.params().ell);
    if (opts.mode == FoolingMode::MonteCarlo) return monte_carlo_fooling(p, gen, opts);
    try {
        return lipschitz_fooling_error(p, exact_generator_law(gen));
    } catch (const CapExceeded&) {
        if (opts.mode == FoolingMode::Exact || opts.samples == 0) throw;
    }
    return monte_carlo_fooling(p, gen, opts);
}

// ---------------------------------------------------------------- tail bound

TailBoundAudit tail_bound_audit(int k, uint64_t N, double thr, uint64_t trials, uint64_t rng_seed) {
    if (k < 2 || k % 2 != 0) throw ParameterError("tail_bound_audit: k must be even and >= 2");
    if (N < 1) throw ParameterError("tail_bound_audit: N must be >= 1");
    if (!(thr > 0)) throw ParameterError("tail_bound_audit: threshold must be positive");

    const KWiseSource src(N, static_cast<uint64_t>(k));
    TailBoundAudit a;
    a.rhs = std::exp(0.5 * k * std::log(static_cast<double>(k)) - k * std::log(thr));
    const double limit = thr * thr * static_cast<double>(N);
    auto hit = [&](int64_t s) { return static_cast<double>(s * s) >= limit; };

    bool exact = N <= 64;
    gf2::WordBasis basis;
    if (exact) {
        basis = src.image_basis();
        exact = std::ldexp(1.0, static_cast<int>(basis.rank())) <= static_cast<double>(enumeration_cap());
    }
    if (exact) {
        uint64_t count = 0;
        const auto members = gf2::span_members(basis);
        for (uint64_t w : members) count += hit(static_cast<int64_t>(N) - 2 * __builtin_popcountll(w));
        a.lhs = static_cast<double>(count) / static_cast<double>(members.size());
        a.exact = true;
    } else {
        if (trials == 0) throw CapExceeded("tail_bound_audit: seed space not enumerable", std::ldexp(1.0, static_cast<int>(src.seed_bits())), enumeration_cap());
        std::mt19937_64 rng(rng_seed);
        SeedBits seed(src.seed_bits());
        uint64_t count = 0;
        for (uint64_t s = 0; s < trials; ++s) {
            for (auto& b : seed) b = rng() & 1u;
            const auto x = kwise_sample(src, seed);
            count += hit(std::accumulate(x.begin(), x.end(), int64_t{0}));
        }
        a.lhs = static_cast<double>(count) / static_cast<double>(trials);
        a.exact = false;
        a.samples = trials;
    }
    a.ok = a.lhs <= a.rhs;
    return a;
}

// ---------------------------------------------------------------- invariance

double zeta(double x) {
    const double m = std::min({0.0, x, 1.0 - x});
    return m * m;
}

InvarianceGap invariance_gap(const MultilinearPolynomial& p, int n_rm, int d, uint64_t samples, uint64_t rng_seed) {
    if (n_rm < 0 || n_rm > 6) throw ParameterError("invariance_gap: n_rm must lie in [0, 6]");
    const int N = 1 << n_rm;
    if (p.max_variable() > N) throw ParameterError("invariance_gap: polynomial uses more than 2^n_rm variables");
    const CompiledPolynomial cp(p);

    InvarianceGap g;
    double sum = 0;
    const auto code = rm_generator_matrix(n_rm, d);
    uint64_t count = 0;
    for_each_codeword(code, [&](uint64_t, const BitVector& cw) {
        sum += zeta(cp(cw.word()));
        ++count;
    });
    g.e_code = sum / static_cast<double>(count);

    if (std::ldexp(1.0, N) <= static_cast<double>(enumeration_cap())) {
        double s = 0;
        const uint64_t total = uint64_t{1} << N;
        for (uint64_t x = 0; x < total; ++x) s += zeta(cp(x));
        g.e_cube = s / static_cast<double>(total);
        g.cube_exact = true;
    } else {
        if (samples == 0) throw CapExceeded("invariance_gap: cube not enumerable", std::ldexp(1.0, N), enumeration_cap());
        std::mt19937_64 rng(rng_seed);
        const uint64_t mask = N >= 64 ? ~uint64_t{0} : (uint64_t{1} << N) - 1;
        double s = 0;
        for (uint64_t i = 0; i < samples; ++i) s += zeta(cp(rng() & mask));
        g.e_cube = s / static_cast<double>(samples);
        g.cube_exact = false;
        g.samples = samples;
    }
    g.gap = std::abs(g.e_cube - g.e_code);
    return g;
}

double inner_halfspace_audit(const KWiseSource& inner, int trials, uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss;
    const uint64_t n = inner.n();
    double worst = 0;
    std::vector<double> w(n);
    for (int t = 0; t < trials; ++t) {
        double theta = 0;
        for (auto& wi : w) {
            wi = gauss(rng);
            theta += (rng() & 1u) ? wi : -wi;
        }
        worst = std::max(worst, halfspace_error(inner, w, theta));
    }
    return worst;
}

}  // namespace derand
