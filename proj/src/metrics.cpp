#include "fde/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <type_traits>

#include "fde/error.hpp"
#include "fde/quadrature.hpp"

namespace fde {

namespace {

Atomic sorted_1d(const Atomic& a) {
    if (a.dim != 1) throw Unsupported("one-dimensional law required");
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a.locations[i] < a.locations[j]; });
    Atomic out{1, {}, {}};
    out.locations.reserve(a.size());
    out.masses.reserve(a.size());
    for (auto i : idx) {
        out.locations.push_back(a.locations[i]);
        out.masses.push_back(a.masses[i]);
    }
    return out;
}

Atomic as_atomic(const EmpiricalSample& e) {
    const double w = 1.0 / static_cast<double>(e.size());
    return Atomic{e.dim, e.points, std::vector<double>(e.size(), w)};
}

bool is_discrete(const Distribution& d) {
    return std::holds_alternative<Atomic>(d) || std::holds_alternative<EmpiricalSample>(d);
}

Atomic discrete(const Distribution& d) {
    if (const auto* a = std::get_if<Atomic>(&d)) return *a;
    return as_atomic(std::get<EmpiricalSample>(d));
}

GaussianMixture1D as_gmm(const Distribution& d) {
    if (const auto* g = std::get_if<Gaussian1D>(&d)) return GaussianMixture1D{{{1.0, g->mean, g->variance}}};
    if (const auto* m = std::get_if<GaussianMixture1D>(&d)) return *m;
    throw Unsupported("metric needs both laws discrete or both Gaussian mixtures");
}

double pow_abs(double x, double p) { return p == 1.0 ? std::abs(x) : std::pow(std::abs(x), p); }

double kernel_distance(const MetricSpec& metric, const Distribution& a, const Distribution& b) {
    if (is_discrete(a) && is_discrete(b)) return metric_distance(metric, discrete(a), discrete(b));
    const DivergenceSpec spec =
        metric.kind == MetricKind::cramer ? DivergenceSpec::cramer() : DivergenceSpec::mmd(metric.kernel);
    Rng unused(0);
    return std::sqrt(std::max(divergence_gmm(spec, as_gmm(a), as_gmm(b), unused), 0.0));
}

}  // namespace

MetricSpec MetricSpec::wasserstein(double p) {
    if (!(p >= 1.0)) throw InvalidInput("wasserstein order must be >= 1");
    MetricSpec m;
    m.kind = MetricKind::wasserstein;
    m.p = p;
    m.c = 1.0;
    m.q = p;
    return m;
}

MetricSpec MetricSpec::mmd(KernelSpec k) {
    MetricSpec m;
    m.kind = MetricKind::mmd;
    m.kernel = k;
    m.c = k.kind == KernelKind::energy ? k.param / 2.0 : 0.0;
    m.q = 1.0;
    return m;
}

MetricSpec MetricSpec::cramer() {
    MetricSpec m;
    m.kind = MetricKind::cramer;
    m.c = 0.5;
    m.q = 2.0;
    return m;
}

ExtensionSpec ExtensionSpec::expectation(double q, std::vector<double> weights) {
    if (!(q >= 1.0)) throw InvalidInput("expectation extension requires q >= 1");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidInput("expectation weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("expectation weights must sum to 1");
    return {ExtensionMode::expectation, q, std::move(weights)};
}

double wasserstein_1d(double p, const Atomic& a_in, const Atomic& b_in) {
    if (!(p >= 1.0)) throw InvalidInput("wasserstein order must be >= 1");
    const Atomic a = sorted_1d(a_in), b = sorted_1d(b_in);
    // Walk the merged cumulative-mass breakpoints; quantiles are constant in between.
    std::size_t i = 0, j = 0;
    double ca = a.masses[0], cb = b.masses[0], u = 0.0, acc = 0.0;
    while (i < a.size() && j < b.size()) {
        const double next = std::min(ca, cb);
        if (next > u) acc += (next - u) * pow_abs(a.locations[i] - b.locations[j], p);
        u = std::max(u, next);
        const bool step_a = ca <= next, step_b = cb <= next;
        if (step_a && ++i < a.size()) ca += a.masses[i];
        if (step_b && ++j < b.size()) cb += b.masses[j];
    }
    return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein_1d(double p, const Distribution& a, const Distribution& b) {
    if (dimension(a) != 1 || dimension(b) != 1) throw Unsupported("wasserstein_1d requires one-dimensional laws");
    if (is_discrete(a) && is_discrete(b)) return wasserstein_1d(p, discrete(a), discrete(b));
    if (!(p >= 1.0)) throw InvalidInput("wasserstein order must be >= 1");
    const auto& grid = quantile_grid();
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const double u = grid.nodes[k];
        acc += grid.weights[k] * pow_abs(quantile_fn(a, u) - quantile_fn(b, u), p);
    }
    return std::pow(acc, 1.0 / p);
}

double metric_distance(const MetricSpec& metric, const Atomic& a_in, const Atomic& b_in) {
    // Fixed argument order so that d(a, b) and d(b, a) round identically.
    const bool swap = std::tie(b_in.locations, b_in.masses) < std::tie(a_in.locations, a_in.masses);
    const Atomic& a = swap ? b_in : a_in;
    const Atomic& b = swap ? a_in : b_in;
    switch (metric.kind) {
        case MetricKind::wasserstein: return wasserstein_1d(metric.p, a, b);
        case MetricKind::cramer: return std::sqrt(std::max(cramer_atomic(a, b), 0.0));
        case MetricKind::mmd: return std::sqrt(std::max(mmd_squared_atomic(metric.kernel, a, b), 0.0));
    }
    return 0.0;
}

double metric_distance(const MetricSpec& metric, const Distribution& a, const Distribution& b) {
    if (metric.kind == MetricKind::wasserstein) return wasserstein_1d(metric.p, a, b);
    return kernel_distance(metric, a, b);
}

double extend(const ExtensionSpec& ext, std::span<const double> per_pair) {
    if (per_pair.empty()) throw InvalidInput("extension over an empty index set");
    if (ext.mode == ExtensionMode::supremum) return *std::max_element(per_pair.begin(), per_pair.end());
    if (ext.weights.size() != per_pair.size()) throw InvalidInput("extension weights do not match the index set");
    const double e = 2.0 * ext.q;
    double acc = 0.0;
    for (std::size_t i = 0; i < per_pair.size(); ++i) acc += ext.weights[i] * std::pow(per_pair[i], e);
    return std::pow(acc, 1.0 / e);
}

namespace {

template <class T>
double extension_impl(const MetricSpec& metric, const ExtensionSpec& ext, const std::vector<T>& u1,
                      const std::vector<T>& u2) {
    if (u1.size() != u2.size()) throw InvalidInput("metric_extension: index sets differ");
    std::vector<double> d(u1.size());
    const auto n = static_cast<std::ptrdiff_t>(u1.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] =
            metric_distance(metric, u1[static_cast<std::size_t>(i)], u2[static_cast<std::size_t>(i)]);
    return extend(ext, d);
}

}  // namespace

double metric_extension(const MetricSpec& metric, const ExtensionSpec& ext, const std::vector<Distribution>& u1,
                        const std::vector<Distribution>& u2) {
    return extension_impl(metric, ext, u1, u2);
}

double metric_extension(const MetricSpec& metric, const ExtensionSpec& ext, const std::vector<Atomic>& u1,
                        const std::vector<Atomic>& u2) {
    return extension_impl(metric, ext, u1, u2);
}

double contraction_factor(const MetricSpec& metric, const ExtensionSpec& ext, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("contraction_factor requires gamma in (0,1)");
    if (!(metric.c > 0.0)) throw InvalidInput("metric has no scale-sensitivity constant");
    if (ext.mode == ExtensionMode::supremum) return std::pow(gamma, metric.c);
    if (ext.q < metric.q) throw InvalidInput("extension q is below the metric's convexity exponent");
    const double e = metric.c - 1.0 / (2.0 * ext.q);
    if (!(e > 0.0)) throw InvalidInput("no contraction: c <= 1/(2q)");
    return std::pow(gamma, e);
}

double energy_distance(const Atomic& a, const Atomic& b) { return mmd_squared_atomic(KernelSpec::energy(1.0), a, b); }

Atomic random_atomic(Rng& rng, std::size_t max_atoms, double lo, double hi) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % max_atoms);
    Atomic a{1, std::vector<double>(n), std::vector<double>(n)};
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a.locations[i] = lo + (hi - lo) * rng.uniform();
        a.masses[i] = -std::log1p(-rng.uniform());
        total += a.masses[i];
    }
    for (double& m : a.masses) m /= total;
    return a;
}

SlcReport slc_property_check(const MetricSpec& metric, std::size_t trials, Rng& rng) {
    if (trials == 0) throw InvalidInput("slc_property_check needs trials >= 1");
    SlcReport report;
    report.trials = trials;
    auto eta = [&](const Atomic& a, const Atomic& b) { return metric_distance(metric, a, b); };
    auto shifted = [](Atomic a, double z) {
        for (double& x : a.locations) x += z;
        return a;
    };
    auto mix = [](const Atomic& a, const Atomic& b, double lam) {
        Atomic out{1, a.locations, {}};
        out.locations.insert(out.locations.end(), b.locations.begin(), b.locations.end());
        for (double m : a.masses) out.masses.push_back(lam * m);
        for (double m : b.masses) out.masses.push_back((1.0 - lam) * m);
        return out;
    };
    for (std::size_t t = 0; t < trials; ++t) {
        const Atomic x = random_atomic(rng, 5, -5.0, 5.0), y = random_atomic(rng, 5, -5.0, 5.0);
        const double gamma = 0.05 + 0.9 * rng.uniform();
        const double z = -10.0 + 20.0 * rng.uniform();
        const double base = eta(x, y);

        const double scaled = eta(push_forward(x, 0.0, gamma), push_forward(y, 0.0, gamma));
        const double bound = std::pow(gamma, metric.c) * base + 1e-9;
        if (scaled > bound) report.violations.push_back({"scale", t, scaled, bound});

        const double moved = eta(shifted(x, z), shifted(y, z));
        if (moved > base + 1e-9) report.violations.push_back({"location", t, moved, base + 1e-9});

        const Atomic x2 = random_atomic(rng, 5, -5.0, 5.0), y2 = random_atomic(rng, 5, -5.0, 5.0);
        const double lam = rng.uniform();
        const double lhs = std::pow(eta(mix(x, x2, lam), mix(y, y2, lam)), metric.q);
        const double rhs = lam * std::pow(base, metric.q) + (1.0 - lam) * std::pow(eta(x2, y2), metric.q) + 1e-9;
        if (lhs > rhs) report.violations.push_back({"convexity", t, lhs, rhs});
    }
    return report;
}

}  // namespace fde
