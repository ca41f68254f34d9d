#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fde/distributions.hpp"
#include "fde/divergences.hpp"
#include "fde/random.hpp"

namespace fde {

enum class MetricKind { wasserstein, mmd, cramer };

/// Base metric eta together with its (S-L-C) constants: scale exponent c and
/// the smallest convexity exponent q for which the metric is q-convex.
struct MetricSpec {
    MetricKind kind = MetricKind::wasserstein;
    double p = 1.0;    ///< wasserstein order
    KernelSpec kernel; ///< mmd kernel
    double c = 1.0;
    double q = 1.0;

    static MetricSpec wasserstein(double p);
    /// Constants are tabulated for the energy kernel (c = beta/2, q = 1); other kernels get c = 0.
    static MetricSpec mmd(KernelSpec k);
    /// The l2 (Cramer) distance sqrt(int (F - G)^2): c = 1/2, q = 2.
    static MetricSpec cramer();
};

enum class ExtensionMode { supremum, expectation };

struct ExtensionSpec {
    ExtensionMode mode = ExtensionMode::supremum;
    double q = 1.0;
    std::vector<double> weights;

    static ExtensionSpec supremum() { return {}; }
    /// Checked: q >= 1, weights nonnegative summing to 1 within 1e-9.
    static ExtensionSpec expectation(double q, std::vector<double> weights);
};

/// W_p between one-dimensional laws. Atomic and empirical pairs are exact;
/// anything involving a Gaussian or mixture integrates the quantile gap on the
/// 4096-point Gauss-Legendre grid.
double wasserstein_1d(double p, const Distribution& a, const Distribution& b);
double wasserstein_1d(double p, const Atomic& a, const Atomic& b);

/// eta(a, b) for the metric. mmd returns the square root of MMD^2.
double metric_distance(const MetricSpec& metric, const Distribution& a, const Distribution& b);
double metric_distance(const MetricSpec& metric, const Atomic& a, const Atomic& b);

/// Combines per-pair distances: max for supremum, (sum w eta^(2q))^(1/(2q)) for expectation.
double extend(const ExtensionSpec& ext, std::span<const double> per_pair);

/// Extension of eta over two tables indexed identically; per-pair distances run in parallel.
double metric_extension(const MetricSpec& metric, const ExtensionSpec& ext, const std::vector<Distribution>& u1,
                        const std::vector<Distribution>& u2);
double metric_extension(const MetricSpec& metric, const ExtensionSpec& ext, const std::vector<Atomic>& u1,
                        const std::vector<Atomic>& u2);

/// gamma^c for the supremum extension, gamma^(c - 1/(2q)) for the expectation
/// extension with the extension's q. Throws InvalidInput when c <= 1/(2q) or
/// when the extension's q is below the metric's convexity exponent.
double contraction_factor(const MetricSpec& metric, const ExtensionSpec& ext, double gamma);

struct SlcViolation {
    std::string property; ///< "scale", "location" or "convexity"
    std::size_t trial;
    double lhs;
    double rhs;
};

struct SlcReport {
    std::size_t trials = 0;
    std::vector<SlcViolation> violations;
    bool passed() const noexcept { return violations.empty(); }
};

/// Randomized check of scale sensitivity (exponent metric.c), location
/// insensitivity and q-convexity (exponent metric.q) on one-dimensional atomic
/// laws. A pass means no counterexample in `trials` draws.
SlcReport slc_property_check(const MetricSpec& metric, std::size_t trials, Rng& rng);

/// Energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'|, i.e. energy-kernel MMD^2 with beta = 1.
double energy_distance(const Atomic& a, const Atomic& b);

/// Random one-dimensional atomic law: 1..max_atoms atoms uniform on [lo, hi], Dirichlet(1) masses.
Atomic random_atomic(Rng& rng, std::size_t max_atoms, double lo, double hi);

}  // namespace fde
