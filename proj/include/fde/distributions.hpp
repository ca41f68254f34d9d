#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "fde/random.hpp"

namespace fde {

struct Gaussian1D {
    double mean = 0.0;
    double variance = 1.0;

    /// Checked constructor; throws InvalidInput unless variance > 0.
    static Gaussian1D make(double mean, double variance);
};

struct MixtureComponent {
    double weight;
    double mean;
    double variance;
};

struct GaussianMixture1D {
    std::vector<MixtureComponent> components;

    /// Checked constructor: nonempty, weights nonnegative summing to 1 within 1e-12, variances positive.
    static GaussianMixture1D make(std::vector<MixtureComponent> components);
};

/// Finite-support law. Locations are stored row-major, `dim` values per atom.
struct Atomic {
    std::size_t dim = 1;
    std::vector<double> locations;
    std::vector<double> masses;

    static Atomic make(std::size_t dim, std::vector<double> locations, std::vector<double> masses);
    /// One-dimensional convenience: pairs of (location, mass).
    static Atomic make_1d(std::vector<std::pair<double, double>> atoms);
    static Atomic point_mass(double location) { return Atomic{1, {location}, {1.0}}; }

    std::size_t size() const noexcept { return masses.size(); }
    std::span<const double> location(std::size_t i) const noexcept {
        return {locations.data() + i * dim, dim};
    }
};

/// Points stored row-major, `dim` values per point.
struct EmpiricalSample {
    std::size_t dim = 1;
    std::vector<double> points;

    static EmpiricalSample make(std::size_t dim, std::vector<double> points);
    std::size_t size() const noexcept { return dim == 0 ? 0 : points.size() / dim; }
    std::span<const double> point(std::size_t i) const noexcept { return {points.data() + i * dim, dim}; }
};

using Distribution = std::variant<Gaussian1D, GaussianMixture1D, Atomic, EmpiricalSample>;

std::size_t dimension(const Distribution& d) noexcept;

/// Law of r + gamma * X for X ~ dist, in the same representation.
Distribution push_forward(const Distribution& dist, std::span<const double> r, double gamma);
Distribution push_forward(const Distribution& dist, double r, double gamma);
Atomic push_forward(const Atomic& dist, double r, double gamma);

/// Weighted mixture of same-family parts. Gaussian parts yield a GaussianMixture1D,
/// mixtures flatten, atomic parts concatenate (no merging).
Distribution mixture(const std::vector<std::pair<double, Distribution>>& parts);

/// Sorts atoms by location and merges those closer than `tol` (1-D only).
Atomic merge_atoms(Atomic a, double tol);

double mean(const Distribution& d);
double cdf(const Distribution& d, double z);
/// inf{z : CDF(z) >= u} for one-dimensional laws.
double quantile_fn(const Distribution& d, double u);

EmpiricalSample sample(const Distribution& d, std::size_t n, Rng& rng);

}  // namespace fde
