#include "fde/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fde/error.hpp"
#include "fde/normal.hpp"

namespace fde {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in [0,1)");
}

void check_masses(const std::vector<double>& masses, const char* what) {
    double total = 0.0;
    for (double m : masses) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidInput(std::string(what) + ": negative or non-finite mass");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput(std::string(what) + ": masses must sum to 1");
}

std::vector<std::size_t> sorted_order(const Atomic& a) {
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return a.locations[i] < a.locations[j]; });
    return idx;
}

double gmm_cdf(const GaussianMixture1D& g, double z) {
    double c = 0.0;
    for (const auto& comp : g.components) c += comp.weight * normal::cdf((z - comp.mean) / std::sqrt(comp.variance));
    return c;
}

}  // namespace

Gaussian1D Gaussian1D::make(double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean))
        throw InvalidInput("Gaussian1D requires finite mean and variance > 0");
    return {mean, variance};
}

GaussianMixture1D GaussianMixture1D::make(std::vector<MixtureComponent> components) {
    if (components.empty()) throw InvalidInput("GaussianMixture1D needs at least one component");
    std::vector<double> w;
    w.reserve(components.size());
    for (const auto& c : components) {
        if (!(c.variance > 0.0)) throw InvalidInput("GaussianMixture1D component variance must be > 0");
        w.push_back(c.weight);
    }
    check_masses(w, "GaussianMixture1D");
    return {std::move(components)};
}

Atomic Atomic::make(std::size_t dim, std::vector<double> locations, std::vector<double> masses) {
    if (dim == 0) throw InvalidInput("Atomic dimension must be >= 1");
    if (masses.empty() || locations.size() != dim * masses.size())
        throw InvalidInput("Atomic locations/masses shape mismatch");
    check_masses(masses, "Atomic");
    return {dim, std::move(locations), std::move(masses)};
}

Atomic Atomic::make_1d(std::vector<std::pair<double, double>> atoms) {
    std::vector<double> loc, mass;
    for (auto [z, m] : atoms) {
        loc.push_back(z);
        mass.push_back(m);
    }
    return make(1, std::move(loc), std::move(mass));
}

EmpiricalSample EmpiricalSample::make(std::size_t dim, std::vector<double> points) {
    if (dim == 0 || points.empty() || points.size() % dim != 0)
        throw InvalidInput("EmpiricalSample must be nonempty with consistent dimension");
    return {dim, std::move(points)};
}

std::size_t dimension(const Distribution& d) noexcept {
    return std::visit(overloaded{[](const Gaussian1D&) -> std::size_t { return 1; },
                                 [](const GaussianMixture1D&) -> std::size_t { return 1; },
                                 [](const Atomic& a) { return a.dim; },
                                 [](const EmpiricalSample& e) { return e.dim; }},
                      d);
}

Atomic push_forward(const Atomic& a, double r, double gamma) {
    check_gamma(gamma);
    if (a.dim != 1) throw InvalidInput("scalar shift applied to multi-dimensional atoms");
    Atomic out = a;
    for (double& z : out.locations) z = r + gamma * z;
    return out;
}

Distribution push_forward(const Distribution& dist, std::span<const double> r, double gamma) {
    check_gamma(gamma);
    if (r.size() != dimension(dist)) throw InvalidInput("push_forward: shift dimension mismatch");
    return std::visit(
        overloaded{
            [&](const Gaussian1D& g) -> Distribution {
                return Gaussian1D{r[0] + gamma * g.mean, gamma * gamma * g.variance};
            },
            [&](const GaussianMixture1D& g) -> Distribution {
                GaussianMixture1D out = g;
                for (auto& c : out.components) {
                    c.mean = r[0] + gamma * c.mean;
                    c.variance *= gamma * gamma;
                }
                return out;
            },
            [&](const Atomic& a) -> Distribution {
                Atomic out = a;
                for (std::size_t i = 0; i < out.locations.size(); ++i)
                    out.locations[i] = r[i % a.dim] + gamma * out.locations[i];
                return out;
            },
            [&](const EmpiricalSample& e) -> Distribution {
                EmpiricalSample out = e;
                for (std::size_t i = 0; i < out.points.size(); ++i)
                    out.points[i] = r[i % e.dim] + gamma * out.points[i];
                return out;
            }},
        dist);
}

Distribution push_forward(const Distribution& dist, double r, double gamma) {
    return push_forward(dist, std::span<const double>(&r, 1), gamma);
}

Distribution mixture(const std::vector<std::pair<double, Distribution>>& parts) {
    if (parts.empty()) throw InvalidInput("mixture of no parts");
    double total = 0.0;
    for (const auto& [w, d] : parts) {
        if (!(w >= 0.0)) throw InvalidInput("mixture weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("mixture weights must sum to 1");

    const bool all_gaussian = std::all_of(parts.begin(), parts.end(), [](const auto& p) {
        return std::holds_alternative<Gaussian1D>(p.second) || std::holds_alternative<GaussianMixture1D>(p.second);
    });
    const bool all_atomic = std::all_of(parts.begin(), parts.end(),
                                        [](const auto& p) { return std::holds_alternative<Atomic>(p.second); });

    if (all_gaussian) {
        GaussianMixture1D out;
        for (const auto& [w, d] : parts) {
            if (const auto* g = std::get_if<Gaussian1D>(&d)) {
                out.components.push_back({w, g->mean, g->variance});
            } else {
                for (const auto& c : std::get<GaussianMixture1D>(d).components)
                    out.components.push_back({w * c.weight, c.mean, c.variance});
            }
        }
        return out;
    }
    if (all_atomic) {
        const std::size_t dim = std::get<Atomic>(parts.front().second).dim;
        Atomic out{dim, {}, {}};
        for (const auto& [w, d] : parts) {
            const auto& a = std::get<Atomic>(d);
            if (a.dim != dim) throw InvalidInput("mixture: atomic parts differ in dimension");
            out.locations.insert(out.locations.end(), a.locations.begin(), a.locations.end());
            for (double m : a.masses) out.masses.push_back(w * m);
        }
        return out;
    }
    throw InvalidInput("mixture: parts must share one representation family (Gaussian or atomic)");
}

Atomic merge_atoms(Atomic a, double tol) {
    if (a.dim != 1) throw Unsupported("merge_atoms is one-dimensional");
    const auto idx = sorted_order(a);
    Atomic out{1, {}, {}};
    out.locations.reserve(a.size());
    out.masses.reserve(a.size());
    for (std::size_t k : idx) {
        const double z = a.locations[k];
        const double m = a.masses[k];
        if (m == 0.0) continue;
        if (!out.locations.empty() && z - out.locations.back() <= tol) {
            out.masses.back() += m;
        } else {
            out.locations.push_back(z);
            out.masses.push_back(m);
        }
    }
    return out;
}

double mean(const Distribution& d) {
    return std::visit(overloaded{[](const Gaussian1D& g) { return g.mean; },
                                 [](const GaussianMixture1D& g) {
                                     double m = 0.0;
                                     for (const auto& c : g.components) m += c.weight * c.mean;
                                     return m;
                                 },
                                 [](const Atomic& a) {
                                     if (a.dim != 1) throw Unsupported("mean of multi-dimensional atomic law");
                                     double m = 0.0;
                                     for (std::size_t i = 0; i < a.size(); ++i) m += a.masses[i] * a.locations[i];
                                     return m;
                                 },
                                 [](const EmpiricalSample& e) {
                                     if (e.dim != 1) throw Unsupported("mean of multi-dimensional sample");
                                     double m = 0.0;
                                     for (double z : e.points) m += z;
                                     return m / static_cast<double>(e.size());
                                 }},
                      d);
}

double cdf(const Distribution& d, double z) {
    if (dimension(d) != 1) throw Unsupported("cdf of multi-dimensional law");
    return std::visit(overloaded{[&](const Gaussian1D& g) { return normal::cdf((z - g.mean) / std::sqrt(g.variance)); },
                                 [&](const GaussianMixture1D& g) { return gmm_cdf(g, z); },
                                 [&](const Atomic& a) {
                                     double c = 0.0;
                                     for (std::size_t i = 0; i < a.size(); ++i)
                                         if (a.locations[i] <= z) c += a.masses[i];
                                     return c;
                                 },
                                 [&](const EmpiricalSample& e) {
                                     const auto k = std::count_if(e.points.begin(), e.points.end(),
                                                                  [&](double p) { return p <= z; });
                                     return static_cast<double>(k) / static_cast<double>(e.size());
                                 }},
                      d);
}

double quantile_fn(const Distribution& d, double u) {
    if (!(u > 0.0 && u < 1.0)) throw InvalidInput("quantile_fn requires u in (0,1)");
    if (dimension(d) != 1) throw Unsupported("quantile_fn of multi-dimensional law");
    return std::visit(
        overloaded{[&](const Gaussian1D& g) { return g.mean + std::sqrt(g.variance) * normal::quantile(u); },
                   [&](const GaussianMixture1D& g) {
                       double lo = g.components.front().mean, hi = lo, smax = 0.0;
                       for (const auto& c : g.components) {
                           lo = std::min(lo, c.mean);
                           hi = std::max(hi, c.mean);
                           smax = std::max(smax, std::sqrt(c.variance));
                       }
                       lo -= 12.0 * smax;
                       hi += 12.0 * smax;
                       while (hi - lo > 1e-10) {
                           const double mid = 0.5 * (lo + hi);
                           if (mid <= lo || mid >= hi) break;
                           if (gmm_cdf(g, mid) >= u)
                               hi = mid;
                           else
                               lo = mid;
                       }
                       return 0.5 * (lo + hi);
                   },
                   [&](const Atomic& a) {
                       const auto idx = sorted_order(a);
                       double c = 0.0;
                       for (std::size_t k : idx) {
                           c += a.masses[k];
                           if (c >= u) return a.locations[k];
                       }
                       return a.locations[idx.back()];
                   },
                   [&](const EmpiricalSample& e) {
                       std::vector<double> p = e.points;
                       std::sort(p.begin(), p.end());
                       const auto n = static_cast<double>(p.size());
                       auto k = static_cast<std::size_t>(std::ceil(u * n));
                       k = std::clamp<std::size_t>(k, 1, p.size());
                       return p[k - 1];
                   }},
        d);
}

EmpiricalSample sample(const Distribution& d, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidInput("sample size must be >= 1");
    std::normal_distribution<double> z01(0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const Gaussian1D& g) {
                EmpiricalSample out{1, std::vector<double>(n)};
                const double s = std::sqrt(g.variance);
                for (auto& p : out.points) p = g.mean + s * z01(rng);
                return out;
            },
            [&](const GaussianMixture1D& g) {
                std::vector<double> cum;
                double c = 0.0;
                for (const auto& comp : g.components) cum.push_back(c += comp.weight);
                EmpiricalSample out{1, std::vector<double>(n)};
                for (auto& p : out.points) {
                    const double u = rng.uniform() * c;
                    auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                    k = std::min(k, cum.size() - 1);
                    const auto& comp = g.components[k];
                    p = comp.mean + std::sqrt(comp.variance) * z01(rng);
                }
                return out;
            },
            [&](const Atomic& a) {
                std::vector<double> cum;
                double c = 0.0;
                for (double m : a.masses) cum.push_back(c += m);
                EmpiricalSample out{a.dim, std::vector<double>(n * a.dim)};
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = rng.uniform() * c;
                    auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                    k = std::min(k, cum.size() - 1);
                    std::copy_n(a.locations.begin() + static_cast<std::ptrdiff_t>(k * a.dim), a.dim,
                                out.points.begin() + static_cast<std::ptrdiff_t>(i * a.dim));
                }
                return out;
            },
            [&](const EmpiricalSample& e) {
                EmpiricalSample out{e.dim, std::vector<double>(n * e.dim)};
                std::uniform_int_distribution<std::size_t> pick(0, e.size() - 1);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t k = pick(rng);
                    std::copy_n(e.points.begin() + static_cast<std::ptrdiff_t>(k * e.dim), e.dim,
                                out.points.begin() + static_cast<std::ptrdiff_t>(i * e.dim));
                }
                return out;
            }},
        d);
}

}  // namespace fde
