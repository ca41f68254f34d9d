#include "fde/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <omp.h>

#include "fde/error.hpp"
#include "fde/normal.hpp"
#include "fde/quadrature.hpp"

namespace fde {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_var(double v, const char* who) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(who) + ": variance must be > 0");
}

double gmm_log_density(const GaussianMixture1D& g, double z) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& c : g.components)
        if (c.weight > 0.0) top = std::max(top, std::log(c.weight) + normal::log_density(z, c.mean, c.variance));
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (const auto& c : g.components)
        if (c.weight > 0.0) s += std::exp(std::log(c.weight) + normal::log_density(z, c.mean, c.variance) - top);
    return top + std::log(s);
}

GaussianMixture1D floored(const GaussianMixture1D& g, double eps) {
    GaussianMixture1D out = g;
    if (eps > 0.0)
        for (auto& c : out.components) c.variance += eps;
    for (const auto& c : out.components) check_var(c.variance, "divergence_gmm");
    return out;
}

/// Sum_ij w_i v_j f(mu_i - mu_j, var_i + var_j).
template <class F>
double pair_sum(const GaussianMixture1D& a, const GaussianMixture1D& b, F&& f) {
    double s = 0.0;
    for (const auto& ca : a.components)
        for (const auto& cb : b.components) s += ca.weight * cb.weight * f(ca.mean - cb.mean, ca.variance + cb.variance);
    return s;
}

/// Sum over i<j of |x_i - x_j| for a sorted vector.
double sorted_abs_pair_sum(const std::vector<double>& s) {
    double acc = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) acc += s[k] * (2.0 * static_cast<double>(k) - (n - 1.0));
    return acc;
}

/// Sum over all (i, j) of |x_i - y_j| for sorted inputs.
double sorted_abs_cross_sum(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> prefix(ys.size() + 1, 0.0);
    for (std::size_t j = 0; j < ys.size(); ++j) prefix[j + 1] = prefix[j] + ys[j];
    const double total = prefix.back();
    const double m = static_cast<double>(ys.size());
    double acc = 0.0;
    std::size_t j = 0;
    for (double x : xs) {
        while (j < ys.size() && ys[j] <= x) ++j;
        const double below = static_cast<double>(j);
        acc += (below * x - prefix[j]) + ((total - prefix[j]) - (m - below) * x);
    }
    return acc;
}

void check_coulomb_points(const KernelSpec& kernel, const EmpiricalSample& x, const EmpiricalSample& y) {
    if (kernel.kind != KernelKind::coulomb) return;
    if (x.dim < 2) throw InvalidInput("coulomb kernel requires point dimension >= 2");
    if (static_cast<std::size_t>(kernel.param) != x.dim)
        throw InvalidInput("coulomb kernel dimension does not match the points");
    std::vector<std::vector<double>> all;
    all.reserve(x.size() + y.size());
    for (std::size_t i = 0; i < x.size(); ++i) all.emplace_back(x.point(i).begin(), x.point(i).end());
    for (std::size_t i = 0; i < y.size(); ++i) all.emplace_back(y.point(i).begin(), y.point(i).end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw DegenerateInput("coulomb kernel is infinite at coincident points");
}

}  // namespace

KernelSpec KernelSpec::energy(double beta) {
    if (!(beta > 0.0 && beta < 2.0)) throw InvalidInput("energy kernel requires beta in (0,2)");
    return {KernelKind::energy, beta};
}

KernelSpec KernelSpec::rbf(double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("rbf bandwidth must be > 0");
    return {KernelKind::rbf, sigma};
}

KernelSpec KernelSpec::laplace(double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("laplace bandwidth must be > 0");
    return {KernelKind::laplace, sigma};
}

KernelSpec KernelSpec::coulomb(int dim) {
    if (dim < 2) throw InvalidInput("coulomb kernel requires d >= 2");
    return {KernelKind::coulomb, static_cast<double>(dim)};
}

double KernelSpec::k0(std::span<const double> diff) const {
    const double r = norm(diff);
    switch (kind) {
        case KernelKind::energy: return -std::pow(r, param);
        case KernelKind::rbf: return std::exp(-r * r / (4.0 * param * param));
        case KernelKind::laplace: return std::exp(-r / param);
        case KernelKind::coulomb: {
            const int d = static_cast<int>(param);
            return d == 2 ? -std::log(r) : std::pow(r, 2.0 - d);
        }
    }
    return 0.0;
}

bool DivergenceSpec::closed_form_gaussian() const noexcept {
    switch (kind) {
        case DivergenceKind::cramer:
        case DivergenceKind::kl:
        case DivergenceKind::pdf_l2: return true;
        case DivergenceKind::mmd:
            return (kernel.kind == KernelKind::energy && kernel.param == 1.0) || kernel.kind == KernelKind::rbf ||
                   kernel.kind == KernelKind::laplace;
        case DivergenceKind::tvd_mc: return false;
    }
    return false;
}

DivergenceSpec divergence_from_label(const std::string& label, double sigma_rbf, double sigma_lap) {
    if (label == "cramer") return DivergenceSpec::cramer();
    if (label == "energy") return DivergenceSpec::mmd(KernelSpec::energy(1.0));
    if (label == "rbf") return DivergenceSpec::mmd(KernelSpec::rbf(sigma_rbf));
    if (label == "laplace") return DivergenceSpec::mmd(KernelSpec::laplace(sigma_lap));
    if (label == "pdf_l2") return DivergenceSpec::pdf_l2();
    if (label == "kl") return DivergenceSpec::kl();
    if (label == "tvd_mc") return DivergenceSpec::tvd_mc();
    throw InvalidInput("unknown divergence label '" + label + "'");
}

double gaussian_k0(const KernelSpec& kernel, double mu, double var) {
    check_var(var, "gaussian_k0");
    const double s = std::sqrt(var);
    switch (kernel.kind) {
        case KernelKind::energy: {
            if (kernel.param != 1.0) throw Unsupported("gaussian_k0: energy closed form only for beta = 1");
            const double a = std::abs(mu);
            return -(s * std::sqrt(2.0 / normal::kPi) * std::exp(-mu * mu / (2.0 * var)) +
                     a * (1.0 - 2.0 * normal::cdf(-a / s)));
        }
        case KernelKind::rbf: {
            const double h2 = kernel.param * kernel.param;
            return std::exp(-mu * mu / (4.0 * h2 + 2.0 * var)) / std::sqrt(1.0 + var / (2.0 * h2));
        }
        case KernelKind::laplace: {
            const double L = kernel.param;
            const double c = var / (2.0 * L * L);
            const double t1 = std::exp(c - mu / L + normal::log_cdf(mu / s - s / L));
            const double t2 = std::exp(c + mu / L + normal::log_cdf(-mu / s - s / L));
            return t1 + t2;
        }
        case KernelKind::coulomb: break;
    }
    throw Unsupported("gaussian_k0: no closed form for this kernel");
}

double gaussian_k0_dmu(const KernelSpec& kernel, double mu, double var) {
    check_var(var, "gaussian_k0_dmu");
    const double s = std::sqrt(var);
    switch (kernel.kind) {
        case KernelKind::energy:
            if (kernel.param != 1.0) throw Unsupported("gaussian_k0_dmu: energy closed form only for beta = 1");
            return -(2.0 * normal::cdf(mu / s) - 1.0);
        case KernelKind::rbf: {
            const double h2 = kernel.param * kernel.param;
            const double denom = 4.0 * h2 + 2.0 * var;
            return gaussian_k0(kernel, mu, var) * (-2.0 * mu / denom);
        }
        case KernelKind::laplace: {
            // The density terms cancel, leaving (t2 - t1) / L.
            const double L = kernel.param;
            const double c = var / (2.0 * L * L);
            const double t1 = std::exp(c - mu / L + normal::log_cdf(mu / s - s / L));
            const double t2 = std::exp(c + mu / L + normal::log_cdf(-mu / s - s / L));
            return (t2 - t1) / L;
        }
        case KernelKind::coulomb: break;
    }
    throw Unsupported("gaussian_k0_dmu: no closed form for this kernel");
}

double divergence_gaussian(const DivergenceSpec& spec, const Gaussian1D& p, const Gaussian1D& q) {
    check_var(p.variance, "divergence_gaussian");
    check_var(q.variance, "divergence_gaussian");
    const double dmu = p.mean - q.mean;
    switch (spec.kind) {
        case DivergenceKind::kl:
            return 0.5 * std::log(p.variance / q.variance) + (q.variance + dmu * dmu) / (2.0 * p.variance) - 0.5;
        case DivergenceKind::pdf_l2: {
            const double sv = p.variance + q.variance;
            return 1.0 / std::sqrt(4.0 * normal::kPi * p.variance) + 1.0 / std::sqrt(4.0 * normal::kPi * q.variance) -
                   2.0 / std::sqrt(2.0 * normal::kPi * sv) * std::exp(-dmu * dmu / (2.0 * sv));
        }
        case DivergenceKind::mmd: {
            const auto& k = spec.kernel;
            return gaussian_k0(k, 0.0, 2.0 * p.variance) + gaussian_k0(k, 0.0, 2.0 * q.variance) -
                   2.0 * gaussian_k0(k, dmu, p.variance + q.variance);
        }
        case DivergenceKind::cramer:
            return 0.5 * divergence_gaussian(DivergenceSpec::mmd(KernelSpec::energy(1.0)), p, q);
        case DivergenceKind::tvd_mc: break;
    }
    throw Unsupported("divergence_gaussian: no closed form for tvd_mc");
}

double divergence_gaussian_dmean(const DivergenceSpec& spec, const Gaussian1D& p, const Gaussian1D& q) {
    check_var(p.variance, "divergence_gaussian_dmean");
    check_var(q.variance, "divergence_gaussian_dmean");
    const double dmu = p.mean - q.mean;
    switch (spec.kind) {
        case DivergenceKind::kl: return dmu / p.variance;
        case DivergenceKind::pdf_l2: {
            const double sv = p.variance + q.variance;
            return 2.0 / std::sqrt(2.0 * normal::kPi * sv) * std::exp(-dmu * dmu / (2.0 * sv)) * dmu / sv;
        }
        case DivergenceKind::mmd: return -2.0 * gaussian_k0_dmu(spec.kernel, dmu, p.variance + q.variance);
        case DivergenceKind::cramer:
            return 0.5 * divergence_gaussian_dmean(DivergenceSpec::mmd(KernelSpec::energy(1.0)), p, q);
        case DivergenceKind::tvd_mc: break;
    }
    throw Unsupported("divergence_gaussian_dmean: no closed form for tvd_mc");
}

double divergence_gmm(const DivergenceSpec& spec, const GaussianMixture1D& model_in, const GaussianMixture1D& target_in,
                      Rng& rng) {
    const auto p = floored(model_in, spec.variance_floor);
    const auto q = floored(target_in, spec.variance_floor);
    switch (spec.kind) {
        case DivergenceKind::mmd:
        case DivergenceKind::cramer: {
            const KernelSpec k = spec.kind == DivergenceKind::cramer ? KernelSpec::energy(1.0) : spec.kernel;
            auto f = [&](double m, double v) { return gaussian_k0(k, m, v); };
            double v = pair_sum(p, p, f) + pair_sum(q, q, f) - 2.0 * pair_sum(p, q, f);
            if (spec.kind == DivergenceKind::cramer) v *= 0.5;
            return std::max(v, 0.0);
        }
        case DivergenceKind::pdf_l2: {
            auto f = [](double m, double v) { return normal::density(m, 0.0, v); };
            return std::max(pair_sum(p, p, f) + pair_sum(q, q, f) - 2.0 * pair_sum(p, q, f), 0.0);
        }
        case DivergenceKind::kl:
        case DivergenceKind::tvd_mc: {
            if (spec.mc_samples == 0) throw InvalidInput("divergence_gmm: Monte Carlo kinds need B >= 1");
            // Child streams keyed by component keep draws independent of B elsewhere.
            const std::uint64_t call = rng();
            std::normal_distribution<double> z01(0.0, 1.0);
            double acc = 0.0;
            for (std::size_t m = 0; m < q.components.size(); ++m) {
                const auto& c = q.components[m];
                if (c.weight == 0.0) continue;
                Rng local(derive_seed(call, {m}));
                const double sd = std::sqrt(c.variance);
                double s = 0.0;
                for (std::size_t b = 0; b < spec.mc_samples; ++b) {
                    const double z = c.mean + sd * z01(local);
                    const double lq = gmm_log_density(q, z);
                    const double lp = gmm_log_density(p, z);
                    s += spec.kind == DivergenceKind::kl ? lq - lp : std::abs(1.0 - std::exp(lp - lq));
                }
                acc += c.weight * s / static_cast<double>(spec.mc_samples);
            }
            if (spec.kind == DivergenceKind::tvd_mc) acc *= 0.5;
            return std::max(acc, 0.0);
        }
    }
    return 0.0;
}

double kl_gmm_quadrature(const GaussianMixture1D& target, const GaussianMixture1D& model) {
    double lo = target.components.front().mean, hi = lo, smax = 0.0;
    for (const auto* g : {&target, &model})
        for (const auto& c : g->components) {
            check_var(c.variance, "kl_gmm_quadrature");
            lo = std::min(lo, c.mean);
            hi = std::max(hi, c.mean);
            smax = std::max(smax, std::sqrt(c.variance));
        }
    double smin = smax;
    for (const auto* g : {&target, &model})
        for (const auto& c : g->components) smin = std::min(smin, std::sqrt(c.variance));
    lo -= 16.0 * smax;
    hi += 16.0 * smax;
    // Panels of half the narrowest standard deviation make the 20-point rule exact to rounding.
    static const QuadratureRule panel = gauss_legendre_unit(20);
    const auto panels = static_cast<std::size_t>(std::max(64.0, std::ceil((hi - lo) / (0.5 * smin))));
    const double h = (hi - lo) / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = lo + h * static_cast<double>(k);
        for (std::size_t i = 0; i < panel.nodes.size(); ++i) {
            const double z = a + h * panel.nodes[i];
            const double lt = gmm_log_density(target, z);
            const double t = std::exp(lt);
            if (t > 0.0) acc += h * panel.weights[i] * t * (lt - gmm_log_density(model, z));
        }
    }
    return std::max(acc, 0.0);
}

double cramer_atomic(const Atomic& p, const Atomic& q) {
    if (p.dim != 1 || q.dim != 1) throw Unsupported("cramer_atomic is one-dimensional");
    struct Jump {
        double z, dp, dq;
    };
    std::vector<Jump> jumps;
    jumps.reserve(p.size() + q.size());
    for (std::size_t i = 0; i < p.size(); ++i) jumps.push_back({p.locations[i], p.masses[i], 0.0});
    for (std::size_t i = 0; i < q.size(); ++i) jumps.push_back({q.locations[i], 0.0, q.masses[i]});
    std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.z < b.z; });
    double fp = 0.0, fq = 0.0, acc = 0.0;
    for (std::size_t k = 0; k + 1 < jumps.size(); ++k) {
        fp += jumps[k].dp;
        fq += jumps[k].dq;
        const double d = fp - fq;
        acc += d * d * (jumps[k + 1].z - jumps[k].z);
    }
    return acc;
}

double mmd_squared_atomic(const KernelSpec& kernel, const Atomic& p, const Atomic& q) {
    if (p.dim != q.dim) throw InvalidInput("mmd_squared_atomic: dimension mismatch");
    if (kernel.kind == KernelKind::coulomb) throw Unsupported("coulomb kernel is infinite on atoms");
    auto sum = [&](const Atomic& a, const Atomic& b) {
        double s = 0.0;
        std::vector<double> diff(a.dim);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                for (std::size_t k = 0; k < a.dim; ++k) diff[k] = a.location(i)[k] - b.location(j)[k];
                s += a.masses[i] * b.masses[j] * kernel.k0(diff);
            }
        return s;
    };
    return sum(p, p) + sum(q, q) - 2.0 * sum(p, q);
}

double tvd_atomic(const Atomic& p, const Atomic& q, double tol) {
    if (p.dim != 1 || q.dim != 1) throw Unsupported("tvd_atomic is one-dimensional");
    const Atomic mp = merge_atoms(p, tol), mq = merge_atoms(q, tol);
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < mp.size() || j < mq.size()) {
        if (j == mq.size() || (i < mp.size() && mp.locations[i] < mq.locations[j] - tol)) {
            acc += mp.masses[i++];
        } else if (i == mp.size() || mq.locations[j] < mp.locations[i] - tol) {
            acc += mq.masses[j++];
        } else {
            acc += std::abs(mp.masses[i++] - mq.masses[j++]);
        }
    }
    return 0.5 * acc;
}

double divergence_atomic(const DivergenceSpec& spec, const Atomic& model, const Atomic& target) {
    switch (spec.kind) {
        case DivergenceKind::cramer: return cramer_atomic(model, target);
        case DivergenceKind::mmd: return mmd_squared_atomic(spec.kernel, model, target);
        case DivergenceKind::tvd_mc: return tvd_atomic(model, target);
        case DivergenceKind::pdf_l2:
        case DivergenceKind::kl: break;
    }
    throw Unsupported("divergence_atomic: density-based divergences are undefined for atomic laws");
}

double mmd_squared_mc(const KernelSpec& kernel, const EmpiricalSample& x, const EmpiricalSample& y) {
    if (x.size() < 2 || y.size() < 2) throw InvalidInput("mmd_squared_mc needs at least two points per sample");
    if (x.dim != y.dim) throw InvalidInput("mmd_squared_mc: dimension mismatch");
    check_coulomb_points(kernel, x, y);
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());

    if (x.dim == 1 && kernel.kind == KernelKind::energy && kernel.param == 1.0) {
        std::vector<double> xs = x.points, ys = y.points;
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        const double sxx = sorted_abs_pair_sum(xs);
        const double syy = sorted_abs_pair_sum(ys);
        const double sxy = sorted_abs_cross_sum(xs, ys);
        return -2.0 * sxx / (n * (n - 1.0)) - 2.0 * syy / (m * (m - 1.0)) + 2.0 * sxy / (n * m);
    }

    // Row sums in parallel, reduced in index order for a schedule-independent result.
    auto within = [&](const EmpiricalSample& s) {
        const auto len = static_cast<std::ptrdiff_t>(s.size());
        std::vector<double> rows(s.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            std::vector<double> diff(s.dim);
            double acc = 0.0;
            for (std::ptrdiff_t j = i + 1; j < len; ++j) {
                for (std::size_t k = 0; k < s.dim; ++k)
                    diff[k] = s.point(static_cast<std::size_t>(i))[k] - s.point(static_cast<std::size_t>(j))[k];
                acc += kernel.k0(diff);
            }
            rows[static_cast<std::size_t>(i)] = acc;
        }
        return 2.0 * std::accumulate(rows.begin(), rows.end(), 0.0);
    };
    const auto nx = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> cross(x.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
        std::vector<double> diff(x.dim);
        double acc = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            for (std::size_t k = 0; k < x.dim; ++k) diff[k] = x.point(static_cast<std::size_t>(i))[k] - y.point(j)[k];
            acc += kernel.k0(diff);
        }
        cross[static_cast<std::size_t>(i)] = acc;
    }
    const double sxy = std::accumulate(cross.begin(), cross.end(), 0.0);
    return within(x) / (n * (n - 1.0)) + within(y) / (m * (m - 1.0)) - 2.0 * sxy / (n * m);
}

}  // namespace fde
