#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "fde/distributions.hpp"
#include "fde/random.hpp"

namespace fde {

enum class KernelKind { energy, rbf, laplace, coulomb };

/// Translation-invariant kernel k(x, y) = k0(x - y).
///   energy(beta):  k0(d) = -|d|^beta           (0 < beta < 2)
///   rbf(sigma):    k0(d) = exp(-|d|^2 / (4 sigma^2))
///   laplace(sigma):k0(d) = exp(-|d| / sigma)
///   coulomb(d):    k0(v) = -log|v| (d = 2), |v|^(2-d) (d >= 3)
/// The norm terms of the energy kernel cancel inside an MMD, so only the
/// distance part is kept.
struct KernelSpec {
    KernelKind kind = KernelKind::energy;
    double param = 1.0;

    static KernelSpec energy(double beta = 1.0);
    static KernelSpec rbf(double sigma = 1.0);
    static KernelSpec laplace(double sigma = 1.0);
    static KernelSpec coulomb(int dim);

    double k0(std::span<const double> diff) const;
    double k0(double diff) const { return k0(std::span<const double>(&diff, 1)); }
};

enum class DivergenceKind { cramer, mmd, pdf_l2, kl, tvd_mc };

/// Functional Bregman divergence d(model, target) used as the fitting objective.
struct DivergenceSpec {
    DivergenceKind kind = DivergenceKind::mmd;
    KernelSpec kernel{};
    double variance_floor = 0.0;   ///< added to every GMM component variance when > 0
    std::size_t mc_samples = 1000; ///< draws per target component for kl / tvd_mc on mixtures

    static DivergenceSpec cramer() { return {DivergenceKind::cramer, {}, 0.0, 1000}; }
    static DivergenceSpec mmd(KernelSpec k) { return {DivergenceKind::mmd, k, 0.0, 1000}; }
    static DivergenceSpec pdf_l2() { return {DivergenceKind::pdf_l2, {}, 0.0, 1000}; }
    static DivergenceSpec kl() { return {DivergenceKind::kl, {}, 0.0, 1000}; }
    static DivergenceSpec tvd_mc(std::size_t b = 1000) { return {DivergenceKind::tvd_mc, {}, 0.0, b}; }

    /// True when a Gaussian closed form exists (cramer, kl, pdf_l2, mmd with energy(1)/rbf/laplace).
    bool closed_form_gaussian() const noexcept;
};

/// Parses the method labels used on the command line: cramer, energy, rbf,
/// laplace, pdf_l2, kl, tvd_mc. Kernel bandwidths come from the arguments.
DivergenceSpec divergence_from_label(const std::string& label, double sigma_rbf = 1.0, double sigma_lap = 1.0);

/// E k0(Z) for Z ~ N(mu, var); closed forms for energy(beta = 1), rbf and laplace.
double gaussian_k0(const KernelSpec& kernel, double mu, double var);
/// d/dmu of gaussian_k0.
double gaussian_k0_dmu(const KernelSpec& kernel, double mu, double var);

/// d(P, Q) for Gaussians. For kl this is KL(Q || P): the target is the first argument of KL.
double divergence_gaussian(const DivergenceSpec& spec, const Gaussian1D& model, const Gaussian1D& target);
/// Partial derivative of divergence_gaussian with respect to the model mean.
double divergence_gaussian_dmean(const DivergenceSpec& spec, const Gaussian1D& model, const Gaussian1D& target);

/// d(P, Q) for Gaussian mixtures: exact pairwise sums for mmd / pdf_l2 / cramer,
/// stratified Monte Carlo for kl and tvd_mc. Clamped at 0.
double divergence_gmm(const DivergenceSpec& spec, const GaussianMixture1D& model, const GaussianMixture1D& target,
                      Rng& rng);

/// KL(target || model) between mixtures by composite Gauss-Legendre quadrature over a wide bracket.
double kl_gmm_quadrature(const GaussianMixture1D& target, const GaussianMixture1D& model);

/// Exact divergences between one-dimensional atomic laws.
double cramer_atomic(const Atomic& p, const Atomic& q);
double mmd_squared_atomic(const KernelSpec& kernel, const Atomic& p, const Atomic& q);
double tvd_atomic(const Atomic& p, const Atomic& q, double tol = 1e-12);
/// Dispatches on spec.kind for atomic laws; pdf_l2 and kl are undefined for atoms.
double divergence_atomic(const DivergenceSpec& spec, const Atomic& model, const Atomic& target);

/// Unbiased U-statistic estimate of MMD^2 between two samples.
/// One-dimensional energy(beta = 1) uses an O(n log n) sorted evaluation;
/// other kernels use an OpenMP double sum with a fixed reduction order.
double mmd_squared_mc(const KernelSpec& kernel, const EmpiricalSample& x, const EmpiricalSample& y);

}  // namespace fde
