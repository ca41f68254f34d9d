#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "fde/bellman.hpp"
#include "fde/divergences.hpp"
#include "fde/envs.hpp"
#include "fde/error.hpp"
#include "fde/lbfgs.hpp"

namespace fde {

/// Constants of the horizon rule
///   T = floor( 1/c_divide * 1/(c - 1/(2q)) * min(delta, 1/q) / (2(l-1) + alpha) * log_{1/gamma} N ).
struct TSelectionParams {
    double l = 5.0;
    double delta = 1.0;
    double c = 1.0;
    double q = 1.0;
    double alpha = 0.0;
    double c_divide = 5.0;
};

std::size_t choose_T(std::size_t n_total, double gamma, const TSelectionParams& p = {});

/// T folds in input order: floor(N/T) records each, the remainder appended to the last.
template <class Dataset>
std::vector<Dataset> split_dataset(const Dataset& d, std::size_t T) {
    if (T == 0) throw InvalidInput("split_dataset needs T >= 1");
    if (d.size() < T) throw InvalidInput("split_dataset needs at least T records");
    const std::size_t per = d.size() / T;
    std::vector<Dataset> folds(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto first = d.records.begin() + static_cast<std::ptrdiff_t>(t * per);
        const auto last = t + 1 == T ? d.records.end() : first + static_cast<std::ptrdiff_t>(per);
        folds[t].records.assign(first, last);
    }
    return folds;
}

enum class GradientMode { finite_difference, analytic };

struct OptimizerSettings {
    std::size_t max_evals = 2000;
    // Stopping rule of the reference L-BFGS-B defaults (pgtol 1e-5, factr 1e7).
    // On folds barely larger than the parameter count the early stop is what
    // keeps the iterates from interpolating the reward noise.
    double tolerance = 1e-5;
    double f_rel_tol = 1e7 * std::numeric_limits<double>::epsilon(); ///< relative-decrease stop, 0 disables
    GradientMode gradient = GradientMode::finite_difference;
    double fd_step = 1e-5;
};

struct FDEConfig {
    DivergenceSpec divergence = DivergenceSpec::kl();
    TSelectionParams t_params{};
    std::size_t explicit_T = 0; ///< > 0 overrides the horizon rule
    OptimizerSettings optimizer{};
    bool warm_start = true;
    std::size_t mc_samples = 1; ///< draws per transition for fle_run
    std::uint64_t seed = 0;     ///< fle_run draws come from this seed
};

struct IterationTrace {
    double f_start;  ///< objective at the warm start
    double f_end;    ///< objective at the returned iterate
    double grad_norm;
    std::size_t evals;
    LbfgsStatus status;
};

struct FitResult {
    LQRTheta theta;
    std::size_t T = 0;
    std::vector<IterationTrace> trace;
};

/// Features phi(x, a) with mu_theta(x, a) = phi . flatten(theta).
std::array<double, LQRTheta::kSize> lqr_features(const Vec2& x, const Vec2& a);

/// Mean of the backup Psi(r, s', Upsilon_prev) for the target a' = K s'.
double backup_mean(const LQRTransition& t, const LQRTheta& prev, const LQREnv& env);

/// (1/n) sum_i d( N(mu_theta(s_i, a_i), s^2), N(r_i + gamma mu_prev(s'_i, K s'_i), gamma^2 s^2) )
/// with s^2 the return variance. Terms are computed in parallel and summed in index order.
double fde_objective(const LQRDataset& fold, const LQRTheta& theta, const LQRTheta& theta_prev, const LQREnv& env,
                     const DivergenceSpec& spec);

/// Analytic gradient of fde_objective with respect to flatten(theta).
std::array<double, LQRTheta::kSize> fde_objective_gradient(const LQRDataset& fold, const LQRTheta& theta,
                                                           const LQRTheta& theta_prev, const LQREnv& env,
                                                           const DivergenceSpec& spec);

/// theta_0 = 0; theta_t minimizes fde_objective on fold t from the warm start theta_{t-1}.
/// Throws OptimizationFailure when the objective is not finite.
FitResult fde_run(const LQRDataset& d, const LQREnv& env, const FDEConfig& config);

/// Negative Gaussian log-likelihood of mc_samples draws per transition from the backup.
/// Draws for fold t come from derive_seed(config.seed, {fle, t}) and stay fixed during its fit.
FitResult fle_run(const LQRDataset& d, const LQREnv& env, const FDEConfig& config);

/// The FLE objective on fixed draws z[i * B + b].
double fle_objective(const LQRDataset& fold, const std::vector<double>& draws, std::size_t B, const LQRTheta& theta,
                     const LQREnv& env);

/// One tabular FDE step with an unrestricted atomic model. Every (s, a) seen in
/// the fold gets the equally weighted mixture of its backups, which minimizes
/// the empirical objective for any Bregman divergence; unseen pairs keep prev.
ReturnTable tabular_fde_step(const TabularDataset& fold, const ReturnTable& prev, const Policy& pi, double gamma);

/// The same step with each backup replaced by B draws from it: the maximum
/// likelihood fit of an unrestricted model to the sampled targets.
ReturnTable tabular_fle_step(const TabularDataset& fold, const ReturnTable& prev, const Policy& pi, double gamma,
                             std::size_t B, Rng& rng);

struct TabularFitResult {
    std::vector<ReturnTable> iterates; ///< iterates[0] is the zero table, iterates[T] the estimate
};

/// T tabular steps over the folds of d. With B > 0 the FLE step is used, its
/// draws for fold t coming from derive_seed(seed, {fle, t}).
TabularFitResult tabular_fde_run(const TabularDataset& d, std::size_t n_states, std::size_t n_actions,
                                 const Policy& pi, double gamma, std::size_t T, std::size_t B = 0,
                                 std::uint64_t seed = 0);

}  // namespace fde
