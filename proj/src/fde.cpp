#include "fde/fde.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "fde/normal.hpp"

namespace fde {

namespace {

using Features = std::array<double, LQRTheta::kSize>;

double dot12(const Features& phi, const double* theta) {
    double s = 0.0;
    for (std::size_t k = 0; k < LQRTheta::kSize; ++k) s += phi[k] * theta[k];
    return s;
}

/// Model features and fixed backup means of one fold for one iteration.
struct FoldCache {
    std::vector<Features> phi;
    std::vector<double> target;

    FoldCache(const LQRDataset& fold, const LQRTheta& prev, const LQREnv& env) {
        phi.reserve(fold.size());
        target.reserve(fold.size());
        for (const auto& t : fold.records) {
            phi.push_back(lqr_features(t.s, t.a));
            target.push_back(backup_mean(t, prev, env));
        }
    }
};

constexpr std::ptrdiff_t kParallelThreshold = 512;

double cached_objective(const FoldCache& c, const double* theta, const DivergenceSpec& spec, const LQREnv& env) {
    const double var = env.return_variance();
    const double backup_var = env.gamma * env.gamma * var;
    const auto n = static_cast<std::ptrdiff_t>(c.phi.size());
    std::vector<double> terms(c.phi.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        terms[k] = divergence_gaussian(spec, Gaussian1D{dot12(c.phi[k], theta), var},
                                       Gaussian1D{c.target[k], backup_var});
    }
    return std::accumulate(terms.begin(), terms.end(), 0.0) / static_cast<double>(n);
}

Features cached_gradient(const FoldCache& c, const double* theta, const DivergenceSpec& spec, const LQREnv& env) {
    const double var = env.return_variance();
    const double backup_var = env.gamma * env.gamma * var;
    const auto n = static_cast<std::ptrdiff_t>(c.phi.size());
    std::vector<double> slope(c.phi.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        slope[k] = divergence_gaussian_dmean(spec, Gaussian1D{dot12(c.phi[k], theta), var},
                                             Gaussian1D{c.target[k], backup_var});
    }
    Features g{};
    for (std::size_t k = 0; k < c.phi.size(); ++k)
        for (std::size_t j = 0; j < LQRTheta::kSize; ++j) g[j] += slope[k] * c.phi[k][j];
    for (double& v : g) v /= static_cast<double>(n);
    return g;
}

void check_theta(const LQRTheta& t) {
    if (!t.finite()) throw InvalidInput("theta has non-finite entries");
}

/// Shared outer loop of fde_run and fle_run. `make_objective(t, fold, prev)`
/// returns the objective for iteration t (1-based).
template <class MakeObjective>
FitResult fit_loop(const LQRDataset& d, const LQREnv& env, const FDEConfig& config, MakeObjective&& make_objective) {
    FitResult res;
    res.T = config.explicit_T > 0 ? config.explicit_T : choose_T(d.size(), env.gamma, config.t_params);
    const auto folds = split_dataset(d, res.T);
    LbfgsOptions opts;
    opts.max_evals = config.optimizer.max_evals;
    opts.grad_tol = config.optimizer.tolerance;
    opts.f_rel_tol = config.optimizer.f_rel_tol;

    LQRTheta prev;
    for (std::size_t t = 1; t <= res.T; ++t) {
        const Objective f = make_objective(t, folds[t - 1], prev);
        const LQRTheta start = config.warm_start ? prev : LQRTheta{};
        const auto x0 = start.flatten();
        const double f_start = f(std::vector<double>(x0.begin(), x0.end()), nullptr);
        if (!std::isfinite(f_start)) throw OptimizationFailure("objective is not finite at the warm start", t);
        const LbfgsResult r = lbfgs_minimize(f, std::vector<double>(x0.begin(), x0.end()), opts);
        if (r.status == LbfgsStatus::non_finite_start || !std::isfinite(r.f))
            throw OptimizationFailure("objective is not finite", t);
        res.trace.push_back({f_start, r.f, r.grad_norm, r.evals, r.status});
        prev = LQRTheta::unflatten(r.x.data());
    }
    res.theta = prev;
    return res;
}

}  // namespace

std::size_t choose_T(std::size_t n_total, double gamma, const TSelectionParams& p) {
    if (n_total == 0) throw InvalidInput("choose_T needs n_total >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("choose_T needs gamma in (0,1)");
    const double slack = p.c - 1.0 / (2.0 * p.q);
    if (!(slack > 0.0)) throw InvalidInput("choose_T needs c - 1/(2q) > 0");
    if (!(p.c_divide > 0.0) || !(p.l >= 2.0) || !(p.delta > 0.0) || !(p.q >= 1.0) || !(p.alpha >= 0.0))
        throw InvalidInput("choose_T: parameter out of range");
    const double log_n = std::log(static_cast<double>(n_total)) / std::log(1.0 / gamma);
    const double value =
        (1.0 / p.c_divide) * (1.0 / slack) * (std::min(p.delta, 1.0 / p.q) / (2.0 * (p.l - 1.0) + p.alpha)) * log_n;
    const double T = std::floor(value);
    return T < 1.0 ? 1 : static_cast<std::size_t>(T);
}

std::array<double, LQRTheta::kSize> lqr_features(const Vec2& x, const Vec2& a) {
    Features phi{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto k = static_cast<std::size_t>(2 * i + j);
            phi[k] = x(i) * x(j);
            phi[4 + k] = a(i) * x(j);
            phi[8 + k] = a(i) * a(j);
        }
    return phi;
}

double backup_mean(const LQRTransition& t, const LQRTheta& prev, const LQREnv& env) {
    return t.r + env.gamma * prev.mean(t.sp, env.K * t.sp);
}

double fde_objective(const LQRDataset& fold, const LQRTheta& theta, const LQRTheta& theta_prev, const LQREnv& env,
                     const DivergenceSpec& spec) {
    if (fold.size() == 0) throw InvalidInput("fde_objective on an empty fold");
    check_theta(theta);
    check_theta(theta_prev);
    if (!spec.closed_form_gaussian()) throw Unsupported("fde_objective needs a Gaussian closed-form divergence");
    const FoldCache c(fold, theta_prev, env);
    const auto x = theta.flatten();
    return cached_objective(c, x.data(), spec, env);
}

std::array<double, LQRTheta::kSize> fde_objective_gradient(const LQRDataset& fold, const LQRTheta& theta,
                                                           const LQRTheta& theta_prev, const LQREnv& env,
                                                           const DivergenceSpec& spec) {
    if (fold.size() == 0) throw InvalidInput("fde_objective_gradient on an empty fold");
    check_theta(theta);
    check_theta(theta_prev);
    if (!spec.closed_form_gaussian()) throw Unsupported("fde_objective_gradient needs a Gaussian closed form");
    const FoldCache c(fold, theta_prev, env);
    const auto x = theta.flatten();
    return cached_gradient(c, x.data(), spec, env);
}

FitResult fde_run(const LQRDataset& d, const LQREnv& env, const FDEConfig& config) {
    const DivergenceSpec& spec = config.divergence;
    if (!spec.closed_form_gaussian()) throw Unsupported("fde_run needs a Gaussian closed-form divergence");
    const auto& opt = config.optimizer;
    if (!(opt.tolerance > 0.0)) throw InvalidInput("optimizer tolerance must be > 0");
    if (opt.gradient == GradientMode::finite_difference && !(opt.fd_step > 0.0))
        throw InvalidInput("finite-difference step must be > 0");

    return fit_loop(d, env, config, [&](std::size_t, const LQRDataset& fold, const LQRTheta& prev) -> Objective {
        auto cache = std::make_shared<const FoldCache>(fold, prev, env);
        auto value = [cache, &spec, &env](const std::vector<double>& x) {
            return cached_objective(*cache, x.data(), spec, env);
        };
        if (opt.gradient == GradientMode::finite_difference) return central_difference(value, opt.fd_step);
        return [cache, &spec, &env, value](const std::vector<double>& x, std::vector<double>* grad) {
            if (grad) {
                const auto g = cached_gradient(*cache, x.data(), spec, env);
                grad->assign(g.begin(), g.end());
            }
            return value(x);
        };
    });
}

double fle_objective(const LQRDataset& fold, const std::vector<double>& draws, std::size_t B, const LQRTheta& theta,
                     const LQREnv& env) {
    if (B == 0) throw InvalidInput("fle needs at least one draw per transition");
    if (draws.size() != fold.size() * B) throw InvalidInput("fle_objective: draws do not match the fold");
    const double var = env.return_variance();
    double acc = 0.0;
    for (std::size_t i = 0; i < fold.size(); ++i) {
        const double mu = theta.mean(fold.records[i].s, fold.records[i].a);
        double s = 0.0;
        for (std::size_t b = 0; b < B; ++b) s += normal::log_density(draws[i * B + b], mu, var);
        acc += s / static_cast<double>(B);
    }
    return -acc / static_cast<double>(fold.size());
}

FitResult fle_run(const LQRDataset& d, const LQREnv& env, const FDEConfig& config) {
    const std::size_t B = config.mc_samples;
    if (B == 0) throw InvalidInput("fle_run needs mc_samples >= 1");
    const auto& opt = config.optimizer;
    const double backup_sd = env.gamma * std::sqrt(env.return_variance());
    const double var = env.return_variance();

    return fit_loop(d, env, config, [&](std::size_t t, const LQRDataset& fold, const LQRTheta& prev) -> Objective {
        Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(Purpose::fle), t}));
        std::normal_distribution<double> z01(0.0, 1.0);
        auto phi = std::make_shared<std::vector<Features>>();
        auto draws = std::make_shared<std::vector<double>>();
        for (const auto& rec : fold.records) {
            phi->push_back(lqr_features(rec.s, rec.a));
            const double m = backup_mean(rec, prev, env);
            for (std::size_t b = 0; b < B; ++b) draws->push_back(m + backup_sd * z01(rng));
        }
        auto value = [phi, draws, B, var](const std::vector<double>& x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < phi->size(); ++i) {
                const double mu = dot12((*phi)[i], x.data());
                double s = 0.0;
                for (std::size_t b = 0; b < B; ++b) s += normal::log_density((*draws)[i * B + b], mu, var);
                acc += s / static_cast<double>(B);
            }
            return -acc / static_cast<double>(phi->size());
        };
        if (opt.gradient == GradientMode::finite_difference) return central_difference(value, opt.fd_step);
        return [phi, draws, B, var, value](const std::vector<double>& x, std::vector<double>* grad) {
            if (grad) {
                grad->assign(LQRTheta::kSize, 0.0);
                const double n = static_cast<double>(phi->size());
                for (std::size_t i = 0; i < phi->size(); ++i) {
                    const double mu = dot12((*phi)[i], x.data());
                    double slope = 0.0;
                    for (std::size_t b = 0; b < B; ++b) slope += (mu - (*draws)[i * B + b]) / var;
                    slope /= static_cast<double>(B) * n;
                    for (std::size_t j = 0; j < LQRTheta::kSize; ++j) (*grad)[j] += slope * (*phi)[i][j];
                }
            }
            return value(x);
        };
    });
}

}  // namespace fde

namespace fde {

namespace {

/// Groups fold records by flat (s, a) index, in input order.
std::vector<std::vector<std::size_t>> group_by_pair(const TabularDataset& fold, const ReturnTable& shape) {
    std::vector<std::vector<std::size_t>> groups(shape.size());
    for (std::size_t i = 0; i < fold.size(); ++i) {
        const auto& t = fold.records[i];
        if (t.s >= shape.n_states || t.a >= shape.n_actions || t.sp >= shape.n_states)
            throw InvalidInput("tabular record outside the table's index set");
        groups[t.s * shape.n_actions + t.a].push_back(i);
    }
    return groups;
}

}  // namespace

ReturnTable tabular_fde_step(const TabularDataset& fold, const ReturnTable& prev, const Policy& pi, double gamma) {
    const auto groups = group_by_pair(fold, prev);
    ReturnTable out = prev;
    for (std::size_t idx = 0; idx < groups.size(); ++idx) {
        const auto& g = groups[idx];
        if (g.empty()) continue;
        const double w = 1.0 / static_cast<double>(g.size());
        Atomic acc{1, {}, {}};
        for (std::size_t i : g) {
            const auto& t = fold.records[i];
            const Atomic b = bellman_backup(t.r, t.sp, prev, pi, gamma);
            acc.locations.insert(acc.locations.end(), b.locations.begin(), b.locations.end());
            for (double m : b.masses) acc.masses.push_back(w * m);
        }
        out.entries[idx] = merge_atoms(std::move(acc), 1e-12);
    }
    return out;
}

ReturnTable tabular_fle_step(const TabularDataset& fold, const ReturnTable& prev, const Policy& pi, double gamma,
                             std::size_t B, Rng& rng) {
    if (B == 0) throw InvalidInput("tabular_fle_step needs B >= 1");
    const auto groups = group_by_pair(fold, prev);
    ReturnTable out = prev;
    for (std::size_t idx = 0; idx < groups.size(); ++idx) {
        const auto& g = groups[idx];
        if (g.empty()) continue;
        const double w = 1.0 / static_cast<double>(g.size() * B);
        Atomic acc{1, {}, {}};
        for (std::size_t i : g) {
            const auto& t = fold.records[i];
            const EmpiricalSample z = sample(Distribution{bellman_backup(t.r, t.sp, prev, pi, gamma)}, B, rng);
            for (double v : z.points) {
                acc.locations.push_back(v);
                acc.masses.push_back(w);
            }
        }
        out.entries[idx] = merge_atoms(std::move(acc), 1e-12);
    }
    return out;
}

TabularFitResult tabular_fde_run(const TabularDataset& d, std::size_t n_states, std::size_t n_actions,
                                 const Policy& pi, double gamma, std::size_t T, std::size_t B, std::uint64_t seed) {
    const auto folds = split_dataset(d, T);
    TabularFitResult res;
    res.iterates.push_back(ReturnTable::constant(n_states, n_actions, 0.0));
    for (std::size_t t = 1; t <= T; ++t) {
        const ReturnTable& prev = res.iterates.back();
        if (B == 0) {
            res.iterates.push_back(tabular_fde_step(folds[t - 1], prev, pi, gamma));
        } else {
            Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::fle), t}));
            res.iterates.push_back(tabular_fle_step(folds[t - 1], prev, pi, gamma, B, rng));
        }
    }
    return res;
}

}  // namespace fde
