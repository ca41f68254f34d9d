#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fde/evaluation.hpp"
#include "fde/fde.hpp"
#include "fde/metrics.hpp"
#include "fde/serial.hpp"
#include "oracles/oracle_values.hpp"

using namespace fde;
using doctest::Approx;

namespace {

std::vector<DivergenceSpec> closed_form_specs() {
    return {DivergenceSpec::cramer(), DivergenceSpec::mmd(KernelSpec::energy(1.0)),
            DivergenceSpec::mmd(KernelSpec::rbf(1.0)), DivergenceSpec::mmd(KernelSpec::laplace(1.0)),
            DivergenceSpec::pdf_l2(), DivergenceSpec::kl()};
}

LQRTheta random_theta(Rng& rng, double scale) {
    std::array<double, LQRTheta::kSize> v{};
    for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return LQRTheta::unflatten(v.data());
}

// E_rho |mu_a - mu_b| on fresh behaviour-policy draws.
double mean_abs_gap(const LQRTheta& a, const LQRTheta& b, Rng& rng) {
    double acc = 0.0;
    for (int i = 0; i < 5000; ++i) {
        Vec2 x, u;
        lqr_sample_start(rng, x, u);
        acc += std::abs(a.mean(x, u) - b.mean(x, u));
    }
    return acc / 5000.0;
}

}  // namespace

TEST_CASE("choose_T") {
    CHECK(choose_T(1000, 0.99) == oracle::kChooseT1000);
    CHECK(choose_T(1000, 0.99) == 34);
    CHECK(oracle::kChooseT2 == 0);
    CHECK(choose_T(2, 0.5) == 1);
    TSelectionParams p;
    p.c_divide = 10.0;
    CHECK(choose_T(1000, 0.99, p) == oracle::kChooseT1000Cd10);
    p.c = 0.5;
    CHECK_THROWS_AS(choose_T(1000, 0.99, p), InvalidInput);
}

TEST_CASE("split_dataset") {
    TabularDataset d;
    for (std::size_t i = 0; i < 1000; ++i) d.records.push_back({i, 0, 0.0, 0});
    const auto folds = split_dataset(d, 34);
    REQUIRE(folds.size() == 34);
    for (std::size_t t = 0; t < 33; ++t) CHECK(folds[t].size() == 29);
    CHECK(folds[33].size() == 43);
    CHECK(folds[33].records.back().s == 999);
    CHECK(folds[1].records.front().s == 29);

    TabularDataset ten;
    for (std::size_t i = 0; i < 10; ++i) ten.records.push_back({i, 0, 0.0, 0});
    CHECK(split_dataset(ten, 1)[0].size() == 10);
    for (const auto& f : split_dataset(ten, 10)) CHECK(f.size() == 1);
    CHECK_THROWS_AS(split_dataset(ten, 11), InvalidInput);
    CHECK_THROWS_AS(split_dataset(ten, 0), InvalidInput);
}

TEST_CASE("fde_objective spot values") {
    const LQREnv env = LQREnv::standard();
    LQRTransition t;
    t.s << 0.3, -0.2;
    t.a << 0.1, 0.4;
    t.r = 1.0;
    t.sp = env.step(t.s, t.a);
    const LQRDataset fold{{t}};
    CHECK(fde_objective(fold, {}, {}, env, DivergenceSpec::kl()) == Approx(oracle::kFdeObjectiveKl).epsilon(1e-12));
    CHECK(fde_objective(fold, {}, {}, env, DivergenceSpec::kl()) == Approx(0.0100504).epsilon(1e-6));

    // Matching the backup mean leaves only the variance mismatch.
    LQRTheta theta;
    const Vec2 x = t.s, a = t.a;
    theta.M1 = Mat2::Identity() * (t.r / x.squaredNorm());
    CHECK(theta.mean(x, a) == Approx(t.r));
    CHECK(fde_objective(fold, theta, {}, env, DivergenceSpec::pdf_l2()) > 0.0);
}

TEST_CASE("fde_objective is the mean of closed-form terms") {
    const LQREnv env = LQREnv::standard();
    const LQRTheta star = lqr_true_params(env);
    Rng rng(1);
    const auto fold = lqr_collect(env, 300, rng);
    const double var = env.return_variance();
    for (const auto& spec : closed_form_specs()) {
        double acc = 0.0;
        for (const auto& t : fold.records)
            acc += divergence_gaussian(spec, {star.mean(t.s, t.a), var},
                                       {t.r + env.gamma * star.mean(t.sp, env.K * t.sp), env.gamma * env.gamma * var});
        CHECK(fde_objective(fold, star, star, env, spec) == Approx(acc / 300.0).epsilon(1e-12));
    }
}

TEST_CASE("fde_objective: permutation, serial reference, gradient") {
    const LQREnv env = LQREnv::standard();
    Rng rng(2);
    auto fold = lqr_collect(env, 1500, rng);
    const LQRTheta prev = random_theta(rng, 3.0);
    for (const auto& spec : closed_form_specs()) {
        const LQRTheta theta = random_theta(rng, 3.0);
        const double f = fde_objective(fold, theta, prev, env, spec);
        CHECK(f == Approx(serial::fde_objective(fold, theta, prev, env, spec)).epsilon(1e-12));
        auto shuffled = fold;
        std::reverse(shuffled.records.begin(), shuffled.records.end());
        CHECK(fde_objective(shuffled, theta, prev, env, spec) == Approx(f).epsilon(1e-12));
    }
    fold.records.resize(200);
    for (const auto& spec : closed_form_specs())
        for (int trial = 0; trial < 20; ++trial) {
            const LQRTheta theta = random_theta(rng, 3.0);
            const auto g = fde_objective_gradient(fold, theta, prev, env, spec);
            const auto x = theta.flatten();
            for (std::size_t j = 0; j < LQRTheta::kSize; ++j) {
                auto xp = x, xm = x;
                xp[j] += 1e-5;
                xm[j] -= 1e-5;
                const double fd = (fde_objective(fold, LQRTheta::unflatten(xp.data()), prev, env, spec) -
                                   fde_objective(fold, LQRTheta::unflatten(xm.data()), prev, env, spec)) / 2e-5;
                CHECK(g[j] == Approx(fd).epsilon(1e-4).scale(1e-8));
            }
        }
}

TEST_CASE("one FDE step recovers the parameter map") {
    const LQREnv env = LQREnv::standard();
    Rng rng(3);
    const auto d = lqr_collect(env, 10000, rng);
    FDEConfig cfg;
    cfg.explicit_T = 1;
    const auto fit = fde_run(d, env, cfg);
    const LQRTheta target = lqr_param_map(env, LQRTheta{});
    CHECK(mean_abs_gap(fit.theta, target, rng) <= 0.05);
}

TEST_CASE("population minimizer at the true parameters") {
    const LQREnv env = LQREnv::standard();
    const LQRTheta star = lqr_true_params(env);
    Rng rng(4);
    const auto fold = lqr_collect(env, 100000, rng);
    for (const auto& spec : closed_form_specs()) {
        LbfgsOptions opts;
        opts.grad_tol = 1e-8;
        const Objective f = [&](const std::vector<double>& x, std::vector<double>* grad) {
            const LQRTheta th = LQRTheta::unflatten(x.data());
            if (grad) {
                const auto g = fde_objective_gradient(fold, th, star, env, spec);
                grad->assign(g.begin(), g.end());
            }
            return fde_objective(fold, th, star, env, spec);
        };
        const auto x0 = star.flatten();
        const auto r = lbfgs_minimize(f, std::vector<double>(LQRTheta::kSize, 0.0), opts);
        CHECK(mean_abs_gap(LQRTheta::unflatten(r.x.data()), star, rng) <= 0.05);
        (void)x0;
    }
}

TEST_CASE("a zero design leaves M1 at its warm start") {
    const LQREnv env = LQREnv::standard();
    Rng rng(5);
    auto d = lqr_collect(env, 200, rng);
    for (auto& t : d.records) {
        t.s.setZero();
        t.sp = env.step(t.s, t.a);
    }
    LQRTheta prev;
    prev.M1 << 1.5, -0.5, 0.25, 2.0;
    const auto g = fde_objective_gradient(d, prev, prev, env, DivergenceSpec::kl());
    for (std::size_t j = 0; j < 8; ++j) CHECK(g[j] == 0.0);
    FDEConfig cfg;
    cfg.explicit_T = 1;
    const auto fit = fde_run(d, env, cfg);
    CHECK(fit.theta.M1.norm() == 0.0);
}

TEST_CASE("fde_run trace and determinism") {
    const LQREnv env = LQREnv::standard();
    Rng rng(6);
    const auto d = lqr_collect(env, 1000, rng);
    for (const auto& spec : closed_form_specs()) {
        FDEConfig cfg;
        cfg.divergence = spec;
        const auto a = fde_run(d, env, cfg);
        CHECK(a.T == 34);
        REQUIRE(a.trace.size() == 34);
        for (const auto& it : a.trace) CHECK(it.f_end <= it.f_start);
        const auto b = fde_run(d, env, cfg);
        CHECK(a.theta.max_abs_diff(b.theta) == 0.0);
    }
    FDEConfig bad;
    bad.divergence = DivergenceSpec::tvd_mc();
    CHECK_THROWS_AS(fde_run(d, env, bad), Unsupported);
}

TEST_CASE("fle objective") {
    const LQREnv env = LQREnv::standard();
    Rng rng(7);
    const auto fold = lqr_collect(env, 1, rng);
    const LQRTheta theta = random_theta(rng, 1.0);
    const double z = 3.7, var = env.return_variance();
    const double mu = theta.mean(fold.records[0].s, fold.records[0].a);
    CHECK(fle_objective(fold, {z}, 1, theta, env) ==
          Approx(0.5 * std::log(2.0 * M_PI * var) + (z - mu) * (z - mu) / (2.0 * var)).epsilon(1e-14));
    CHECK_THROWS_AS(fle_objective(fold, {}, 0, theta, env), InvalidInput);
}

TEST_CASE("fle with many draws approaches the KL fit") {
    // One transition: the KL-FDE argmin over the mean matches the backup mean;
    // the FLE argmin is the draw average. Compare them through theta * phi.
    const LQREnv env = LQREnv::standard();
    Rng rng(8);
    const auto fold = lqr_collect(env, 1, rng);
    const auto& t = fold.records[0];
    const LQRTheta prev = lqr_true_params(env);
    const double target = backup_mean(t, prev, env);
    const std::size_t B = 10000;
    std::normal_distribution<double> noise(target, env.gamma * std::sqrt(env.return_variance()));
    std::vector<double> draws(B);
    for (auto& v : draws) v = noise(rng);
    // Minimise over a scale of the feature direction so the problem is one-dimensional.
    const auto phi = lqr_features(t.s, t.a);
    double phi2 = 0.0;
    for (double v : phi) phi2 += v * v;
    auto theta_at = [&](double m) {
        std::array<double, LQRTheta::kSize> x{};
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = m * phi[j] / phi2;
        return LQRTheta::unflatten(x.data());
    };
    const Objective f = central_difference([&](const std::vector<double>& m) {
        return fle_objective(fold, draws, B, theta_at(m[0]), env);
    });
    const Objective g = central_difference([&](const std::vector<double>& m) {
        return fde_objective(fold, theta_at(m[0]), prev, env, DivergenceSpec::kl());
    });
    const double fle_arg = lbfgs_minimize(f, {0.0}).x[0], kl_arg = lbfgs_minimize(g, {0.0}).x[0];
    double draw_mean = 0.0;
    for (double v : draws) draw_mean += v / static_cast<double>(B);
    CHECK(kl_arg == Approx(target).epsilon(1e-6));
    CHECK(fle_arg == Approx(draw_mean).epsilon(1e-6));
    // The remaining gap is the Monte Carlo error of the draw mean.
    const double se = env.gamma * std::sqrt(env.return_variance() / static_cast<double>(B));
    CHECK(std::abs(fle_arg - kl_arg) <= 4.0 * se);
}

TEST_CASE("fle_run determinism") {
    const LQREnv env = LQREnv::standard();
    Rng rng(9);
    const auto d = lqr_collect(env, 300, rng);
    FDEConfig cfg;
    cfg.seed = 42;
    const auto a = fle_run(d, env, cfg), b = fle_run(d, env, cfg);
    CHECK(a.theta.max_abs_diff(b.theta) == 0.0);
    cfg.seed = 43;
    CHECK(fle_run(d, env, cfg).theta.max_abs_diff(a.theta) > 0.0);
}

TEST_CASE("tabular FDE step is the exact mixture of backups") {
    Rng rng(10);
    const auto mdp = tabular_make_random(3, 2, 2, rng, 0.8);
    const Policy pi = Policy::uniform(3, 2);
    ReturnTable prev{3, 2, {}};
    for (int i = 0; i < 6; ++i) prev.entries.push_back(random_atomic(rng, 3, 0.0, 2.0));
    TabularDataset fold{{{0, 0, 0.5, 1}, {0, 0, 0.25, 2}, {1, 1, 1.0, 0}}};
    const auto next = tabular_fde_step(fold, prev, pi, 0.8);
    const Atomic expect = merge_atoms(
        std::get<Atomic>(mixture({{0.5, bellman_backup(0.5, 1, prev, pi, 0.8)}, {0.5, bellman_backup(0.25, 2, prev, pi, 0.8)}})),
        1e-12);
    CHECK(next.at(0, 0).locations == expect.locations);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(next.at(0, 0).masses[i] == Approx(expect.masses[i]));
    // Unseen pairs keep the previous entry.
    CHECK(next.at(2, 1).locations == prev.at(2, 1).locations);
}

TEST_CASE("tabular FLE step draws B points per backup") {
    Rng rng(11);
    const Policy pi = Policy::uniform(2, 1);
    const ReturnTable prev = ReturnTable::constant(2, 1, 1.0);
    TabularDataset fold{{{0, 0, 0.0, 1}, {0, 0, 1.0, 1}}};
    const auto next = tabular_fle_step(fold, prev, pi, 0.5, 3, rng);
    double total = 0.0;
    for (double m : next.at(0, 0).masses) total += m;
    CHECK(total == Approx(1.0));
    CHECK(mean(Distribution{next.at(0, 0)}) == Approx(1.0));
}
