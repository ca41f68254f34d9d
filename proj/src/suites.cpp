#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "fde/error.hpp"
#include "fde/harness.hpp"
#include "fde/metrics.hpp"
#include "fde/normal.hpp"

namespace fde {

namespace {

std::vector<double> dirichlet(std::size_t k, Rng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = -std::log1p(-rng.uniform()));
    for (auto& x : w) x /= total;
    return w;
}

Policy random_policy(std::size_t n_states, std::size_t n_actions, Rng& rng) {
    std::vector<double> probs;
    for (std::size_t s = 0; s < n_states; ++s) {
        auto row = dirichlet(n_actions, rng);
        double head = 0.0;
        for (std::size_t a = 0; a + 1 < n_actions; ++a) head += row[a];
        row.back() = 1.0 - head;
        probs.insert(probs.end(), row.begin(), row.end());
    }
    return Policy::make(n_states, n_actions, std::move(probs));
}

ReturnTable random_table(std::size_t n_states, std::size_t n_actions, Rng& rng) {
    ReturnTable t{n_states, n_actions, {}};
    for (std::size_t i = 0; i < n_states * n_actions; ++i) t.entries.push_back(random_atomic(rng, 4, 0.0, 5.0));
    return t;
}

template <class... Args>
std::string fmt(Args&&... args) {
    std::ostringstream os;
    os.precision(10);
    (os << ... << args);
    return os.str();
}

void fail(SuiteReport& r, std::string msg) {
    r.passed = false;
    if (r.counterexamples.size() < 20) r.counterexamples.push_back(std::move(msg));
}

// ---------------------------------------------------------------- contraction

SuiteReport contraction_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "contraction";
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 1}));
    const MetricSpec w[] = {MetricSpec::wasserstein(1.0), MetricSpec::wasserstein(2.0)};
    BellmanOptions exact;
    exact.merge = false;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const std::size_t nS = 2 + rng() % 4, nA = 1 + rng() % 3, support = 1 + rng() % 3;
        const double gamma = 0.3 + 0.65 * rng.uniform();
        const TabularMDP mdp = tabular_make_random(nS, nA, support, rng, gamma);
        const Policy pi = random_policy(nS, nA, rng);
        const ReturnTable u1 = random_table(nS, nA, rng), u2 = random_table(nS, nA, rng);
        const ReturnTable t1 = apply_bellman(u1, mdp, pi, exact), t2 = apply_bellman(u2, mdp, pi, exact);
        const auto weights = exact_dpi(mdp, dirichlet(nS * nA, rng), pi);

        const ExtensionSpec sup = ExtensionSpec::supremum();
        const double before = metric_extension(w[0], sup, u1.entries, u2.entries);
        const double after = metric_extension(w[0], sup, t1.entries, t2.entries);
        ++rep.checks;
        if (after > gamma * before + 1e-9)
            fail(rep, fmt("trial ", trial, ": sup-W1 ", after, " > gamma * ", before, " (gamma = ", gamma, ")"));

        for (const auto& m : w) {
            const ExtensionSpec ext = ExtensionSpec::expectation(m.p, weights);
            const double zeta = contraction_factor(m, ext, gamma);
            const double b = metric_extension(m, ext, u1.entries, u2.entries);
            const double a = metric_extension(m, ext, t1.entries, t2.entries);
            ++rep.checks;
            if (a > zeta * b + 1e-9)
                fail(rep, fmt("trial ", trial, ": expectation W", m.p, " ", a, " > ", zeta, " * ", b));
        }
    }
    rep.notes.push_back(fmt(rep.checks, " contraction checks on 100 random MDP/table pairs"));
    return rep;
}

// ---------------------------------------------------------------- minimizer

struct OutcomeLaw {
    double prob;
    std::size_t next;
    double reward;
};

template <class Law, class Div>
double population_objective(const Law& candidate, const std::vector<std::pair<double, Law>>& backups, Div&& d) {
    double f = 0.0;
    for (const auto& [p, psi] : backups) f += p * d(candidate, psi);
    return f;
}

Atomic atomic_mixture(const std::vector<std::pair<double, Atomic>>& parts) {
    Atomic out{1, {}, {}};
    for (const auto& [w, a] : parts) {
        out.locations.insert(out.locations.end(), a.locations.begin(), a.locations.end());
        for (double m : a.masses) out.masses.push_back(w * m);
    }
    return merge_atoms(std::move(out), 1e-12);
}

GaussianMixture1D gmm_mixture(const std::vector<std::pair<double, GaussianMixture1D>>& parts) {
    GaussianMixture1D out;
    for (const auto& [w, g] : parts)
        for (const auto& c : g.components) out.components.push_back({w * c.weight, c.mean, c.variance});
    return out;
}

// Perturbations of the target. Atoms lighter than 0.02 are left alone so every
// candidate sits a resolvable distance from the target.
std::vector<Atomic> atomic_candidates(const Atomic& t, Rng& rng) {
    std::vector<Atomic> c;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.masses[i] < 0.02) continue;
        for (double delta : {-0.25, -0.05, 0.05, 0.25}) {
            Atomic a = t;
            a.locations[i] += delta;
            c.push_back(a);
        }
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (i == j || std::abs(t.locations[i] - t.locations[j]) < 0.05) continue;
            Atomic a = t;
            const double move = 0.5 * std::min(a.masses[i], 0.1);
            a.masses[i] -= move;
            a.masses[j] += move;
            c.push_back(a);
        }
    }
    for (double z : {-0.1, 0.1}) {
        Atomic a = t;
        for (double& x : a.locations) x += z;
        c.push_back(a);
    }
    const double m = mean(Distribution{t});
    for (double s : {0.9, 1.1}) {
        Atomic a = t;
        for (double& x : a.locations) x = m + s * (x - m);
        c.push_back(a);
    }
    c.push_back(Atomic::point_mass(m));
    for (int k = 0; k < 5; ++k) c.push_back(random_atomic(rng, 4, 0.0, 5.0));
    return c;
}

std::vector<GaussianMixture1D> gmm_candidates(const GaussianMixture1D& t, Rng& rng) {
    std::vector<GaussianMixture1D> c;
    const std::size_t k = std::min<std::size_t>(t.components.size(), 4);
    for (std::size_t i = 0; i < k; ++i) {
        for (double delta : {-0.2, 0.2}) {
            auto g = t;
            g.components[i].mean += delta;
            c.push_back(g);
        }
        for (double s : {0.8, 1.25}) {
            auto g = t;
            g.components[i].variance *= s;
            c.push_back(g);
        }
        auto g = t;
        const std::size_t j = (i + 1) % t.components.size();
        if (j != i) {
            const double move = 0.5 * g.components[i].weight;
            g.components[i].weight -= move;
            g.components[j].weight += move;
            c.push_back(g);
        }
    }
    for (double z : {-0.1, 0.1}) {
        auto g = t;
        for (auto& comp : g.components) comp.mean += z;
        c.push_back(g);
    }
    for (int r = 0; r < 3; ++r) {
        GaussianMixture1D g;
        const auto w = dirichlet(3, rng);
        for (int m = 0; m < 3; ++m) g.components.push_back({w[static_cast<std::size_t>(m)], 5.0 * rng.uniform(), 0.2 + rng.uniform()});
        c.push_back(g);
    }
    return c;
}

constexpr double kStrictMargin = 1e-10;

template <class Law, class Div>
void check_minimizer(SuiteReport& rep, const std::string& label, const std::string& where, const Law& target,
                     const std::vector<Law>& candidates, const std::vector<std::pair<double, Law>>& backups, Div&& d,
                     double& min_gap) {
    const double f_star = population_objective(target, backups, d);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double gap = population_objective(candidates[k], backups, d) - f_star;
        min_gap = std::min(min_gap, gap);
        ++rep.checks;
        if (!(gap > kStrictMargin)) fail(rep, fmt(label, " ", where, " candidate ", k, ": gap ", gap, " is not > 0"));
    }
}

SuiteReport minimizer_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "minimizer";
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 2}));
    const std::size_t nS = 2, nA = 2;
    const double gamma = 0.8;
    const TabularMDP mdp = tabular_make_random(nS, nA, 2, rng, gamma);
    const Policy pi = random_policy(nS, nA, rng);

    // Atomic carriers with three atoms per entry.
    ReturnTable prev{nS, nA, {}};
    for (std::size_t i = 0; i < nS * nA; ++i) {
        Atomic a = random_atomic(rng, 1, 0.0, 5.0);
        while (a.size() < 3) a = random_atomic(rng, 3, 0.0, 5.0);
        prev.entries.push_back(a);
    }
    const std::vector<std::pair<std::string, DivergenceSpec>> atomic_divs{
        {"cramer", DivergenceSpec::cramer()},
        {"energy", DivergenceSpec::mmd(KernelSpec::energy(1.0))},
        {"rbf", DivergenceSpec::mmd(KernelSpec::rbf(1.0))},
        {"laplace", DivergenceSpec::mmd(KernelSpec::laplace(1.0))}};
    std::size_t tvd_beaten = 0, tvd_total = 0;
    for (const auto& [label, spec] : atomic_divs) {
        double min_gap = INFINITY;
        Rng cand_rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 20}));
        for (std::size_t s = 0; s < nS; ++s)
            for (std::size_t a = 0; a < nA; ++a) {
                std::vector<std::pair<double, Atomic>> backups;
                for (const auto& o : mdp.row(s, a))
                    backups.push_back({o.prob, bellman_backup(o.reward, o.next, prev, pi, gamma)});
                const Atomic t = atomic_mixture(backups);
                auto cands = atomic_candidates(t, cand_rng);
                for (const auto& b : backups) cands.push_back(merge_atoms(b.second, 1e-12));
                auto d = [&spec = spec](const Atomic& p, const Atomic& q) { return divergence_atomic(spec, p, q); };
                check_minimizer(rep, label, fmt("atomic (", s, ",", a, ")"), t, cands, backups, d, min_gap);
                if (label == "cramer") {
                    auto tvd = [](const Atomic& p, const Atomic& q) { return tvd_atomic(p, q); };
                    const double f_t = population_objective(t, backups, tvd);
                    for (const auto& c : cands) {
                        ++tvd_total;
                        if (population_objective(c, backups, tvd) <= f_t) ++tvd_beaten;
                    }
                }
            }
        rep.notes.push_back(fmt(label, " (atomic): smallest candidate gap ", min_gap));
    }

    // Gaussian-mixture carriers; the density-based divergences need them.
    std::vector<GaussianMixture1D> prev_g;
    for (std::size_t i = 0; i < nS * nA; ++i) {
        GaussianMixture1D g;
        const auto w = dirichlet(3, rng);
        for (std::size_t m = 0; m < 3; ++m) g.components.push_back({w[m], 3.0 * rng.uniform(), 0.2 + 0.8 * rng.uniform()});
        prev_g.push_back(g);
    }
    auto backup_g = [&](double r, std::size_t sp) {
        std::vector<std::pair<double, GaussianMixture1D>> parts;
        for (std::size_t b = 0; b < nA; ++b) {
            GaussianMixture1D g = prev_g[sp * nA + b];
            for (auto& c : g.components) {
                c.mean = r + gamma * c.mean;
                c.variance *= gamma * gamma;
            }
            parts.push_back({pi(sp, b), g});
        }
        return gmm_mixture(parts);
    };
    const std::vector<std::string> gmm_labels{"cramer", "energy", "rbf", "laplace", "pdf_l2", "kl"};
    for (const auto& label : gmm_labels) {
        double min_gap = INFINITY;
        Rng cand_rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 21}));
        const DivergenceSpec spec = divergence_from_label(label);
        for (std::size_t s = 0; s < nS; ++s)
            for (std::size_t a = 0; a < nA; ++a) {
                std::vector<std::pair<double, GaussianMixture1D>> backups;
                for (const auto& o : mdp.row(s, a)) backups.push_back({o.prob, backup_g(o.reward, o.next)});
                const GaussianMixture1D t = gmm_mixture(backups);
                auto cands = gmm_candidates(t, cand_rng);
                std::function<double(const GaussianMixture1D&, const GaussianMixture1D&)> d;
                if (label == "kl") {
                    d = [](const GaussianMixture1D& p, const GaussianMixture1D& q) { return kl_gmm_quadrature(q, p); };
                } else {
                    d = [spec](const GaussianMixture1D& p, const GaussianMixture1D& q) {
                        Rng unused(0);
                        return divergence_gmm(spec, p, q, unused);
                    };
                }
                check_minimizer(rep, label, fmt("gmm (", s, ",", a, ")"), t, cands, backups, d, min_gap);
            }
        rep.notes.push_back(fmt(label, " (gmm): smallest candidate gap ", min_gap));
    }
    rep.notes.push_back(fmt("tvd (not asserted): ", tvd_beaten, " of ", tvd_total,
                            " atomic candidates tie or beat the Bellman target"));
    return rep;
}

// ---------------------------------------------------------------- slc

SuiteReport slc_suite(std::uint64_t seed, bool negative_control) {
    SuiteReport rep;
    rep.suite = "slc";
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 3}));
    std::vector<std::pair<std::string, MetricSpec>> metrics;
    if (negative_control) {
        MetricSpec wrong = MetricSpec::wasserstein(1.0);
        wrong.c = 2.0;
        metrics.push_back({"wasserstein(p=1) with c=2", wrong});
    } else {
        metrics = {{"wasserstein(p=1)", MetricSpec::wasserstein(1.0)},
                   {"wasserstein(p=2)", MetricSpec::wasserstein(2.0)},
                   {"wasserstein(p=3)", MetricSpec::wasserstein(3.0)},
                   {"mmd(energy beta=0.5)", MetricSpec::mmd(KernelSpec::energy(0.5))},
                   {"mmd(energy beta=1)", MetricSpec::mmd(KernelSpec::energy(1.0))},
                   {"mmd(energy beta=1.5)", MetricSpec::mmd(KernelSpec::energy(1.5))},
                   {"cramer", MetricSpec::cramer()}};
    }
    for (const auto& [label, m] : metrics) {
        const SlcReport r = slc_property_check(m, 200, rng);
        rep.checks += 3 * r.trials;
        for (const auto& v : r.violations)
            fail(rep, fmt(label, " trial ", v.trial, ": ", v.property, " ", v.lhs, " > ", v.rhs));
        rep.notes.push_back(fmt(label, ": ", r.violations.size(), " violations in ", r.trials, " trials"));
    }
    if (negative_control) rep.notes.push_back("negative control: a failing result is the expected outcome");
    return rep;
}

// ---------------------------------------------------------------- closed forms

struct McValue {
    double mean;
    double se;
};

McValue mc_divergence(const DivergenceSpec& spec, const Gaussian1D& p, const Gaussian1D& q, std::size_t n, Rng& rng) {
    std::normal_distribution<double> z01(0.0, 1.0);
    const double sp = std::sqrt(p.variance), sq = std::sqrt(q.variance);
    const KernelSpec k = spec.kind == DivergenceKind::cramer ? KernelSpec::energy(1.0) : spec.kernel;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double h = 0.0;
        switch (spec.kind) {
            case DivergenceKind::kl: {
                const double z = q.mean + sq * z01(rng);
                h = normal::log_density(z, q.mean, q.variance) - normal::log_density(z, p.mean, p.variance);
                break;
            }
            case DivergenceKind::pdf_l2: {
                const double x = p.mean + sp * z01(rng), y = q.mean + sq * z01(rng);
                h = normal::density(x, p.mean, p.variance) - normal::density(x, q.mean, q.variance) +
                    normal::density(y, q.mean, q.variance) - normal::density(y, p.mean, p.variance);
                break;
            }
            case DivergenceKind::mmd:
            case DivergenceKind::cramer: {
                const double x = p.mean + sp * z01(rng), x2 = p.mean + sp * z01(rng);
                const double y = q.mean + sq * z01(rng), y2 = q.mean + sq * z01(rng);
                h = k.k0(x - x2) + k.k0(y - y2) - k.k0(x - y2) - k.k0(x2 - y);
                if (spec.kind == DivergenceKind::cramer) h *= 0.5;
                break;
            }
            case DivergenceKind::tvd_mc: throw Unsupported("no Monte Carlo oracle for tvd_mc");
        }
        sum += h;
        sum2 += h * h;
    }
    const double dn = static_cast<double>(n);
    const double m = sum / dn;
    const double var = std::max(sum2 / dn - m * m, 0.0) * dn / (dn - 1.0);
    return {m, std::sqrt(var / dn)};
}

SuiteReport closed_forms_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "closed_forms";
    const std::vector<std::string> labels{"cramer", "energy", "rbf", "laplace", "pdf_l2", "kl"};
    const std::size_t pairs = 100, draws = 1000000;
    for (std::size_t li = 0; li < labels.size(); ++li) {
        const DivergenceSpec spec = divergence_from_label(labels[li]);
        Rng pair_rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 4, li}));
        std::vector<std::pair<Gaussian1D, Gaussian1D>> cases(pairs);
        for (auto& [p, q] : cases) {
            p = {-3.0 + 6.0 * pair_rng.uniform(), 0.25 + 3.75 * pair_rng.uniform()};
            q = {-3.0 + 6.0 * pair_rng.uniform(), 0.25 + 3.75 * pair_rng.uniform()};
        }
        std::vector<double> z(pairs);
        const auto np = static_cast<std::ptrdiff_t>(pairs);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < np; ++i) {
            const auto k = static_cast<std::size_t>(i);
            Rng mc(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::mc), li, k}));
            const auto [p, q] = cases[k];
            const McValue v = mc_divergence(spec, p, q, draws, mc);
            z[k] = (divergence_gaussian(spec, p, q) - v.mean) / v.se;
        }
        std::size_t over = 0;
        double worst = 0.0, chi2 = 0.0;
        for (std::size_t k = 0; k < pairs; ++k) {
            ++rep.checks;
            worst = std::max(worst, std::abs(z[k]));
            chi2 += z[k] * z[k];
            if (std::abs(z[k]) > 3.0) {
                ++over;
                const auto& [p, q] = cases[k];
                fail(rep, fmt(labels[li], " pair ", k, ": P=N(", p.mean, ",", p.variance, ") Q=N(", q.mean, ",",
                              q.variance, ") gap = ", z[k], " SE"));
            }
        }
        rep.notes.push_back(fmt(labels[li], ": ", over, " of ", pairs, " beyond 3 SE, largest |gap| ", worst,
                                " SE, mean squared gap ", chi2 / static_cast<double>(pairs), " SE^2"));
    }
    const double kl = divergence_gaussian(DivergenceSpec::kl(), {0.0, 1.0}, {1.0, 1.0});
    ++rep.checks;
    if (std::abs(kl - 0.5) > 1e-9) fail(rep, fmt("KL(N(1,1) || N(0,1)) = ", kl, ", expected 0.5"));
    const double en = divergence_gaussian(DivergenceSpec::mmd(KernelSpec::energy(1.0)), {0.0, 1.0}, {2.0, 1.0});
    ++rep.checks;
    if (std::abs(en - 1.94426) > 1e-3) fail(rep, fmt("energy MMD^2(N(0,1), N(2,1)) = ", en, ", expected 1.94426"));
    rep.notes.push_back(fmt("KL(N(1,1) || N(0,1)) = ", kl, "; energy MMD^2(N(0,1), N(2,1)) = ", en));
    return rep;
}

// ---------------------------------------------------------------- sandwich

SuiteReport sandwich_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "sandwich";
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 5}));
    const double orders[] = {1.0, 1.5, 2.0, 3.0};
    for (std::size_t k = 0; k < 500; ++k) {
        const double a = -5.0 * rng.uniform();
        const double b = a + 0.5 + 4.5 * rng.uniform();
        const double p = orders[rng() % 4];
        const Atomic x = random_atomic(rng, 6, a, b), y = random_atomic(rng, 6, a, b);
        const double e = energy_distance(x, y);
        const double w1 = wasserstein_1d(1.0, x, y);
        const double wp = wasserstein_1d(p, x, y);
        const double lower = 2.0 / std::pow(b - a, 2.0 * p - 1.0) * std::pow(wp, 2.0 * p);
        rep.checks += 3;
        if (e > 2.0 * w1 + 1e-9) fail(rep, fmt("pair ", k, ": energy ", e, " > 2 W1 = ", 2.0 * w1));
        if (2.0 * w1 > 2.0 * wp + 1e-9) fail(rep, fmt("pair ", k, ": 2 W1 ", 2.0 * w1, " > 2 W", p, " = ", 2.0 * wp));
        if (lower > e + 1e-9) fail(rep, fmt("pair ", k, ": lower bound ", lower, " > energy ", e, " (p = ", p, ")"));
    }
    rep.notes.push_back("500 random bounded atomic pairs");
    return rep;
}

// ---------------------------------------------------------------- telescoping

SuiteReport telescoping_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "telescoping";
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Purpose::property), 6}));
    const MetricSpec w1 = MetricSpec::wasserstein(1.0);
    double tightest = INFINITY;
    for (std::size_t run = 0; run < 20; ++run) {
        const std::size_t nS = 3 + rng() % 4, nA = 1 + rng() % 3;
        const double gamma = 0.5 + 0.45 * rng.uniform();
        const TabularMDP mdp = tabular_make_episodic(nS, nA, 2, rng, gamma);
        const Policy pi = random_policy(nS, nA, rng);
        const Policy behavior = Policy::uniform(nS, nA);
        const std::size_t n = 100 + rng() % 400, T = 1 + rng() % 6;
        const TabularDataset d = tabular_collect(mdp, behavior, n, rng);
        const auto fit = tabular_fde_run(d, nS, nA, pi, gamma, T);
        const ReturnTable truth = solve_return_fixed_point(mdp, pi, 1e-12, 10 * nS + 10).table;
        const auto weights = exact_dpi(mdp, tabular_rho(mdp, behavior), pi);

        for (const ExtensionSpec& ext : {ExtensionSpec::supremum(), ExtensionSpec::expectation(1.0, weights)}) {
            const double zeta = contraction_factor(w1, ext, gamma);
            auto dist = [&](const ReturnTable& a, const ReturnTable& b) {
                return metric_extension(w1, ext, a.entries, b.entries);
            };
            double bound = std::pow(zeta, static_cast<double>(T)) * dist(fit.iterates[0], truth);
            for (std::size_t t = 1; t <= T; ++t) {
                const ReturnTable exact = apply_bellman(fit.iterates[t - 1], mdp, pi);
                bound += std::pow(zeta, static_cast<double>(T - t)) * dist(fit.iterates[t], exact);
            }
            const double lhs = dist(fit.iterates[T], truth);
            tightest = std::min(tightest, bound - lhs);
            ++rep.checks;
            if (lhs > bound + 1e-6)
                fail(rep, fmt("run ", run, (ext.mode == ExtensionMode::supremum ? " sup" : " expectation"), ": error ",
                              lhs, " > bound ", bound));
        }
    }
    rep.notes.push_back(fmt("20 runs, supremum and d_pi-expectation extensions; smallest slack ", tightest));
    return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"contraction", "minimizer",  "slc",
                                                "closed_forms", "sandwich", "telescoping"};
    return names;
}

SuiteReport run_property_suite(const std::string& suite, std::uint64_t seed, const SuiteOptions& opts) {
    if (opts.negative_control && suite != "slc") throw InvalidInput("negative control is only defined for slc");
    if (suite == "contraction") return contraction_suite(seed);
    if (suite == "minimizer") return minimizer_suite(seed);
    if (suite == "slc") return slc_suite(seed, opts.negative_control);
    if (suite == "closed_forms") return closed_forms_suite(seed);
    if (suite == "sandwich") return sandwich_suite(seed);
    if (suite == "telescoping") return telescoping_suite(seed);
    throw InvalidInput("unknown property suite '" + suite + "'");
}

}  // namespace fde
