#include <doctest.h>

#include <cmath>
#include <map>

#include "fde/bellman.hpp"
#include "fde/envs.hpp"
#include "fde/error.hpp"
#include "fde/metrics.hpp"
#include "fde/serial.hpp"

using namespace fde;
using doctest::Approx;

namespace {

TabularMDP self_loop(double reward, double gamma) { return TabularMDP::make(1, 1, gamma, {{{1.0, reward, 0}}}); }

// Enumerates every (a', atom) pair of the backup and accumulates masses by location.
std::map<double, double> enumerate_backup(double r, std::size_t sp, const ReturnTable& u, const Policy& pi,
                                          double gamma) {
    std::map<double, double> out;
    for (std::size_t b = 0; b < u.n_actions; ++b)
        for (std::size_t i = 0; i < u.at(sp, b).size(); ++i)
            out[r + gamma * u.at(sp, b).locations[i]] += pi(sp, b) * u.at(sp, b).masses[i];
    return out;
}

std::map<double, double> as_map(const Atomic& a) {
    std::map<double, double> out;
    for (std::size_t i = 0; i < a.size(); ++i) out[a.locations[i]] += a.masses[i];
    return out;
}

}  // namespace

TEST_CASE("bellman_backup") {
    ReturnTable u = ReturnTable::constant(1, 2, 0.0);
    u.at(0, 1) = Atomic::point_mass(5.0);
    const Atomic det = bellman_backup(1.0, 0, u, Policy::deterministic(2, {0}), 0.5);
    CHECK(as_map(det) == std::map<double, double>{{1.0, 1.0}});

    u.at(0, 1) = Atomic::point_mass(2.0);
    const Atomic two = merge_atoms(bellman_backup(0.0, 0, u, Policy::uniform(1, 2), 0.5), 1e-12);
    CHECK(two.locations == std::vector<double>{0.0, 1.0});
    CHECK(two.masses == std::vector<double>{0.5, 0.5});
}

TEST_CASE("bellman_backup matches enumeration on a random three-action instance") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        ReturnTable u{3, 3, {}};
        for (int i = 0; i < 9; ++i) u.entries.push_back(random_atomic(rng, 4, -1.0, 1.0));
        std::vector<double> probs;
        for (int s = 0; s < 3; ++s) {
            const double a = rng.uniform(), b = (1.0 - a) * rng.uniform();
            probs.insert(probs.end(), {a, b, 1.0 - a - b});
        }
        const Policy pi = Policy::make(3, 3, probs);
        const std::size_t sp = rng() % 3;
        const auto expect = enumerate_backup(0.7, sp, u, pi, 0.8);
        const auto got = as_map(bellman_backup(0.7, sp, u, pi, 0.8));
        REQUIRE(got.size() == expect.size());
        for (auto it = got.cbegin(), jt = expect.cbegin(); it != got.cend(); ++it, ++jt) {
            CHECK(it->first == jt->first);
            CHECK(it->second == Approx(jt->second).epsilon(1e-14));
        }
    }
}

TEST_CASE("apply_bellman on the self-loop") {
    const auto mdp = self_loop(1.0, 0.5);
    const Policy pi = Policy::uniform(1, 1);
    CHECK(apply_bellman(ReturnTable::constant(1, 1, 0.0), mdp, pi).at(0, 0).locations == std::vector<double>{1.0});
    CHECK(apply_bellman(ReturnTable::constant(1, 1, 2.0), mdp, pi).at(0, 0).locations == std::vector<double>{2.0});
}

TEST_CASE("apply_bellman commutes with the mean") {
    Rng rng(6);
    const auto mdp = tabular_make_random(4, 2, 3, rng, 0.85);
    const Policy pi = Policy::make(4, 2, {0.2, 0.8, 0.5, 0.5, 1.0, 0.0, 0.35, 0.65});
    ReturnTable u{4, 2, {}};
    for (int i = 0; i < 8; ++i) u.entries.push_back(random_atomic(rng, 5, -2.0, 2.0));
    const auto means = table_means(apply_bellman(u, mdp, pi));
    const auto scalar = scalar_bellman(table_means(u), mdp, pi);
    for (std::size_t i = 0; i < means.size(); ++i) CHECK(means[i] == Approx(scalar[i]).epsilon(1e-12));
}

TEST_CASE("apply_bellman agrees with the serial reference") {
    Rng rng(8);
    const auto mdp = tabular_make_random(6, 3, 2, rng, 0.9);
    const Policy pi = Policy::uniform(6, 3);
    ReturnTable u{6, 3, {}};
    for (int i = 0; i < 18; ++i) u.entries.push_back(random_atomic(rng, 5, 0.0, 4.0));
    for (const BellmanOptions& opts : {BellmanOptions{}, BellmanOptions{false, 1e-12, 0.0, 0.0},
                                       BellmanOptions{true, 1e-12, 0.01, 0.0}}) {
        const auto a = apply_bellman(u, mdp, pi, opts), b = serial::apply_bellman(u, mdp, pi, opts);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.entries[i].locations == b.entries[i].locations);
            CHECK(a.entries[i].masses == b.entries[i].masses);
        }
    }
}

TEST_CASE("exact contraction of one application") {
    Rng rng(10);
    BellmanOptions exact;
    exact.merge = false;
    for (int trial = 0; trial < 50; ++trial) {
        const double gamma = 0.3 + 0.6 * rng.uniform();
        const auto mdp = tabular_make_random(3, 2, 2, rng, gamma);
        const Policy pi = Policy::uniform(3, 2);
        ReturnTable u1{3, 2, {}}, u2{3, 2, {}};
        for (int i = 0; i < 6; ++i) {
            u1.entries.push_back(random_atomic(rng, 4, 0.0, 5.0));
            u2.entries.push_back(random_atomic(rng, 4, 0.0, 5.0));
        }
        const auto w1 = MetricSpec::wasserstein(1.0);
        const auto sup = ExtensionSpec::supremum();
        const double before = metric_extension(w1, sup, u1.entries, u2.entries);
        const double after = metric_extension(w1, sup, apply_bellman(u1, mdp, pi, exact).entries,
                                              apply_bellman(u2, mdp, pi, exact).entries);
        CHECK(after <= gamma * before + 1e-9);
    }
}

TEST_CASE("project_to_grid preserves mass and mean") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const Atomic a = random_atomic(rng, 8, -3.0, 3.0);
        const Atomic p = project_to_grid(a, -3.0, 0.07);
        double mass = 0.0;
        for (double m : p.masses) mass += m;
        CHECK(mass == Approx(1.0).epsilon(1e-12));
        CHECK(mean(Distribution{p}) == Approx(mean(Distribution{a})).epsilon(1e-12).scale(1.0));
        CHECK(wasserstein_1d(1.0, a, p) <= 0.07);
    }
}

TEST_CASE("solve_return_fixed_point") {
    const auto r = solve_return_fixed_point(self_loop(1.0, 0.5), Policy::uniform(1, 1), 1e-10, 200);
    REQUIRE(r.table.at(0, 0).size() == 1);
    CHECK(r.table.at(0, 0).locations[0] == Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(solve_return_fixed_point(self_loop(1.0, 0.5), Policy::uniform(1, 1), 1e-10, 3), NonConvergence);
    CHECK_THROWS_AS(solve_return_fixed_point(self_loop(1.0, 0.5), Policy::uniform(1, 1), 0.0, 3), InvalidInput);
}

TEST_CASE("fixed point of an episodic chain matches trajectory enumeration") {
    // 0 -> 1 -> 2 (absorbing, reward 0). From state 0 the reward is 1 or 3 with
    // probability 1/2; from state 1 it is 2 with probability 1/4 and 0 otherwise.
    const double g = 0.5;
    const auto mdp = TabularMDP::make(3, 1, g,
                                      {{{0.5, 1.0, 1}, {0.5, 3.0, 1}}, {{0.25, 2.0, 2}, {0.75, 0.0, 2}}, {{1.0, 0.0, 2}}});
    const auto res = solve_return_fixed_point(mdp, Policy::uniform(3, 1), 1e-12, 50);
    std::map<double, double> expect;
    for (double r0 : {1.0, 3.0})
        for (auto [r1, p1] : {std::pair{2.0, 0.25}, std::pair{0.0, 0.75}}) expect[r0 + g * r1] += 0.5 * p1;
    const auto got = as_map(res.table.at(0, 0));
    REQUIRE(got.size() == expect.size());
    for (auto it = got.cbegin(), jt = expect.cbegin(); it != got.cend(); ++it, ++jt) {
        CHECK(it->first == Approx(jt->first).epsilon(1e-14));
        CHECK(it->second == Approx(jt->second).epsilon(1e-14));
    }
    CHECK(as_map(res.table.at(2, 0)) == std::map<double, double>{{0.0, 1.0}});
}

TEST_CASE("fixed-point residuals contract") {
    Rng rng(14);
    const auto mdp = tabular_make_random(5, 2, 2, rng, 0.7);
    FixedPointOptions opts;
    opts.project = true;
    const auto res = solve_return_fixed_point(mdp, Policy::uniform(5, 2), 1e-6, 500, opts);
    for (std::size_t k = 1; k < res.residuals.size(); ++k)
        CHECK(res.residuals[k] <= mdp.gamma * res.residuals[k - 1] + res.projection_errors[k] +
                                       res.projection_errors[k - 1] + 1e-9);
}

TEST_CASE("checked constructors") {
    CHECK_THROWS_AS(TabularMDP::make(1, 1, 0.5, {{{0.5, 1.0, 0}}}), InvalidInput);
    CHECK_THROWS_AS(TabularMDP::make(1, 1, 0.5, {{{1.0, 1.0, 3}}}), InvalidInput);
    CHECK_THROWS_AS(Policy::make(1, 2, {0.5, 0.6}), InvalidInput);
}
