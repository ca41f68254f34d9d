#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fde/error.hpp"
#include "fde/metrics.hpp"
#include "oracles/oracle_values.hpp"

using namespace fde;
using doctest::Approx;

namespace {

// W_p between two atomic laws with equal-mass atoms, via sorted matching.
double sorted_matching(double p, std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(acc / static_cast<double>(x.size()), 1.0 / p);
}

Atomic uniform_atoms(const std::vector<double>& x) {
    Atomic a{1, x, std::vector<double>(x.size(), 1.0 / static_cast<double>(x.size()))};
    return a;
}

}  // namespace

TEST_CASE("wasserstein_1d spot values") {
    CHECK(wasserstein_1d(1.0, Distribution{Gaussian1D{0.0, 1.0}}, Distribution{Gaussian1D{2.0, 1.0}}) ==
          Approx(2.0).epsilon(1e-6));
    CHECK(wasserstein_1d(1.0, Atomic::make_1d({{0.0, 0.5}, {1.0, 0.5}}), Atomic::point_mass(0.5)) ==
          Approx(0.5).epsilon(1e-15));
    CHECK(wasserstein_1d(2.0, Distribution{Gaussian1D{0.0, 1.0}}, Distribution{Gaussian1D{0.0, 4.0}}) ==
          Approx(oracle::kW2N01N04).epsilon(1e-4));
    CHECK(wasserstein_1d(1.0, Distribution{Gaussian1D{0.5, 1.0}}, Distribution{Gaussian1D{-0.25, 2.25}}) ==
          Approx(oracle::kW1Generic).epsilon(1e-4));
}

TEST_CASE("atomic W_p agrees with sorted matching") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = -3.0 + 6.0 * rng.uniform();
        for (auto& v : y) v = -3.0 + 6.0 * rng.uniform();
        for (double p : {1.0, 1.5, 2.0, 3.0})
            CHECK(wasserstein_1d(p, uniform_atoms(x), uniform_atoms(y)) ==
                  Approx(sorted_matching(p, x, y)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("metric axioms on random atomic triples") {
    Rng rng(8);
    const MetricSpec metrics[] = {MetricSpec::wasserstein(1.0), MetricSpec::wasserstein(2.0),
                                  MetricSpec::mmd(KernelSpec::energy(1.0)), MetricSpec::mmd(KernelSpec::rbf(1.0)),
                                  MetricSpec::cramer()};
    for (int trial = 0; trial < 300; ++trial) {
        const Atomic a = random_atomic(rng, 5, -3.0, 3.0), b = random_atomic(rng, 5, -3.0, 3.0),
                     c = random_atomic(rng, 5, -3.0, 3.0);
        for (const auto& m : metrics) {
            const double ab = metric_distance(m, a, b);
            CHECK(ab == metric_distance(m, b, a));
            CHECK(ab <= metric_distance(m, a, c) + metric_distance(m, c, b) + 1e-9);
            CHECK(metric_distance(m, a, a) <= 1e-7);
        }
    }
}

TEST_CASE("metric_extension") {
    const std::vector<Atomic> u{Atomic::point_mass(0.0), Atomic::point_mass(5.0)};
    const std::vector<Atomic> v{Atomic::point_mass(1.0), Atomic::point_mass(2.0)};
    const MetricSpec w1 = MetricSpec::wasserstein(1.0);
    CHECK(metric_extension(w1, ExtensionSpec::supremum(), u, u) == 0.0);
    CHECK(metric_extension(w1, ExtensionSpec::supremum(), u, v) == 3.0);
    CHECK(metric_extension(w1, ExtensionSpec::expectation(1.0, {0.5, 0.5}), u, v) ==
          Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK_THROWS_AS(ExtensionSpec::expectation(1.0, {0.5, 0.6}), InvalidInput);
    CHECK_THROWS_AS(metric_extension(w1, ExtensionSpec::expectation(1.0, {1.0}), u, v), InvalidInput);
}

TEST_CASE("supremum extension dominates every expectation extension") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        std::vector<Atomic> u, v;
        std::vector<double> w(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            u.push_back(random_atomic(rng, 4, 0.0, 3.0));
            v.push_back(random_atomic(rng, 4, 0.0, 3.0));
            total += (w[i] = rng.uniform() + 1e-3);
        }
        for (auto& x : w) x /= total;
        const MetricSpec m = MetricSpec::wasserstein(1.0 + static_cast<double>(rng() % 3));
        const double sup = metric_extension(m, ExtensionSpec::supremum(), u, v);
        for (double q : {1.0, 2.0, 4.0}) CHECK(metric_extension(m, ExtensionSpec::expectation(q, w), u, v) <= sup + 1e-12);
    }
}

TEST_CASE("contraction_factor") {
    CHECK(contraction_factor(MetricSpec::wasserstein(1.0), ExtensionSpec::supremum(), 0.9) == Approx(0.9));
    CHECK(contraction_factor(MetricSpec::wasserstein(2.0), ExtensionSpec::expectation(2.0, {1.0}), 0.9) ==
          Approx(std::pow(0.9, 0.75)).epsilon(1e-15));
    CHECK(contraction_factor(MetricSpec::wasserstein(2.0), ExtensionSpec::expectation(2.0, {1.0}), 0.9) ==
          Approx(0.92402).epsilon(1e-5));
    MetricSpec cramer_q1 = MetricSpec::cramer();
    cramer_q1.q = 1.0;
    CHECK_THROWS_AS(contraction_factor(cramer_q1, ExtensionSpec::expectation(1.0, {1.0}), 0.9), InvalidInput);
    // The extension's q may not drop below the metric's convexity exponent.
    CHECK_THROWS_AS(contraction_factor(MetricSpec::cramer(), ExtensionSpec::expectation(1.0, {1.0}), 0.9),
                    InvalidInput);
}

TEST_CASE("slc_property_check") {
    Rng rng(2);
    // c = 1 scaling is exact for W1.
    const Atomic a = Atomic::make_1d({{0.0, 0.3}, {2.0, 0.7}}), b = Atomic::make_1d({{1.0, 0.5}, {-1.0, 0.5}});
    const double w = wasserstein_1d(1.0, a, b);
    const double scaled = wasserstein_1d(1.0, push_forward(a, 0.0, 0.5), push_forward(b, 0.0, 0.5));
    CHECK(std::abs(scaled - 0.5 * w) <= 1e-12);

    CHECK(slc_property_check(MetricSpec::mmd(KernelSpec::energy(1.0)), 200, rng).passed());
    CHECK(slc_property_check(MetricSpec::wasserstein(2.0), 200, rng).passed());
    CHECK(slc_property_check(MetricSpec::cramer(), 200, rng).passed());
    MetricSpec wrong = MetricSpec::wasserstein(1.0);
    wrong.c = 2.0;
    CHECK_FALSE(slc_property_check(wrong, 200, rng).violations.empty());
}

TEST_CASE("energy/Wasserstein sandwich") {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const double lo = -5.0 * rng.uniform(), hi = lo + 0.5 + 4.5 * rng.uniform();
        const double p = 1.0 + 2.0 * rng.uniform();
        const Atomic x = random_atomic(rng, 6, lo, hi), y = random_atomic(rng, 6, lo, hi);
        const double e = energy_distance(x, y), w1 = wasserstein_1d(1.0, x, y), wp = wasserstein_1d(p, x, y);
        CHECK(e <= 2.0 * w1 + 1e-9);
        CHECK(w1 <= wp + 1e-9);
        CHECK(2.0 / std::pow(hi - lo, 2.0 * p - 1.0) * std::pow(wp, 2.0 * p) <= e + 1e-9);
    }
}
