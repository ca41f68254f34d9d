#include <doctest.h>

#include <cmath>
#include <random>

#include "fde/distributions.hpp"
#include "fde/error.hpp"
#include "fde/metrics.hpp"
#include "oracles/oracle_values.hpp"

using namespace fde;
using doctest::Approx;

TEST_CASE("push_forward on the three carriers") {
    const Atomic a = push_forward(Atomic::point_mass(1.0), 2.0, 0.5);
    CHECK(a.locations == std::vector<double>{2.5});
    CHECK(a.masses == std::vector<double>{1.0});

    const auto g = std::get<Gaussian1D>(push_forward(Distribution{Gaussian1D{0.0, 1.0}}, 0.0, 0.99));
    CHECK(g.mean == 0.0);
    CHECK(g.variance == Approx(0.9801).epsilon(1e-15));

    const auto m = std::get<GaussianMixture1D>(
        push_forward(Distribution{GaussianMixture1D::make({{0.5, 0.0, 1.0}, {0.5, 2.0, 4.0}})}, 1.0, 0.5));
    REQUIRE(m.components.size() == 2);
    CHECK(m.components[0].mean == 1.0);
    CHECK(m.components[0].variance == 0.25);
    CHECK(m.components[1].mean == 2.0);
    CHECK(m.components[1].variance == 1.0);
    CHECK(m.components[1].weight == 0.5);
}

TEST_CASE("push_forward moments agree with sampling") {
    Rng rng(11);
    const Distribution d = GaussianMixture1D::make({{0.5, 0.0, 1.0}, {0.5, 2.0, 4.0}});
    const auto pushed = push_forward(d, 1.0, 0.5);
    const auto s = sample(d, 1000000, rng);
    double m1 = 0.0, m2 = 0.0;
    for (double x : s.points) {
        const double y = 1.0 + 0.5 * x;
        m1 += y;
        m2 += y * y;
    }
    m1 /= 1e6;
    m2 /= 1e6;
    // E Y = 1.5, Var Y = 0.25 * (0.5 * 1 + 0.5 * 4 + 1) = 0.875.
    CHECK(mean(pushed) == Approx(1.5).epsilon(1e-15));
    CHECK(m1 == Approx(1.5).epsilon(0.005));
    CHECK(m2 - m1 * m1 == Approx(0.875).epsilon(0.01));
}

TEST_CASE("push_forward preserves mass, family and the affine mean") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = -3.0 + 6.0 * rng.uniform(), gamma = rng.uniform();
        const Atomic a = random_atomic(rng, 5, -4.0, 4.0);
        const auto g = Gaussian1D{rng.uniform() - 0.5, 0.1 + rng.uniform()};
        const auto mix = GaussianMixture1D::make({{0.3, -1.0, 0.5}, {0.7, 2.0 * rng.uniform(), 1.5}});
        for (const Distribution& d : {Distribution{a}, Distribution{g}, Distribution{mix}}) {
            const auto p = push_forward(d, r, gamma);
            CHECK(p.index() == d.index());
            CHECK(mean(p) == Approx(r + gamma * mean(d)).epsilon(1e-12).scale(1.0));
        }
        double total = 0.0;
        for (double m : push_forward(a, r, gamma).masses) total += m;
        CHECK(total == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mixture flattens and concatenates") {
    const auto g = std::get<GaussianMixture1D>(mixture({{1.0, Gaussian1D{0.0, 1.0}}}));
    REQUIRE(g.components.size() == 1);
    CHECK(g.components[0].weight == 1.0);

    const auto a = std::get<Atomic>(mixture({{0.5, Atomic::point_mass(0.0)}, {0.5, Atomic::point_mass(1.0)}}));
    CHECK(a.locations == std::vector<double>{0.0, 1.0});
    CHECK(a.masses == std::vector<double>{0.5, 0.5});

    const auto f = std::get<GaussianMixture1D>(mixture({{0.3, GaussianMixture1D::make({{1.0, 0.0, 1.0}})},
                                                        {0.7, GaussianMixture1D::make({{1.0, 2.0, 1.0}})}}));
    REQUIRE(f.components.size() == 2);
    CHECK(f.components[0].weight == Approx(0.3));
    CHECK(f.components[1].weight == Approx(0.7));
    CHECK(f.components[1].mean == 2.0);

    CHECK_THROWS_AS(mixture({{0.5, Atomic::point_mass(0.0)}, {0.4, Atomic::point_mass(1.0)}}), InvalidInput);
    CHECK_THROWS_AS(mixture({{0.5, Atomic::point_mass(0.0)}, {0.5, Gaussian1D{}}}), InvalidInput);
}

TEST_CASE("quantile_fn") {
    CHECK(quantile_fn(Gaussian1D{0.0, 1.0}, 0.5) == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(quantile_fn(Atomic::make_1d({{0.0, 0.5}, {1.0, 0.5}}), 0.25) == 0.0);
    CHECK(quantile_fn(Gaussian1D{2.0, 1.0}, 0.841345) == Approx(oracle::kQuantileN21).epsilon(1e-12));
    CHECK(quantile_fn(Gaussian1D{2.0, 1.0}, 0.841345) == Approx(3.0).epsilon(1e-6));
    CHECK_THROWS_AS(quantile_fn(Gaussian1D{}, 0.0), InvalidInput);
    CHECK_THROWS_AS(quantile_fn(Gaussian1D{}, 1.0), InvalidInput);
}

TEST_CASE("quantile_fn is nondecreasing and inverts the cdf") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mix = GaussianMixture1D::make(
            {{0.2, -3.0 + rng.uniform(), 0.1 + rng.uniform()}, {0.8, 2.0 * rng.uniform(), 0.2 + 2.0 * rng.uniform()}});
        const Atomic a = random_atomic(rng, 6, -2.0, 2.0);
        for (const Distribution& d : {Distribution{mix}, Distribution{a}}) {
            double prev = -INFINITY;
            for (int i = 1; i < 1000; ++i) {
                const double u = i / 1000.0;
                const double z = quantile_fn(d, u);
                CHECK(z >= prev);
                prev = z;
                if (d.index() == 1) CHECK(cdf(d, z) == Approx(u).epsilon(1e-8).scale(1.0));
            }
        }
    }
}

TEST_CASE("sample") {
    Rng rng(9);
    const auto s = sample(Atomic::point_mass(3.0), 5, rng);
    CHECK(s.points == std::vector<double>(5, 3.0));

    auto sample_mean = [](const EmpiricalSample& e) {
        double m = 0.0;
        for (double x : e.points) m += x;
        return m / static_cast<double>(e.size());
    };
    CHECK(std::abs(sample_mean(sample(Gaussian1D{0.0, 1.0}, 1000000, rng))) < 0.01);
    const auto bimodal = GaussianMixture1D::make({{0.5, -2.0, 1.0}, {0.5, 2.0, 1.0}});
    CHECK(std::abs(sample_mean(sample(bimodal, 1000000, rng))) < 0.02);
}

TEST_CASE("sample moments stay within four standard errors") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mix = GaussianMixture1D::make({{0.4, -1.0 + rng.uniform(), 0.3 + rng.uniform()},
                                                  {0.6, 3.0 * rng.uniform(), 0.3 + rng.uniform()}});
        double m = 0.0, var = 0.0;
        for (const auto& c : mix.components) m += c.weight * c.mean;
        for (const auto& c : mix.components) var += c.weight * (c.variance + (c.mean - m) * (c.mean - m));
        const std::size_t n = 20000;
        const auto s = sample(Distribution{mix}, n, rng);
        double sm = 0.0;
        for (double x : s.points) sm += x;
        sm /= static_cast<double>(n);
        CHECK(std::abs(sm - m) <= 4.0 * std::sqrt(var / static_cast<double>(n)));
    }
}

TEST_CASE("checked constructors") {
    CHECK_THROWS_AS(Gaussian1D::make(0.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(GaussianMixture1D::make({}), InvalidInput);
    CHECK_THROWS_AS(GaussianMixture1D::make({{0.6, 0.0, 1.0}, {0.6, 0.0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(Atomic::make_1d({{0.0, 0.7}}), InvalidInput);
    CHECK_NOTHROW(Atomic::make_1d({{0.0, 0.25}, {1.0, 0.75}}));
}

TEST_CASE("merge_atoms sorts and merges") {
    Atomic a = Atomic::make_1d({{2.0, 0.25}, {0.0, 0.25}, {2.0 + 1e-14, 0.5}});
    const Atomic m = merge_atoms(a, 1e-12);
    CHECK(m.locations.size() == 2);
    CHECK(m.locations[0] == 0.0);
    CHECK(m.masses[1] == Approx(0.75));
}
