#include "sobkan/measure.hpp"
#include "sobkan/special.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace sobkan;

TEST_CASE("density normalization") {
    const auto s = build_circle(64);
    const auto f = density_from_fn(s, [](double) { return 7.0; });
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(1.0).epsilon(1e-14));

    const auto g = density_from_fn(s, [](double th) { return 1.0 + 0.5 * std::cos(th); });
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mass += g[i] * s.quad_weights[i];
    CHECK(std::abs(mass - 1.0) < 1e-12);

    CHECK_THROWS_AS(density_from_fn(s, [](double th) { return std::cos(th); }),
                    std::invalid_argument); // negative samples
    CHECK_THROWS_AS(density_from_fn(s, [](double) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("gaussian ratio density has the closed form") {
    const auto s = build_gauss_line(1024, 10.0);
    const auto fam = family_gaussian_ratio(s, std::vector{1.0}, std::vector{1.0});
    REQUIRE(fam.size() == 1);
    const auto& f = fam[0];
    // f should equal e^{x - 1/2} up to one global grid-renormalization factor.
    const double c0 = f[512] / std::exp(s.nodes[512] - 0.5);
    for (std::size_t i = 100; i < f.size() - 100; ++i)
        CHECK(f[i] / std::exp(s.nodes[i] - 0.5) == doctest::Approx(c0).epsilon(1e-12));
    CHECK(c0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tail probabilities") {
    const auto s = build_circle(512);
    const auto one = density_from_fn(s, [](double) { return 1.0; });
    CHECK(tail_prob(one, 0.5) == doctest::Approx(1.0));
    CHECK(tail_prob(one, 2.0) == 0.0);

    const auto f = density_from_fn(s, [](double th) { return 1.0 + 0.5 * std::cos(th); });
    CHECK(std::abs(tail_prob(f, 1.0) - 0.5) <= 2.0 / 512.0); // arc where cos >= 0

    // Nonincreasing step function starting at 1.
    CHECK(tail_prob(f, 0.0) == doctest::Approx(1.0));
    double prev = 2.0;
    for (double u = 0.0; u <= 1.6; u += 0.05) {
        const double t = tail_prob(f, u);
        CHECK(t <= prev + 1e-15);
        prev = t;
    }
}

TEST_CASE("layer-cake identity on the value grid") {
    const auto s = build_circle(256);
    const auto f = density_from_fn(s, [](double th) { return 1.0 + 0.7 * std::sin(2.0 * th); });
    std::set<double> values(f.values().begin(), f.values().end());
    double integral = 0.0, prev = 0.0;
    for (double v : values) {
        integral += (v - prev) * tail_prob(f, v);
        prev = v;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("trig family") {
    const auto s = build_circle(512);
    const auto fam = family_trig(s, std::vector{0.0, 0.5, 0.9}, std::vector{1, 3});
    REQUIRE(fam.size() == 6);
    for (std::size_t i = 0; i < fam[0].size(); ++i)
        CHECK(fam[0][i] == doctest::Approx(1.0)); // a = 0
    const double min_f = *std::min_element(fam[2].values().begin(), fam[2].values().end());
    CHECK(min_f == doctest::Approx(0.5).epsilon(1e-6)); // a = 0.5, k = 1
    double mass = 0.0;
    for (std::size_t i = 0; i < fam[5].size(); ++i) mass += fam[5][i] * s.quad_weights[i];
    CHECK(std::abs(mass - 1.0) < 1e-12); // a = 0.9, k = 3

    CHECK_THROWS_AS(family_trig(s, std::vector{1.0}, std::vector{1}), std::invalid_argument);
}

TEST_CASE("gaussian ratio family parameter validation") {
    const auto s = build_gauss_line(512, 10.0);
    const auto fam = family_gaussian_ratio(s, std::vector{0.0}, std::vector{1.0});
    for (std::size_t i = 0; i < fam[0].size(); ++i)
        CHECK(fam[0][i] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(family_gaussian_ratio(s, std::vector{0.0}, std::vector{0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(family_gaussian_ratio(s, std::vector{6.0}, std::vector{1.0}),
                    std::invalid_argument);
}

TEST_CASE("signed measures from density differences") {
    const auto s = build_circle(128);
    const auto f = density_from_fn(s, [](double th) { return 1.0 + 0.5 * std::cos(th); });
    const auto g = density_from_fn(s, [](double) { return 1.0; });

    const auto zero = signed_from_densities(f, f);
    for (double m : zero.node_masses) CHECK(m == 0.0);

    const auto diff = signed_from_densities(f, g);
    double total = 0.0;
    for (double m : diff.node_masses) total += m;
    CHECK(std::abs(total) < 1e-12);
    // node masses proportional to cos(theta)
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(diff.node_masses[i] ==
              doctest::Approx(0.5 * std::cos(s.nodes[i]) * s.quad_weights[i]).epsilon(1e-10));

    const auto other = build_circle(64);
    const auto h = density_from_fn(other, [](double) { return 1.0; });
    CHECK_THROWS_AS(signed_from_densities(f, h), std::invalid_argument);
}
