#include "sobkan/space.hpp"
#include "sobkan/special.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace sobkan;

namespace {
constexpr double kPi = std::numbers::pi;

double weighted_sum(const Space1D& s, double (*g)(double)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += g(s.nodes[i]) * s.quad_weights[i];
    return acc;
}
} // namespace

TEST_CASE("circle construction") {
    const auto s = build_circle(8);
    REQUIRE(s.size() == 8);
    double total = 0.0;
    for (double w : s.quad_weights) {
        CHECK(w == doctest::Approx(0.125).epsilon(1e-14));
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.curvature_lower == 0.0);
    CHECK(s.dimension_param == 1.0);
    CHECK(metric(s, 0, 4) == doctest::Approx(kPi).epsilon(1e-14));

    CHECK_THROWS_AS(build_circle(6), std::invalid_argument);
    CHECK_THROWS_AS(build_circle(9), std::invalid_argument);
}

TEST_CASE("circle symmetry integral") {
    const auto s = build_circle(512);
    CHECK(std::abs(weighted_sum(s, [](double th) { return std::cos(th); })) < 1e-12);
}

TEST_CASE("circle metric wraparound") {
    const auto s = build_circle(8);
    CHECK(metric(s, 1, 7) == doctest::Approx(kPi / 2).epsilon(1e-14)); // crosses theta = 0
    CHECK(metric(s, 0, 2) == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("gauss line weights") {
    const auto s = build_gauss_line(2048, 10.0);
    double total = 0.0, first = 0.0, second = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        total += s.quad_weights[i];
        first += s.nodes[i] * s.quad_weights[i];
        second += s.nodes[i] * s.nodes[i] * s.quad_weights[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(std::abs(first) < 1e-12);
    CHECK(second == doctest::Approx(1.0).epsilon(1e-6)); // Gaussian second moment
    CHECK(s.curvature_lower == 1.0);

    // Second moment accuracy holds on coarser grids too.
    for (int n : {512, 1024}) {
        const auto coarse = build_gauss_line(n, 10.0);
        double m2 = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i)
            m2 += coarse.nodes[i] * coarse.nodes[i] * coarse.quad_weights[i];
        CHECK(m2 == doctest::Approx(1.0).epsilon(1e-6));
    }

    CHECK_THROWS_AS(build_gauss_line(2048, 7.0), std::invalid_argument);
    CHECK_THROWS_AS(build_gauss_line(8, 10.0), std::invalid_argument);
}

TEST_CASE("weighted line matches gauss line for the quadratic potential") {
    const auto g = build_gauss_line(256, 10.0);
    const auto w = build_weighted_line(256, 10.0, [](double x) { return 0.5 * x * x; }, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(g.quad_weights[i] - w.quad_weights[i]) < 1e-12);
}

TEST_CASE("weighted line double well is bimodal and symmetric") {
    const auto s = build_weighted_line(
        256, 5.0, [](double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }, -1.0);
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i)
        CHECK(s.quad_weights[i] == doctest::Approx(s.quad_weights[n - 1 - i]).epsilon(1e-10));
    // Modes sit at the wells x = +-1 where V = -1/4; the density ratio to the
    // saddle at the origin is e^{1/4}.
    const std::size_t mid = n / 2;
    const std::size_t well = static_cast<std::size_t>((1.0 + 5.0) / 10.0 * (n - 1));
    CHECK(s.quad_weights[well] / s.quad_weights[mid] ==
          doctest::Approx(std::exp(0.25)).epsilon(1e-3));
    const std::size_t far = static_cast<std::size_t>((3.0 + 5.0) / 10.0 * (n - 1));
    CHECK(s.quad_weights[well] > 100.0 * s.quad_weights[far]);
}

TEST_CASE("weighted line flat potential gives a uniform interior") {
    const auto s = build_weighted_line(32, 1.0, [](double) { return 0.0; }, 0.0);
    for (std::size_t i = 2; i + 2 < s.size(); ++i)
        CHECK(s.quad_weights[i] == doctest::Approx(s.quad_weights[1]).epsilon(1e-13));
    // Trapezoid rule halves the endpoint cells.
    CHECK(s.quad_weights[0] == doctest::Approx(0.5 * s.quad_weights[1]).epsilon(1e-13));
}

TEST_CASE("weighted line rejects non-finite potentials") {
    CHECK_THROWS_AS(build_weighted_line(32, 1.0, [](double x) { return std::log(x); }, 0.0),
                    std::invalid_argument);
}

TEST_CASE("metric axioms hold exhaustively on small spaces") {
    for (const auto& s : {build_circle(24), build_weighted_line(20, 1.0,
                                                                [](double) { return 0.0; }, 0.0)}) {
        const std::size_t n = s.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(metric(s, i, i) == 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(metric(s, i, j) == metric(s, j, i));
                CHECK(metric(s, i, j) >= 0.0);
                for (std::size_t k = 0; k < n; ++k)
                    CHECK(metric(s, i, j) <= metric(s, i, k) + metric(s, k, j) + 1e-14);
            }
        }
    }
}

TEST_CASE("normal special functions") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    // Round trip against an independent bisection inverse.
    for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) {
        double lo = -10.0, hi = 10.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (normal_cdf(mid) < u ? lo : hi) = mid;
        }
        CHECK(normal_quantile(u) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
    }
}
