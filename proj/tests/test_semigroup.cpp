#include "sobkan/semigroup.hpp"

#include "sobkan/calculus.hpp"
#include "sobkan/measure.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace sobkan;

namespace {

double weighted_mean(std::span<const double> v, const Space1D& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * s.quad_weights[i];
    return acc;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("ou semigroup eigenfunctions") {
    const auto s = build_gauss_line(2048, 10.0);
    std::vector<double> x(s.size()), h2(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = s.nodes[i];
        h2[i] = s.nodes[i] * s.nodes[i] - 1.0;
    }
    for (double t : {0.5, 1.0, 2.0}) {
        const auto tx = ou_apply(s, x, t);
        const auto th2 = ou_apply(s, h2, t);
        double scale1 = 0.0, err1 = 0.0, scale2 = 0.0, err2 = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            scale1 = std::max(scale1, std::abs(std::exp(-t) * x[i]));
            err1 = std::max(err1, std::abs(tx[i] - std::exp(-t) * x[i]));
            scale2 = std::max(scale2, std::abs(std::exp(-2.0 * t) * h2[i]));
            err2 = std::max(err2, std::abs(th2[i] - std::exp(-2.0 * t) * h2[i]));
        }
        CHECK(err1 / scale1 <= 1e-6);
        CHECK(err2 / scale2 <= 1e-5);
    }

    std::vector<double> one(s.size(), 1.0);
    const auto tone = ou_apply(s, one, 0.3);
    for (double v : tone) CHECK(v == 1.0); // exact mass conservation

    CHECK_THROWS_AS(ou_apply(s, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ou_apply(s, x, 1.0, 8), std::invalid_argument); // order < 32
}

TEST_CASE("circle heat flow") {
    const auto s = build_circle(512);
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = 1.0 + std::cos(s.nodes[i]);
    const double t = 0.37;
    const auto pf = circle_heat_apply(s, f, t);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(pf[i] - (1.0 + std::exp(-t) * std::cos(s.nodes[i]))) < 1e-10);

    const auto flat = circle_heat_apply(s, f, 50.0);
    const double mean = weighted_mean(f, s);
    for (double v : flat) CHECK(std::abs(v - mean) < 1e-10);

    // Entropy is nonincreasing along the flow.
    const auto density = density_from_fn(s, [](double th) { return 1.0 + 0.8 * std::cos(th); });
    double prev = entropy(density);
    for (double tt : {0.05, 0.1, 0.3, 0.8, 2.0}) {
        std::vector<double> ev = circle_heat_apply(s, density.values(), tt);
        for (double& v : ev) v = std::max(v, 0.0);
        const double ent = [&] {
            double acc = 0.0;
            for (std::size_t i = 0; i < ev.size(); ++i)
                if (ev[i] > 0.0) acc += ev[i] * std::log(ev[i]) * s.quad_weights[i];
            return acc;
        }();
        CHECK(ent <= prev + 1e-12);
        prev = ent;
    }
    CHECK_THROWS_AS(circle_heat_apply(s, f, -1.0), std::invalid_argument);
}

TEST_CASE("generator matrix structure") {
    const auto s = build_gauss_line(1024, 10.0);
    const auto L = generator_matrix(s);
    const std::size_t n = s.size();

    // Constants are in the kernel (zero row sums).
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += L(i, j);
        CHECK(std::abs(row) < 1e-8);
    }
    // mu-symmetry: W L = L^T W entrywise.
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n)
            defect = std::max(defect, std::abs(s.quad_weights[i] * L(i, i + 1) -
                                               s.quad_weights[i + 1] * L(i + 1, i)));
    }
    CHECK(defect <= 1e-8);

    // OU spectrum: gap 1 and second excited level 2.
    const Semigroup sg(s, SemigroupEngine::MatrixExp);
    CHECK(std::abs(sg.spectral_gap() - 1.0) <= 1e-3);

    CHECK_THROWS_AS(generator_matrix(build_circle(64)), std::invalid_argument);
}

TEST_CASE("matrix-exponential engine") {
    const auto s = build_weighted_line(
        512, 5.0, [](double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }, -1.0);
    const Semigroup sg(s, SemigroupEngine::MatrixExp);

    std::vector<double> one(s.size(), 1.0);
    const auto pone = sg.apply(one, 0.7);
    for (double v : pone) CHECK(std::abs(v - 1.0) < 1e-10);

    const auto f = density_from_fn(s, [](double x) { return 0.1 + std::exp(-2.0 * (x - 1.0) * (x - 1.0)); });
    const auto pf = sg.apply(f.values(), 0.4);
    CHECK(std::abs(weighted_mean(pf, s) - 1.0) < 1e-10); // conservation
    for (double v : pf) CHECK(v >= -1e-12);              // positivity

    const auto gauss = build_gauss_line(1024, 10.0);
    const Semigroup dense(gauss, SemigroupEngine::MatrixExp);
    std::vector<double> x(gauss.size());
    for (std::size_t i = 0; i < gauss.size(); ++i) x[i] = gauss.nodes[i];
    const auto via_matrix = dense.apply(x, 0.5);
    const auto via_mehler = ou_apply(gauss, x, 0.5);
    CHECK(max_abs_diff(via_matrix, via_mehler) <= 1e-4 * 10.0);

    CHECK_THROWS_AS(Semigroup(build_gauss_line(2048, 10.0), SemigroupEngine::MatrixExp),
                    std::invalid_argument); // dense cap
}

TEST_CASE("semigroup property and contraction for every engine") {
    struct Case {
        Space1D space;
        SemigroupEngine engine;
    };
    std::vector<Case> cases;
    cases.push_back({build_circle(256), SemigroupEngine::CircleFourier});
    cases.push_back({build_gauss_line(1024, 10.0), SemigroupEngine::Mehler});
    cases.push_back({build_weighted_line(
                         256, 5.0,
                         [](double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }, -1.0),
                     SemigroupEngine::MatrixExp});
    for (const auto& c : cases) {
        const Semigroup sg(c.space, c.engine);
        std::vector<double> f(c.space.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = c.space.nodes[i];
            f[i] = c.space.kind == SpaceKind::Circle ? 1.0 + 0.6 * std::cos(x)
                                                     : 1.0 + std::exp(-x * x);
        }
        const double t = 0.3, u = 0.45;
        const auto once = sg.apply(f, t + u);
        const auto twice = sg.apply(sg.apply(f, t), u);
        CHECK(max_abs_diff(once, twice) <= 1e-8);

        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
            CHECK(lp_norm(sg.apply(f, t), p, c.space) <= lp_norm(f, p, c.space) + 1e-9);
    }
}

TEST_CASE("ou gradient commutation") {
    const auto s = build_gauss_line(2048, 10.0);
    const auto fam = family_gaussian_ratio(s, std::vector{0.5}, std::vector{1.1});
    const auto& f = fam[0];
    const double t = 0.4;
    const auto lhs = gradient(ou_apply(s, f.values(), t), s);
    const auto grad_first = ou_apply(s, gradient(f.values(), s), t);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s.nodes[i]) <= 8.0) // bulk of the measure
            err = std::max(err, std::abs(lhs[i] - std::exp(-t) * grad_first[i]));
    CHECK(err <= 1e-4);
}

TEST_CASE("ergodicity estimates") {
    const Semigroup circle(build_circle(512), SemigroupEngine::CircleFourier);
    const auto est_c = ergodicity_estimate(circle);
    CHECK(std::abs(est_c.lambda - 1.0) <= 1e-3);
    CHECK(est_c.c >= 1.0);

    const Semigroup gauss(build_gauss_line(1024, 10.0), SemigroupEngine::MatrixExp);
    const auto est_g = ergodicity_estimate(gauss);
    CHECK(std::abs(est_g.lambda - 1.0) <= 1e-3);
    CHECK(est_g.c >= 1.0);
}
