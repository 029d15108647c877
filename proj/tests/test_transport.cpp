#include "sobkan/transport.hpp"

#include "sobkan/calculus.hpp"
#include "sobkan/errors.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

using namespace sobkan;

namespace {

constexpr double kPi = std::numbers::pi;

Space1D unit_line(int n) {
    return build_weighted_line(n, 1.0, [](double) { return 0.0; }, 0.0);
}

std::vector<double> point_mass(const Space1D& s, std::size_t at) {
    std::vector<double> m(s.size(), 0.0);
    m[at] = 1.0;
    return m;
}

std::vector<double> random_masses(const Space1D& s, std::mt19937_64& rng, bool sparsify) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> m(s.size());
    for (double& v : m) v = unif(rng) * unif(rng) + 1e-9;
    if (sparsify)
        for (double& v : m)
            if (unif(rng) < 0.4) v = 0.0;
    double total = 0.0;
    for (double v : m) total += v;
    if (total == 0.0) {
        m[0] = 1.0;
        total = 1.0;
    }
    for (double& v : m) v /= total;
    return m;
}

} // namespace

TEST_CASE("w1 on the line") {
    const auto s = unit_line(17); // nodes -1, -0.875, ..., 1
    CHECK(w1_line(point_mass(s, 8), point_mass(s, 16), s).value ==
          doctest::Approx(1.0).epsilon(1e-12)); // delta at 0 vs delta at 1

    const auto a = point_mass(s, 3);
    CHECK(w1_line(a, a, s).value == 0.0);

    // {1/2 @ 0, 1/2 @ 1} vs {1 @ 0.5}
    std::vector<double> alpha(s.size(), 0.0), beta(s.size(), 0.0);
    alpha[8] = 0.5;
    alpha[16] = 0.5;
    beta[12] = 1.0;
    CHECK(w1_line(alpha, beta, s).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(wp_lp_oracle(1.0, alpha, beta, s).value == doctest::Approx(0.5).epsilon(1e-10));

    std::vector<double> unbalanced = beta;
    unbalanced[0] = 0.5;
    CHECK_THROWS_AS(w1_line(alpha, unbalanced, s), std::invalid_argument);
}

TEST_CASE("quantile line solver") {
    const auto s = build_gauss_line(2048, 10.0);
    const auto fam = family_gaussian_ratio(s, std::vector{1.0}, std::vector{1.0});
    const auto res = wp_quantile_line(2.0, fam[0].node_masses(), s.quad_weights, s);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-3)); // W2(N(1,1), N(0,1)) = 1

    const auto a = point_mass(s, 100);
    CHECK(wp_quantile_line(2.0, a, a, s).value == 0.0);

    // p = 1 agrees with the CDF formula on random pairs.
    const auto line = unit_line(32);
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        const auto alpha = random_masses(line, rng, rep % 3 == 0);
        const auto beta = random_masses(line, rng, false);
        const double q1 = wp_quantile_line(1.0, alpha, beta, line).value;
        const double c1 = w1_line(alpha, beta, line).value;
        CHECK(std::abs(q1 - c1) < 1e-10);
    }
}

TEST_CASE("circle solver against the LP oracle") {
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
        const auto s = build_circle(8 + 2 * (rep % 9)); // n in [8, 24]
        const auto a = random_masses(s, rng, rep % 3 == 0);
        const auto b = random_masses(s, rng, false);
        for (double p : {1.0, 2.0}) {
            const double lp = wp_lp_oracle(p, a, b, s, false).value;
            const double fast = wp_circle(p, a, b, s).value;
            worst = std::max(worst, std::abs(lp - fast));
        }
    }
    CHECK(worst <= 1e-6);

    const auto s = build_circle(8);
    CHECK(wp_circle(1.0, point_mass(s, 0), point_mass(s, 4), s).value ==
          doctest::Approx(kPi).epsilon(1e-12)); // antipodal
    const auto a = random_masses(s, rng, false);
    CHECK(wp_circle(2.0, a, a, s).value == doctest::Approx(0.0));
}

TEST_CASE("lp oracle basics") {
    const auto s = unit_line(17);
    const auto a = point_mass(s, 4);
    const auto same = wp_lp_oracle(2.0, a, a, s);
    CHECK(same.value == doctest::Approx(0.0));
    REQUIRE(same.plan.has_value());
    CHECK((*same.plan)(4, 4) == doctest::Approx(1.0));

    // delta_0 vs delta_1, p = 2: one cell of mass 1 and value 1.
    const auto res = wp_lp_oracle(2.0, point_mass(s, 8), point_mass(s, 16), s);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((*res.plan)(8, 16) == doctest::Approx(1.0));

    // three-point case is 0.5 for every order
    std::vector<double> alpha(s.size(), 0.0), beta(s.size(), 0.0);
    alpha[8] = 0.5;
    alpha[16] = 0.5;
    beta[12] = 1.0;
    for (double p : {1.0, 2.0, 3.0})
        CHECK(wp_lp_oracle(p, alpha, beta, s).value == doctest::Approx(0.5).epsilon(1e-10));

    // plan marginals match the inputs
    std::mt19937_64 rng(5);
    const auto am = random_masses(s, rng, false);
    const auto bm = random_masses(s, rng, true);
    const auto r = wp_lp_oracle(2.0, am, bm, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            row += (*r.plan)(i, j);
            col += (*r.plan)(j, i);
        }
        CHECK(std::abs(row - am[i]) < 1e-8);
        CHECK(std::abs(col - bm[i]) < 1e-8);
    }
    CHECK(std::abs(r.diagnostics.dual_gap) < 1e-9);

    const auto big = build_circle(128);
    CHECK_THROWS_AS(wp_lp_oracle(1.0, big.quad_weights, big.quad_weights, big),
                    std::invalid_argument);
}

TEST_CASE("sinkhorn cross-checks") {
    std::mt19937_64 rng(23);
    const auto s = unit_line(24);
    const auto a = random_masses(s, rng, false);
    CHECK(wp_sinkhorn(2.0, a, a, s).value <= 1e-6);

    double worst_rel = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        const Space1D sp = (rep % 2 == 0) ? build_circle(16) : unit_line(20);
        const auto alpha = random_masses(sp, rng, rep % 3 == 0);
        const auto beta = random_masses(sp, rng, false);
        for (double p : {1.0, 2.0}) {
            const double lp = wp_lp_oracle(p, alpha, beta, sp, false).value;
            const auto sink = wp_sinkhorn(p, alpha, beta, sp);
            worst_rel = std::max(worst_rel, std::abs(sink.value - lp) / std::max(lp, 1e-9));
            CHECK(sink.diagnostics.marginal_violation <= 1e-8);
        }
    }
    CHECK(worst_rel <= 1e-3);

    SinkhornOptions strangled;
    strangled.reg_schedule = {1e-7};
    strangled.max_iterations_per_level = 2;
    const auto b = random_masses(s, rng, false);
    CHECK_THROWS_AS(wp_sinkhorn(2.0, a, b, s, strangled), NumericalError);
}

TEST_CASE("sinkhorn matches the gaussian closed form") {
    const auto s = build_gauss_line(1024, 10.0);
    const auto fam = family_gaussian_ratio(s, std::vector{0.5}, std::vector{1.0});
    const auto sink = wp_sinkhorn(2.0, fam[0].node_masses(), s.quad_weights, s);
    CHECK(sink.value == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("kantorovich norm") {
    const auto line = unit_line(17);
    SignedMeasure zero{&line, std::vector<double>(line.size(), 0.0)};
    CHECK(kantorovich_norm(zero) == 0.0);

    SignedMeasure dip{&line, std::vector<double>(line.size(), 0.0)};
    dip.node_masses[8] = 1.0;  // +delta at 0
    dip.node_masses[16] = -1.0; // -delta at 1
    CHECK(kantorovich_norm(dip) == doctest::Approx(1.0).epsilon(1e-12));

    SignedMeasure bad{&line, std::vector<double>(line.size(), 0.0)};
    bad.node_masses[0] = 0.5;
    CHECK_THROWS_AS(kantorovich_norm(bad), std::invalid_argument);

    // Jordan decomposition identity on both geometries.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Space1D sp = (rep % 2 == 0) ? static_cast<Space1D>(build_circle(24)) : unit_line(25);
        std::vector<double> m(sp.size());
        double total = 0.0;
        for (double& v : m) {
            v = unif(rng);
            total += v;
        }
        for (double& v : m) v -= total / sp.size();
        SignedMeasure sm{&sp, m};
        std::vector<double> pos(sp.size(), 0.0), neg(sp.size(), 0.0);
        for (std::size_t i = 0; i < sp.size(); ++i)
            (m[i] >= 0.0 ? pos[i] : neg[i]) = std::abs(m[i]);
        const double w1 = sp.kind == SpaceKind::Circle ? wp_circle(1.0, pos, neg, sp).value
                                                       : w1_line(pos, neg, sp).value;
        CHECK(kantorovich_norm(sm) == doctest::Approx(w1).epsilon(1e-10));
    }
}

TEST_CASE("hopf-lax operator") {
    const auto s = build_circle(64);
    std::vector<double> constant(s.size(), 2.5);
    for (double v : hopf_lax(constant, 0.7, 2.0, s)) CHECK(v == doctest::Approx(2.5));

    std::vector<double> phi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) phi[i] = std::sin(s.nodes[i]);
    const auto tiny = hopf_lax(phi, 1e-9, 2.0, s);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(tiny[i] - phi[i]) < 1e-6);

    // Indicator spreads to the sublevel set of the scaled distance; compare
    // against direct enumeration of the defining sup.
    std::vector<double> ind(s.size(), 0.0);
    ind[3] = 4.0;
    const double eps = 0.3;
    const auto q = hopf_lax(ind, eps, 2.0, s);
    for (std::size_t x = 0; x < s.size(); ++x) {
        double best = -1e300;
        for (std::size_t y = 0; y < s.size(); ++y) {
            const double d = metric(s, x, y);
            best = std::max(best, ind[y] - d * d / eps);
        }
        CHECK(q[x] == doctest::Approx(best));
    }
    CHECK_THROWS_AS(hopf_lax(phi, 0.0, 2.0, s), std::invalid_argument);
}

TEST_CASE("duality gap check") {
    const auto s = build_circle(128);
    const auto f = density_from_fn(s, [](double th) { return 1.0 + 0.4 * std::sin(th); });

    std::vector<double> zero(s.size(), 0.0);
    const auto rep0 = duality_gap_check(f, zero, 0.5, 2.0);
    CHECK(rep0.lhs == doctest::Approx(0.0));
    CHECK(*rep0.pass);

    const auto one = density_from_fn(s, [](double) { return 1.0; });
    std::vector<double> phi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) phi[i] = std::cos(2.0 * s.nodes[i]);
    CHECK(*duality_gap_check(one, phi, 0.2, 2.0).pass);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double a = unif(rng), b = unif(rng), eps = 0.05 + std::abs(unif(rng));
        std::vector<double> ph(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            ph[i] = a * std::cos(s.nodes[i]) + b * std::sin(3.0 * s.nodes[i]);
        const auto r = duality_gap_check(f, ph, eps, rep % 2 == 0 ? 1.0 : 2.0);
        CHECK(r.lhs <= r.rhs + 1e-9);
    }
}

TEST_CASE("metric and order properties of W_p") {
    std::mt19937_64 rng(41);
    const auto s = build_circle(16);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = random_masses(s, rng, false);
        const auto b = random_masses(s, rng, false);
        const auto c = random_masses(s, rng, true);
        for (double p : {1.0, 2.0}) {
            const double ab = wp_lp_oracle(p, a, b, s, false).value;
            const double ba = wp_lp_oracle(p, b, a, s, false).value;
            const double ac = wp_lp_oracle(p, a, c, s, false).value;
            const double cb = wp_lp_oracle(p, c, b, s, false).value;
            CHECK(std::abs(ab - ba) < 1e-10);
            CHECK(ab <= ac + cb + 1e-8);
        }
        // W_p is nondecreasing in the order on probability pairs.
        double prev = 0.0;
        for (double p : {1.0, 1.5, 2.0, 3.0}) {
            const double w = wp_circle(p, a, b, s).value;
            CHECK(w + 1e-8 >= prev);
            prev = w;
        }
    }
}

TEST_CASE("plan csv dump") {
    const auto s = unit_line(17);
    const auto res = wp_lp_oracle(2.0, point_mass(s, 8), point_mass(s, 16), s);
    std::ostringstream out;
    write_plan_csv(res, out);
    CHECK(out.str() == "row,col,mass\n8,16,1\n");
}
