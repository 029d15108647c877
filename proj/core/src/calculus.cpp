#include "sobkan/calculus.hpp"

#include "sobkan/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace sobkan {

InequalityParams params_sobolev_finite(double p, double q, double N) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw std::invalid_argument("params_sobolev_finite: need p, q >= 1");
    if (!(N >= 1.0)) throw std::invalid_argument("params_sobolev_finite: need N >= 1");
    InequalityParams out;
    out.p = p;
    out.q = q;
    out.N = N;
    out.theta = 1.0 + 1.0 / p + 1.0 / N;
    out.r = p * q * out.theta / (p + q);
    if (p == 1.0 && q == 1.0) {
        // The order-1 special case is stated with the norm index 1 + 2/N.
        out.r = 1.0 + 2.0 / N;
    }
    return out;
}

InequalityParams params_tail_orlicz(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("params_tail_orlicz: need q >= 1");
    InequalityParams out;
    out.q = q;
    out.r = 3.0 * q / (q + 2.0);
    out.alpha = q / (q + 2.0);
    out.s = 2.0 * q / (q + 2.0);
    return out;
}

double safe_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

std::vector<double> gradient(std::span<const double> f, const Space1D& space) {
    const std::size_t n = space.size();
    if (f.size() != n) throw std::invalid_argument("gradient: size mismatch");
    if (n < 3) throw std::invalid_argument("gradient: need at least 3 nodes");
    const double h = space.spacing();
    std::vector<double> g(n);
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    if (space.kind == SpaceKind::Circle) {
        g[0] = (f[1] - f[n - 1]) / (2.0 * h);
        g[n - 1] = (f[0] - f[n - 2]) / (2.0 * h);
    } else {
        g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    }
    return g;
}

double lp_norm(std::span<const double> g, double p, const Space1D& space) {
    if (g.size() != space.size()) throw std::invalid_argument("lp_norm: size mismatch");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : g) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: need p >= 1 or p = infinity");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += std::pow(std::abs(g[i]), p) * space.quad_weights[i];
    return std::pow(acc, 1.0 / p);
}

double entropy(const Density& f) {
    const auto& w = f.space().quad_weights;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > 0.0) acc += f[i] * std::log(f[i]) * w[i];
    return acc;
}

double isoperimetric_profile(double u) {
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("isoperimetric_profile: argument outside [0,1]");
    if (u == 0.0 || u == 1.0) return 0.0;
    return normal_pdf(normal_quantile(u));
}

double orlicz_functional(const Density& f, double threshold, double r, double alpha) {
    if (threshold < 0.0) throw std::invalid_argument("orlicz_functional: threshold must be >= 0");
    if (!(r >= 1.0)) throw std::invalid_argument("orlicz_functional: need r >= 1");
    if (alpha < 0.0) throw std::invalid_argument("orlicz_functional: need alpha >= 0");
    const auto& w = f.space().quad_weights;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double excess = f[i] - threshold;
        if (excess <= 0.0) continue;
        acc += std::pow(excess, r) * std::pow(std::log1p(excess), alpha) * w[i];
    }
    return acc;
}

double weak_type_functional(const Density& f, double level_floor, double q) {
    const double min_floor = std::max(8.0, std::numbers::e);
    if (level_floor < min_floor)
        throw std::invalid_argument("weak_type_functional: level floor must be >= max(8, e)");
    if (!(q >= 1.0)) throw std::invalid_argument("weak_type_functional: need q >= 1");

    double fmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) fmax = std::max(fmax, f[i]);
    if (fmax < level_floor) return 0.0;

    // The tail is piecewise constant with jumps at values of f, so the sup is
    // attained on the dyadic levels plus the distinct values above the floor.
    std::set<double> levels;
    for (double u = level_floor; u <= fmax; u *= 2.0) levels.insert(u);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] >= level_floor) levels.insert(f[i]);

    const double exponent = (q + 2.0) / (2.0 * q); // = 3/(2r), r = 3q/(q+2)
    double best = 0.0;
    for (double u : levels) {
        const double tail = tail_prob(f, u);
        if (tail <= 0.0) continue;
        best = std::max(best, std::pow(u, 1.5) * std::sqrt(std::log(u)) * std::pow(tail, exponent));
    }
    return best;
}

} // namespace sobkan
