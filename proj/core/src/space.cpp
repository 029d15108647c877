#include "sobkan/space.hpp"

#include "sobkan/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sobkan {

namespace {

constexpr double kTailBudget = 1e-12;

void check_weight_invariants(const Space1D& s) {
    double total = 0.0;
    for (double w : s.quad_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("Space1D: quadrature weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("Space1D: quadrature weights must sum to 1");
}

// Trapezoid masses of e^{-V} on a uniform grid, normalized to total 1.
std::vector<double> normalized_trapezoid(const std::vector<double>& v_samples, double step) {
    const std::size_t n = v_samples.size();
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double density = std::exp(-v_samples[i]);
        if (!std::isfinite(density))
            throw std::invalid_argument("build_weighted_line: potential sample is not finite");
        const double trap = (i == 0 || i + 1 == n) ? 0.5 * step : step;
        w[i] = trap * density;
        total += w[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("weighted line: measure has no mass");
    for (double& wi : w) wi /= total;
    return w;
}

} // namespace

double Space1D::spacing() const {
    if (kind == SpaceKind::Circle) return 2.0 * std::numbers::pi / static_cast<double>(size());
    return (nodes.back() - nodes.front()) / static_cast<double>(size() - 1);
}

Space1D build_circle(int n, double dimension_param) {
    if (n < 8) throw std::invalid_argument("build_circle: need n >= 8, got " + std::to_string(n));
    if (n % 2 != 0) throw std::invalid_argument("build_circle: need n even, got " + std::to_string(n));
    if (!(dimension_param >= 1.0))
        throw std::invalid_argument("build_circle: dimension parameter must be >= 1");

    Space1D s;
    s.kind = SpaceKind::Circle;
    s.nodes.resize(n);
    s.quad_weights.assign(n, 1.0 / n);
    s.potential.assign(n, 0.0);
    s.curvature_lower = 0.0;
    s.dimension_param = dimension_param;
    for (int i = 0; i < n; ++i) s.nodes[i] = 2.0 * std::numbers::pi * i / n;
    return s;
}

Space1D build_gauss_line(int n, double half_width) {
    if (n < 16) throw std::invalid_argument("build_gauss_line: need n >= 16");
    if (half_width < 8.0)
        throw std::invalid_argument("build_gauss_line: need half-width >= 8");
    const double tail_mass = 2.0 * normal_tail(half_width);
    if (tail_mass >= kTailBudget)
        throw std::invalid_argument(
            "build_gauss_line: discarded tail mass " + std::to_string(tail_mass) +
            " exceeds 1e-12; increase the half-width");

    Space1D s;
    s.kind = SpaceKind::GaussLine;
    s.truncation = half_width;
    s.curvature_lower = 1.0; // V'' = 1 for V = x^2/2
    s.dimension_param = std::numeric_limits<double>::infinity();
    s.nodes.resize(n);
    s.potential.resize(n);
    const double step = 2.0 * half_width / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = -half_width + step * i;
        s.nodes[i] = x;
        s.potential[i] = 0.5 * x * x;
    }
    s.quad_weights = normalized_trapezoid(s.potential, step);
    check_weight_invariants(s);
    return s;
}

Space1D build_weighted_line(int n, double half_width,
                            const std::function<double(double)>& potential,
                            double v2_lower, double dimension_param) {
    if (n < 16) throw std::invalid_argument("build_weighted_line: need n >= 16");
    if (!(half_width > 0.0)) throw std::invalid_argument("build_weighted_line: need half-width > 0");

    Space1D s;
    s.kind = SpaceKind::WeightedLine;
    s.truncation = half_width;
    s.curvature_lower = v2_lower;
    s.dimension_param = dimension_param;
    s.nodes.resize(n);
    s.potential.resize(n);
    const double step = 2.0 * half_width / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = -half_width + step * i;
        s.nodes[i] = x;
        s.potential[i] = potential(x);
        if (!std::isfinite(s.potential[i]))
            throw std::invalid_argument("build_weighted_line: potential sample is not finite at x = " +
                                        std::to_string(x));
    }
    s.quad_weights = normalized_trapezoid(s.potential, step);
    check_weight_invariants(s);
    return s;
}

double metric(const Space1D& space, std::size_t i, std::size_t j) {
    if (i >= space.size() || j >= space.size())
        throw std::out_of_range("metric: node index out of range");
    return metric_coord(space, space.nodes[i], space.nodes[j]);
}

double metric_coord(const Space1D& space, double x, double y) {
    const double d = std::abs(x - y);
    if (space.kind != SpaceKind::Circle) return d;
    const double two_pi = 2.0 * std::numbers::pi;
    const double m = std::fmod(d, two_pi);
    return std::min(m, two_pi - m);
}

} // namespace sobkan
