#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace sobkan {

enum class SpaceKind { Circle, GaussLine, WeightedLine };

/// A discretized 1D metric-measure space: nodes carrying the quadrature
/// weights of the reference probability measure mu = e^{-V} dx, plus the
/// curvature metadata used by the inequality checkers.
///
/// Immutable after construction; safe to share across threads.
struct Space1D {
    SpaceKind kind = SpaceKind::Circle;
    std::vector<double> nodes;        // strictly increasing; radians on the circle
    std::vector<double> quad_weights; // positive, total 1
    std::vector<double> potential;    // per-node V samples
    double curvature_lower = 0.0;     // lower bound for V'' on the domain
    double dimension_param = 1.0;     // N in [1, inf]; inf allowed
    std::optional<double> truncation; // half-width L (line kinds only)

    std::size_t size() const { return nodes.size(); }
    bool is_line() const { return kind != SpaceKind::Circle; }
    /// Uniform grid step (2*pi/n on the circle, 2L/(n-1) on lines).
    double spacing() const;
};

/// Uniform circle with mu = normalized arc length. Requires n >= 8 even.
Space1D build_circle(int n, double dimension_param = 1.0);

/// Standard Gaussian measure truncated to [-L, L] and renormalized.
/// Requires n >= 16 and L >= 8 (keeps the discarded tail mass below 1e-12).
Space1D build_gauss_line(int n, double half_width);

/// mu proportional to e^{-V} on [-L, L]. The caller supplies the lower bound
/// for V'' (it is stored as metadata, not verified).
Space1D build_weighted_line(int n, double half_width,
                            const std::function<double(double)>& potential,
                            double v2_lower,
                            double dimension_param = std::numeric_limits<double>::infinity());

/// Geodesic distance between nodes i and j.
double metric(const Space1D& space, std::size_t i, std::size_t j);

/// Geodesic distance between arbitrary coordinates of the space.
double metric_coord(const Space1D& space, double x, double y);

} // namespace sobkan
