#pragma once

#include "sobkan/measure.hpp"
#include "sobkan/report.hpp"
#include "sobkan/space.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace sobkan {

enum class TransportMethod { CdfLine, QuantileLine, CircleShift, LpOracle, Sinkhorn };

struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> mass; // row-major, rows*cols

    double operator()(std::size_t i, std::size_t j) const { return mass[i * cols + j]; }
};

struct TransportDiagnostics {
    int iterations = 0;
    double marginal_violation = 0.0;
    double dual_gap = 0.0;
};

struct TransportResult {
    double value = 0.0; // W_p
    double order = 1.0;
    TransportMethod method = TransportMethod::QuantileLine;
    std::optional<TransportPlan> plan;
    TransportDiagnostics diagnostics;
};

/// W_1 between node-mass vectors on a line, via the CDF-difference integral.
TransportResult w1_line(std::span<const double> alpha, std::span<const double> beta,
                        const Space1D& space);

/// W_p on a line via the monotone (quantile) coupling; exact for atoms.
TransportResult wp_quantile_line(double p, std::span<const double> alpha,
                                 std::span<const double> beta, const Space1D& space);

/// W_p on the circle: minimizes the convex cumulative-offset cost of the
/// quantile coupling of periodic lifts. Exact for node-supported measures.
TransportResult wp_circle(double p, std::span<const double> alpha,
                          std::span<const double> beta, const Space1D& space);

/// Ground-truth dense transport LP (successive shortest paths), n <= 64.
TransportResult wp_lp_oracle(double p, std::span<const double> alpha,
                             std::span<const double> beta, const Space1D& space,
                             bool want_plan = true);

struct SinkhornOptions {
    /// Decreasing positive epsilon schedule; empty selects a geometric
    /// default scaled to the cost matrix.
    std::vector<double> reg_schedule;
    int max_iterations_per_level = 4000;
    double marginal_tol = 1e-9;
};

/// Entropic solver with epsilon-scaling; the reported value is the linear
/// cost of the rounded (exactly feasible) plan. Cross-check only.
TransportResult wp_sinkhorn(double p, std::span<const double> alpha,
                            std::span<const double> beta, const Space1D& space,
                            const SinkhornOptions& options = {});

/// Kantorovich norm of a zero-mass signed measure (dual Lip_1 norm);
/// equals W_1 of its Jordan decomposition.
double kantorovich_norm(const SignedMeasure& m);

/// Hopf-Lax sup-convolution Q_eps phi(x) = max_y [phi(y) - d(x,y)^p / eps],
/// with the sup taken over grid nodes.
std::vector<double> hopf_lax(std::span<const double> phi, double eps, double p,
                             const Space1D& space);

/// Kantorovich-duality bound: mu(phi f) <= W_p^p(f mu, mu)/eps + mu(Q_eps phi).
InequalityReport duality_gap_check(const Density& f, std::span<const double> phi,
                                   double eps, double p);

/// W_p between f mu and mu with the exact solver for the space's geometry.
TransportResult wasserstein_to_reference(double p, const Density& f);

/// Dumps a coupling as CSV rows "row,col,mass" (nonzero entries only).
void write_plan_csv(const TransportResult& result, std::ostream& out);

} // namespace sobkan
