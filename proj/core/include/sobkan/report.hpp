#pragma once

#include <limits>
#include <optional>
#include <string>

namespace sobkan {

/// Derived exponents shared by the inequality checkers.
/// theta/r follow the finite-dimensional interpolation convention
/// theta = 1 + 1/p + 1/N, r = p q theta / (p + q); the tail/Orlicz checks use
/// r = 3q/(q+2), alpha = q/(q+2), s = 2q/(q+2).
struct InequalityParams {
    double p = 1.0;
    double q = 1.0;
    double N = std::numeric_limits<double>::infinity();
    double theta = 0.0;
    double r = 0.0;
    double alpha = 0.0;
    double s = 0.0;
    double K = 0.0;       // curvature constant
    double lambda = 0.0;  // spectral-gap / log-Sobolev proxy
    double C_level = 0.0; // threshold constant in truncated functionals
    double u = 0.0;       // level threshold
    double t = 0.0;       // semigroup time, when relevant
};

InequalityParams params_sobolev_finite(double p, double q, double N);
InequalityParams params_tail_orlicz(double q);

/// One evaluated inequality: both sides, their ratio, and the context.
/// `pass` is set only for explicit-constant checks.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    InequalityParams params;
    int grid_n = 0;
    std::string notes;
    std::optional<bool> pass;
};

/// lhs/rhs with the zero conventions: 0 when both sides vanish, +inf when
/// only the right-hand side does.
double safe_ratio(double lhs, double rhs);

} // namespace sobkan
