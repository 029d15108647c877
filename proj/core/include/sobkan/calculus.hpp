#pragma once

#include "sobkan/measure.hpp"
#include "sobkan/report.hpp"
#include "sobkan/space.hpp"

#include <span>
#include <vector>

namespace sobkan {

/// Discrete gradient: central differences in the interior, periodic wrap on
/// the circle, one-sided second-order stencils at line endpoints.
std::vector<double> gradient(std::span<const double> f, const Space1D& space);

/// Weighted L^p norm (sum |g|^p w)^(1/p); pass p = infinity for the sup norm.
double lp_norm(std::span<const double> g, double p, const Space1D& space);

/// Relative entropy mu(f log f) with 0 log 0 = 0; nonnegative for densities.
double entropy(const Density& f);

/// Gaussian isoperimetric profile I(u) = phi(Phi^{-1}(u)) on [0,1].
double isoperimetric_profile(double u);

/// mu[(f - C)_+^r (ln(1 + (f - C)_+))^alpha].
double orlicz_functional(const Density& f, double threshold, double r, double alpha);

/// sup over u in {level_floor * 2^k} united with the distinct values of f of
///   u^{3/2} (ln u)^{1/2} * mu(f >= u)^{(q+2)/(2q)}.
/// The exponent equals 3/(2r) with r = 3q/(q+2).
double weak_type_functional(const Density& f, double level_floor, double q);

} // namespace sobkan
