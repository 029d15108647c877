#pragma once

#include <cstddef>
#include <vector>

namespace sobkan {

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail P(Z >= x), accurate far into the tail (via erfc).
double normal_tail(double x);
/// Inverse of normal_cdf on (0,1); returns +/-inf at the endpoints.
double normal_quantile(double u);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2/2)/sqrt(2*pi) (probabilists'
/// convention): sum w_i g(x_i) ~ E[g(Z)], weights normalized to total 1.
QuadratureRule gauss_hermite_prob(int order);

/// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

} // namespace sobkan
