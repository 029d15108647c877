#include "sobkan/special.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sobkan {

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_tail(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation, then one Halley step against erfc.
double quantile_initial(double u) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double lo = 0.02425;
    if (u < lo) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > 1.0 - lo) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double normal_quantile(double u) {
    if (u < 0.0 || u > 1.0) throw std::domain_error("normal_quantile: u outside [0,1]");
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    double x = quantile_initial(u);
    // Halley refinement: e = Phi(x) - u, step = e / (phi - e*x/2)
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - u;
        const double ph = normal_pdf(x);
        if (ph == 0.0) break;
        x -= e / (ph + 0.5 * x * e);
    }
    return x;
}

QuadratureRule gauss_hermite_prob(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite_prob: order must be positive");

    static std::mutex cache_mutex;
    static std::map<int, QuadratureRule> cache;
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(order); it != cache.end()) return it->second;
    }

    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
    // recurrence He_{k+1} = x He_k - k He_{k-1}: off-diagonal sqrt(k).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double off = std::sqrt(static_cast<double>(k));
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    double wsum = 0.0;
    for (int k = 0; k < order; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = v0 * v0; // total mass of the weight is 1
        wsum += rule.weights[k];
    }
    for (double& w : rule.weights) w /= wsum;
    // Pin the total to exactly 1 so constants are fixed points bit-exactly.
    double drift = 1.0;
    for (std::size_t k = 0; k + 1 < rule.weights.size(); ++k) drift -= rule.weights[k];
    rule.weights.back() = drift;

    std::lock_guard lock(cache_mutex);
    return cache.emplace(order, std::move(rule)).first->second;
}

QuadratureRule gauss_legendre(int order, double a, double b) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    // Jacobi matrix for Legendre: off-diagonal k / sqrt(4k^2 - 1).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int k = 0; k < order; ++k) {
        rule.nodes[k] = mid + half * es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = 2.0 * v0 * v0 * half;
    }
    return rule;
}

} // namespace sobkan
