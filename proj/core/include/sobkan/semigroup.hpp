#pragma once

#include "sobkan/space.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace sobkan {

enum class SemigroupEngine { Mehler, CircleFourier, MatrixExp };

/// Markov semigroup P_t of the space's weighted diffusion L = d^2/dx^2 - V' d/dx
/// (heat flow on the circle, Ornstein-Uhlenbeck flow on the Gaussian line).
/// Spectral data is built once at construction and shared read-only; apply()
/// is pure and safe to call concurrently.
class Semigroup {
public:
    Semigroup(const Space1D& space, SemigroupEngine engine, int quad_order = 128);

    /// Mehler quadrature on the Gaussian line, Fourier multipliers on the
    /// circle, dense eigen-expansion elsewhere.
    static Semigroup natural_for(const Space1D& space);

    std::vector<double> apply(std::span<const double> f, double t) const;

    const Space1D& space() const { return *space_; }
    SemigroupEngine engine() const { return engine_; }

    /// Smallest nonzero decay rate of the engine's spectrum.
    double spectral_gap() const;

private:
    const Space1D* space_;
    SemigroupEngine engine_;
    int quad_order_;

    struct Spectral; // MatrixExp cache
    std::shared_ptr<const Spectral> spectral_;

    std::vector<double> apply_mehler(std::span<const double> f, double t) const;
    std::vector<double> apply_fourier(std::span<const double> f, double t) const;
    std::vector<double> apply_matrix(std::span<const double> f, double t) const;
};

/// Conservative finite-volume discretization of L = d^2/dx^2 - V' d/dx with
/// no-flux boundaries: mu-symmetric, zero row sums, nonpositive spectrum with
/// a simple zero eigenvalue.
Eigen::MatrixXd generator_matrix(const Space1D& space);

/// Ornstein-Uhlenbeck semigroup via Gauss-Hermite averaging of the cubic
/// interpolant; f is extended beyond the truncation by its endpoint values.
std::vector<double> ou_apply(const Space1D& space, std::span<const double> f, double t,
                             int quad_order = 128);

/// Heat flow on the circle: DFT, multiply mode k by exp(-k^2 t), inverse DFT.
std::vector<double> circle_heat_apply(const Space1D& space, std::span<const double> f,
                                      double t);

/// e^{tL} f through the cached eigen-expansion of the discretized generator.
std::vector<double> generic_apply(const Semigroup& semigroup, std::span<const double> f,
                                  double t);

struct ErgodicityEstimate {
    double c = 0.0;      // smallest constant in the uniform decay bound
    double lambda = 0.0; // exponential rate (spectral gap)
};

/// Fits ||P_t h - mu(h)||_inf <= c e^{-lambda t} ||h||_inf over a test set of
/// indicator-like and harmonic profiles; lambda is the engine's spectral gap.
ErgodicityEstimate ergodicity_estimate(const Semigroup& semigroup);

} // namespace sobkan
