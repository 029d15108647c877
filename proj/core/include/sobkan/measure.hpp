#pragma once

#include "sobkan/space.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace sobkan {

struct TransportResult;

/// Probability density f relative to the space's reference measure mu:
/// values are the per-node Radon-Nikodym samples, nonnegative with mu(f) = 1.
/// Holds a pointer to the space; the space must outlive the density.
class Density {
public:
    Density(const Space1D& space, std::vector<double> values);

    const Space1D& space() const { return *space_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    /// Node masses of the measure nu = f mu.
    std::vector<double> node_masses() const;

private:
    const Space1D* space_;
    std::vector<double> values_;

    // Memo for W_p(f mu, mu); the values are immutable so copies share it.
    struct TransportCache {
        std::mutex mutex;
        std::map<double, double> w_by_order;
    };
    std::shared_ptr<TransportCache> wcache_;
    friend TransportResult wasserstein_to_reference(double p, const Density& f);
};

/// Signed measure with zero total mass, stored as per-node masses.
struct SignedMeasure {
    const Space1D* space = nullptr;
    std::vector<double> node_masses;
};

/// Normalizes nonnegative samples of g into a density: f = g / mu(g).
Density density_from_fn(const Space1D& space, const std::function<double(double)>& g);

/// Same, from precomputed per-node samples.
Density density_from_values(const Space1D& space, std::vector<double> samples);

/// mu(f >= u): total weight of the closed superlevel set.
double tail_prob(const Density& f, double u);

/// Circle family f = 1 + a cos(k theta); requires |a| < 1 for positivity.
std::vector<Density> family_trig(const Space1D& circle,
                                 std::span<const double> amplitudes,
                                 std::span<const int> frequencies);

/// Gaussian-ratio family on the Gaussian line: density of N(m, sigma^2)
/// relative to N(0,1), grid-renormalized. Requires sigma in (0.5, 2) and
/// |m| <= L/2 so the truncation invariant stays valid.
std::vector<Density> family_gaussian_ratio(const Space1D& gauss_line,
                                           std::span<const double> means,
                                           std::span<const double> sigmas);

/// (f - g) mu as a zero-mass signed measure. The densities must share a space.
SignedMeasure signed_from_densities(const Density& f, const Density& g);

} // namespace sobkan
