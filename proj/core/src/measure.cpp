#include "sobkan/measure.hpp"

#include "sobkan/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sobkan {

Density::Density(const Space1D& space, std::vector<double> values)
    : space_(&space), values_(std::move(values)),
      wcache_(std::make_shared<TransportCache>()) {
    if (values_.size() != space.size())
        throw std::invalid_argument("Density: value count does not match the grid");
    double mass = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0))
            throw std::invalid_argument("Density: negative value at node " + std::to_string(i));
        mass += values_[i] * space.quad_weights[i];
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw std::invalid_argument("Density: mu(f) = " + std::to_string(mass) + ", expected 1");
}

std::vector<double> Density::node_masses() const {
    std::vector<double> m(values_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = values_[i] * space_->quad_weights[i];
    return m;
}

Density density_from_values(const Space1D& space, std::vector<double> samples) {
    if (samples.size() != space.size())
        throw std::invalid_argument("density_from_values: sample count does not match the grid");
    double mass = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw std::invalid_argument("density_from_values: sample is not finite");
        if (samples[i] < 0.0)
            throw std::invalid_argument("density_from_values: negative sample at node " +
                                        std::to_string(i));
        mass += samples[i] * space.quad_weights[i];
    }
    if (!(mass > 0.0)) throw std::invalid_argument("density_from_values: mu(g) <= 0");
    for (double& v : samples) v /= mass;
    return Density(space, std::move(samples));
}

Density density_from_fn(const Space1D& space, const std::function<double(double)>& g) {
    std::vector<double> samples(space.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = g(space.nodes[i]);
    return density_from_values(space, std::move(samples));
}

double tail_prob(const Density& f, double u) {
    if (u < 0.0) throw std::invalid_argument("tail_prob: threshold must be >= 0");
    const auto& w = f.space().quad_weights;
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] >= u) total += w[i];
    return total;
}

std::vector<Density> family_trig(const Space1D& circle,
                                 std::span<const double> amplitudes,
                                 std::span<const int> frequencies) {
    if (circle.kind != SpaceKind::Circle)
        throw std::invalid_argument("family_trig: circle space required");
    std::vector<Density> out;
    out.reserve(amplitudes.size() * frequencies.size());
    for (double a : amplitudes) {
        if (!(std::abs(a) < 1.0))
            throw std::invalid_argument("family_trig: |amplitude| must be < 1 for positivity");
        for (int k : frequencies) {
            std::vector<double> v(circle.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = 1.0 + a * std::cos(k * circle.nodes[i]);
            out.emplace_back(circle, std::move(v));
        }
    }
    return out;
}

std::vector<Density> family_gaussian_ratio(const Space1D& gauss_line,
                                           std::span<const double> means,
                                           std::span<const double> sigmas) {
    if (gauss_line.kind != SpaceKind::GaussLine)
        throw std::invalid_argument("family_gaussian_ratio: Gaussian line space required");
    const double L = *gauss_line.truncation;
    std::vector<Density> out;
    out.reserve(means.size() * sigmas.size());
    for (double m : means) {
        if (std::abs(m) > 0.5 * L)
            throw std::invalid_argument("family_gaussian_ratio: |mean| must be <= L/2");
        for (double s : sigmas) {
            if (!(s > 0.5 && s < 2.0))
                throw std::invalid_argument("family_gaussian_ratio: sigma must lie in (0.5, 2)");
            out.push_back(density_from_fn(gauss_line, [m, s](double x) {
                return normal_pdf((x - m) / s) / (s * normal_pdf(x));
            }));
        }
    }
    return out;
}

SignedMeasure signed_from_densities(const Density& f, const Density& g) {
    if (&f.space() != &g.space())
        throw std::invalid_argument("signed_from_densities: densities live on different spaces");
    SignedMeasure m;
    m.space = &f.space();
    m.node_masses.resize(f.size());
    const auto& w = f.space().quad_weights;
    for (std::size_t i = 0; i < f.size(); ++i) m.node_masses[i] = (f[i] - g[i]) * w[i];
    return m;
}

} // namespace sobkan
