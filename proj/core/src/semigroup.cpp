#include "sobkan/semigroup.hpp"

#include "sobkan/errors.hpp"
#include "sobkan/special.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sobkan {

namespace {

// ---- cubic interpolation on a uniform grid ---------------------------------
// Hermite cubic with centered slopes (one-sided second-order at the ends);
// reproduces quadratics exactly. Outside the grid the value is clamped to the
// endpoint sample. When the local stencil is nonnegative the result is
// clamped at zero to keep positivity.

class CubicInterpolant {
public:
    CubicInterpolant(const std::vector<double>& x, std::span<const double> f)
        : x0_(x.front()), h_((x.back() - x.front()) / static_cast<double>(x.size() - 1)),
          f_(f.begin(), f.end()) {
        const std::size_t n = f_.size();
        slope_.resize(n);
        for (std::size_t i = 1; i + 1 < n; ++i) slope_[i] = 0.5 * (f_[i + 1] - f_[i - 1]);
        slope_[0] = 0.5 * (-3.0 * f_[0] + 4.0 * f_[1] - f_[2]);
        slope_[n - 1] = 0.5 * (3.0 * f_[n - 1] - 4.0 * f_[n - 2] + f_[n - 3]);
    }

    double operator()(double x) const {
        const std::size_t n = f_.size();
        const double u = (x - x0_) / h_;
        if (u <= 0.0) return f_.front();
        if (u >= static_cast<double>(n - 1)) return f_.back();
        const std::size_t i = static_cast<std::size_t>(u);
        const double s = u - static_cast<double>(i);
        const double a = f_[i];
        const double b = slope_[i];
        const double c = 3.0 * (f_[i + 1] - f_[i]) - 2.0 * slope_[i] - slope_[i + 1];
        const double d = 2.0 * (f_[i] - f_[i + 1]) + slope_[i] + slope_[i + 1];
        double v = a + s * (b + s * (c + s * d));
        if (v < 0.0) {
            const std::size_t lo = i > 0 ? i - 1 : 0;
            const std::size_t hi = std::min(i + 2, n - 1);
            bool nonneg = true;
            for (std::size_t k = lo; k <= hi; ++k) nonneg = nonneg && f_[k] >= 0.0;
            if (nonneg) v = 0.0;
        }
        return v;
    }

private:
    double x0_;
    double h_;
    std::vector<double> f_;
    std::vector<double> slope_; // in index units
};

// ---- FFTW plan cache --------------------------------------------------------

struct CirclePlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> dummy_real;
    std::vector<std::complex<double>> dummy_cplx;

    explicit CirclePlans(std::size_t n) : dummy_real(n), dummy_cplx(n / 2 + 1) {
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), dummy_real.data(),
                                       reinterpret_cast<fftw_complex*>(dummy_cplx.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                        reinterpret_cast<fftw_complex*>(dummy_cplx.data()),
                                        dummy_real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~CirclePlans() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

const CirclePlans& circle_plans(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<CirclePlans>> cache;
    std::lock_guard lock(mutex);
    auto& entry = cache[n];
    if (!entry) entry = std::make_unique<CirclePlans>(n);
    return *entry;
}

} // namespace

// ---- MatrixExp spectral cache ------------------------------------------------

struct Semigroup::Spectral {
    Eigen::VectorXd eigenvalues;   // ascending, last ~ 0
    Eigen::MatrixXd eigenvectors;  // of the symmetrized generator
    Eigen::VectorXd sqrt_w;
    Eigen::VectorXd inv_sqrt_w;
};

Eigen::MatrixXd generator_matrix(const Space1D& space) {
    if (!space.is_line()) throw std::invalid_argument("generator_matrix: line space required");
    const std::size_t n = space.size();
    const double h = space.spacing();
    const auto& V = space.potential;
    const auto& w = space.quad_weights;

    // Unnormalized node masses and edge conductances; the normalization of mu
    // cancels between them, so quad_weights (already normalized) pair with
    // conductances normalized by the same constant. Work with ratios only.
    // kappa_{i+1/2} / w_i = e^{-(V_i+V_{i+1})/2} / (h * trap_i * e^{-V_i})
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> kappa(n - 1);
    double mass_scale = 0.0; // Z * h implied by quad_weights
    for (std::size_t i = 0; i < n; ++i) {
        const double trap = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        mass_scale += trap * std::exp(-V[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        kappa[i] = std::exp(-0.5 * (V[i] + V[i + 1])) / (h * mass_scale);

    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) {
            L(i, i + 1) = kappa[i] / w[i];
            L(i, i) -= kappa[i] / w[i];
        }
        if (i > 0) {
            L(i, i - 1) = kappa[i - 1] / w[i];
            L(i, i) -= kappa[i - 1] / w[i];
        }
    }
    return L;
}

Semigroup::Semigroup(const Space1D& space, SemigroupEngine engine, int quad_order)
    : space_(&space), engine_(engine), quad_order_(quad_order) {
    switch (engine) {
    case SemigroupEngine::Mehler:
        if (space.kind != SpaceKind::GaussLine)
            throw std::invalid_argument("Semigroup: Mehler engine needs a Gaussian line");
        if (quad_order_ < 32)
            throw std::invalid_argument("Semigroup: Mehler quadrature order must be >= 32");
        break;
    case SemigroupEngine::CircleFourier:
        if (space.kind != SpaceKind::Circle)
            throw std::invalid_argument("Semigroup: Fourier engine needs a circle");
        break;
    case SemigroupEngine::MatrixExp: {
        if (!space.is_line())
            throw std::invalid_argument("Semigroup: MatrixExp engine needs a line space");
        if (space.size() > 1024)
            throw std::invalid_argument("Semigroup: dense eigendecomposition capped at n = 1024");
        const std::size_t n = space.size();
        const Eigen::MatrixXd L = generator_matrix(space);
        auto spectral = std::make_shared<Spectral>();
        spectral->sqrt_w.resize(n);
        spectral->inv_sqrt_w.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            spectral->sqrt_w(i) = std::sqrt(space.quad_weights[i]);
            spectral->inv_sqrt_w(i) = 1.0 / spectral->sqrt_w(i);
        }
        // Exactly symmetric conjugation T = D L D^{-1}, D = diag(sqrt w).
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            T(i, i) = L(i, i);
            if (i + 1 < n) {
                const double off = L(i, i + 1) * spectral->sqrt_w(i) * spectral->inv_sqrt_w(i + 1);
                T(i, i + 1) = off;
                T(i + 1, i) = off;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success)
            throw NumericalError("Semigroup: eigendecomposition failed");
        spectral->eigenvalues = es.eigenvalues();
        spectral->eigenvectors = es.eigenvectors();
        spectral_ = std::move(spectral);
        break;
    }
    }
}

Semigroup Semigroup::natural_for(const Space1D& space) {
    switch (space.kind) {
    case SpaceKind::Circle: return Semigroup(space, SemigroupEngine::CircleFourier);
    case SpaceKind::GaussLine: return Semigroup(space, SemigroupEngine::Mehler);
    case SpaceKind::WeightedLine: return Semigroup(space, SemigroupEngine::MatrixExp);
    }
    throw std::logic_error("Semigroup: unknown space kind");
}

std::vector<double> Semigroup::apply(std::span<const double> f, double t) const {
    if (f.size() != space_->size()) throw std::invalid_argument("Semigroup::apply: size mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("Semigroup::apply: need t > 0");
    switch (engine_) {
    case SemigroupEngine::Mehler: return apply_mehler(f, t);
    case SemigroupEngine::CircleFourier: return apply_fourier(f, t);
    case SemigroupEngine::MatrixExp: return apply_matrix(f, t);
    }
    throw std::logic_error("Semigroup: unknown engine");
}

std::vector<double> Semigroup::apply_mehler(std::span<const double> f, double t) const {
    const QuadratureRule& rule = gauss_hermite_prob(quad_order_);
    const CubicInterpolant interp(space_->nodes, f);
    const double decay = std::exp(-t);
    const double spread = std::sqrt(1.0 - decay * decay);
    const std::size_t n = space_->size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = decay * space_->nodes[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            acc += rule.weights[k] * interp(base + spread * rule.nodes[k]);
        out[i] = acc;
    }
    return out;
}

std::vector<double> Semigroup::apply_fourier(std::span<const double> f, double t) const {
    const std::size_t n = space_->size();
    const CirclePlans& plans = circle_plans(n);
    std::vector<double> real(f.begin(), f.end());
    std::vector<std::complex<double>> modes(n / 2 + 1);
    fftw_execute_dft_r2c(plans.forward, real.data(),
                         reinterpret_cast<fftw_complex*>(modes.data()));
    for (std::size_t k = 0; k < modes.size(); ++k)
        modes[k] *= std::exp(-static_cast<double>(k) * static_cast<double>(k) * t);
    fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(modes.data()),
                         real.data());
    for (double& v : real) v /= static_cast<double>(n);
    return real;
}

std::vector<double> Semigroup::apply_matrix(std::span<const double> f, double t) const {
    const std::size_t n = space_->size();
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v(i) = f[i] * spectral_->sqrt_w(i);
    Eigen::VectorXd coef = spectral_->eigenvectors.transpose() * v;
    for (std::size_t k = 0; k < n; ++k) coef(k) *= std::exp(t * spectral_->eigenvalues(k));
    Eigen::VectorXd res = spectral_->eigenvectors * coef;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = res(i) * spectral_->inv_sqrt_w(i);
    return out;
}

double Semigroup::spectral_gap() const {
    switch (engine_) {
    case SemigroupEngine::CircleFourier:
        return 1.0; // mode k = 1 decays at rate k^2 = 1 by construction
    case SemigroupEngine::Mehler:
        return 1.0; // Hermite eigenfunction x decays at e^{-t} exactly
    case SemigroupEngine::MatrixExp: {
        const auto& ev = spectral_->eigenvalues;
        const double gap = -ev(ev.size() - 2);
        if (std::abs(gap) < 1e-10)
            throw NumericalError("Semigroup: degenerate spectral gap");
        return gap;
    }
    }
    throw std::logic_error("Semigroup: unknown engine");
}

std::vector<double> ou_apply(const Space1D& space, std::span<const double> f, double t,
                             int quad_order) {
    return Semigroup(space, SemigroupEngine::Mehler, quad_order).apply(f, t);
}

std::vector<double> circle_heat_apply(const Space1D& space, std::span<const double> f,
                                      double t) {
    return Semigroup(space, SemigroupEngine::CircleFourier).apply(f, t);
}

std::vector<double> generic_apply(const Semigroup& semigroup, std::span<const double> f,
                                  double t) {
    if (semigroup.engine() != SemigroupEngine::MatrixExp)
        throw std::invalid_argument("generic_apply: MatrixExp engine required");
    return semigroup.apply(f, t);
}

ErgodicityEstimate ergodicity_estimate(const Semigroup& semigroup) {
    const Space1D& space = semigroup.space();
    const std::size_t n = space.size();

    ErgodicityEstimate est;
    est.lambda = semigroup.spectral_gap();

    // Test profiles: a mean-zero harmonic pins c >= 1 at t = 0; smoothed
    // indicators probe the uniform (not L^2) decay.
    std::vector<std::vector<double>> profiles;
    std::vector<double> harmonic(n), step(n), bump(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = space.nodes[i];
        if (space.kind == SpaceKind::Circle) {
            harmonic[i] = std::cos(x);
            step[i] = 1.0 / (1.0 + std::exp(-4.0 * std::cos(x)));
            bump[i] = std::exp(2.0 * (std::cos(x) - 1.0));
        } else {
            const double L = *space.truncation;
            harmonic[i] = x / L;
            step[i] = 1.0 / (1.0 + std::exp(-2.0 * x));
            bump[i] = std::exp(-2.0 * x * x);
        }
    }
    profiles.push_back(std::move(harmonic));
    profiles.push_back(std::move(step));
    profiles.push_back(std::move(bump));

    const std::vector<double> t_grid = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
    double c = 0.0;
    for (const auto& h : profiles) {
        double mean = 0.0, sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += h[i] * space.quad_weights[i];
            sup = std::max(sup, std::abs(h[i]));
        }
        if (sup == 0.0) continue;
        // t = 0 handled analytically: P_0 h = h.
        double dev0 = 0.0;
        for (double v : h) dev0 = std::max(dev0, std::abs(v - mean));
        c = std::max(c, dev0 / sup);
        for (double t : t_grid) {
            const auto ph = semigroup.apply(h, t);
            double dev = 0.0;
            for (double v : ph) dev = std::max(dev, std::abs(v - mean));
            c = std::max(c, dev / (std::exp(-est.lambda * t) * sup));
        }
    }
    est.c = c;
    return est;
}

} // namespace sobkan
