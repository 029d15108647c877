#include "sobkan/inequalities.hpp"

#include "sobkan/errors.hpp"
#include "sobkan/special.hpp"
#include "sobkan/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sobkan {

namespace {

constexpr double kExplicitTol = 1e-3;
constexpr double kPointwiseTol = 1e-6;

std::vector<double> deviation_from_one(const Density& f) {
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = f[i] - 1.0;
    return d;
}

double entropy_values(std::span<const double> v, const Space1D& space) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > 0.0) acc += v[i] * std::log(v[i]) * space.quad_weights[i];
    return acc;
}

InequalityReport base_report(std::string name, const Space1D& space) {
    InequalityReport rep;
    rep.name = std::move(name);
    rep.grid_n = static_cast<int>(space.size());
    return rep;
}

} // namespace

InequalityReport check_hll_sqrt2(const Density& f) {
    const Space1D& space = f.space();
    auto rep = base_report("hll_sqrt2", space);
    const auto dev = deviation_from_one(f);
    const auto grad = gradient(f.values(), space);
    const double l1 = lp_norm(dev, 1.0, space);
    const double w1 = wasserstein_to_reference(1.0, f).value;
    rep.lhs = l1 * l1;
    rep.rhs = 2.0 * lp_norm(grad, 1.0, space) * w1;
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.pass = rep.ratio <= 1.0 + kExplicitTol;
    return rep;
}

InequalityReport check_hll_general(const Density& f) {
    const Space1D& space = f.space();
    auto rep = base_report("hll_general", space);
    const auto dev = deviation_from_one(f);
    const auto grad = gradient(f.values(), space);
    const double l1 = lp_norm(dev, 1.0, space);
    rep.lhs = l1 * l1;
    rep.rhs = lp_norm(grad, 1.0, space) * wasserstein_to_reference(1.0, f).value;
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport check_sobolev_finite_n(const Density& f, double p, double q, double N) {
    if (!std::isfinite(N)) throw std::invalid_argument("check_sobolev_finite_n: need N < infinity");
    const Space1D& space = f.space();
    auto rep = base_report("sobolev_finite_n", space);
    rep.params = params_sobolev_finite(p, q, N);
    const auto dev = deviation_from_one(f);
    const auto grad = gradient(f.values(), space);
    rep.lhs = std::pow(lp_norm(dev, rep.params.r, space), rep.params.theta);
    const double g1w1 = lp_norm(grad, 1.0, space) * wasserstein_to_reference(1.0, f).value;
    if (p == 1.0 && q == 1.0) {
        rep.rhs = g1w1;
    } else {
        const double gqwp = lp_norm(grad, q, space) * wasserstein_to_reference(p, f).value;
        rep.rhs = gqwp + std::pow(g1w1, rep.params.theta / (2.0 * rep.params.r));
    }
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport check_sobolev_infinite_n(const Density& f, double q) {
    if (!(q > 1.0 && q <= 2.0))
        throw std::invalid_argument("check_sobolev_infinite_n: need q in (1,2]");
    const Space1D& space = f.space();
    auto rep = base_report("sobolev_infinite_n", space);
    rep.params = params_tail_orlicz(q);
    const auto dev = deviation_from_one(f);
    const auto grad = gradient(f.values(), space);
    rep.lhs = std::pow(lp_norm(dev, rep.params.r, space), 1.5);
    const double g1w1 = lp_norm(grad, 1.0, space) * wasserstein_to_reference(1.0, f).value;
    const double gqw2 = lp_norm(grad, q, space) * wasserstein_to_reference(2.0, f).value;
    rep.rhs = gqw2 + std::pow(g1w1, (q + 2.0) / (4.0 * q));
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport check_weak_type(const Density& f, double q, double level_floor) {
    const Space1D& space = f.space();
    auto rep = base_report("weak_type", space);
    rep.params = params_tail_orlicz(q);
    rep.params.C_level = level_floor;
    rep.lhs = weak_type_functional(f, level_floor, q);
    const auto grad = gradient(f.values(), space);
    rep.rhs = lp_norm(grad, q, space) * wasserstein_to_reference(2.0, f).value;
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport check_orlicz(const Density& f, double q, double level_floor) {
    if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("check_orlicz: need q in (1,2]");
    const Space1D& space = f.space();
    auto rep = base_report("orlicz", space);
    rep.params = params_tail_orlicz(q);
    rep.params.C_level = level_floor;
    rep.lhs = orlicz_functional(f, level_floor, rep.params.r, rep.params.alpha);
    const auto grad = gradient(f.values(), space);
    const double gqw2 = lp_norm(grad, q, space) * wasserstein_to_reference(2.0, f).value;
    rep.rhs = std::pow(gqw2, rep.params.s);
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport check_entropy_regularization(const Density& f, double t, EntropyRegMode mode,
                                              const Semigroup& semigroup) {
    if (&semigroup.space() != &f.space())
        throw std::invalid_argument("check_entropy_regularization: semigroup/density space mismatch");
    const Space1D& space = f.space();
    const bool ok_pairing =
        (mode == EntropyRegMode::CD0 && space.kind == SpaceKind::Circle) ||
        (mode == EntropyRegMode::Gauss && space.kind == SpaceKind::GaussLine) ||
        (mode == EntropyRegMode::NegK && space.kind == SpaceKind::WeightedLine);
    if (!ok_pairing)
        throw std::invalid_argument("check_entropy_regularization: mode does not match the space");

    auto rep = base_report("entropy_regularization", space);
    rep.params.t = t;
    const auto evolved = semigroup.apply(f.values(), t);
    rep.lhs = entropy_values(evolved, space);
    const double w2 = wasserstein_to_reference(2.0, f).value;
    switch (mode) {
    case EntropyRegMode::CD0:
        rep.rhs = w2 * w2 / (4.0 * t);
        rep.pass = true;
        break;
    case EntropyRegMode::Gauss:
        rep.rhs = w2 * w2 / std::expm1(2.0 * t);
        rep.pass = true;
        break;
    case EntropyRegMode::NegK: {
        const double K = -space.curvature_lower;
        if (!(K > 0.0))
            throw std::invalid_argument(
                "check_entropy_regularization: NegK mode needs a negative curvature bound");
        rep.params.K = K;
        rep.rhs = K * w2 * w2 / (2.0 * (1.0 - std::exp(-2.0 * K * t)));
        break; // report-only
    }
    }
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    if (rep.pass.has_value()) rep.pass = rep.ratio <= 1.0 + kExplicitTol;
    return rep;
}

InequalityReport check_entropy_decay(const Density& f, double t, double lambda,
                                     const Semigroup& semigroup) {
    if (&semigroup.space() != &f.space())
        throw std::invalid_argument("check_entropy_decay: semigroup/density space mismatch");
    auto rep = base_report("entropy_decay", f.space());
    rep.params.t = t;
    rep.params.lambda = lambda;
    const auto evolved = semigroup.apply(f.values(), t);
    rep.lhs = entropy_values(evolved, f.space());
    rep.rhs = std::exp(-lambda * t) * entropy(f);
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.notes = "spectral-gap proxy for the log-Sobolev constant";
    return rep;
}

InequalityReport check_harnack(const Semigroup& semigroup, std::span<const double> f, double t,
                               std::size_t i, std::size_t j) {
    const Space1D& space = semigroup.space();
    if (space.kind != SpaceKind::Circle)
        throw std::invalid_argument("check_harnack: circle space required");
    for (double v : f)
        if (v < 0.0) throw std::invalid_argument("check_harnack: f must be nonnegative");
    auto rep = base_report("harnack", space);
    rep.params.t = t;
    std::vector<double> sq(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) sq[k] = f[k] * f[k];
    const auto pf = semigroup.apply(f, t);
    const auto pf2 = semigroup.apply(sq, t);
    const double d = metric(space, i, j);
    rep.lhs = pf[j] * pf[j];
    rep.rhs = pf2[i] * std::exp(d * d / (2.0 * t));
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.pass = rep.ratio <= 1.0 + kPointwiseTol;
    return rep;
}

InequalityReport check_log_harnack(const Semigroup& semigroup, std::span<const double> g,
                                   double t, std::size_t i, std::size_t j, double K) {
    const Space1D& space = semigroup.space();
    for (double v : g)
        if (!(v > 0.0)) throw std::invalid_argument("check_log_harnack: g must be positive");
    if (K < 0.0) throw std::invalid_argument("check_log_harnack: K must be >= 0");
    auto rep = base_report("log_harnack", space);
    rep.params.t = t;
    rep.params.K = K;
    std::vector<double> logg(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) logg[k] = std::log(g[k]);
    const auto p_log = semigroup.apply(logg, t);
    const auto p_g = semigroup.apply(g, t);
    const double d = metric(space, i, j);
    const double additive = K > 0.0 ? K * d * d / (2.0 * (1.0 - std::exp(-2.0 * K * t)))
                                    : d * d / (4.0 * t);
    rep.lhs = p_log[i];
    rep.rhs = std::log(p_g[j]) + additive;
    rep.ratio = (rep.lhs >= 0.0 && rep.rhs >= 0.0) ? safe_ratio(rep.lhs, rep.rhs) : 0.0;
    rep.pass = rep.lhs <= rep.rhs + kPointwiseTol;
    return rep;
}

InequalityReport check_reverse_isoperimetry(const Semigroup& semigroup,
                                            std::span<const double> g, double t) {
    const Space1D& space = semigroup.space();
    for (double v : g)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("check_reverse_isoperimetry: g must take values in [0,1]");
    auto rep = base_report("reverse_isoperimetry", space);
    rep.params.t = t;
    std::vector<double> ig(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) ig[k] = isoperimetric_profile(g[k]);
    const auto pg = semigroup.apply(g, t);
    const auto pig = semigroup.apply(ig, t);
    const auto dpg = gradient(pg, space);

    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = std::clamp(pg[k], 0.0, 1.0);
        const double lhs_k = isoperimetric_profile(u) * isoperimetric_profile(u) - pig[k] * pig[k];
        const double rhs_k = 2.0 * t * dpg[k] * dpg[k];
        if (lhs_k - rhs_k < min_slack) {
            min_slack = lhs_k - rhs_k;
            argmin = k;
        }
    }
    const double u = std::clamp(pg[argmin], 0.0, 1.0);
    rep.lhs = isoperimetric_profile(u) * isoperimetric_profile(u) - pig[argmin] * pig[argmin];
    rep.rhs = 2.0 * t * dpg[argmin] * dpg[argmin];
    // Lower bound inequality: the pass ratio compares rhs against lhs.
    rep.ratio = safe_ratio(rep.rhs, std::max(rep.lhs, 0.0));
    rep.pass = min_slack >= -kPointwiseTol;
    std::ostringstream note;
    note << "min pointwise slack " << min_slack << " at node " << argmin;
    rep.notes = note.str();
    return rep;
}

InequalityReport check_gradient_bound(const Semigroup& semigroup, std::span<const double> h,
                                      std::span<const double> t_grid, double q_conj) {
    const Space1D& space = semigroup.space();
    if (!(q_conj >= 1.0)) throw std::invalid_argument("check_gradient_bound: need q' >= 1");
    double hmax = 0.0;
    for (double v : h) hmax = std::max(hmax, std::abs(v));
    if (hmax == 0.0)
        throw std::invalid_argument("check_gradient_bound: h must not vanish identically");
    if (t_grid.empty()) throw std::invalid_argument("check_gradient_bound: empty t grid");

    std::vector<double> habs(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) habs[k] = std::pow(std::abs(h[k]), q_conj);

    auto rep = base_report("gradient_bound", space);
    rep.params.q = q_conj;
    double sup_c = 0.0, c_at_one = 0.0, best_dist = std::numeric_limits<double>::infinity();
    std::ostringstream note;
    note << "c*(t):";
    for (double t : t_grid) {
        const auto ph = semigroup.apply(h, t);
        const auto pabs = semigroup.apply(habs, t);
        const auto grad = gradient(ph, space);
        double c = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double denom = std::pow(std::max(pabs[k], 0.0), 1.0 / q_conj);
            if (denom > 1e-14 * hmax)
                c = std::max(c, std::abs(grad[k]) * std::sqrt(std::min(t, 1.0)) / denom);
        }
        sup_c = std::max(sup_c, c);
        if (std::abs(t - 1.0) < best_dist) {
            best_dist = std::abs(t - 1.0);
            c_at_one = c;
        }
        note << ' ' << c;
    }
    rep.lhs = sup_c;
    rep.rhs = 10.0 * c_at_one;
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.notes = note.str();
    return rep;
}

InequalityReport check_gaussian_weak_tail(const Density& f, double q, double u,
                                          std::span<const double> t_grid) {
    if (f.space().kind != SpaceKind::GaussLine)
        throw std::invalid_argument("check_gaussian_weak_tail: Gaussian line required");
    if (!(u >= 8.0)) throw std::invalid_argument("check_gaussian_weak_tail: need u >= 8");
    if (!(q >= 1.0)) throw std::invalid_argument("check_gaussian_weak_tail: need q >= 1");
    if (t_grid.empty()) throw std::invalid_argument("check_gaussian_weak_tail: empty t grid");

    const Space1D& space = f.space();
    auto rep = base_report("gaussian_weak_tail", space);
    rep.params.q = q;
    rep.params.u = u;
    rep.lhs = tail_prob(f, 2.0 * u);

    const auto grad = gradient(f.values(), space);
    const double grad_q = lp_norm(grad, q, space);
    const double w2 = wasserstein_to_reference(2.0, f).value;
    const double kq = gaussian_abs_moment(q);

    double best = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double ct = std::acos(std::exp(-t));
        const double term1 = std::pow(kq * ct, q) * std::pow(grad_q, q) / std::pow(u, q);
        const double term2 = 2.0 * w2 * w2 / (std::expm1(2.0 * t) * u * std::log(u));
        best = std::min(best, term1 + term2);
    }
    rep.rhs = best;
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.pass = rep.ratio <= 1.0 + kExplicitTol;
    return rep;
}

InequalityReport check_ou_difference(const Density& f, double q, double t, int quad_order) {
    if (f.space().kind != SpaceKind::GaussLine)
        throw std::invalid_argument("check_ou_difference: Gaussian line required");
    if (!(q >= 1.0)) throw std::invalid_argument("check_ou_difference: need q >= 1");
    const Space1D& space = f.space();
    auto rep = base_report("ou_difference", space);
    rep.params.q = q;
    rep.params.t = t;
    const auto evolved = ou_apply(space, f.values(), t, quad_order);
    std::vector<double> diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = evolved[i] - f[i];
    rep.lhs = lp_norm(diff, q, space);
    const auto grad = gradient(f.values(), space);
    rep.rhs = gaussian_abs_moment(q) * std::acos(std::exp(-t)) * lp_norm(grad, q, space);
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    rep.pass = rep.ratio <= 1.0 + kExplicitTol;
    return rep;
}

double gaussian_abs_moment(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("gaussian_abs_moment: need q >= 1");
    // E|Z|^q = sqrt(2/pi) * int_0^inf x^q e^{-x^2/2} dx, split at 1 with the
    // substitution x = u^2 so the near-zero piece is smooth for fractional q.
    static const QuadratureRule inner = gauss_legendre(96, 0.0, 1.0);
    static const QuadratureRule outer = gauss_legendre(160, 1.0, 14.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < inner.nodes.size(); ++k) {
        const double su = inner.nodes[k];
        acc += 2.0 * inner.weights[k] * std::pow(su, 2.0 * q + 1.0) *
               std::exp(-0.5 * su * su * su * su);
    }
    for (std::size_t k = 0; k < outer.nodes.size(); ++k) {
        const double x = outer.nodes[k];
        acc += outer.weights[k] * std::pow(x, q) * std::exp(-0.5 * x * x);
    }
    const double moment = std::sqrt(2.0 / std::numbers::pi) * acc;
    return std::pow(moment, 1.0 / q);
}

SeqBoundResult seq_bound_constant(double a, double alpha, int k_max) {
    if (!(a > 1.0)) throw std::invalid_argument("seq_bound_constant: need a > 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("seq_bound_constant: need alpha > 0");
    if (k_max < 1) throw std::invalid_argument("seq_bound_constant: need k_max >= 1");
    SeqBoundResult out;
    out.ratios.resize(static_cast<std::size_t>(k_max) + 1);
    out.ratios[0] = 1.0;
    // r_k = 1 + r_{k-1} (k/(k+1))^alpha / a keeps the terms scaled.
    for (int k = 1; k <= k_max; ++k)
        out.ratios[k] = 1.0 + out.ratios[k - 1] *
                                  std::pow(static_cast<double>(k) / (k + 1.0), alpha) / a;
    out.constant = *std::max_element(out.ratios.begin(), out.ratios.end());
    out.final_difference = std::abs(out.ratios[k_max] - out.ratios[k_max - 1]);
    return out;
}

ConstantSearchResult constant_search(
    const std::function<InequalityReport(const Density&)>& checker,
    std::span<const Density> family) {
    if (family.empty()) throw std::invalid_argument("constant_search: empty family");
    ConstantSearchResult out;
    out.reports.reserve(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        out.reports.push_back(checker(family[i]));
        if (out.reports.back().ratio > out.sup_ratio) {
            out.sup_ratio = out.reports.back().ratio;
            out.argmax = i;
        }
    }
    return out;
}

std::vector<double> geometric_t_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("geometric_t_grid: invalid parameters");
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(step * i);
    return grid;
}

} // namespace sobkan
