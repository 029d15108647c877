#pragma once

#include "sobkan/calculus.hpp"
#include "sobkan/measure.hpp"
#include "sobkan/report.hpp"
#include "sobkan/semigroup.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sobkan {

// Explicit-constant checks set `pass` (all constants pinned); constant-free
// checks report the ratio only and leave `pass` unset.

/// ||f-1||_1^2 <= 2 ||grad f||_1 W_1(f mu, mu), explicit constant 2.
InequalityReport check_hll_sqrt2(const Density& f);

/// The same two sides with constant 1; feeds the empirical constant search.
InequalityReport check_hll_general(const Density& f);

/// Finite-dimensional interpolation bound under CD(0,N):
/// ||f-1||_r^theta vs ||grad f||_q W_p + (||grad f||_1 W_1)^(theta/2r);
/// for p = q = 1 the displayed special case ||f-1||_{1+2/N}^{2+1/N} vs
/// ||grad f||_1 W_1 is used.
InequalityReport check_sobolev_finite_n(const Density& f, double p, double q, double N);

/// Infinite-dimensional branch, q in (1,2]:
/// ||f-1||_{3q/(q+2)}^{3/2} vs ||grad f||_q W_2 + (||grad f||_1 W_1)^((q+2)/4q).
InequalityReport check_sobolev_infinite_n(const Density& f, double q);

/// Weak-type tail bound: weak_type_functional vs ||grad f||_q W_2(f mu, mu).
InequalityReport check_weak_type(const Density& f, double q, double level_floor = 8.0);

/// Orlicz-type bound: orlicz_functional(f, C, r, alpha) vs
/// (||grad f||_q W_2)^s with r, alpha, s derived from q in (1,2].
InequalityReport check_orlicz(const Density& f, double q, double level_floor);

enum class EntropyRegMode {
    CD0,  // circle:        Ent(P_t f) <= W_2^2 / (4t)
    NegK, // weighted line: Ent(P_t f) <= K W_2^2 / (2(1 - e^{-2Kt})), report-only
    Gauss // Gaussian line: Ent(T_t f) <= W_2^2 / (e^{2t} - 1)
};

InequalityReport check_entropy_regularization(const Density& f, double t, EntropyRegMode mode,
                                              const Semigroup& semigroup);

/// Ent(P_t f) vs e^{-lambda t} Ent(f); lambda is a spectral-gap proxy for the
/// log-Sobolev constant, so the check is report-only.
InequalityReport check_entropy_decay(const Density& f, double t, double lambda,
                                     const Semigroup& semigroup);

/// Dimension-free Harnack bound on the circle:
/// (P_t f)^2(y_j) <= P_t(f^2)(x_i) e^{d(x i, x j)^2 / 2t} for f >= 0.
InequalityReport check_harnack(const Semigroup& semigroup, std::span<const double> f, double t,
                               std::size_t i, std::size_t j);

/// Log-Harnack bound: P_t log g(x_i) <= log P_t g(x_j) + K d^2/(2(1-e^{-2Kt}))
/// for g > 0; K = 0 selects the flat-curvature form d^2/(4t).
InequalityReport check_log_harnack(const Semigroup& semigroup, std::span<const double> g,
                                   double t, std::size_t i, std::size_t j, double K);

/// Reverse isoperimetric bound, pointwise for g with values in [0,1]:
/// I(P_t g)^2 - (P_t I(g))^2 >= 2t |grad P_t g|^2.
InequalityReport check_reverse_isoperimetry(const Semigroup& semigroup,
                                            std::span<const double> g, double t);

/// Empirical constant in |grad P_t h| <= c/sqrt(t ^ 1) (P_t |h|^q')^{1/q'}:
/// reports sup_t c*(t) against 10x its value at t = 1.
InequalityReport check_gradient_bound(const Semigroup& semigroup, std::span<const double> h,
                                      std::span<const double> t_grid, double q_conj);

/// Gaussian weak tail bound with explicit constants, u >= 8:
/// gamma(f >= 2u) <= inf_t [K_q^q arccos^q(e^{-t})/u^q ||grad f||_q^q
///                          + 2 W_2^2 / ((e^{2t}-1) u ln u)].
InequalityReport check_gaussian_weak_tail(const Density& f, double q, double u,
                                          std::span<const double> t_grid);

/// Ornstein-Uhlenbeck difference bound:
/// ||T_t f - f||_q <= K_q arccos(e^{-t}) ||grad f||_q.
InequalityReport check_ou_difference(const Density& f, double q, double t,
                                     int quad_order = 128);

/// K_q = (E|Z|^q)^{1/q} for standard normal Z; K_1 = sqrt(2/pi), K_2 = 1.
double gaussian_abs_moment(double q);

struct SeqBoundResult {
    double constant = 0.0;        // minimal C valid for every k <= k_max
    std::vector<double> ratios;   // S_k / ((1+k)^alpha a^k)
    double final_difference = 0.0;
};

/// Bounds sum_{i<=k} (1+i)^alpha a^i by C (1+k)^alpha a^k; returns the ratio
/// sequence and its last successive difference.
SeqBoundResult seq_bound_constant(double a, double alpha, int k_max);

struct ConstantSearchResult {
    double sup_ratio = 0.0;
    std::size_t argmax = 0;
    std::vector<InequalityReport> reports;
};

/// Sup of the checker's ratio over a density family (deterministic order).
ConstantSearchResult constant_search(const std::function<InequalityReport(const Density&)>& checker,
                                     std::span<const Density> family);

/// Geometric grid used for infima/suprema over semigroup times.
std::vector<double> geometric_t_grid(double lo, double hi, int points);

} // namespace sobkan
