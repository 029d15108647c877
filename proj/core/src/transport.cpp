#include "sobkan/transport.hpp"

#include "sobkan/calculus.hpp"
#include "sobkan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sobkan {

namespace {

constexpr double kMassTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_cost(double d, double p) {
    d = std::abs(d);
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

// Validates nonnegativity and equal totals; returns the common total.
double check_mass_pair(std::span<const double> alpha, std::span<const double> beta,
                       const Space1D& space) {
    if (alpha.size() != space.size() || beta.size() != space.size())
        throw std::invalid_argument("transport: mass vector size does not match the grid");
    double ta = 0.0, tb = 0.0;
    for (double a : alpha) {
        if (!(a >= 0.0)) throw std::invalid_argument("transport: negative source mass");
        ta += a;
    }
    for (double b : beta) {
        if (!(b >= 0.0)) throw std::invalid_argument("transport: negative target mass");
        tb += b;
    }
    if (!(ta > 0.0)) throw std::invalid_argument("transport: source measure has no mass");
    if (std::abs(ta - tb) > kMassTol)
        throw std::invalid_argument("transport: totals differ by " + std::to_string(ta - tb));
    return ta;
}

// Monotone coupling cost of two atomic measures given by positions and
// normalized masses (each summing to 1). Exact for the line.
double quantile_cost(std::span<const double> xa, std::span<const double> ma,
                     std::span<const double> xb, std::span<const double> mb, double p) {
    std::size_t ia = 0, ib = 0;
    double ra = ma.empty() ? 0.0 : ma[0];
    double rb = mb.empty() ? 0.0 : mb[0];
    double cost = 0.0;
    while (ia < ma.size() && ib < mb.size()) {
        const double seg = std::min(ra, rb);
        if (seg > 0.0) cost += seg * pow_cost(xa[ia] - xb[ib], p);
        ra -= seg;
        rb -= seg;
        if (ra <= 1e-16) {
            ++ia;
            if (ia < ma.size()) ra = ma[ia];
        }
        if (rb <= 1e-16) {
            ++ib;
            if (ib < mb.size()) rb = mb[ib];
        }
    }
    return cost;
}

std::vector<double> normalized(std::span<const double> m, double total) {
    std::vector<double> out(m.begin(), m.end());
    for (double& v : out) v /= total;
    return out;
}

// ---- circle transport ------------------------------------------------------
//
// For a convex cost |x-y|^p the circle optimum equals the minimum over the
// cumulative offset s of the quantile coupling of periodic lifts: level t of
// alpha is matched with level t - s of beta, where beta's quantile function
// is extended by G(u + 1) = G(u) + 2*pi. The offset cost is convex and
// piecewise linear in s, so a ternary search finds the global minimum; plain
// cut (non-crossing) plans are the offsets s = A_i - B_i and are evaluated
// explicitly as well.

struct CircleProblem {
    std::span<const double> theta;
    std::vector<double> A; // cumulative alpha masses, last = 1
    std::vector<double> B; // cumulative beta masses, last = 1
};

double circle_offset_cost(const CircleProblem& prob, double p, double s) {
    const auto& A = prob.A;
    const auto& B = prob.B;
    const std::size_t n = A.size();
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> cuts;
    cuts.reserve(4 * n + 2);
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (A[i] > 0.0 && A[i] < 1.0) cuts.push_back(A[i]);
    const int kmin = static_cast<int>(std::floor(-s)) - 1;
    const int kmax = static_cast<int>(std::floor(1.0 - s)) + 1;
    for (int k = kmin; k <= kmax; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = B[j] + s + k;
            if (v > 1e-15 && v < 1.0 - 1e-15) cuts.push_back(v);
        }
    std::sort(cuts.begin(), cuts.end());

    double cost = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double seg = cuts[c + 1] - cuts[c];
        if (seg <= 1e-16) continue;
        const double tm = 0.5 * (cuts[c] + cuts[c + 1]);
        auto ita = std::lower_bound(A.begin(), A.end(), tm);
        std::size_t ia = std::min<std::size_t>(ita - A.begin(), n - 1);
        const double u = tm - s;
        const int k = static_cast<int>(std::floor(u));
        auto itb = std::lower_bound(B.begin(), B.end(), u - k);
        std::size_t jb = std::min<std::size_t>(itb - B.begin(), n - 1);
        cost += seg * pow_cost(prob.theta[ia] - (prob.theta[jb] + two_pi * k), p);
    }
    return cost;
}

double circle_optimal_cost(const CircleProblem& prob, double p) {
    // The offset cost is convex (piecewise linear) in s, so a ternary search
    // over a window covering every non-crossing cut offset finds the global
    // minimum; the cut offsets themselves are anchored explicitly.
    double best = kInf;
    double dmin = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < prob.A.size(); ++i) {
        const double d = prob.A[i] - prob.B[i];
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    for (double anchor : {dmin, 0.0, dmax})
        best = std::min(best, circle_offset_cost(prob, p, anchor));
    double lo = dmin - 1.0, hi = dmax + 1.0;
    for (int it = 0; it < 90; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (circle_offset_cost(prob, p, m1) <= circle_offset_cost(prob, p, m2))
            hi = m2;
        else
            lo = m1;
    }
    best = std::min(best, circle_offset_cost(prob, p, 0.5 * (lo + hi)));
    return best;
}

CircleProblem make_circle_problem(std::span<const double> alpha, std::span<const double> beta,
                                  const Space1D& space, double total) {
    CircleProblem prob;
    prob.theta = std::span<const double>(space.nodes);
    prob.A.resize(alpha.size());
    prob.B.resize(beta.size());
    double ca = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        ca += alpha[i] / total;
        cb += beta[i] / total;
        prob.A[i] = ca;
        prob.B[i] = cb;
    }
    prob.A.back() = 1.0;
    prob.B.back() = 1.0;
    return prob;
}

} // namespace

TransportResult w1_line(std::span<const double> alpha, std::span<const double> beta,
                        const Space1D& space) {
    if (!space.is_line()) throw std::invalid_argument("w1_line: line space required");
    check_mass_pair(alpha, beta, space);
    double cum = 0.0, value = 0.0;
    for (std::size_t i = 0; i + 1 < space.size(); ++i) {
        cum += alpha[i] - beta[i];
        value += std::abs(cum) * (space.nodes[i + 1] - space.nodes[i]);
    }
    TransportResult res;
    res.value = value;
    res.order = 1.0;
    res.method = TransportMethod::CdfLine;
    return res;
}

TransportResult wp_quantile_line(double p, std::span<const double> alpha,
                                 std::span<const double> beta, const Space1D& space) {
    if (!space.is_line()) throw std::invalid_argument("wp_quantile_line: line space required");
    if (!(p >= 1.0)) throw std::invalid_argument("wp_quantile_line: need order p >= 1");
    const double total = check_mass_pair(alpha, beta, space);
    const auto ma = normalized(alpha, total);
    const auto mb = normalized(beta, total);
    const double cost = quantile_cost(space.nodes, ma, space.nodes, mb, p);
    TransportResult res;
    res.value = std::pow(cost, 1.0 / p);
    res.order = p;
    res.method = TransportMethod::QuantileLine;
    return res;
}

TransportResult wp_circle(double p, std::span<const double> alpha,
                          std::span<const double> beta, const Space1D& space) {
    if (space.kind != SpaceKind::Circle)
        throw std::invalid_argument("wp_circle: circle space required");
    if (!(p >= 1.0)) throw std::invalid_argument("wp_circle: need order p >= 1");
    const double total = check_mass_pair(alpha, beta, space);
    const CircleProblem prob = make_circle_problem(alpha, beta, space, total);
    TransportResult res;
    res.value = std::pow(circle_optimal_cost(prob, p), 1.0 / p);
    res.order = p;
    res.method = TransportMethod::CircleShift;
    return res;
}

// ---- dense LP oracle: successive shortest paths with potentials -----------

TransportResult wp_lp_oracle(double p, std::span<const double> alpha,
                             std::span<const double> beta, const Space1D& space,
                             bool want_plan) {
    if (space.size() > 64)
        throw std::invalid_argument("wp_lp_oracle: grid capped at 64 nodes");
    if (!(p >= 1.0)) throw std::invalid_argument("wp_lp_oracle: need order p >= 1");
    const double total = check_mass_pair(alpha, beta, space);

    // Work on the supports only.
    std::vector<std::size_t> is, js;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0.0) is.push_back(i);
    for (std::size_t j = 0; j < beta.size(); ++j)
        if (beta[j] > 0.0) js.push_back(j);
    const std::size_t ns = is.size(), ms = js.size();

    std::vector<double> cost(ns * ms);
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t b = 0; b < ms; ++b)
            cost[a * ms + b] = pow_cost(metric(space, is[a], js[b]), p);

    std::vector<double> supply(ns), demand(ms);
    for (std::size_t a = 0; a < ns; ++a) supply[a] = alpha[is[a]] / total;
    for (std::size_t b = 0; b < ms; ++b) demand[b] = beta[js[b]] / total;

    // Node layout: sources [0, ns), sinks [ns, ns+ms), super source S, sink T.
    const std::size_t S = ns + ms, T = S + 1, V = T + 1;
    std::vector<double> flow(ns * ms, 0.0), used_a(ns, 0.0), used_b(ms, 0.0);
    std::vector<double> pot(V, 0.0);
    double pushed = 0.0;
    int rounds = 0;

    std::vector<double> dist(V);
    std::vector<int> parent(V), parent_back(V);
    std::vector<char> done(V);

    while (pushed < 1.0 - 1e-12) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(parent_back.begin(), parent_back.end(), 0);
        std::fill(done.begin(), done.end(), 0);
        dist[S] = 0.0;
        for (std::size_t scan = 0; scan < V; ++scan) {
            std::size_t u = V;
            double du = kInf;
            for (std::size_t v = 0; v < V; ++v)
                if (!done[v] && dist[v] < du) {
                    u = v;
                    du = dist[v];
                }
            if (u == V) break;
            done[u] = 1;
            if (u == S) {
                for (std::size_t a = 0; a < ns; ++a)
                    if (supply[a] - used_a[a] > 1e-15) {
                        const double nd = du + std::max(0.0, pot[S] - pot[a]);
                        if (nd < dist[a]) {
                            dist[a] = nd;
                            parent[a] = static_cast<int>(S);
                        }
                    }
            } else if (u < ns) {
                for (std::size_t b = 0; b < ms; ++b) {
                    const double rc = cost[u * ms + b] + pot[u] - pot[ns + b];
                    const double nd = du + std::max(0.0, rc);
                    if (nd < dist[ns + b]) {
                        dist[ns + b] = nd;
                        parent[ns + b] = static_cast<int>(u);
                        parent_back[ns + b] = 0;
                    }
                }
            } else if (u < S) {
                const std::size_t b = u - ns;
                if (demand[b] - used_b[b] > 1e-15) {
                    const double nd = du + std::max(0.0, pot[u] - pot[T]);
                    if (nd < dist[T]) {
                        dist[T] = nd;
                        parent[T] = static_cast<int>(u);
                    }
                }
                for (std::size_t a = 0; a < ns; ++a)
                    if (flow[a * ms + b] > 1e-15) {
                        const double rc = -cost[a * ms + b] + pot[u] - pot[a];
                        const double nd = du + std::max(0.0, rc);
                        if (nd < dist[a]) {
                            dist[a] = nd;
                            parent[a] = static_cast<int>(u);
                            parent_back[a] = 1;
                        }
                    }
            }
        }
        if (dist[T] == kInf)
            throw NumericalError("wp_lp_oracle: residual graph disconnected before completion");

        double amount = 1.0 - pushed;
        for (std::size_t v = T; v != S;) {
            const std::size_t u = static_cast<std::size_t>(parent[v]);
            if (u == S)
                amount = std::min(amount, supply[v] - used_a[v]);
            else if (v == T)
                amount = std::min(amount, demand[u - ns] - used_b[u - ns]);
            else if (parent_back[v])
                amount = std::min(amount, flow[v * ms + (u - ns)]);
            v = u;
        }
        for (std::size_t v = T; v != S;) {
            const std::size_t u = static_cast<std::size_t>(parent[v]);
            if (u == S)
                used_a[v] += amount;
            else if (v == T)
                used_b[u - ns] += amount;
            else if (parent_back[v])
                flow[v * ms + (u - ns)] -= amount;
            else
                flow[u * ms + (v - ns)] += amount;
            v = u;
        }
        pushed += amount;
        ++rounds;
        for (std::size_t v = 0; v < V; ++v)
            pot[v] += (dist[v] < kInf) ? dist[v] : dist[T];
        if (rounds > static_cast<int>(4 * (ns + ms) * (ns + ms)) + 64)
            throw NumericalError("wp_lp_oracle: augmentation budget exhausted");
    }

    double primal = 0.0;
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t b = 0; b < ms; ++b) primal += flow[a * ms + b] * cost[a * ms + b];
    // Dual value from the terminal potentials (feasible by construction).
    double dual = 0.0;
    for (std::size_t b = 0; b < ms; ++b) dual += demand[b] * (pot[ns + b] - pot[S]);
    for (std::size_t a = 0; a < ns; ++a) dual -= supply[a] * (pot[a] - pot[S]);

    TransportResult res;
    res.value = std::pow(primal, 1.0 / p) * std::pow(total, 1.0 / p);
    res.order = p;
    res.method = TransportMethod::LpOracle;
    res.diagnostics.iterations = rounds;
    res.diagnostics.dual_gap = primal - dual;
    if (want_plan) {
        TransportPlan plan;
        plan.rows = space.size();
        plan.cols = space.size();
        plan.mass.assign(plan.rows * plan.cols, 0.0);
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t b = 0; b < ms; ++b)
                plan.mass[is[a] * plan.cols + js[b]] = flow[a * ms + b] * total;
        res.plan = std::move(plan);
    }
    return res;
}

// ---- entropic solver -------------------------------------------------------

TransportResult wp_sinkhorn(double p, std::span<const double> alpha,
                            std::span<const double> beta, const Space1D& space,
                            const SinkhornOptions& options) {
    if (space.size() > 4096)
        throw std::invalid_argument("wp_sinkhorn: grid capped at 4096 nodes");
    if (!(p >= 1.0)) throw std::invalid_argument("wp_sinkhorn: need order p >= 1");
    const double total = check_mass_pair(alpha, beta, space);

    std::vector<std::size_t> is, js;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 1e-300) is.push_back(i);
    for (std::size_t j = 0; j < beta.size(); ++j)
        if (beta[j] > 1e-300) js.push_back(j);
    const std::size_t ns = is.size(), ms = js.size();

    std::vector<double> cost(ns * ms);
    double cmax = 0.0;
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t b = 0; b < ms; ++b) {
            cost[a * ms + b] = pow_cost(metric(space, is[a], js[b]), p);
            cmax = std::max(cmax, cost[a * ms + b]);
        }
    if (cmax == 0.0) cmax = 1.0;

    std::vector<double> a(ns), b(ms), la(ns), lb(ms);
    for (std::size_t i = 0; i < ns; ++i) {
        a[i] = alpha[is[i]] / total;
        la[i] = std::log(a[i]);
    }
    for (std::size_t j = 0; j < ms; ++j) {
        b[j] = beta[js[j]] / total;
        lb[j] = std::log(b[j]);
    }

    std::vector<double> schedule = options.reg_schedule;
    if (schedule.empty())
        for (double eps = 0.5 * cmax; eps > 2e-5 * cmax; eps *= 0.5) schedule.push_back(eps);
    for (std::size_t k = 0; k + 1 < schedule.size(); ++k)
        if (!(schedule[k] > schedule[k + 1]) || !(schedule[k + 1] > 0.0))
            throw std::invalid_argument("wp_sinkhorn: schedule must be decreasing and positive");

    std::vector<double> fpot(ns, 0.0), gpot(ms, 0.0), row_ls(ns), col_ls(ms);
    int iterations = 0;
    double violation = kInf;

    auto logsumexp_rows = [&](double eps) {
        for (std::size_t i = 0; i < ns; ++i) {
            double m = -kInf;
            for (std::size_t j = 0; j < ms; ++j)
                m = std::max(m, (gpot[j] - cost[i * ms + j]) / eps + lb[j]);
            double acc = 0.0;
            for (std::size_t j = 0; j < ms; ++j)
                acc += std::exp((gpot[j] - cost[i * ms + j]) / eps + lb[j] - m);
            row_ls[i] = m + std::log(acc);
        }
    };
    auto logsumexp_cols = [&](double eps) {
        for (std::size_t j = 0; j < ms; ++j) {
            double m = -kInf;
            for (std::size_t i = 0; i < ns; ++i)
                m = std::max(m, (fpot[i] - cost[i * ms + j]) / eps + la[i]);
            double acc = 0.0;
            for (std::size_t i = 0; i < ns; ++i)
                acc += std::exp((fpot[i] - cost[i * ms + j]) / eps + la[i] - m);
            col_ls[j] = m + std::log(acc);
        }
    };

    for (double eps : schedule) {
        bool level_ok = false;
        for (int it = 0; it < options.max_iterations_per_level; ++it) {
            logsumexp_rows(eps);
            for (std::size_t i = 0; i < ns; ++i) fpot[i] = -eps * row_ls[i];
            logsumexp_cols(eps);
            // Column-marginal violation with the fresh f: rows are exact.
            violation = 0.0;
            for (std::size_t j = 0; j < ms; ++j)
                violation = std::max(violation, std::abs(std::exp(col_ls[j] + lb[j]) - b[j]));
            for (std::size_t j = 0; j < ms; ++j) gpot[j] = -eps * col_ls[j];
            ++iterations;
            if (violation < options.marginal_tol) {
                level_ok = true;
                break;
            }
        }
        if (!level_ok && eps == schedule.back())
            throw NumericalError("wp_sinkhorn: marginal violation " + std::to_string(violation) +
                                 " after iteration cap");
    }

    // Assemble the plan, then round it onto the feasible polytope.
    const double eps = schedule.back();
    std::vector<double> plan(ns * ms);
    std::vector<double> rowsum(ns, 0.0), colsum(ms, 0.0);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ms; ++j) {
            const double v =
                std::exp((fpot[i] + gpot[j] - cost[i * ms + j]) / eps + la[i] + lb[j]);
            plan[i * ms + j] = v;
            rowsum[i] += v;
        }
    for (std::size_t i = 0; i < ns; ++i) {
        const double scale = rowsum[i] > 0.0 ? std::min(1.0, a[i] / rowsum[i]) : 0.0;
        for (std::size_t j = 0; j < ms; ++j) {
            plan[i * ms + j] *= scale;
            colsum[j] += plan[i * ms + j];
        }
    }
    std::fill(rowsum.begin(), rowsum.end(), 0.0);
    for (std::size_t j = 0; j < ms; ++j) {
        const double scale = colsum[j] > 0.0 ? std::min(1.0, b[j] / colsum[j]) : 0.0;
        for (std::size_t i = 0; i < ns; ++i) {
            plan[i * ms + j] *= scale;
            rowsum[i] += plan[i * ms + j];
        }
    }
    std::fill(colsum.begin(), colsum.end(), 0.0);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ms; ++j) colsum[j] += plan[i * ms + j];
    double missing = 0.0;
    for (std::size_t i = 0; i < ns; ++i) missing += a[i] - rowsum[i];
    if (missing > 0.0) {
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < ms; ++j)
                plan[i * ms + j] += (a[i] - rowsum[i]) * (b[j] - colsum[j]) / missing;
    }

    double primal = 0.0;
    for (std::size_t k = 0; k < plan.size(); ++k) primal += plan[k] * cost[k];

    TransportResult res;
    res.value = std::pow(primal, 1.0 / p) * std::pow(total, 1.0 / p);
    res.order = p;
    res.method = TransportMethod::Sinkhorn;
    res.diagnostics.iterations = iterations;
    res.diagnostics.marginal_violation = violation;
    TransportPlan out_plan;
    out_plan.rows = space.size();
    out_plan.cols = space.size();
    out_plan.mass.assign(out_plan.rows * out_plan.cols, 0.0);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ms; ++j)
            out_plan.mass[is[i] * out_plan.cols + js[j]] = plan[i * ms + j] * total;
    res.plan = std::move(out_plan);
    return res;
}

double kantorovich_norm(const SignedMeasure& m) {
    if (m.space == nullptr) throw std::invalid_argument("kantorovich_norm: missing space");
    const Space1D& space = *m.space;
    if (m.node_masses.size() != space.size())
        throw std::invalid_argument("kantorovich_norm: size mismatch");
    double total = 0.0;
    for (double v : m.node_masses) total += v;
    if (std::abs(total) > kMassTol)
        throw std::invalid_argument("kantorovich_norm: total mass " + std::to_string(total) +
                                    " is not zero");

    const std::size_t n = space.size();
    if (space.is_line()) {
        double cum = 0.0, value = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cum += m.node_masses[i];
            value += std::abs(cum) * (space.nodes[i + 1] - space.nodes[i]);
        }
        return value;
    }
    // Circle: min over the constant s of sum |cum - s| * dtheta; with a
    // uniform grid the optimum is the median of the cumulative values.
    std::vector<double> cum(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += m.node_masses[i];
        cum[i] = acc;
    }
    std::vector<double> sorted = cum;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[n / 2];
    const double h = space.spacing();
    double value = 0.0;
    for (double c : cum) value += std::abs(c - median) * h;
    return value;
}

std::vector<double> hopf_lax(std::span<const double> phi, double eps, double p,
                             const Space1D& space) {
    if (!(eps > 0.0)) throw std::invalid_argument("hopf_lax: need eps > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("hopf_lax: need order p >= 1");
    const std::size_t n = space.size();
    if (phi.size() != n) throw std::invalid_argument("hopf_lax: size mismatch");
    for (double v : phi)
        if (!std::isfinite(v)) throw std::invalid_argument("hopf_lax: phi must be finite");
    std::vector<double> out(n, -kInf);
    for (std::size_t x = 0; x < n; ++x) {
        double best = -kInf;
        for (std::size_t y = 0; y < n; ++y)
            best = std::max(best, phi[y] - pow_cost(metric(space, x, y), p) / eps);
        out[x] = best;
    }
    return out;
}

InequalityReport duality_gap_check(const Density& f, std::span<const double> phi,
                                   double eps, double p) {
    const Space1D& space = f.space();
    const auto& w = space.quad_weights;
    const auto q_phi = hopf_lax(phi, eps, p, space);
    double lhs = 0.0, smoothed = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        lhs += phi[i] * f[i] * w[i];
        smoothed += q_phi[i] * w[i];
    }
    const double wp = wasserstein_to_reference(p, f).value;
    const double rhs = std::pow(wp, p) / eps + smoothed;

    InequalityReport rep;
    rep.name = "hopf_lax_duality";
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.ratio = (lhs >= 0.0 && rhs >= 0.0) ? safe_ratio(lhs, rhs) : 0.0;
    rep.params.p = p;
    rep.params.t = eps;
    rep.grid_n = static_cast<int>(space.size());
    rep.pass = lhs <= rhs + 1e-9;
    return rep;
}

TransportResult wasserstein_to_reference(double p, const Density& f) {
    {
        std::lock_guard lock(f.wcache_->mutex);
        if (auto it = f.wcache_->w_by_order.find(p); it != f.wcache_->w_by_order.end()) {
            TransportResult res;
            res.value = it->second;
            res.order = p;
            res.method = f.space().kind == SpaceKind::Circle ? TransportMethod::CircleShift
                                                             : TransportMethod::QuantileLine;
            return res;
        }
    }
    const Space1D& space = f.space();
    const auto masses = f.node_masses();
    TransportResult res;
    if (space.kind == SpaceKind::Circle)
        res = wp_circle(p, masses, space.quad_weights, space);
    else if (p == 1.0)
        res = w1_line(masses, space.quad_weights, space);
    else
        res = wp_quantile_line(p, masses, space.quad_weights, space);
    std::lock_guard lock(f.wcache_->mutex);
    f.wcache_->w_by_order.emplace(p, res.value);
    return res;
}

void write_plan_csv(const TransportResult& result, std::ostream& out) {
    out << "row,col,mass\n";
    if (!result.plan) return;
    const TransportPlan& plan = *result.plan;
    for (std::size_t i = 0; i < plan.rows; ++i)
        for (std::size_t j = 0; j < plan.cols; ++j)
            if (plan(i, j) != 0.0) out << i << ',' << j << ',' << plan(i, j) << '\n';
}

} // namespace sobkan
