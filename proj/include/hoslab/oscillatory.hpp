#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoslab/bump.hpp"
#include "hoslab/partition.hpp"
#include "hoslab/quadrature.hpp"
#include "hoslab/spectral.hpp"
#include "hoslab/symbol.hpp"

namespace hos {

enum class EvalMethod { mollified, partition_guided };

struct EvalDiagnostics {
    std::vector<double> eps_used;
    int levels = 0;
    std::size_t evaluations = 0;
    double quad_error = 0.0;
    std::string note;
};

/// One evaluation of the oscillatory integral I(t, x).
struct EvalResult {
    Complex value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    EvalMethod method = EvalMethod::mollified;
    bool converged = false;
    EvalDiagnostics diagnostics;
};

/// Geometric epsilon schedule for the Gaussian regularizer.
struct MollifierSchedule {
    double eps0 = 0.25; // applies at |t| >= 1; contracts with |t| below that
    double ratio = 0.5;
    int depth = 9;
    int richardson_order = 7;

    void validate() const {
        if (!(eps0 > 0.0) || !(ratio > 0.0) || !(ratio < 1.0) || depth < 3)
            throw std::invalid_argument("MollifierSchedule: need eps0 > 0, ratio in (0,1), depth >= 3");
    }
};

namespace osc_detail {

/// Phase polynomial t*P + x*xi on the line (n = 1).
inline Poly1 line_phase(const PolynomialSymbol& p, double t, double x) {
    auto c = p.to_poly1().coefficients();
    if (c.size() < 2) c.resize(2, 0.0);
    for (auto& v : c) v *= t;
    c[1] += x;
    return Poly1(std::move(c));
}

/// Phase restricted to the horizontal line xi2 = s (n = 2):
/// t*P(., s) + x1*xi1 + x2*s as a polynomial in xi1.
inline Poly1 collapse_phase(const PolynomialSymbol& p, double t, double x1, double x2, double s) {
    std::vector<double> c(static_cast<std::size_t>(p.degree()) + 2, 0.0);
    for (const auto& [exp, coef] : p.terms())
        c[static_cast<std::size_t>(exp[0])] += coef * std::pow(s, exp[1]);
    for (auto& v : c) v *= t;
    c[1] += x1;
    c[0] += x2 * s;
    return Poly1(std::move(c));
}

/// Phase along the vertical line xi1 = c1, as a polynomial in xi2.
inline Poly1 axis_phase(const PolynomialSymbol& p, double t, double x1, double x2, double c1) {
    std::vector<double> c(static_cast<std::size_t>(p.degree()) + 2, 0.0);
    for (const auto& [exp, coef] : p.terms())
        c[static_cast<std::size_t>(exp[1])] += coef * std::pow(c1, exp[0]);
    for (auto& v : c) v *= t;
    c[1] += x2;
    c[0] += x1 * c1;
    return Poly1(std::move(c));
}

/// Gaussian tail mass outside |xi| > R on the line.
inline double gauss_tail_1d(double eps, double R) {
    return std::sqrt(M_PI / eps) * std::erfc(std::sqrt(eps) * R);
}

inline std::vector<double> symmetric_feature_breaks(const std::vector<double>& features, double lo,
                                                    double hi) {
    std::vector<double> b;
    for (double f : features) {
        if (f <= 0.0) continue;
        if (-f > lo && -f < hi) b.push_back(-f);
        if (f > lo && f < hi) b.push_back(f);
    }
    return b;
}

/// Truncation strategy fixed once per evaluation so every mollifier level
/// integrates the same region and the extrapolated quantity is smooth in eps.
struct TruncationPlan {
    bool ok = false;        // corrected truncation available
    double R = 0.0;         // box / interval half-width
    double target = 0.0;    // per-level tail budget the plan was built for
};

/// Find the smallest radius beyond the stationary set where the two-term
/// integration-by-parts tail correction is valid and its remainder (for the
/// undamped weight, the worst case over the eps schedule) is below target.
template <class Amp0>
TruncationPlan plan_line_truncation(const Poly1& phase, const Poly1& dphase, Amp0&& w,
                                    double target, double min_radius, bool one_sided = false) {
    TruncationPlan plan;
    plan.target = target;
    for (double R = std::max(min_radius, 1.0); R <= 2e4; R *= 1.25) {
        const auto cp = ibp_tail_correction(phase, dphase, w, R, +1);
        if (!cp.valid) continue;
        double rem = cp.remainder_est;
        if (!one_sided) {
            const auto cm = ibp_tail_correction(phase, dphase, w, R, -1);
            if (!cm.valid) continue;
            rem += cm.remainder_est;
        }
        if (rem < target) {
            plan.ok = true;
            plan.R = R;
            return plan;
        }
    }
    return plan;
}

/// Fallback truncation radius on the line for one eps level: the first R
/// where either the Gaussian tail or a damped 1/|phase'| heuristic is small.
inline double fallback_radius_line(const Poly1& dphase, double eps, double target,
                                   double min_radius) {
    double R = std::max(min_radius, 1.0);
    while (R <= 1e5) {
        const double g = gauss_tail_1d(eps, R);
        const double d1 = std::fabs(dphase(R));
        const double d2 = std::fabs(dphase(-R));
        double ibp = std::numeric_limits<double>::infinity();
        if (d1 > 0.0 && d2 > 0.0 && std::fabs(dphase(1.5 * R)) >= d1 &&
            std::fabs(dphase(-1.5 * R)) >= d2)
            ibp = 4.0 * std::exp(-eps * R * R) * (1.0 / d1 + 1.0 / d2);
        if (std::min(g, ibp) < target) return R;
        R *= 1.25;
    }
    return 1e5;
}

/// Extent of the region where the phase gradient can vanish, padded: initial
/// lower bound for every truncation radius.
inline double stationary_extent_line(const Poly1& dphase) {
    double ext = 1.0;
    for (double rt : dphase.real_roots_in(-1e3, 1e3, 1024))
        ext = std::max(ext, 1.5 * std::fabs(rt) + 1.0);
    return ext;
}

inline double stationary_extent_plane(const PolynomialSymbol& p, double t,
                                      const std::vector<double>& x) {
    double ext = 1.0;
    const double xn = norm2(x);
    for (const auto& w : sphere_net(2, 32)) {
        double hi = 1.0;
        auto dev = [&](double rad) {
            std::vector<double> xi{w[0] * rad, w[1] * rad};
            auto g = p.gradient(xi);
            g[0] = t * g[0] + x[0];
            g[1] = t * g[1] + x[1];
            return norm2(g);
        };
        while (hi < 1e4 && dev(hi) <= 2.0 * xn + 1.0) hi *= 2.0;
        ext = std::max(ext, 1.3 * hi);
    }
    return ext;
}

inline Poly1 radial_profile(const PolynomialSymbol& p);

/// Radius of the region carrying stationary-phase mass: the mollifier must
/// stay weak there at the top of the eps schedule or the extrapolation sees
/// an essential-singularity scale it cannot resolve.
inline double stationary_extent(const PolynomialSymbol& p, double t,
                                const std::vector<double>& x) {
    const int n = p.dimension();
    if (n == 1) return stationary_extent_line(line_phase(p, t, x[0]).derivative());
    if (n == 2) return stationary_extent_plane(p, t, x);
    auto prof = radial_profile(p).coefficients();
    for (auto& c : prof) c *= t;
    return stationary_extent_line(Poly1{std::move(prof)}.derivative());
}

struct Box {
    double x1lo, x1hi, x2lo, x2hi;
};

/// Iterated integral of amp(xi1, xi2) e^{i(tP + <x, xi>)} over a box.
/// The inner dimension uses Filon panels on the exact collapsed polynomial
/// phase. The outer dimension extracts the known phase along the box center
/// line, so the outer amplitude G(s) e^{-i psi(s)} is slowly varying and the
/// same Filon machinery applies. With tail_correction_R > 0 (symmetric boxes
/// only) integration-by-parts corrections extend both dimensions to the full
/// plane.
template <class Amp2>
QuadResult box_integral(const PolynomialSymbol& p, double t, const std::vector<double>& x,
                        Amp2&& amp, const Box& box, double tol, EvalBudget& budget,
                        const std::vector<double>& radial_features,
                        double tail_correction_R = 0.0) {
    QuadResult out;
    if (!(box.x1hi > box.x1lo) || !(box.x2hi > box.x2lo)) {
        out.converged = true;
        return out;
    }
    const bool corrected = tail_correction_R > 0.0;
    const double width2 = box.x2hi - box.x2lo;
    const double tol_outer = 0.5 * tol;
    const double tol_inner = 0.25 * tol / width2;

    bool inner_ok = true;
    auto line_value = [&](double s) -> Complex {
        const Poly1 phase = collapse_phase(p, t, x[0], x[1], s);
        const Poly1 dphase = phase.derivative();
        std::vector<double> breaks;
        if (box.x1lo < 0.0 && box.x1hi > 0.0) breaks.push_back(0.0);
        for (double rt : dphase.real_roots_in(box.x1lo, box.x1hi, 160)) breaks.push_back(rt);
        for (double f : radial_features) {
            const double d = f * f - s * s;
            if (d > 0.0) {
                const double cxy = std::sqrt(d);
                if (-cxy > box.x1lo && -cxy < box.x1hi) breaks.push_back(-cxy);
                if (cxy > box.x1lo && cxy < box.x1hi) breaks.push_back(cxy);
            }
        }
        auto g1 = [&](double u) { return amp(u, s); };
        QuadResult inner = oscillatory_line_integral(phase, g1, box.x1lo, box.x1hi, tol_inner,
                                                     budget, breaks);
        if (corrected) {
            for (int side : {+1, -1}) {
                const auto c = ibp_tail_correction(phase, dphase, g1, box.x1hi, side);
                if (c.valid) {
                    inner.value += c.value;
                    inner.error += c.remainder_est;
                } else {
                    // Tiny Gaussian-side allowance; lines whose ends sit near
                    // stationary points carry an honest penalty instead.
                    inner.error += std::abs(Complex(g1(side * box.x1hi))) * 1.0;
                }
            }
        }
        inner_ok = inner_ok && inner.converged;
        return inner.value;
    };

    // Outer phase along the box-center vertical line.
    const double c1 = 0.5 * (box.x1lo + box.x1hi);
    const Poly1 psi = axis_phase(p, t, x[0], x[1], c1);
    const Poly1 dpsi = psi.derivative();
    auto gtilde = [&](double s) -> Complex {
        const double ph = psi(s);
        return line_value(s) * Complex{std::cos(ph), -std::sin(ph)};
    };

    std::vector<double> obreaks = symmetric_feature_breaks(radial_features, box.x2lo, box.x2hi);
    if (box.x2lo < 0.0 && box.x2hi > 0.0) obreaks.push_back(0.0);
    for (double rt : dpsi.real_roots_in(box.x2lo, box.x2hi, 160)) obreaks.push_back(rt);
    QuadResult outer = oscillatory_line_integral(psi, gtilde, box.x2lo, box.x2hi, tol_outer,
                                                 budget, obreaks, width2 / 24.0);
    if (corrected) {
        auto gfull = [&](double s) -> Complex {
            // Full outer integrand amplitude relative to psi.
            return gtilde(s);
        };
        for (int side : {+1, -1}) {
            const auto c = ibp_tail_correction(psi, dpsi, gfull, box.x2hi, side);
            if (c.valid) {
                outer.value += c.value;
                outer.error += c.remainder_est;
            } else {
                outer.error += std::abs(gtilde(side * box.x2hi)) * 1.0;
            }
        }
    }

    out.value = outer.value;
    out.error = outer.error + 0.25 * tol; // certified inner-tolerance mass
    out.evals = budget.used;
    out.converged = outer.converged && inner_ok;
    return out;
}

inline bool is_radial(const PolynomialSymbol& p) {
    const int n = p.dimension();
    if (n == 1) return true;
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto uniform = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 32; ++trial) {
        std::vector<double> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
        double nu = 0.0, nv = 0.0;
        for (int i = 0; i < n; ++i) {
            u[static_cast<std::size_t>(i)] = 2.0 * uniform() - 1.0;
            v[static_cast<std::size_t>(i)] = 2.0 * uniform() - 1.0;
            nu += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
            nv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
        nu = std::sqrt(nu);
        nv = std::sqrt(nv);
        if (nu < 1e-6 || nv < 1e-6) continue;
        const double rho = 0.5 + 2.5 * uniform();
        for (int i = 0; i < n; ++i) {
            u[static_cast<std::size_t>(i)] *= rho / nu;
            v[static_cast<std::size_t>(i)] *= rho / nv;
        }
        const double a = p.eval(u), b = p.eval(v);
        if (std::fabs(a - b) > 1e-9 * (std::fabs(a) + std::fabs(b) + 1.0)) return false;
    }
    return true;
}

/// Radial profile of P along the first axis, as a polynomial in the radius.
inline Poly1 radial_profile(const PolynomialSymbol& p) {
    PolynomialSymbol q = p;
    while (q.dimension() > 1) q = q.substitute(q.dimension() - 1, 0.0);
    return q.to_poly1();
}

inline void check_eval_inputs(const PolynomialSymbol& p, double t, const std::vector<double>& x) {
    if (t == 0.0)
        throw std::invalid_argument("oscillatory integral: t = 0 is a delta, not evaluable");
    if (static_cast<int>(x.size()) != p.dimension())
        throw std::invalid_argument("oscillatory integral: x dimension mismatch");
    if (p.is_zero()) throw std::invalid_argument("oscillatory integral: zero symbol");
    if (p.dimension() > 3)
        throw std::invalid_argument("oscillatory integral: n <= 3 supported");
}

/// Shared mollified evaluator. The plan (if ok) pins the truncation radius
/// across the whole eps schedule; otherwise each level falls back to a
/// Gaussian-tail radius of its own.
template <class Weight1, class Weight2>
QuadResult mollified_core(const PolynomialSymbol& p, double t, const std::vector<double>& x,
                          double eps, double tol, EvalBudget& budget, Weight1&& w1, Weight2&& w2,
                          const std::vector<double>& features, const TruncationPlan& plan) {
    const int n = p.dimension();
    const double target = 0.1 * tol;
    if (n == 1) {
        const Poly1 phase = line_phase(p, t, x[0]);
        const Poly1 dphase = phase.derivative();
        const double R = plan.ok
                             ? plan.R
                             : fallback_radius_line(dphase, eps, target,
                                                    stationary_extent_line(dphase));
        auto g = [&](double xi) { return std::exp(-eps * xi * xi) * w1(xi); };
        auto breaks = symmetric_feature_breaks(features, -R, R);
        breaks.push_back(0.0); // mollifier center: amplitude concentration point
        for (double rt : dphase.real_roots_in(-R, R, 512)) breaks.push_back(rt);
        QuadResult res = oscillatory_line_integral(phase, g, -R, R, tol, budget, breaks);
        if (plan.ok) {
            for (int side : {+1, -1}) {
                const auto c = ibp_tail_correction(phase, dphase, g, R, side);
                if (c.valid) {
                    res.value += c.value;
                    res.error += c.remainder_est;
                } else {
                    res.error += gauss_tail_1d(eps, R);
                }
            }
        } else {
            res.error += gauss_tail_1d(eps, R);
        }
        return res;
    }
    if (n == 2) {
        double R = plan.R;
        if (!plan.ok) {
            // Per-level Gaussian box.
            R = std::max(stationary_extent_plane(p, t, x), 1.0);
            while (R <= 300.0 &&
                   2.0 * gauss_tail_1d(eps, R) * std::sqrt(M_PI / eps) >= target)
                R *= 1.2;
        }
        auto amp = [&](double a, double b) { return std::exp(-eps * (a * a + b * b)) * w2(a, b); };
        QuadResult res = box_integral(p, t, x, amp, Box{-R, R, -R, R}, tol, budget, features,
                                      plan.ok ? R : 0.0);
        if (!plan.ok) res.error += 2.0 * gauss_tail_1d(eps, R) * std::sqrt(M_PI / eps);
        return res;
    }
    // n == 3: radial reduction at x = 0.
    if (norm2(x) > 1e-12 || !is_radial(p))
        throw std::invalid_argument("mollified integral: n = 3 supported only for radial P at x = 0");
    auto prof = radial_profile(p).coefficients();
    for (auto& c : prof) c *= t;
    const Poly1 phase{std::move(prof)};
    const Poly1 dphase = phase.derivative();
    const double R = plan.ok ? plan.R
                             : fallback_radius_line(dphase, eps, target,
                                                    stationary_extent_line(dphase));
    auto g = [&](double rho) {
        return rho <= 0.0 ? 0.0 : 4.0 * M_PI * rho * rho * std::exp(-eps * rho * rho) * w1(rho);
    };
    std::vector<double> breaks;
    for (double rt : dphase.real_roots_in(0.0, R, 512)) breaks.push_back(rt);
    QuadResult res = oscillatory_line_integral(phase, g, 0.0, R, tol, budget, breaks);
    if (plan.ok) {
        const auto c = ibp_tail_correction(phase, dphase, g, R, +1);
        if (c.valid) {
            res.value += c.value;
            res.error += c.remainder_est;
        } else {
            res.error += 4.0 * M_PI * R * R * gauss_tail_1d(eps, R);
        }
    } else {
        res.error += 4.0 * M_PI * R * R * gauss_tail_1d(eps, R);
    }
    return res;
}

/// Build the eps-independent truncation plan using the undamped weight (the
/// worst case over the schedule).
template <class Weight1, class Weight2>
TruncationPlan make_plan(const PolynomialSymbol& p, double t, const std::vector<double>& x,
                         double tol, Weight1&& w1, Weight2&& w2) {
    const int n = p.dimension();
    const double target = 0.05 * tol;
    if (n == 1) {
        const Poly1 phase = line_phase(p, t, x[0]);
        const Poly1 dphase = phase.derivative();
        return plan_line_truncation(phase, dphase, w1, target, stationary_extent_line(dphase));
    }
    if (n == 2) {
        // Inner criterion along the center line, outer criterion along the
        // vertical axis; one shared radius.
        const Poly1 inner = collapse_phase(p, t, x[0], x[1], 0.0);
        const Poly1 dinner = inner.derivative();
        const Poly1 outer = axis_phase(p, t, x[0], x[1], 0.0);
        const Poly1 douter = outer.derivative();
        auto wline = [&](double u) { return w2(u, 0.0); };
        auto waxis = [&](double s) { return w2(0.0, s); };
        const double ext = std::max(stationary_extent_plane(p, t, x),
                                    std::max(stationary_extent_line(dinner),
                                             stationary_extent_line(douter)));
        TruncationPlan a = plan_line_truncation(inner, dinner, wline, target, ext);
        if (!a.ok) return a;
        TruncationPlan b = plan_line_truncation(outer, douter, waxis, target, a.R);
        if (!b.ok) return b;
        a.R = std::max(a.R, b.R);
        return a;
    }
    // n == 3 radial.
    if (norm2(x) > 1e-12 || !is_radial(p)) return {};
    auto prof = radial_profile(p).coefficients();
    for (auto& c : prof) c *= t;
    const Poly1 phase{std::move(prof)};
    const Poly1 dphase = phase.derivative();
    auto g = [&](double rho) { return 4.0 * M_PI * rho * rho * w1(rho); };
    return plan_line_truncation(phase, dphase, g, target, stationary_extent_line(dphase), true);
}

} // namespace osc_detail

/// Single mollified evaluation: integral of e^{i(tP + <x,xi>)} e^{-eps|xi|^2}
/// over a truncation region whose neglected tail stays below tol/10.
inline QuadResult mollified_integral(const PolynomialSymbol& p, double t,
                                     const std::vector<double>& x, double eps, double tol,
                                     EvalBudget* budget = nullptr) {
    osc_detail::check_eval_inputs(p, t, x);
    if (!(eps > 0.0)) throw std::invalid_argument("mollified_integral: eps must be positive");
    EvalBudget local;
    EvalBudget& bud = budget ? *budget : local;
    auto unit1 = [](double) { return 1.0; };
    auto unit2 = [](double, double) { return 1.0; };
    const auto plan = osc_detail::make_plan(p, t, x, tol, unit1, unit2);
    return osc_detail::mollified_core(p, t, x, eps, tol, bud, unit1, unit2, {}, plan);
}

namespace osc_detail {

template <class Weight1, class Weight2>
EvalResult richardson_limit(const PolynomialSymbol& p, double t, const std::vector<double>& x,
                            const MollifierSchedule& schedule, double tol, EvalBudget& budget,
                            Weight1&& w1, Weight2&& w2, const std::vector<double>& features) {
    schedule.validate();
    EvalResult out;
    out.method = EvalMethod::mollified;
    const double ext = stationary_extent(p, t, x);
    const double eps_scale = std::min({1.0, std::fabs(t), 4.0 / (ext * ext)});

    const TruncationPlan plan = make_plan(p, t, x, tol, w1, w2);

    std::vector<std::vector<Complex>> tableau;
    std::vector<double> increments;
    double quad_err = 0.0;
    Complex best{0.0, 0.0};
    double best_inc = std::numeric_limits<double>::infinity();
    bool oscillating = false;
    bool budget_out = false;
    std::size_t last_level_cost = 0;

    for (int j = 0; j < schedule.depth; ++j) {
        if (j > 0 && budget.used + (3 * last_level_cost) / 2 > budget.limit) {
            budget_out = true;
            break;
        }
        const std::size_t used_before = budget.used;
        const double eps = schedule.eps0 * eps_scale * std::pow(schedule.ratio, j);
        const QuadResult q = mollified_core(p, t, x, eps, tol / 20.0, budget, w1, w2, features,
                                            plan);
        last_level_cost = budget.used - used_before;
        out.diagnostics.eps_used.push_back(eps);
        quad_err = q.error;
        if (!q.converged && budget.exhausted()) budget_out = true;

        std::vector<Complex> row(static_cast<std::size_t>(j) + 1);
        row[0] = q.value;
        const int kmax = std::min(j, schedule.richardson_order);
        for (int k = 1; k <= kmax; ++k) {
            const double denom = std::pow(1.0 / schedule.ratio, k) - 1.0;
            const auto& prev_row = tableau.back();
            const Complex up = prev_row[static_cast<std::size_t>(
                std::min<int>(k - 1, static_cast<int>(prev_row.size()) - 1))];
            row[static_cast<std::size_t>(k)] =
                row[static_cast<std::size_t>(k) - 1] +
                (row[static_cast<std::size_t>(k) - 1] - up) / denom;
        }
        row.resize(static_cast<std::size_t>(kmax) + 1);
        tableau.push_back(row);
        out.diagnostics.levels = j + 1;

        if (j >= 1) {
            const Complex cur = row.back();
            const Complex prev = tableau[static_cast<std::size_t>(j) - 1].back();
            const double inc = std::abs(cur - prev);
            increments.push_back(inc);
            if (inc < best_inc) {
                best_inc = inc;
                best = cur;
            }
            if (inc + quad_err < tol) {
                out.value = cur;
                out.abs_error_estimate = inc + quad_err;
                out.converged = !budget_out;
                out.diagnostics.quad_error = quad_err;
                out.diagnostics.evaluations = budget.used;
                if (!plan.ok) out.diagnostics.note = "per-level Gaussian truncation";
                return out;
            }
            const std::size_t ni = increments.size();
            if (ni >= 3 && increments[ni - 1] > increments[ni - 2] &&
                increments[ni - 2] > increments[ni - 3]) {
                oscillating = true;
                break;
            }
        }
        if (budget_out) break;
    }

    const bool fell_back = oscillating || budget_out;
    out.value = fell_back || tableau.empty() ? best : tableau.back().back();
    out.abs_error_estimate = increments.empty() ? quad_err : increments.back() + quad_err;
    if (fell_back) out.abs_error_estimate = best_inc + quad_err;
    out.converged = false;
    out.diagnostics.quad_error = quad_err;
    out.diagnostics.evaluations = budget.used;
    out.diagnostics.note = oscillating
                               ? "extrapolation increments non-monotone"
                               : (budget_out ? "evaluation budget exhausted" : "depth exhausted");
    return out;
}

} // namespace osc_detail

/// Richardson-extrapolated limit of the mollified integral: the reference
/// numerical definition of I(t, x).
inline EvalResult fundamental_solution(const PolynomialSymbol& p, double t,
                                       const std::vector<double>& x,
                                       const MollifierSchedule& schedule, double tol,
                                       EvalBudget* budget = nullptr) {
    osc_detail::check_eval_inputs(p, t, x);
    EvalBudget local;
    EvalBudget& bud = budget ? *budget : local;
    auto unit1 = [](double) { return 1.0; };
    auto unit2 = [](double, double) { return 1.0; };
    return osc_detail::richardson_limit(p, t, x, schedule, tol, bud, unit1, unit2, {});
}

namespace osc_detail {

/// Integral of amp(xi) e^{i(tP + <x, xi>)} over a line segment (n = 1).
template <class Amp>
QuadResult line_integral(const PolynomialSymbol& p, double t, double x, Amp&& amp, double lo,
                         double hi, double tol, EvalBudget& budget,
                         const std::vector<double>& features) {
    const Poly1 phase = line_phase(p, t, x);
    const Poly1 dphase = phase.derivative();
    auto breaks = symmetric_feature_breaks(features, lo, hi);
    for (double rt : dphase.real_roots_in(lo, hi, 512)) breaks.push_back(rt);
    return oscillatory_line_integral(phase, amp, lo, hi, tol, budget, breaks);
}

} // namespace osc_detail

/// Low/high frequency split: I2 integrates over the compact set |xi| <= L
/// with the smooth low cutoff, I1 carries the complementary cutoff inside
/// the mollified evaluator. I1 + I2 reproduces I within the error budgets.
inline std::pair<EvalResult, EvalResult> split_I1_I2(const PolynomialSymbol& p, double t,
                                                     const std::vector<double>& x, double L,
                                                     double tol, EvalBudget* budget = nullptr) {
    osc_detail::check_eval_inputs(p, t, x);
    if (!(L > 0.0)) throw std::invalid_argument("split_I1_I2: L must be positive");
    EvalBudget local;
    EvalBudget& bud = budget ? *budget : local;
    const int n = p.dimension();
    if (n > 2) throw std::invalid_argument("split_I1_I2: n <= 2 supported");

    EvalResult i2;
    i2.method = EvalMethod::partition_guided;
    const std::vector<double> feats{0.5 * L, L};
    if (n == 1) {
        auto amp = [&](double xi) { return bump(std::fabs(xi) / L); };
        const QuadResult q = osc_detail::line_integral(p, t, x[0], amp, -L, L, tol / 4.0, bud,
                                                       feats);
        i2.value = q.value;
        i2.abs_error_estimate = q.error;
        i2.converged = q.converged;
    } else {
        auto amp = [&](double a, double b) { return bump(std::hypot(a, b) / L); };
        const QuadResult q = osc_detail::box_integral(p, t, x, amp, {-L, L, -L, L}, tol / 4.0,
                                                      bud, feats);
        i2.value = q.value;
        i2.abs_error_estimate = q.error;
        i2.converged = q.converged;
    }
    i2.diagnostics.evaluations = bud.used;

    auto w1 = [&](double xi) { return 1.0 - bump(std::fabs(xi) / L); };
    auto w2 = [&](double a, double b) { return 1.0 - bump(std::hypot(a, b) / L); };
    MollifierSchedule sched;
    EvalResult i1 = osc_detail::richardson_limit(p, t, x, sched, tol, bud, w1, w2, feats);
    return {i1, i2};
}

/// Partition-guided evaluation: I2 plus the three cutoff pieces of I1
/// integrated on their own supports; the unbounded phi3 piece is truncated
/// by doubling shells until the increments fall below tol/4.
inline EvalResult partition_guided_eval(const PolynomialSymbol& p, double t,
                                        const std::vector<double>& x,
                                        const SpectralReport& spectral, double tol,
                                        EvalBudget* budget = nullptr) {
    osc_detail::check_eval_inputs(p, t, x);
    if (!(spectral.L > 0.0))
        throw std::invalid_argument("partition_guided_eval: spectral report lacks L > 0");
    const int n = p.dimension();
    if (n > 2) throw std::invalid_argument("partition_guided_eval: n <= 2 supported");

    EvalBudget local;
    EvalBudget& bud = budget ? *budget : local;
    const double L = spectral.L;
    const int m = p.degree();
    RegionContext ctx(t, x, L, m);
    const double xt = ctx.x_over_t_norm();

    EvalResult out;
    out.method = EvalMethod::partition_guided;

    auto w_high1 = [&](double xi) { return 1.0 - bump(std::fabs(xi) / L); };
    auto w_high2 = [&](double a, double b) { return 1.0 - bump(std::hypot(a, b) / L); };
    const double tfac = std::pow(std::fabs(t), 1.0 / m);
    auto phi1r = [&](double rad) { return bump(rad * tfac); };

    const Poly1 dpoly = n == 1 ? p.to_poly1().derivative() : Poly1{};
    auto phi2_1d = [&](double xi) {
        if (xt < kXOverTZero) return 0.0;
        const double dev = std::fabs(dpoly(xi) + x[0] / t);
        return (1.0 - phi1r(std::fabs(xi))) * bump(dev / xt);
    };
    auto phi2_2d = [&](double a, double b) {
        if (xt < kXOverTZero) return 0.0;
        std::vector<double> xi{a, b};
        auto g = p.gradient(xi);
        g[0] += x[0] / t;
        g[1] += x[1] / t;
        return (1.0 - phi1r(std::hypot(a, b))) * bump(norm2(g) / xt);
    };

    double err = 0.0;
    bool conv = true;
    Complex total{0.0, 0.0};
    std::string note;

    // I2: low-frequency ball.
    {
        const std::vector<double> feats{0.5 * L, L};
        QuadResult q;
        if (n == 1) {
            auto amp = [&](double xi) { return bump(std::fabs(xi) / L); };
            q = osc_detail::line_integral(p, t, x[0], amp, -L, L, tol / 5.0, bud, feats);
        } else {
            auto amp = [&](double a, double b) { return bump(std::hypot(a, b) / L); };
            q = osc_detail::box_integral(p, t, x, amp, {-L, L, -L, L}, tol / 5.0, bud, feats);
        }
        total += q.value;
        err += q.error;
        conv = conv && q.converged;
    }

    const double r1 = ctx.low_freq_radius;
    // phi1 piece: support [L/2, |t|^{-1/m}].
    if (r1 > 0.5 * L) {
        const std::vector<double> feats{0.5 * L, L, 0.5 * r1, r1};
        QuadResult q;
        if (n == 1) {
            auto amp = [&](double xi) { return w_high1(xi) * phi1r(std::fabs(xi)); };
            q = osc_detail::line_integral(p, t, x[0], amp, -r1, r1, tol / 5.0, bud, feats);
        } else {
            auto amp = [&](double a, double b) {
                return w_high2(a, b) * phi1r(std::hypot(a, b));
            };
            q = osc_detail::box_integral(p, t, x, amp, {-r1, r1, -r1, r1}, tol / 5.0, bud,
                                         feats);
        }
        total += q.value;
        err += q.error;
        conv = conv && q.converged;
    }

    // phi2 piece: bounded by ellipticity; scan for the support radius.
    double r2 = 0.0;
    if (xt >= kXOverTZero) {
        const auto net = sphere_net(n, n == 1 ? 2 : 32);
        for (const auto& w : net) {
            double hi = std::max({ctx.r, L, 1.0});
            auto dev = [&](double rad) {
                std::vector<double> xi(w.size());
                for (std::size_t i = 0; i < w.size(); ++i) xi[i] = w[i] * rad;
                auto g = p.gradient(xi);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += x[i] / t;
                return norm2(g);
            };
            while (hi < 1e4 && dev(hi) <= xt) hi *= 1.5;
            for (int scan = 0; scan <= 64; ++scan) {
                const double rad = hi * scan / 64.0;
                if (rad > r2 && dev(rad) <= xt) r2 = rad;
            }
        }
        r2 *= 1.15;
    }
    if (r2 > 0.0) {
        const std::vector<double> feats{0.5 * L, L, 0.5 * r1, r1, ctx.r};
        QuadResult q;
        if (n == 1) {
            auto amp = [&](double xi) { return w_high1(xi) * phi2_1d(xi); };
            q = osc_detail::line_integral(p, t, x[0], amp, -r2, r2, tol / 5.0, bud, feats);
        } else {
            auto amp = [&](double a, double b) { return w_high2(a, b) * phi2_2d(a, b); };
            q = osc_detail::box_integral(p, t, x, amp, {-r2, r2, -r2, r2}, tol / 5.0, bud,
                                         feats);
        }
        total += q.value;
        err += q.error;
        conv = conv && q.converged;
    }

    // phi3 piece: complement, truncated by doubling shells.
    {
        auto amp1 = [&](double xi) {
            const double p1 = phi1r(std::fabs(xi));
            return w_high1(xi) * (1.0 - p1 - phi2_1d(xi));
        };
        auto amp2 = [&](double a, double b) {
            const double p1 = phi1r(std::hypot(a, b));
            return w_high2(a, b) * (1.0 - p1 - phi2_2d(a, b));
        };
        const std::vector<double> feats{0.5 * L, L, 0.5 * r1, r1, ctx.r, r2};
        double R = 1.3 * std::max({r1, r2, 2.0 * L, 2.0});
        QuadResult q0;
        if (n == 1)
            q0 = osc_detail::line_integral(p, t, x[0], amp1, -R, R, tol / 5.0, bud, feats);
        else
            q0 = osc_detail::box_integral(p, t, x, amp2, {-R, R, -R, R}, tol / 5.0, bud, feats);
        Complex acc = q0.value;
        err += q0.error;
        conv = conv && q0.converged;

        int calm = 0;
        double tail_est = tol;
        for (int dbl = 0; dbl < 8 && calm < 2; ++dbl) {
            const double R2 = 2.0 * R;
            QuadResult shell;
            if (n == 1) {
                const QuadResult s1 = osc_detail::line_integral(p, t, x[0], amp1, R, R2,
                                                                tol / 10.0, bud, feats);
                const QuadResult s2 = osc_detail::line_integral(p, t, x[0], amp1, -R2, -R,
                                                                tol / 10.0, bud, feats);
                shell.value = s1.value + s2.value;
                shell.error = s1.error + s2.error;
                shell.converged = s1.converged && s2.converged;
            } else {
                const osc_detail::Box strips[4] = {{R, R2, -R2, R2},
                                                   {-R2, -R, -R2, R2},
                                                   {-R, R, R, R2},
                                                   {-R, R, -R2, -R}};
                shell.converged = true;
                for (const auto& b : strips) {
                    const QuadResult s = osc_detail::box_integral(p, t, x, amp2, b, tol / 20.0,
                                                                  bud, feats);
                    shell.value += s.value;
                    shell.error += s.error;
                    shell.converged = shell.converged && s.converged;
                }
            }
            acc += shell.value;
            err += shell.error;
            conv = conv && shell.converged;
            tail_est = std::abs(shell.value);
            calm = tail_est < tol / 4.0 ? calm + 1 : 0;
            R = R2;
            if (bud.exhausted()) break;
        }
        if (calm < 2) {
            conv = false;
            note = "phi3 tail did not settle within the shell budget";
        }
        err += tail_est;
        total += acc;
    }

    out.value = total;
    out.abs_error_estimate = err;
    out.converged = conv && !bud.exhausted();
    out.diagnostics.evaluations = bud.used;
    out.diagnostics.quad_error = err;
    out.diagnostics.note = note;
    return out;
}

} // namespace hos
