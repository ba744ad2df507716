#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "hoslab/symbol.hpp"

namespace hos {

using Complex = std::complex<double>;

struct QuadResult {
    Complex value{0.0, 0.0};
    double error = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

/// Shared integrand-evaluation budget. Charged by every quadrature routine;
/// once exhausted, refinement stops and results are flagged unconverged.
struct EvalBudget {
    std::size_t limit = 10'000'000;
    std::size_t used = 0;

    bool charge(std::size_t k) {
        used += k;
        return used <= limit;
    }
    bool exhausted() const { return used > limit; }
};

namespace quad_detail {

// 16-point Gauss-Legendre rule on [-1, 1].
inline constexpr int kN = 16;
inline constexpr double kGlNode[kN] = {
    -0.9894009349916499325961542, -0.9445750230732325760779884,
    -0.8656312023878317438804679, -0.7554044083550030338951012,
    -0.6178762444026437484466718, -0.4580167776572273863424194,
    -0.2816035507792589132304605, -0.0950125098376374401853193,
    0.0950125098376374401853193,  0.2816035507792589132304605,
    0.4580167776572273863424194,  0.6178762444026437484466718,
    0.7554044083550030338951012,  0.8656312023878317438804679,
    0.9445750230732325760779884,  0.9894009349916499325961542};
inline constexpr double kGlWeight[kN] = {
    0.0271524594117540948517806, 0.0622535239386478928628438,
    0.0951585116824927848099251, 0.1246289712555338720524763,
    0.1495959888165767320815017, 0.1691565193950025381893121,
    0.1826034150449235888667637, 0.1894506104550684962853967,
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

/// Legendre polynomial values P_j(u_k) for j, k < 16, filled on first use.
inline const double* legendre_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kN * kN);
        for (int k = 0; k < kN; ++k) {
            const double u = kGlNode[k];
            double pm1 = 1.0, p0 = u;
            t[0 * kN + k] = 1.0;
            t[1 * kN + k] = u;
            for (int j = 2; j < kN; ++j) {
                const double p = ((2.0 * j - 1.0) * u * p0 - (j - 1.0) * pm1) / j;
                t[static_cast<std::size_t>(j) * kN + k] = p;
                pm1 = p0;
                p0 = p;
            }
        }
        return t;
    }();
    return table.data();
}

/// Spherical Bessel j_0..j_nmax at x >= 0. Upward recurrence when safe,
/// Miller's downward recurrence otherwise.
inline void sph_bessel(int nmax, double x, double* out) {
    if (x < 1e-8) {
        // Leading series terms; double factorial denominator.
        double dfact = 1.0;
        for (int n = 0; n <= nmax; ++n) {
            if (n > 0) dfact *= (2.0 * n + 1.0);
            const double xn = (n == 0) ? 1.0 : std::pow(x, n);
            out[n] = xn / dfact * (1.0 - x * x / (2.0 * (2.0 * n + 3.0)));
        }
        return;
    }
    const double j0 = std::sin(x) / x;
    if (x >= nmax + 1.0) {
        out[0] = j0;
        if (nmax >= 1) out[1] = std::sin(x) / (x * x) - std::cos(x) / x;
        for (int n = 1; n < nmax; ++n)
            out[n + 1] = (2.0 * n + 1.0) / x * out[n] - out[n - 1];
        return;
    }
    const int start = nmax + 16 + static_cast<int>(x);
    double jp = 0.0, jc = 1e-280;
    std::vector<double> tmp(static_cast<std::size_t>(nmax) + 1, 0.0);
    for (int n = start; n >= 1; --n) {
        const double jm = (2.0 * n + 1.0) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (n - 1 <= nmax) tmp[static_cast<std::size_t>(n - 1)] = jc;
        if (std::fabs(jc) > 1e250) {
            jp /= 1e250;
            jc /= 1e250;
            for (auto& v : tmp) v /= 1e250;
        }
    }
    const double scale = j0 / jc;
    for (int n = 0; n <= nmax; ++n) out[n] = tmp[static_cast<std::size_t>(n)] * scale;
}

/// Moments M_j(w) = integral over [-1,1] of P_j(u) e^{iwu} du = 2 i^j j_j(w),
/// extended to negative w by parity j_j(-w) = (-1)^j j_j(w).
inline void legendre_moments(double w, Complex* out) {
    double js[kN];
    sph_bessel(kN - 1, std::fabs(w), js);
    const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int j = 0; j < kN; ++j) {
        double v = 2.0 * js[j];
        if (w < 0.0 && (j % 2 == 1)) v = -v;
        out[j] = i_pow[j % 4] * v;
    }
}

/// Coefficients of phase(c + h u) as a polynomial in u: Taylor shift of the
/// phase polynomial, evaluated exactly so the deviation from the linear part
/// never suffers cancellation against a large absolute phase.
inline std::vector<double> taylor_at(const Poly1& p, double c, double h) {
    const auto& src = p.coefficients();
    std::vector<double> a(src);
    const int deg = static_cast<int>(a.size()) - 1;
    if (deg < 0) return {0.0};
    // Horner-style shift: repeated synthetic division by (x - c).
    for (int i = 0; i < deg; ++i)
        for (int j = deg - 1; j >= i; --j)
            a[static_cast<std::size_t>(j)] += c * a[static_cast<std::size_t>(j) + 1];
    double hp = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] *= hp;
        hp *= h;
    }
    return a;
}

struct Panel {
    double a = 0.0, b = 0.0;
    Complex value{0.0, 0.0};
    double error = 0.0;
    bool resolved = true; // false: phase curvature bound exceeded, must split
};

} // namespace quad_detail

/// Oscillatory line integral of g(x) e^{i phase(x)} over [a, b] for a
/// polynomial phase. Each panel linearizes the phase about its midpoint; the
/// residual curvature enters the smooth factor and the linear part is
/// integrated exactly against a Legendre expansion (Filon-type rule), so the
/// panel width is limited by phase curvature, not by the oscillation count.
/// Panels whose curvature bound exceeds ~0.8 rad are split before their
/// value is trusted. Refinement is worst-panel-first until the accumulated
/// error estimate drops below tol_abs or the budget runs out.
template <class Amp>
QuadResult oscillatory_line_integral(const Poly1& phase, Amp&& g, double a, double b,
                                     double tol_abs, EvalBudget& budget,
                                     const std::vector<double>& breakpoints = {},
                                     double max_width = std::numeric_limits<double>::infinity()) {
    using namespace quad_detail;
    QuadResult res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }

    const double* ptab = legendre_table();

    auto compute = [&](double pa, double pb, Panel& out) {
        const double c = 0.5 * (pa + pb);
        const double h = 0.5 * (pb - pa);
        out.a = pa;
        out.b = pb;
        const auto tc = taylor_at(phase, c, h);
        const double phi_c = tc.empty() ? 0.0 : tc[0];
        const double w = tc.size() > 1 ? tc[1] : 0.0;
        double curve = 0.0;
        for (std::size_t k = 2; k < tc.size(); ++k) curve += std::fabs(tc[k]);
        if (curve > 0.8 && h > 1e-14 * (std::fabs(c) + 1.0)) {
            // Curvature exceeds the linearization cap. Instead of a value,
            // report the rigorous magnitude bound as the panel error; the
            // worst-first refinement splits it if that mass matters. Callers
            // must supply breakpoints at amplitude concentration points so
            // the endpoint-inclusive sampling cannot miss a hump.
            budget.charge(9);
            double amp_max = 0.0;
            for (int k = -4; k <= 4; ++k)
                amp_max = std::max(amp_max, std::abs(Complex(g(c + 0.25 * h * k))));
            out.resolved = false;
            out.error = 1.5 * amp_max * 2.0 * h;
            out.value = Complex{0.0, 0.0};
            return;
        }
        out.resolved = true;

        Complex hk[kN];
        budget.charge(kN);
        for (int k = 0; k < kN; ++k) {
            const double u = kGlNode[k];
            double delta = 0.0;
            for (std::size_t j = tc.size(); j-- > 2;) delta = delta * u + tc[j];
            delta *= u * u;
            const Complex gv = g(c + h * u);
            hk[k] = gv * Complex{std::cos(delta), std::sin(delta)};
        }
        Complex coef[kN];
        for (int j = 0; j < kN; ++j) {
            Complex s{0.0, 0.0};
            for (int k = 0; k < kN; ++k) s += kGlWeight[k] * ptab[j * kN + k] * hk[k];
            coef[j] = s * ((2.0 * j + 1.0) / 2.0);
        }
        Complex mom[kN];
        legendre_moments(w, mom);
        Complex total{0.0, 0.0};
        double tail = 0.0;
        for (int j = 0; j < kN; ++j) {
            const Complex term = coef[j] * mom[j];
            total += term;
            if (j >= 8) tail += std::abs(term);
        }
        const double last = 2.0 * (std::abs(coef[kN - 2]) + std::abs(coef[kN - 1]));
        const Complex rot{std::cos(phi_c), std::sin(phi_c)};
        out.value = h * rot * total;
        out.error = h * (tail + last);
    };

    // Seed panels: supplied breakpoints plus a width cap.
    std::vector<double> cuts{a, b};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
        for (int k = 0; k < parts; ++k) {
            Panel p;
            compute(lo + (hi - lo) * k / parts, lo + (hi - lo) * (k + 1) / parts, p);
            panels.push_back(p);
        }
    }

    auto total_error = [&]() {
        double e = 0.0;
        for (const auto& p : panels) e += p.error;
        return e;
    };

    while (total_error() > tol_abs && !budget.exhausted()) {
        std::size_t worst = 0;
        double we = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (panels[i].error > we) {
                we = panels[i].error;
                worst = i;
            }
        }
        Panel p = panels[worst];
        if (p.b - p.a < 1e-14 * (std::fabs(p.a) + std::fabs(p.b) + 1.0)) break;
        Panel left, right;
        const double mid = 0.5 * (p.a + p.b);
        compute(p.a, mid, left);
        compute(mid, p.b, right);
        panels[worst] = left;
        panels.push_back(right);
    }

    Complex v{0.0, 0.0};
    for (const auto& p : panels) v += p.value;
    res.value = v;
    res.error = total_error();
    res.evals = budget.used;
    res.converged = res.error <= tol_abs && !budget.exhausted();
    return res;
}

/// Two-term integration-by-parts correction for the tail of
/// integral of g e^{i phase} beyond +-R (side = +1: [R, inf), -1: (-inf, -R]).
/// With u = g/(i phase'), v = u'/(i phase'):
///   right tail = e^{i phase(R)} (v - u)(R) + O(integral of |(v'/phase')'|),
///   left tail  = e^{i phase(-R)} (u - v)(-R) + same order.
/// The remainder estimate is the next term's boundary magnitude. Valid only
/// when phase' is bounded away from zero and growing beyond the cut.
struct TailCorrection {
    Complex value{0.0, 0.0};
    double remainder_est = 0.0;
    bool valid = false;
};

template <class Amp>
TailCorrection ibp_tail_correction(const Poly1& phase, const Poly1& dphase, Amp&& g, double R,
                                   int side) {
    TailCorrection out;
    const double x0 = side * R;
    const double h = 0.02 * (1.0 + R);
    const double d0 = dphase(x0);
    const double dfar = dphase(side * (1.3 * R + 2.0 * h));
    // Monotone growth and a safe distance from stationary points.
    if (d0 == 0.0 || std::fabs(dfar) < std::fabs(d0) || (d0 > 0) != (dfar > 0)) return out;
    for (int k = -2; k <= 2; ++k)
        if (std::fabs(dphase(x0 + k * h)) < 0.5 * std::fabs(d0)) return out;

    Complex u[5];
    for (int k = 0; k < 5; ++k) {
        const double xk = x0 + (k - 2) * h;
        u[k] = Complex(g(xk)) / Complex{0.0, dphase(xk)};
    }
    const Complex up_m = (u[2] - u[0]) / (2.0 * h); // u' at x0 - h
    const Complex up_0 = (u[3] - u[1]) / (2.0 * h); // u' at x0
    const Complex up_p = (u[4] - u[2]) / (2.0 * h); // u' at x0 + h
    const Complex v_m = up_m / Complex{0.0, dphase(x0 - h)};
    const Complex v_0 = up_0 / Complex{0.0, d0};
    const Complex v_p = up_p / Complex{0.0, dphase(x0 + h)};
    const Complex vp_0 = (v_p - v_m) / (2.0 * h);
    const Complex w_0 = vp_0 / Complex{0.0, d0};

    const double phi0 = phase(x0);
    const Complex rot{std::cos(phi0), std::sin(phi0)};
    out.value = static_cast<double>(side) * (v_0 - u[2]) * rot;
    out.remainder_est = 2.0 * std::abs(w_0) + 1e-300;
    out.valid = true;
    return out;
}

namespace quad_detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule on [-1, 1].
inline constexpr int kGkN = 15;
inline constexpr double kGkNode[kGkN] = {
    -0.9914553711208126392069, -0.9491079123427585245262, -0.8648644233597690727897,
    -0.7415311855993944398639, -0.5860872354676911302941, -0.4058451513773971669066,
    -0.2077849550078984676007, 0.0,
    0.2077849550078984676007,  0.4058451513773971669066,  0.5860872354676911302941,
    0.7415311855993944398639,  0.8648644233597690727897,  0.9491079123427585245262,
    0.9914553711208126392069};
inline constexpr double kGkWeight[kGkN] = {
    0.0229353220105292249637, 0.0630920926299785532907, 0.1047900103222501838399,
    0.1406532597155259187452, 0.1690047266392679028266, 0.1903505780647854099133,
    0.2044329400752988924142, 0.2094821410847278280130,
    0.2044329400752988924142, 0.1903505780647854099133, 0.1690047266392679028266,
    0.1406532597155259187452, 0.1047900103222501838399, 0.0630920926299785532907,
    0.0229353220105292249637};
inline constexpr double kG7Weight[7] = {
    0.1294849661688696932706, 0.2797053914892766679015, 0.3818300505051189449504,
    0.4179591836734693877551, 0.3818300505051189449504, 0.2797053914892766679015,
    0.1294849661688696932706};

} // namespace quad_detail

/// Adaptive Gauss-Kronrod integration of a black-box complex integrand.
/// Used where no analytic phase is available (outer dimension of iterated
/// 2-D integrals). initial_panels seeds a uniform split so that broadband
/// oscillation is visible to the error estimator from the start.
template <class F>
QuadResult adaptive_complex_integral(F&& f, double a, double b, double tol_abs,
                                     EvalBudget& budget, int initial_panels = 8,
                                     const std::vector<double>& breakpoints = {}) {
    using namespace quad_detail;
    QuadResult res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }

    struct Piece {
        double a, b;
        Complex value;
        double error;
    };

    auto compute = [&](double pa, double pb) {
        Piece p{pa, pb, {0.0, 0.0}, 0.0};
        const double c = 0.5 * (pa + pb);
        const double h = 0.5 * (pb - pa);
        Complex gk{0.0, 0.0}, g7{0.0, 0.0};
        budget.charge(kGkN);
        for (int i = 0; i < kGkN; ++i) {
            const Complex fv = f(c + h * kGkNode[i]);
            gk += kGkWeight[i] * fv;
            if (i % 2 == 1) g7 += kG7Weight[i / 2] * fv;
        }
        p.value = h * gk;
        p.error = std::abs(h * (gk - g7));
        return p;
    };

    std::vector<double> cuts{a, b};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Piece> panels;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double share = (cuts[i + 1] - cuts[i]) / (b - a);
        const int parts = std::max(1, static_cast<int>(std::lround(initial_panels * share)));
        for (int k = 0; k < parts; ++k)
            panels.push_back(
                compute(cuts[i] + (cuts[i + 1] - cuts[i]) * k / parts,
                        cuts[i] + (cuts[i + 1] - cuts[i]) * (k + 1) / parts));
    }

    auto total_error = [&]() {
        double e = 0.0;
        for (const auto& p : panels) e += p.error;
        return e;
    };

    while (total_error() > tol_abs && !budget.exhausted()) {
        std::size_t worst = 0;
        double we = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i)
            if (panels[i].error > we) {
                we = panels[i].error;
                worst = i;
            }
        const Piece p = panels[worst];
        if (p.b - p.a < 1e-14 * (std::fabs(p.a) + std::fabs(p.b) + 1.0)) break;
        const double mid = 0.5 * (p.a + p.b);
        panels[worst] = compute(p.a, mid);
        panels.push_back(compute(mid, p.b));
    }

    Complex v{0.0, 0.0};
    for (const auto& p : panels) v += p.value;
    res.value = v;
    res.error = total_error();
    res.evals = budget.used;
    res.converged = res.error <= tol_abs && !budget.exhausted();
    return res;
}

} // namespace hos
