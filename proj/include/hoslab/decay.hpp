#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoslab/oscillatory.hpp"
#include "hoslab/spectral.hpp"
#include "hoslab/sphere.hpp"
#include "hoslab/symbol.hpp"

namespace hos {

enum class ScanTarget { I, I1 };

struct ScanPoint {
    double t = 0.0;
    std::vector<double> x_star;
    double amplitude = 0.0;
    double eval_error = 0.0;
    bool reliable = true;
};

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool valid = false;
};

/// Least-squares fit of log y against log t. Exact for synthetic power laws.
inline PowerLawFit fit_powerlaw(const std::vector<double>& ts, const std::vector<double>& ys) {
    PowerLawFit f;
    if (ts.size() != ys.size() || ts.size() < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0) || !(ys[i] > 0.0)) return f;
        const double lx = std::log(ts[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double k = static_cast<double>(ts.size());
    const double den = k * sxx - sx * sx;
    if (den == 0.0) return f;
    f.slope = (k * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / k;
    f.valid = true;
    return f;
}

struct DecayScan {
    std::string symbol_name;
    ScanTarget target = ScanTarget::I;
    int n = 1;
    int m = 2;
    double b = 1.0;
    double L = 1.0;
    double sigma = 0.5;
    std::vector<ScanPoint> small_t; // ascending t in (0, 1)
    std::vector<ScanPoint> large_t; // ascending t in [1, inf)
    PowerLawFit fit_small;
    PowerLawFit fit_large;
    double edge_slope_small = 0.0; // over the 3 smallest t
    double edge_slope_large = 0.0; // over the 3 largest t
    double c_small = 0.0;          // max over small regime of amplitude * t^sigma
    double c_large = 0.0;          // I1: max of amplitude * t^{n/2}; I: max amplitude (large regime)
    bool reliable = true;
};

struct ScanConfig {
    ScanTarget target = ScanTarget::I;
    int small_count = 12;
    double small_lo = 1e-3;
    double small_hi = 1.0; // exclusive
    int large_count = 8;
    double large_lo = 1.0;
    double large_hi = 100.0;
    double rel_tol = 2e-3;
    double abs_floor = 1e-5;
    bool x_search = true;
    std::size_t budget_per_eval = 10'000'000;
};

/// target(t, x, tol_abs) -> EvalResult
using TargetEvaluator =
    std::function<EvalResult(double, const std::vector<double>&, double)>;

inline TargetEvaluator make_target_evaluator(const PolynomialSymbol& p,
                                             const SpectralReport& spectral, ScanTarget target,
                                             std::size_t budget_per_eval) {
    if (target == ScanTarget::I) {
        return [&p, budget_per_eval](double t, const std::vector<double>& x, double tol) {
            EvalBudget bud{budget_per_eval, 0};
            return fundamental_solution(p, t, x, MollifierSchedule{}, tol, &bud);
        };
    }
    const double L = spectral.L;
    return [&p, L, budget_per_eval](double t, const std::vector<double>& x, double tol) {
        EvalBudget bud{budget_per_eval, 0};
        return split_I1_I2(p, t, x, L, tol, &bud).first;
    };
}

struct SupResult {
    std::vector<double> x_star;
    double amplitude = 0.0;
    double eval_error = 0.0;
    bool reliable = true;
    int probes = 0;
    int failures = 0;
};

/// Maximize |target(t, x)| over x: stationary-phase-image seeds
/// x = -t grad P(xi_g) on a radial-angular grid up to |xi_g| = 10 L, plus
/// x = 0, then golden-section refinement around the best seed.
inline SupResult sup_over_x(const PolynomialSymbol& p, double t, const TargetEvaluator& target,
                            const SpectralReport& spectral, const ScanConfig& cfg) {
    const int n = p.dimension();
    SupResult res;
    res.x_star.assign(static_cast<std::size_t>(n), 0.0);

    auto probe = [&](const std::vector<double>& x, double tol) {
        const EvalResult e = target(t, x, tol);
        ++res.probes;
        if (!e.converged) ++res.failures;
        return e;
    };

    // Scale from the origin.
    EvalResult at0 = probe(res.x_star, 1e-2);
    double best_amp = std::abs(at0.value);
    std::vector<double> best_x = res.x_star;
    double best_err = at0.abs_error_estimate;

    if (cfg.x_search && n <= 2) {
        const double coarse = std::max(0.03 * std::max(best_amp, 1e-3), 1e-4);
        const auto net = sphere_net(n, n == 1 ? 2 : 16);
        std::vector<std::vector<double>> seeds;
        for (const auto& w : net) {
            for (int k = 0; k < 8; ++k) {
                const double rho = 10.0 * spectral.L * std::pow(10.0, -1.4 + 1.4 * k / 7.0);
                std::vector<double> xi(w.size());
                for (std::size_t i = 0; i < w.size(); ++i) xi[i] = w[i] * rho;
                auto g = p.gradient(xi);
                std::vector<double> x(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) x[i] = -t * g[i];
                bool dup = false;
                for (const auto& s : seeds)
                    if (chord_dist(s, x) < 1e-6 * (1.0 + norm2(x))) {
                        dup = true;
                        break;
                    }
                if (!dup) seeds.push_back(std::move(x));
            }
        }
        for (const auto& x : seeds) {
            const EvalResult e = probe(x, coarse);
            const double a = std::abs(e.value);
            if (a > best_amp) {
                best_amp = a;
                best_x = x;
                best_err = e.abs_error_estimate;
            }
        }
        // Coordinate-wise golden-section refinement around the champion.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        const double fine = std::max(cfg.rel_tol * best_amp / 3.0, cfg.abs_floor);
        for (int d = 0; d < n; ++d) {
            double lo = best_x[static_cast<std::size_t>(d)];
            double hi = lo;
            const double span = std::max({std::fabs(lo), std::fabs(t) * std::pow(2.0 * spectral.L, p.degree() - 1), 1.0});
            lo -= 0.5 * span;
            hi += 0.5 * span;
            auto val = [&](double xd) {
                std::vector<double> x = best_x;
                x[static_cast<std::size_t>(d)] = xd;
                return std::abs(probe(x, fine).value);
            };
            double a = lo, b = hi;
            double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
            double f1 = val(c1), f2 = val(c2);
            for (int it = 0; it < 12; ++it) {
                if (f1 < f2) {
                    a = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = a + gr * (b - a);
                    f2 = val(c2);
                } else {
                    b = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = b - gr * (b - a);
                    f1 = val(c1);
                }
            }
            const double xd = f1 > f2 ? c1 : c2;
            const double fv = std::max(f1, f2);
            if (fv > best_amp) {
                best_amp = fv;
                best_x[static_cast<std::size_t>(d)] = xd;
            }
        }
    }

    // Final evaluation at the requested relative tolerance.
    const double tol = std::max(cfg.rel_tol * std::max(best_amp, 1e-12), cfg.abs_floor);
    const EvalResult fin = probe(best_x, tol);
    best_amp = std::abs(fin.value);
    best_err = fin.abs_error_estimate;
    res.amplitude = best_amp;
    res.x_star = best_x;
    res.eval_error = best_err;
    res.reliable = res.failures * 5 <= res.probes; // > 20% failures flips the flag
    return res;
}

namespace decay_detail {

inline std::vector<double> log_grid(double lo, double hi, int count, bool inclusive) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double f = inclusive ? static_cast<double>(k) / (count - 1)
                                   : static_cast<double>(k) / count;
        t[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, f);
    }
    return t;
}

inline double edge_slope(const std::vector<ScanPoint>& pts, bool small_edge) {
    if (pts.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> ts, ys;
    if (small_edge) {
        for (std::size_t i = 0; i < 3; ++i) {
            ts.push_back(pts[i].t);
            ys.push_back(pts[i].amplitude);
        }
    } else {
        for (std::size_t i = pts.size() - 3; i < pts.size(); ++i) {
            ts.push_back(pts[i].t);
            ys.push_back(pts[i].amplitude);
        }
    }
    return fit_powerlaw(ts, ys).slope;
}

} // namespace decay_detail

/// Full two-regime scan with sup-over-x amplitudes and slope fits.
inline DecayScan run_scan(const PolynomialSymbol& p, const SpectralReport& spectral,
                          const ScanConfig& cfg) {
    DecayScan scan;
    scan.symbol_name = p.name();
    scan.target = cfg.target;
    scan.n = p.dimension();
    scan.m = p.degree();
    scan.b = spectral.b_hat;
    scan.L = spectral.L;
    scan.sigma = sigma_exponent(scan.n, scan.m, scan.b);

    const TargetEvaluator target = make_target_evaluator(p, spectral, cfg.target,
                                                         cfg.budget_per_eval);

    auto run_regime = [&](double lo, double hi, int count, bool inclusive,
                          std::vector<ScanPoint>& out) {
        for (double t : decay_detail::log_grid(lo, hi, count, inclusive)) {
            const SupResult s = sup_over_x(p, t, target, spectral, cfg);
            ScanPoint pt;
            pt.t = t;
            pt.x_star = s.x_star;
            pt.amplitude = s.amplitude;
            pt.eval_error = s.eval_error;
            pt.reliable = s.reliable;
            scan.reliable = scan.reliable && s.reliable;
            out.push_back(std::move(pt));
        }
    };
    if (cfg.small_count > 0) run_regime(cfg.small_lo, cfg.small_hi, cfg.small_count, false, scan.small_t);
    if (cfg.large_count > 0) run_regime(cfg.large_lo, cfg.large_hi, cfg.large_count, true, scan.large_t);

    auto collect = [](const std::vector<ScanPoint>& pts, std::vector<double>& ts,
                      std::vector<double>& ys) {
        for (const auto& q : pts) {
            ts.push_back(q.t);
            ys.push_back(q.amplitude);
        }
    };
    {
        std::vector<double> ts, ys;
        collect(scan.small_t, ts, ys);
        scan.fit_small = fit_powerlaw(ts, ys);
    }
    {
        std::vector<double> ts, ys;
        collect(scan.large_t, ts, ys);
        scan.fit_large = fit_powerlaw(ts, ys);
    }
    scan.edge_slope_small = decay_detail::edge_slope(scan.small_t, true);
    scan.edge_slope_large = decay_detail::edge_slope(scan.large_t, false);

    for (const auto& q : scan.small_t)
        scan.c_small = std::max(scan.c_small, q.amplitude * std::pow(q.t, scan.sigma));
    for (const auto& q : scan.large_t) {
        const double w = cfg.target == ScanTarget::I1
                             ? q.amplitude * std::pow(q.t, 0.5 * scan.n)
                             : q.amplitude;
        scan.c_large = std::max(scan.c_large, w);
    }
    return scan;
}

struct ConditionCheck {
    std::string name;
    bool applicable = false;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct VerdictReport {
    std::string theorem;
    bool pass = false;
    std::vector<ConditionCheck> checks;
    double c_small = 0.0;
    double c_large = 0.0;
    double sigma = 0.0;
};

inline constexpr double kSlopeSlack = 0.1;

/// Theorem-1 style verdict on an I1 scan: no upward trend of amplitude*t^sigma
/// at the small-t edge, none of amplitude*t^{n/2} at the large-t edge.
inline VerdictReport verify_theorem1(const DecayScan& scan) {
    if (scan.target != ScanTarget::I1)
        throw std::invalid_argument("verify_theorem1: scan target must be I1");
    VerdictReport rep;
    rep.theorem = "theorem1";
    rep.sigma = scan.sigma;
    rep.c_small = scan.c_small;
    rep.c_large = scan.c_large;

    ConditionCheck a;
    a.name = "small_t_edge_slope >= -sigma - slack";
    a.applicable = scan.small_t.size() >= 3;
    if (a.applicable) {
        a.measured = scan.edge_slope_small;
        a.threshold = -scan.sigma - kSlopeSlack;
        a.pass = a.measured >= a.threshold;
    } else {
        a.pass = true;
    }
    rep.checks.push_back(a);

    ConditionCheck b;
    b.name = "large_t_edge_slope <= -n/2 + slack";
    b.applicable = scan.large_t.size() >= 3;
    if (b.applicable) {
        b.measured = scan.edge_slope_large;
        b.threshold = -0.5 * scan.n + kSlopeSlack;
        b.pass = b.measured <= b.threshold;
    } else {
        b.pass = true;
    }
    rep.checks.push_back(b);

    rep.pass = a.pass && b.pass;
    return rep;
}

/// Theorem-2 style verdict on an I scan: controlled small-t growth and
/// bounded large-t amplitudes (max over the regime within 1.2x the max over
/// t in [1, 10]).
inline VerdictReport verify_theorem2(const DecayScan& scan) {
    if (scan.target != ScanTarget::I)
        throw std::invalid_argument("verify_theorem2: scan target must be I");
    VerdictReport rep;
    rep.theorem = "theorem2";
    rep.sigma = scan.sigma;
    rep.c_small = scan.c_small;
    rep.c_large = scan.c_large;

    ConditionCheck a;
    a.name = "small_t_edge_slope >= -sigma - slack";
    a.applicable = scan.small_t.size() >= 3;
    if (a.applicable) {
        a.measured = scan.edge_slope_small;
        a.threshold = -scan.sigma - kSlopeSlack;
        a.pass = a.measured >= a.threshold;
    } else {
        a.pass = true;
    }
    rep.checks.push_back(a);

    ConditionCheck b;
    b.name = "large_t amplitudes bounded";
    b.applicable = !scan.large_t.empty();
    if (b.applicable) {
        double max_all = 0.0, max_head = 0.0;
        for (const auto& q : scan.large_t) {
            max_all = std::max(max_all, q.amplitude);
            if (q.t <= 10.0) max_head = std::max(max_head, q.amplitude);
        }
        if (max_head == 0.0) max_head = max_all;
        b.measured = max_all / max_head;
        b.threshold = 1.2;
        b.pass = b.measured <= b.threshold;
    } else {
        b.pass = true;
    }
    rep.checks.push_back(b);

    rep.pass = a.pass && b.pass;
    return rep;
}

struct ComparisonRow {
    std::string regime;       // "small_t" or "large_t"
    double this_exponent = 0; // decay exponent of |I_1| claimed here
    double yao_exponent = 0;
    double cui_exponent = 0;
    double measured_slope = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

/// Exponent comparison against the prior small-t/large-t rates, with the
/// rho_b >= -n/2 assertion row.
inline std::vector<ComparisonRow> comparison_table(int n, int m, double b,
                                                   const DecayScan* scan = nullptr) {
    const double sig = sigma_exponent(n, m, b);
    const double rho = rho_b_exponent(n, m, b);
    std::vector<ComparisonRow> rows;

    ComparisonRow small;
    small.regime = "small_t";
    small.this_exponent = -sig;
    small.yao_exponent = -sig;
    small.cui_exponent = -static_cast<double>(n) / m;
    if (scan && scan->fit_small.valid) small.measured_slope = scan->fit_small.slope;
    rows.push_back(small);

    ComparisonRow large;
    large.regime = "large_t";
    large.this_exponent = -0.5 * n;
    large.yao_exponent = rho;
    large.cui_exponent = -static_cast<double>(n) / m;
    if (scan && scan->fit_large.valid) large.measured_slope = scan->fit_large.slope;
    large.note = rho >= -0.5 * n - 1e-12
                     ? (std::fabs(rho + 0.5 * n) < 1e-12 ? "rho_b = -n/2 (equality, m = 2)"
                                                         : "rho_b >= -n/2 holds")
                     : "rho_b >= -n/2 VIOLATED";
    rows.push_back(large);
    return rows;
}

} // namespace hos
