// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Usage: acceptance <1..9|all> [--cli <hoslab-binary>] [--data <dir>] [--work <dir>]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hoslab/hoslab.hpp"

namespace fs = std::filesystem;
using namespace hos;

namespace {

std::string g_cli;
fs::path g_data;
fs::path g_work = "acceptance_work";

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

PolynomialSymbol sym_free() { return PolynomialSymbol(1, {{{2}, 1.0}}, "free"); }
PolynomialSymbol sym_quartic() { return PolynomialSymbol(1, {{{4}, 1.0}}, "quartic"); }
PolynomialSymbol sym_radial2d() {
    return PolynomialSymbol(2, {{{4, 0}, 1.0}, {{2, 2}, 2.0}, {{0, 4}, 1.0}}, "radial2d");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Free-Schroedinger exactness: |I(t,x)| = sqrt(pi/|t|) within 1e-4 rel.
Check criterion1() {
    Check c;
    for (double t : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        for (double x : {0.0, 1.0, 5.0}) {
            const double expect = std::sqrt(M_PI / t);
            const EvalResult r = fundamental_solution(sym_free(), t, {x}, MollifierSchedule{},
                                                      5e-5 * expect);
            const double rel = std::fabs(std::abs(r.value) - expect) / expect;
            c.require(r.converged, "unconverged at t=" + fmt(t) + " x=" + fmt(x));
            c.require(rel <= 1e-4, "rel err " + fmt(rel) + " at t=" + fmt(t) + " x=" + fmt(x));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 2. Quartic oracle at (1,0) plus the homogeneous scaling constancy.
Check criterion2() {
    Check c;
    // Independent oracle: cos/sin quarter-line integrals via Gamma(1/4).
    const double g14 = std::tgamma(0.25);
    const double C = g14 * std::cos(M_PI / 8.0) / 4.0;
    const double S = g14 * std::sin(M_PI / 8.0) / 4.0;
    const double expect = 2.0 * std::hypot(C, S); // = 2 Gamma(5/4)
    const EvalResult r = fundamental_solution(sym_quartic(), 1.0, {0.0}, MollifierSchedule{},
                                              1e-4);
    const double rel = std::fabs(std::abs(r.value) - expect) / expect;
    c.require(rel <= 1e-3, "|I(1,0)| rel err " + fmt(rel));

    std::vector<double> scaled;
    for (int k = 0; k <= 8; ++k) {
        const double t = std::pow(10.0, -2.0 + 0.5 * k);
        const double tol = 2e-4 * std::pow(t, -0.25);
        const EvalResult rt = fundamental_solution(sym_quartic(), t, {0.0}, MollifierSchedule{},
                                                   tol);
        scaled.push_back(std::abs(rt.value) * std::pow(t, 0.25));
    }
    double mean = 0.0;
    for (double v : scaled) mean += v;
    mean /= static_cast<double>(scaled.size());
    for (double v : scaled)
        c.require(std::fabs(v - mean) <= 0.01 * mean,
                  "scaling constancy violated: " + fmt(v) + " vs mean " + fmt(mean));
    return c;
}

// ---------------------------------------------------------------------------
// 3. Exponent formulas, exact endpoints, grid inequality.
Check criterion3() {
    Check c;
    for (int n = 1; n <= 3; ++n)
        for (int m = 2; m <= 10; ++m) {
            c.require(sigma_exponent(n, m, 1.0) == static_cast<double>(n) / m,
                      "sigma(b=1) != n/m");
            c.require(sigma_exponent(n, m, 0.5) == 0.5 * n, "sigma(b=1/2) != n/2");
            for (int k = 0; k <= 10; ++k) {
                const double b = 0.5 + 0.05 * k;
                const double rho = rho_b_exponent(n, m, b);
                c.require(rho >= -0.5 * n - 1e-12, "rho_b < -n/2");
                if (m == 2) c.require(std::fabs(rho + 0.5 * n) < 1e-12, "m=2 not equality");
                else c.require(rho > -0.5 * n, "unexpected equality off m=2");
            }
        }
    return c;
}

// ---------------------------------------------------------------------------
// 4. Theorem-2 verification for the line quartic: full scan of I.
Check criterion4() {
    Check c;
    const auto p = sym_quartic();
    const SpectralReport spec = classify_symbol(p);
    c.require(spec.classified, "classification failed");
    if (!spec.classified) return c;

    ScanConfig cfg;
    cfg.target = ScanTarget::I;
    cfg.rel_tol = 2e-3;
    const DecayScan scan = run_scan(p, spec, cfg);
    c.require(scan.fit_small.valid, "small-t fit invalid");
    c.require(std::fabs(scan.fit_small.slope + 0.25) <= 0.03,
              "small-t slope " + fmt(scan.fit_small.slope));
    const VerdictReport rep = verify_theorem2(scan);
    c.require(rep.pass, "theorem2 verdict FAIL");
    return c;
}

// ---------------------------------------------------------------------------
// 5. Theorem-1 large-t verification for I1 of the quartic.
Check criterion5() {
    Check c;
    const auto p = sym_quartic();
    const SpectralReport spec = classify_symbol(p);
    c.require(spec.classified, "classification failed");
    if (!spec.classified) return c;

    ScanConfig cfg;
    cfg.target = ScanTarget::I1;
    cfg.small_count = 0; // large-t regime only
    cfg.rel_tol = 2e-3;
    const DecayScan scan = run_scan(p, spec, cfg);
    c.require(scan.large_t.size() == 8, "missing scan points");

    // amplitude * t^{1/2} must not trend upward at the right edge, and the
    // amplitude edge slope itself must stay above -1/2 - 0.1.
    std::vector<double> ts, cs;
    for (std::size_t i = scan.large_t.size() - 3; i < scan.large_t.size(); ++i) {
        ts.push_back(scan.large_t[i].t);
        cs.push_back(scan.large_t[i].amplitude * std::sqrt(scan.large_t[i].t));
    }
    const double ctrend = fit_powerlaw(ts, cs).slope;
    c.require(ctrend <= 0.1, "amplitude*t^{1/2} trends up: slope " + fmt(ctrend));
    c.require(scan.edge_slope_large >= -0.5 - 0.1,
              "edge slope " + fmt(scan.edge_slope_large) + " below -0.6");

    const VerdictReport rep = verify_theorem1(scan);
    bool large_ok = true;
    for (const auto& chk : rep.checks)
        if (chk.applicable && chk.name.rfind("large_t", 0) == 0) large_ok = chk.pass;
    c.require(large_ok, "verify_theorem1 large-t condition FAIL");
    return c;
}

// ---------------------------------------------------------------------------
// 6. Radial plane quartic: analyzer b, small-t slope of |I(t,0)|, and the
//    1-D radial-reduction brute-force oracle.
Complex radial_oracle(double t) {
    // 2 pi * integral over rho of e^{i t rho^4} rho e^{-eps rho^2}, extrapolated
    // in eps by one Richardson step; plain composite Simpson, independent of
    // the library quadrature.
    auto damped = [&](double eps) {
        const double R = std::sqrt(std::log(1e9) / eps);
        const std::size_t nsteps = 4'000'000;
        const double h = R / static_cast<double>(nsteps);
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i <= nsteps; ++i) {
            const double rho = h * static_cast<double>(i);
            const double ph = t * rho * rho * rho * rho;
            const double w = (i == 0 || i == nsteps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * rho * std::exp(-eps * rho * rho) * Complex{std::cos(ph), std::sin(ph)};
        }
        return acc * (h / 3.0) * 2.0 * M_PI;
    };
    const Complex a = damped(2e-3);
    const Complex b = damped(1e-3);
    return b + (b - a); // first-order extrapolation to eps = 0
}

Check criterion6() {
    Check c;
    const auto p = sym_radial2d();
    const SpectralReport spec = classify_symbol(p);
    c.require(spec.classified, "classification failed");
    c.require(std::fabs(spec.b_hat - 1.0) <= 0.05, "b_hat " + fmt(spec.b_hat));

    ScanConfig cfg;
    cfg.target = ScanTarget::I;
    cfg.large_count = 0;
    cfg.x_search = false; // criterion is the origin amplitude
    cfg.rel_tol = 3e-3;
    const DecayScan scan = run_scan(p, spec, cfg);
    c.require(scan.fit_small.valid, "fit invalid");
    c.require(std::fabs(scan.fit_small.slope + 0.5) <= 0.05,
              "small-t slope " + fmt(scan.fit_small.slope));

    // Cross-check a few amplitudes against the brute-force radial oracle.
    for (std::size_t idx : {std::size_t{0}, std::size_t{5}, std::size_t{11}}) {
        const double t = scan.small_t[idx].t;
        const Complex oracle = radial_oracle(t);
        // The oracle itself must agree with the closed form pi^{3/2}/2 t^{-1/2}.
        const double closed = 2.7841639984158539 / std::sqrt(t);
        c.require(std::fabs(std::abs(oracle) - closed) <= 0.01 * closed,
                  "radial oracle drifted from the closed form at t=" + fmt(t));
        const double rel = std::fabs(scan.small_t[idx].amplitude - std::abs(oracle)) /
                           std::abs(oracle);
        c.require(rel <= 0.02, "scan vs oracle rel " + fmt(rel) + " at t=" + fmt(t));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. Structural invariant battery.
Check criterion7() {
    Check c;
    std::mt19937_64 rng(20260810);

    // Partition-of-unity sums and [0,1] bounds.
    {
        std::uniform_real_distribution<double> tdist(0.02, 50.0);
        for (int trial = 0; trial < 10000; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 2);
            std::vector<std::pair<MultiIndex, double>> terms;
            if (n == 1) terms = {{{4}, 1.0}, {{2}, 0.5}};
            else terms = {{{4, 0}, 1.0}, {{2, 2}, 2.0}, {{0, 4}, 1.0}};
            const PolynomialSymbol p(n, terms, "battery");
            const double t = tdist(rng) * (rng() % 2 ? 1.0 : -1.0);
            std::uniform_real_distribution<double> xdist(-3.0, 3.0);
            std::vector<double> x(static_cast<std::size_t>(n)), xi(static_cast<std::size_t>(n));
            for (auto& v : x) v = xdist(rng);
            for (auto& v : xi) v = 5.0 * xdist(rng) / 3.0;
            RegionContext ctx(t, x, 0.5, 4);
            const CutoffValues cv = cutoffs(ctx, p, xi);
            c.require(std::fabs(cv.phi1 + cv.phi2 + cv.phi3 - 1.0) <= 1e-15, "partition sum");
            c.require(cv.phi1 >= 0 && cv.phi1 <= 1 && cv.phi2 >= 0 && cv.phi2 <= 1 &&
                          cv.phi3 >= 0 && cv.phi3 <= 1,
                      "cutoff out of [0,1]");
            // Support consistency.
            const double nrm = norm2(xi);
            if (cv.phi1 > 0.0) c.require(nrm <= ctx.low_freq_radius + 1e-12, "phi1 support");
            if (cv.phi2 > 0.0) {
                c.require(nrm >= 0.5 * ctx.low_freq_radius - 1e-12, "phi2 inner support");
                auto g = p.gradient(xi);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += x[i] / t;
                c.require(norm2(g) <= ctx.x_over_t_norm() + 1e-12, "phi2 gradient support");
            }
            if (!c.ok) break;
        }
    }

    // Angular net packing / covering.
    for (int n : {2, 3}) {
        const auto net = angular_net(n);
        for (std::size_t i = 0; i < net.size() && c.ok; ++i)
            for (std::size_t j = i + 1; j < net.size(); ++j)
                c.require(chord_dist(net[i], net[j]) >= 0.25, "net packing");
        for (const auto& q : sphere_net(n, 10000)) {
            double best = 2.0;
            for (const auto& v : net) best = std::min(best, chord_dist(q, v));
            c.require(best < 0.25, "net covering");
            if (!c.ok) break;
        }
    }

    // Gradient / Hessian finite-difference agreement.
    {
        std::uniform_real_distribution<double> coef(-5.0, 5.0);
        for (int trial = 0; trial < 1000 && c.ok; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 3);
            std::map<MultiIndex, double> acc;
            const int nterms = 1 + static_cast<int>(rng() % 4);
            for (int k = 0; k < nterms; ++k) {
                MultiIndex e(static_cast<std::size_t>(n), 0);
                int rem = 6;
                for (int d = 0; d < n; ++d) {
                    e[static_cast<std::size_t>(d)] = static_cast<int>(rng() % (rem + 1));
                    rem -= e[static_cast<std::size_t>(d)];
                }
                acc[e] += coef(rng);
            }
            std::vector<std::pair<MultiIndex, double>> terms(acc.begin(), acc.end());
            const PolynomialSymbol p(n, terms, "fd");
            std::uniform_real_distribution<double> xdist(-5.0, 5.0);
            std::vector<double> xi(static_cast<std::size_t>(n));
            for (auto& v : xi) v = xdist(rng);
            const double h = 1e-5 * (1.0 + norm2(xi));
            const auto g = p.gradient(xi);
            const double gs = std::max(1.0, norm2(g));
            for (int j = 0; j < n; ++j) {
                auto hi = xi, lo = xi;
                hi[static_cast<std::size_t>(j)] += h;
                lo[static_cast<std::size_t>(j)] -= h;
                const double fd = (p.eval(hi) - p.eval(lo)) / (2.0 * h);
                c.require(std::fabs(g[static_cast<std::size_t>(j)] - fd) / gs < 1e-6,
                          "gradient fd");
            }
            const auto hm = p.hessian(xi);
            double hscale = 1.0;
            for (double v : hm.a) hscale = std::max(hscale, std::fabs(v));
            for (int j = 0; j < n; ++j) {
                auto hi = xi, lo = xi;
                hi[static_cast<std::size_t>(j)] += h;
                lo[static_cast<std::size_t>(j)] -= h;
                const auto gh = p.gradient(hi);
                const auto gl = p.gradient(lo);
                for (int i = 0; i < n; ++i) {
                    const double fd = (gh[static_cast<std::size_t>(i)] -
                                       gl[static_cast<std::size_t>(i)]) /
                                      (2.0 * h);
                    c.require(std::fabs(hm.at(i, j) - fd) / hscale < 1e-6, "hessian fd");
                }
            }
        }
    }

    // Conjugation and parity symmetries of I.
    {
        const auto q = sym_quartic();
        for (double t : {0.5, 2.0}) {
            const EvalResult a = fundamental_solution(q, t, {0.9}, MollifierSchedule{}, 1e-4);
            const EvalResult b = fundamental_solution(q, -t, {-0.9}, MollifierSchedule{}, 1e-4);
            c.require(std::abs(b.value - std::conj(a.value)) <=
                          2.0 * (a.abs_error_estimate + b.abs_error_estimate) + 1e-5,
                      "conjugation at t=" + fmt(t));
            const EvalResult e1 = fundamental_solution(q, t, {1.2}, MollifierSchedule{}, 1e-4);
            const EvalResult e2 = fundamental_solution(q, t, {-1.2}, MollifierSchedule{}, 1e-4);
            c.require(std::abs(e1.value - e2.value) <=
                          2.0 * (e1.abs_error_estimate + e2.abs_error_estimate) + 1e-5,
                      "parity at t=" + fmt(t));
        }
    }

    // Cross-method evaluator agreement.
    {
        SpectralReport spec;
        spec.L = 0.5;
        spec.classified = true;
        struct Case {
            PolynomialSymbol p;
            double t;
            std::vector<double> x;
            double tol;
        };
        const std::vector<Case> battery{{sym_free(), 1.0, {-2.0}, 1e-4},
                                        {sym_quartic(), 1.0, {0.0}, 1e-4},
                                        {sym_quartic(), 0.05, {0.3}, 1e-3},
                                        {sym_radial2d(), 0.5, {0.3, -0.2}, 5e-3}};
        for (const auto& cs : battery) {
            const EvalResult pg = partition_guided_eval(cs.p, cs.t, cs.x, spec, cs.tol);
            const EvalResult mol = fundamental_solution(cs.p, cs.t, cs.x, MollifierSchedule{},
                                                        cs.tol);
            c.require(std::abs(pg.value - mol.value) <=
                          pg.abs_error_estimate + mol.abs_error_estimate + 1e-4,
                      "cross-method gap on " + cs.p.name() + " t=" + fmt(cs.t));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 8. Gradient-separation inequality on a sector of the radial quartic.
Check criterion8() {
    Check c;
    const auto p = sym_radial2d();
    const SpectralReport spec = classify_symbol(p);
    c.require(spec.classified, "classification failed");
    const double t = 0.005;
    const std::vector<double> x{-0.16, 0.0};
    const auto rep = check_gradient_separation(p, spec.b_hat, spec.L, t, x, 400, 10000, 1);
    c.require(!rep.vacuous, "sector sampling was vacuous");
    c.require(rep.c1_r > spec.L, "C1 r = " + fmt(rep.c1_r) + " not above L = " + fmt(spec.L));
    c.require(rep.pairs >= 5000, "too few pairs: " + std::to_string(rep.pairs));
    c.require(rep.c_emp > 0.0, "C_emp not positive");
    return c;
}

// ---------------------------------------------------------------------------
// 9. Determinism of the full CLI pipeline.
Check criterion9() {
    Check c;
    if (g_cli.empty()) {
        c.require(false, "no --cli binary supplied");
        return c;
    }
    const fs::path base = g_work / "determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string symbol = (g_data / "free.sym").string();
    const std::string quiet = " > /dev/null 2>&1";

    auto pipeline = [&](const fs::path& out) {
        std::string common = g_cli + " --symbol " + symbol + " --out " + out.string() +
                             " --seed 7 --tol 2e-3 ";
        if (std::system((common + "analyze" + quiet).c_str()) != 0) return false;
        if (std::system((common + "eval --t 1 --x 0.5" + quiet).c_str()) != 0) return false;
        if (std::system((common +
                         "scan --target both --small-points 3 --large-points 2 --no-x-search" +
                         quiet)
                            .c_str()) != 0)
            return false;
        if (std::system((common + "report" + quiet).c_str()) != 0) return false;
        return true;
    };
    const fs::path o1 = base / "run1";
    const fs::path o2 = base / "run2";
    c.require(pipeline(o1), "pipeline run 1 failed");
    c.require(pipeline(o2), "pipeline run 2 failed");
    if (!c.ok) return c;

    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    for (const char* name : {"analysis.txt", "eval.txt", "scan_I.txt", "scan_I1.txt",
                             "verdict_theorem1.txt", "verdict_theorem2.txt", "comparison.txt",
                             "report_I.txt", "report_I1.txt"}) {
        const std::string a = slurp(o1 / name);
        const std::string b = slurp(o2 / name);
        c.require(!a.empty(), std::string(name) + " missing");
        c.require(a == b, std::string(name) + " differs between identical runs");
    }
    return c;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) g_cli = argv[++i];
        else if (arg == "--data" && i + 1 < argc) g_data = argv[++i];
        else if (arg == "--work" && i + 1 < argc) g_work = argv[++i];
        else if (arg == "all")
            for (int k = 1; k <= 9; ++k) wanted.push_back(k);
        else if (!arg.empty() && std::isdigit(static_cast<unsigned char>(arg[0])))
            wanted.push_back(std::atoi(arg.c_str()));
    }
    if (wanted.empty())
        for (int k = 1; k <= 9; ++k) wanted.push_back(k);
    if (g_data.empty()) g_data = "data";

    static const char* kNames[10] = {
        "",
        "free-Schroedinger exactness",
        "quartic oracle and scaling",
        "exponent formulas",
        "theorem-2 verification (quartic, I)",
        "theorem-1 large-t verification (quartic, I1)",
        "radial plane quartic small-t slope",
        "structural invariant suite",
        "gradient-separation inequality",
        "pipeline determinism",
    };
    using Fn = std::function<Check()>;
    const Fn fns[10] = {nullptr,    criterion1, criterion2, criterion3, criterion4,
                        criterion5, criterion6, criterion7, criterion8, criterion9};

    int failed = 0;
    for (int k : wanted) {
        if (k < 1 || k > 9) continue;
        const auto start = std::chrono::steady_clock::now();
        const Check c = fns[k]();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << k << ": " << kNames[k]
                  << " (" << fmt(secs) << " s)";
        if (!c.ok) std::cout << " - " << c.detail;
        std::cout << "\n";
        if (!c.ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
