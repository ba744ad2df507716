// hoslab command line: analyze -> eval -> scan -> verify -> report pipeline
// over symbol files. Exit codes: 0 success, 1 parse error, 2 invalid input,
// 3 classification failure, 4 missing dependency.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hoslab/hoslab.hpp"

namespace fs = std::filesystem;
using namespace hos;

namespace {

struct ClassificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingDependency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    std::string symbol_path;
    std::string out_dir = ".";
    long long seed = 1;
    double tol = 1e-5;
    long long budget = 10'000'000;
    std::string method = "mollified";
};

std::string config_hash(const GlobalOpts& g, const std::string& cmd, const std::string& extra) {
    std::string canon = "cmd=" + cmd + ";symbol=" + g.symbol_path + ";seed=" +
                        std::to_string(g.seed) + ";tol=" + format_real(g.tol) + ";budget=" +
                        std::to_string(g.budget) + ";method=" + g.method + ";" + extra;
    return hex64(fnv1a64(canon));
}

PolynomialSymbol require_symbol(const GlobalOpts& g) {
    if (g.symbol_path.empty()) throw std::invalid_argument("--symbol is required");
    return load_symbol(g.symbol_path);
}

std::vector<double> parse_x(const std::string& s, int n) {
    std::vector<double> x;
    if (!s.empty()) {
        std::string tok;
        std::istringstream in(s);
        while (std::getline(in, tok, ',')) x.push_back(std::stod(tok));
    }
    if (x.empty()) x.assign(static_cast<std::size_t>(n), 0.0);
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("x has " + std::to_string(x.size()) + " components, symbol needs " +
                                    std::to_string(n));
    return x;
}

struct AnalysisOutcome {
    EllipticityCertificate cert;
    SpectralReport report;
    ExponentRecord record;
};

AnalysisOutcome analyze_symbol(const PolynomialSymbol& p) {
    AnalysisOutcome out;
    if (p.is_zero()) throw std::invalid_argument("zero polynomial is not a symbol");
    const int samples = p.dimension() == 3 ? 8000 : 4000;
    out.cert = certify_elliptic(p, samples, 1e-9);
    if (!out.cert.is_elliptic) return out;
    out.report = classify_symbol(p);
    const int m = std::max(2, p.degree());
    // Below b = 1/2 the sigma denominator can collapse; report the exponents
    // at the edge of the admissible range and keep the flag.
    double b_for_table = out.report.b_hat;
    if ((2.0 * b_for_table - 1.0) * (m - 2) + 2.0 <= 0.0) b_for_table = 0.5;
    out.record = exponent_table(p.dimension(), m, b_for_table);
    out.record.flagged = out.record.flagged || b_for_table != out.report.b_hat;
    return out;
}

int cmd_analyze(const GlobalOpts& g) {
    const PolynomialSymbol p = require_symbol(g);
    const std::string hash = config_hash(g, "analyze", "");
    const AnalysisOutcome a = analyze_symbol(p);

    fs::create_directories(g.out_dir);
    const fs::path doc_path = fs::path(g.out_dir) / "analysis.txt";
    const TextDocument doc = analysis_document(p, a.cert, a.report, a.record, hash);
    doc.write(doc_path);
    append_journal(g.out_dir, "analyze", hash, file_digest(g.symbol_path), doc.digest());

    if (!a.cert.is_elliptic) {
        std::cerr << "symbol is not elliptic (min principal on sphere = "
                  << format_real(a.cert.min_principal_on_sphere) << ")\n";
        return 2;
    }
    if (!a.report.classified) {
        std::cerr << "classification failure: " << a.report.note << "\n";
        return 3;
    }
    std::cout << "analysis written to " << doc_path.string() << " (b_hat = "
              << format_real(a.report.b_hat) << ", L = " << format_real(a.report.L)
              << ", sigma = " << format_real(a.record.sigma) << ")\n";
    return 0;
}

int cmd_eval(const GlobalOpts& g, double t, const std::string& xs) {
    const PolynomialSymbol p = require_symbol(g);
    if (t == 0.0) throw std::invalid_argument("t = 0 is not evaluable");
    const std::vector<double> x = parse_x(xs, p.dimension());
    const std::string hash = config_hash(g, "eval", "t=" + format_real(t) + ";x=" + xs);

    EvalBudget budget{static_cast<std::size_t>(g.budget), 0};
    EvalResult r;
    if (g.method == "partition") {
        const AnalysisOutcome a = analyze_symbol(p);
        if (!a.cert.is_elliptic) throw std::invalid_argument("symbol is not elliptic");
        if (!a.report.classified) throw ClassificationFailure(a.report.note);
        r = partition_guided_eval(p, t, x, a.report, g.tol, &budget);
    } else {
        r = fundamental_solution(p, t, x, MollifierSchedule{}, g.tol, &budget);
    }

    fs::create_directories(g.out_dir);
    TextDocument doc;
    doc.comment("oscillatory integral evaluation");
    doc.put("version", kVersion);
    doc.put("config_hash", hash);
    doc.put("symbol_name", p.name());
    doc.put("t", t);
    put_vector(doc, "x", x);
    doc.put("method", g.method == "partition" ? "partition_guided" : "mollified");
    doc.put("value_re", r.value.real());
    doc.put("value_im", r.value.imag());
    doc.put("magnitude", std::abs(r.value));
    doc.put("abs_error_estimate", r.abs_error_estimate);
    doc.put("converged", r.converged);
    doc.put("levels", r.diagnostics.levels);
    put_vector(doc, "eps_schedule", r.diagnostics.eps_used);
    doc.put("evaluations", r.diagnostics.evaluations);
    if (!r.diagnostics.note.empty()) doc.put("note", r.diagnostics.note);
    const fs::path doc_path = fs::path(g.out_dir) / "eval.txt";
    doc.write(doc_path);
    append_journal(g.out_dir, "eval", hash, file_digest(g.symbol_path), doc.digest());

    std::cout << "I(" << format_real(t) << ", x) = " << format_real(r.value.real()) << " + "
              << format_real(r.value.imag()) << "i  |I| = " << format_real(std::abs(r.value))
              << "  err <= " << format_real(r.abs_error_estimate)
              << (r.converged ? "" : "  [not converged]") << "\n";
    return 0;
}

int cmd_regions(const GlobalOpts& g, double t, const std::string& xs, double L_flag, int grid_n,
                double grid_radius) {
    const PolynomialSymbol p = require_symbol(g);
    if (t == 0.0) throw std::invalid_argument("t = 0 is not evaluable");
    if (p.dimension() > 2) throw std::invalid_argument("regions dump supports n <= 2");
    const std::vector<double> x = parse_x(xs, p.dimension());

    double L = L_flag;
    if (!(L > 0.0)) {
        const AnalysisOutcome a = analyze_symbol(p);
        if (!a.cert.is_elliptic) throw std::invalid_argument("symbol is not elliptic");
        if (!a.report.classified) throw ClassificationFailure(a.report.note);
        L = a.report.L;
    }
    RegionContext ctx(t, x, L, std::max(2, p.degree()));
    if (!(grid_radius > 0.0)) grid_radius = std::max({2.0 * ctx.r, 2.0 * L, 2.0});
    const std::string hash =
        config_hash(g, "regions", "t=" + format_real(t) + ";x=" + xs + ";L=" + format_real(L) +
                                     ";grid=" + std::to_string(grid_n));

    fs::create_directories(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / "regions.txt";
    std::ofstream f(path, std::ios::binary);
    f << "# region grid dump\n";
    f << "# version = " << kVersion << "\n# config_hash = " << hash << "\n";
    f << "# symbol = " << p.name() << "\n# t = " << format_real(t) << "\n";
    f << "# L = " << format_real(L) << "\n# r = " << format_real(ctx.r) << "\n";
    f << "# low_freq_radius = " << format_real(ctx.low_freq_radius) << "\n";
    f << "# columns: xi... regions phi1 phi2 phi3\n";
    const int n = p.dimension();
    auto emit_point = [&](const std::vector<double>& xi) {
        const unsigned set = classify(ctx, p, xi);
        const CutoffValues c = cutoffs(ctx, p, xi);
        for (double v : xi) f << format_real(v) << " ";
        std::string names;
        if (set & kOmegaC) names += "c";
        if (set & kOmega1) names += "1";
        if (set & kOmega2) names += "2";
        if (set & kOmega3) names += "3";
        if (names.empty()) names = "-";
        f << names << " " << format_real(c.phi1) << " " << format_real(c.phi2) << " "
          << format_real(c.phi3) << "\n";
    };
    if (n == 1) {
        for (int i = 0; i < grid_n; ++i)
            emit_point({-grid_radius + 2.0 * grid_radius * i / (grid_n - 1)});
    } else {
        for (int i = 0; i < grid_n; ++i)
            for (int j = 0; j < grid_n; ++j)
                emit_point({-grid_radius + 2.0 * grid_radius * i / (grid_n - 1),
                            -grid_radius + 2.0 * grid_radius * j / (grid_n - 1)});
    }
    f.close();
    append_journal(g.out_dir, "regions", hash, file_digest(g.symbol_path), file_digest(path));
    std::cout << "regions dump written to " << path.string() << "\n";
    return 0;
}

ScanConfig make_scan_config(const GlobalOpts& g, ScanTarget target, int small_points,
                            int large_points, double t_min, double t_max, bool x_search) {
    ScanConfig cfg;
    cfg.target = target;
    cfg.small_count = t_min < 1.0 ? small_points : 0;
    cfg.large_count = t_max >= 1.0 ? large_points : 0;
    cfg.small_lo = std::min(t_min, 0.999);
    cfg.large_hi = std::max(t_max, 1.0);
    cfg.rel_tol = std::max(g.tol, 1e-6);
    cfg.x_search = x_search;
    cfg.budget_per_eval = static_cast<std::size_t>(g.budget);
    return cfg;
}

int cmd_scan(const GlobalOpts& g, const std::string& target_opt, int small_points,
             int large_points, double t_min, double t_max, bool x_search) {
    const PolynomialSymbol p = require_symbol(g);
    const AnalysisOutcome a = analyze_symbol(p);
    if (!a.cert.is_elliptic) throw std::invalid_argument("symbol is not elliptic");
    if (!a.report.classified) throw ClassificationFailure(a.report.note);

    fs::create_directories(g.out_dir);
    const std::string extra = "target=" + target_opt + ";sp=" + std::to_string(small_points) +
                              ";lp=" + std::to_string(large_points) + ";tmin=" +
                              format_real(t_min) + ";tmax=" + format_real(t_max) + ";xs=" +
                              (x_search ? "1" : "0");
    const std::string hash = config_hash(g, "scan", extra);

    std::string outputs;
    auto scan_one = [&](ScanTarget target) {
        const ScanConfig cfg = make_scan_config(g, target, small_points, large_points, t_min,
                                                t_max, x_search);
        const DecayScan scan = run_scan(p, a.report, cfg);
        const TextDocument sdoc = scan_document(scan, hash);
        const fs::path spath = fs::path(g.out_dir) /
                               (std::string("scan_") + target_name(target) + ".txt");
        sdoc.write(spath);
        outputs += sdoc.digest();
        const VerdictReport verdict =
            target == ScanTarget::I1 ? verify_theorem1(scan) : verify_theorem2(scan);
        const TextDocument vdoc = verdict_document(verdict, hash);
        const fs::path vpath = fs::path(g.out_dir) /
                               (target == ScanTarget::I1 ? "verdict_theorem1.txt"
                                                         : "verdict_theorem2.txt");
        vdoc.write(vpath);
        outputs += vdoc.digest();
        std::cout << (target == ScanTarget::I1 ? "theorem1" : "theorem2") << ": "
                  << (verdict.pass ? "PASS" : "FAIL") << "\n";
    };
    if (target_opt == "I" || target_opt == "both") scan_one(ScanTarget::I);
    if (target_opt == "I1" || target_opt == "both") scan_one(ScanTarget::I1);

    const auto rows = comparison_table(p.dimension(), std::max(2, p.degree()), a.report.b_hat);
    const TextDocument cdoc = comparison_document(rows, hash);
    cdoc.write(fs::path(g.out_dir) / "comparison.txt");
    outputs += cdoc.digest();

    append_journal(g.out_dir, "scan", hash, file_digest(g.symbol_path), hex64(fnv1a64(outputs)));
    return 0;
}

DecayScan load_scan_or_throw(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingDependency("missing scan document: " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scan_document(ss.str());
}

int cmd_verify(const GlobalOpts& g) {
    const fs::path i1 = fs::path(g.out_dir) / "scan_I1.txt";
    const fs::path i = fs::path(g.out_dir) / "scan_I.txt";
    const std::string hash = config_hash(g, "verify", "");
    bool any = false;
    std::string outputs;
    if (fs::exists(i1)) {
        const DecayScan scan = load_scan_or_throw(i1);
        const VerdictReport rep = verify_theorem1(scan);
        const TextDocument doc = verdict_document(rep, hash);
        doc.write(fs::path(g.out_dir) / "verdict_theorem1.txt");
        outputs += doc.digest();
        std::cout << "theorem1: " << (rep.pass ? "PASS" : "FAIL") << "\n";
        any = true;
    }
    if (fs::exists(i)) {
        const DecayScan scan = load_scan_or_throw(i);
        const VerdictReport rep = verify_theorem2(scan);
        const TextDocument doc = verdict_document(rep, hash);
        doc.write(fs::path(g.out_dir) / "verdict_theorem2.txt");
        outputs += doc.digest();
        std::cout << "theorem2: " << (rep.pass ? "PASS" : "FAIL") << "\n";
        any = true;
    }
    if (!any) throw MissingDependency("missing scan document: " + i.string());
    append_journal(g.out_dir, "verify", hash, "-", hex64(fnv1a64(outputs)));
    return 0;
}

int cmd_report(const GlobalOpts& g) {
    const std::string hash = config_hash(g, "report", "");
    bool any = false;
    std::string outputs;
    for (const char* tname : {"I", "I1"}) {
        const fs::path spath = fs::path(g.out_dir) / (std::string("scan_") + tname + ".txt");
        if (!fs::exists(spath)) continue;
        const DecayScan scan = load_scan_or_throw(spath);
        TextDocument doc;
        doc.comment("log-log columns for plotting; reference slopes included");
        doc.put("version", kVersion);
        doc.put("config_hash", hash);
        doc.put("target", tname);
        doc.put("sigma", scan.sigma);
        doc.put("ref_slope_small", -scan.sigma);
        doc.put("ref_slope_large", -0.5 * scan.n);
        doc.comment("rows: log10_t log10_amplitude ref_sigma_line ref_half_n_line");
        int idx = 0;
        auto emit = [&](const ScanPoint& q) {
            const double lt = std::log10(q.t);
            const double la = std::log10(std::max(q.amplitude, 1e-300));
            // Reference lines anchored at the first point of the regime.
            doc.put("pt_" + std::to_string(idx++),
                    format_real(lt) + " " + format_real(la) + " " +
                        format_real(-scan.sigma * lt) + " " + format_real(-0.5 * scan.n * lt));
        };
        for (const auto& q : scan.small_t) emit(q);
        for (const auto& q : scan.large_t) emit(q);
        const fs::path rpath = fs::path(g.out_dir) / (std::string("report_") + tname + ".txt");
        doc.write(rpath);
        outputs += doc.digest();
        any = true;
    }
    if (!any)
        throw MissingDependency("missing scan document: " +
                                (fs::path(g.out_dir) / "scan_I.txt").string());
    append_journal(g.out_dir, "report", hash, "-", hex64(fnv1a64(outputs)));
    std::cout << "report columns written\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hoslab: numerical laboratory for oscillatory fundamental solutions"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--symbol", g.symbol_path, "symbol file (YAML)");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "seed for randomized sampling");
    app.add_option("--tol", g.tol, "tolerance (absolute for eval, relative for scans)");
    app.add_option("--budget", g.budget, "integrand evaluation budget per call");
    app.add_option("--method", g.method, "evaluator: mollified | partition")
        ->check(CLI::IsMember({"mollified", "partition"}));

    auto* analyze = app.add_subcommand("analyze", "classify the symbol and derive exponents");
    analyze->fallthrough();

    double t = 1.0;
    std::string xs;
    auto* eval = app.add_subcommand("eval", "evaluate I(t, x)");
    eval->fallthrough();
    eval->add_option("--t", t, "time (nonzero)")->required();
    eval->add_option("--x", xs, "comma-separated spatial point (default 0)");

    double L_flag = 0.0;
    int grid_n = 41;
    double grid_radius = 0.0;
    auto* regions = app.add_subcommand("regions", "dump region membership and cutoffs on a grid");
    regions->fallthrough();
    regions->add_option("--t", t, "time (nonzero)")->required();
    regions->add_option("--x", xs, "comma-separated spatial point (default 0)");
    regions->add_option("--L", L_flag, "threshold radius (default: from analysis)");
    regions->add_option("--grid-n", grid_n, "points per axis");
    regions->add_option("--grid-radius", grid_radius, "half-width of the dump box");

    std::string target_opt = "both";
    int small_points = 12, large_points = 8;
    double t_min = 1e-3, t_max = 100.0;
    bool x_search = true;
    auto* scan = app.add_subcommand("scan", "two-regime decay scan with verdicts");
    scan->fallthrough();
    scan->add_option("--target", target_opt, "I | I1 | both")
        ->check(CLI::IsMember({"I", "I1", "both"}));
    scan->add_option("--small-points", small_points, "points in the small-t regime");
    scan->add_option("--large-points", large_points, "points in the large-t regime");
    scan->add_option("--t-min", t_min, "smallest t");
    scan->add_option("--t-max", t_max, "largest t");
    scan->add_flag("--x-search,!--no-x-search", x_search, "maximize over x (default on)");

    auto* verify = app.add_subcommand("verify", "recompute verdicts from stored scans");
    verify->fallthrough();
    auto* report = app.add_subcommand("report", "emit plot-ready log-log columns");
    report->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze) return cmd_analyze(g);
        if (*eval) return cmd_eval(g, t, xs);
        if (*regions) return cmd_regions(g, t, xs, L_flag, grid_n, grid_radius);
        if (*scan) return cmd_scan(g, target_opt, small_points, large_points, t_min, t_max, x_search);
        if (*verify) return cmd_verify(g);
        if (*report) return cmd_report(g);
    } catch (const SymbolParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ClassificationFailure& e) {
        std::cerr << "classification failure: " << e.what() << "\n";
        return 3;
    } catch (const MissingDependency& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
