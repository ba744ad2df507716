// End-to-end checks of the command-line tool: exit codes, emitted documents,
// and rerun determinism. Usage: cli_harness <hoslab-binary> <data-dir> <work-dir>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define REQUIRE(cond, msg)                                                       \
    do {                                                                         \
        if (!(cond)) {                                                           \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg  \
                      << "\n";                                                   \
            ++failures;                                                          \
        }                                                                        \
    } while (0)

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double doc_value(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + " = ");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(text.substr(pos + key.size() + 3));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 4) {
        std::cerr << "usage: cli_harness <hoslab> <data-dir> <work-dir>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path data = argv[2];
    const fs::path work = argv[3];
    fs::remove_all(work);
    fs::create_directories(work);

    const std::string quiet = " > /dev/null 2>&1";

    // analyze: healthy symbol.
    {
        const fs::path out = work / "a_quartic";
        const int rc = run(bin + " --symbol " + (data / "quartic.sym").string() + " --out " +
                           out.string() + " analyze" + quiet);
        REQUIRE(rc == 0, "analyze quartic exit code " << rc);
        const std::string doc = slurp(out / "analysis.txt");
        REQUIRE(doc.find("is_elliptic = true") != std::string::npos, "ellipticity missing");
        REQUIRE(std::abs(doc_value(doc, "b_hat") - 1.0) < 0.05, "b_hat off");
        REQUIRE(std::abs(doc_value(doc, "sigma") - 0.25) < 1e-12, "sigma off");
        REQUIRE(fs::exists(out / "journal.txt"), "journal missing");
    }

    // analyze: elliptic but sign-incoherent symbol -> classification failure.
    {
        const int rc = run(bin + " --symbol " + (data / "saddle.sym").string() + " --out " +
                           (work / "a_saddle").string() + " analyze" + quiet);
        REQUIRE(rc == 3, "analyze saddle exit code " << rc);
        const std::string doc = slurp(work / "a_saddle" / "analysis.txt");
        REQUIRE(doc.find("same_sign = false") != std::string::npos, "witness missing");
        REQUIRE(doc.find("sign_witness_point") != std::string::npos, "witness point missing");
    }

    // analyze: degenerate eigenvalue directions -> classification failure.
    {
        const int rc = run(bin + " --symbol " + (data / "quartic_sum2d.sym").string() +
                           " --out " + (work / "a_sum").string() + " analyze" + quiet);
        REQUIRE(rc == 3, "analyze quartic_sum2d exit code " << rc);
    }

    // analyze: non-elliptic symbol -> exit 2 with certificate.
    {
        const fs::path indef = work / "indef.sym";
        std::ofstream(indef) << "{n: 2, name: \"indef\", terms: [{exp: [4, 0], coef: 1.0}, "
                                "{exp: [0, 4], coef: -1.0}]}\n";
        const int rc = run(bin + " --symbol " + indef.string() + " --out " +
                           (work / "a_indef").string() + " analyze" + quiet);
        REQUIRE(rc == 2, "analyze indefinite exit code " << rc);
        REQUIRE(slurp(work / "a_indef" / "analysis.txt").find("is_elliptic = false") !=
                    std::string::npos,
                "certificate missing");
    }

    // analyze: malformed file -> exit 1.
    {
        const fs::path bad = work / "bad.sym";
        std::ofstream(bad) << "{n: 1, terms: [{exp: [4], coef: 1.0}, {exp: [4], coef: 2.0}]}\n";
        REQUIRE(run(bin + " --symbol " + bad.string() + " analyze" + quiet) == 1,
                "duplicate exponents should exit 1");
        const fs::path worse = work / "worse.sym";
        std::ofstream(worse) << "n: [1\n";
        REQUIRE(run(bin + " --symbol " + worse.string() + " analyze" + quiet) == 1,
                "broken yaml should exit 1");
    }

    // eval: free symbol magnitude, plus t = 0 rejection.
    {
        const fs::path out = work / "e_free";
        const int rc = run(bin + " --symbol " + (data / "free.sym").string() + " --out " +
                           out.string() + " --tol 1e-5 eval --t 1 --x 0" + quiet);
        REQUIRE(rc == 0, "eval free exit code " << rc);
        const std::string doc = slurp(out / "eval.txt");
        REQUIRE(std::abs(doc_value(doc, "magnitude") - 1.7724538509055160) < 1e-4,
                "free magnitude " << doc_value(doc, "magnitude"));
        REQUIRE(doc.find("converged = true") != std::string::npos, "eval unconverged");

        REQUIRE(run(bin + " --symbol " + (data / "free.sym").string() + " eval --t 0" + quiet) ==
                    2,
                "t = 0 should exit 2");
    }

    // eval: quartic against the Gamma-function oracle, both methods.
    {
        const fs::path out = work / "e_quartic";
        REQUIRE(run(bin + " --symbol " + (data / "quartic.sym").string() + " --out " +
                    out.string() + " --tol 1e-4 eval --t 1 --x 0" + quiet) == 0,
                "eval quartic failed");
        const double mag = doc_value(slurp(out / "eval.txt"), "magnitude");
        REQUIRE(std::abs(mag - 1.8128049541109542) < 2e-3, "quartic magnitude " << mag);

        REQUIRE(run(bin + " --symbol " + (data / "quartic.sym").string() + " --out " +
                    out.string() + " --tol 1e-3 --method partition eval --t 1 --x 0" + quiet) ==
                    0,
                "partition eval failed");
        const double mag2 = doc_value(slurp(out / "eval.txt"), "magnitude");
        REQUIRE(std::abs(mag2 - 1.8128049541109542) < 5e-3,
                "partition quartic magnitude " << mag2);
    }

    // regions dump.
    {
        const fs::path out = work / "r_free";
        const int rc = run(bin + " --symbol " + (data / "free.sym").string() + " --out " +
                           out.string() + " regions --t 1 --x -2 --L 0.5 --grid-n 21" + quiet);
        REQUIRE(rc == 0, "regions exit code " << rc);
        const std::string dump = slurp(out / "regions.txt");
        REQUIRE(dump.find("# columns: xi") != std::string::npos, "regions header missing");
        REQUIRE(dump.find(" 2 ") != std::string::npos || dump.find("2 ") != std::string::npos,
                "no stationary region rows");
    }

    // verify without scans -> missing dependency.
    REQUIRE(run(bin + " --out " + (work / "nothing").string() + " verify" + quiet) == 4,
            "verify without scans should exit 4");

    // scan -> verify -> report round trip (coarse grid to stay quick).
    {
        const fs::path out = work / "s_free";
        const int rc = run(bin + " --symbol " + (data / "free.sym").string() + " --out " +
                           out.string() + " --tol 2e-3 scan --target both --small-points 4" +
                           " --large-points 3 --no-x-search" + quiet);
        REQUIRE(rc == 0, "scan exit code " << rc);
        REQUIRE(fs::exists(out / "scan_I.txt"), "scan_I.txt missing");
        REQUIRE(fs::exists(out / "scan_I1.txt"), "scan_I1.txt missing");
        REQUIRE(slurp(out / "verdict_theorem1.txt").find("verdict = PASS") != std::string::npos,
                "theorem1 verdict not PASS");
        REQUIRE(slurp(out / "verdict_theorem2.txt").find("verdict = PASS") != std::string::npos,
                "theorem2 verdict not PASS");
        REQUIRE(fs::exists(out / "comparison.txt"), "comparison.txt missing");

        REQUIRE(run(bin + " --out " + out.string() + " verify" + quiet) == 0, "verify failed");
        REQUIRE(run(bin + " --out " + out.string() + " report" + quiet) == 0, "report failed");
        REQUIRE(fs::exists(out / "report_I.txt"), "report columns missing");
    }

    // Determinism: identical config + seed -> byte-identical documents.
    {
        const fs::path o1 = work / "d1";
        const fs::path o2 = work / "d2";
        const std::string common = std::string(" --symbol ") + (data / "quartic.sym").string() +
                                   " --seed 7 --tol 1e-4 eval --t 1 --x 0.5";
        REQUIRE(run(bin + " --out " + o1.string() + common + quiet) == 0, "det run 1");
        REQUIRE(run(bin + " --out " + o2.string() + common + quiet) == 0, "det run 2");
        REQUIRE(slurp(o1 / "eval.txt") == slurp(o2 / "eval.txt"),
                "eval documents differ between identical runs");
    }

    if (failures == 0) {
        std::cout << "cli_harness: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_harness: " << failures << " failure(s)\n";
    return 1;
}
