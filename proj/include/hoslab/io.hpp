#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hoslab/decay.hpp"
#include "hoslab/spectral.hpp"
#include "hoslab/symbol.hpp"
#include "hoslab/version.hpp"

namespace hos {

/// Fixed 17-significant-digit rendering: deterministic and round-trippable.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Flat ordered key = value document with deterministic rendering.
class TextDocument {
public:
    void comment(const std::string& text) { lines_.push_back("# " + text); }
    void put(const std::string& key, const std::string& value) {
        lines_.push_back(key + " = " + value);
    }
    void put(const std::string& key, const char* value) { put(key, std::string(value)); }
    void put(const std::string& key, double value) { put(key, format_real(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }
    void put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
    void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }

    std::string str() const {
        std::string out;
        for (const auto& l : lines_) {
            out += l;
            out += '\n';
        }
        return out;
    }

    std::string digest() const { return hex64(fnv1a64(str())); }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << str();
    }

private:
    std::vector<std::string> lines_;
};

// ---------------------------------------------------------------------------
// Symbol files
// ---------------------------------------------------------------------------

struct SymbolParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a symbol document: fields n, name, terms[{exp, coef}].
/// YAML superset of the flow style {n: 1, name: "quartic",
/// terms: [{exp: [4], coef: 1.0}]}. Duplicate exponent tuples are rejected.
inline PolynomialSymbol parse_symbol(const std::string& text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw SymbolParseError("symbol parse error at line " + std::to_string(e.mark.line + 1) +
                               ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    try {
        if (!doc.IsMap()) throw SymbolParseError("symbol document must be a mapping");
        if (!doc["n"]) throw SymbolParseError("missing field: n");
        const int n = doc["n"].as<int>();
        std::string name = doc["name"] ? doc["name"].as<std::string>() : "";
        if (!doc["terms"] || !doc["terms"].IsSequence())
            throw SymbolParseError("missing or malformed field: terms");
        std::vector<std::pair<MultiIndex, double>> terms;
        for (const auto& t : doc["terms"]) {
            if (!t["exp"] || !t["exp"].IsSequence()) throw SymbolParseError("term missing exp list");
            if (!t["coef"]) throw SymbolParseError("term missing coef");
            MultiIndex e;
            for (const auto& v : t["exp"]) e.push_back(v.as<int>());
            terms.emplace_back(std::move(e), t["coef"].as<double>());
        }
        return PolynomialSymbol(n, terms, name);
    } catch (const SymbolParseError&) {
        throw;
    } catch (const YAML::Exception& e) {
        throw SymbolParseError("symbol field error at line " + std::to_string(e.mark.line + 1) +
                               ": " + e.msg);
    } catch (const std::invalid_argument& e) {
        throw SymbolParseError(std::string("invalid symbol: ") + e.what());
    }
}

inline PolynomialSymbol load_symbol(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SymbolParseError("cannot open symbol file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_symbol(ss.str());
}

inline std::string symbol_to_yaml(const PolynomialSymbol& p) {
    std::string out;
    out += "n: " + std::to_string(p.dimension()) + "\n";
    out += "name: \"" + p.name() + "\"\n";
    out += "terms:\n";
    for (const auto& [exp, coef] : p.terms()) {
        out += "  - {exp: [";
        for (std::size_t i = 0; i < exp.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(exp[i]);
        }
        out += "], coef: " + format_real(coef) + "}\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

inline void put_vector(TextDocument& doc, const std::string& key, const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += " ";
        s += format_real(v[i]);
    }
    doc.put(key, s);
}

inline TextDocument analysis_document(const PolynomialSymbol& p, const EllipticityCertificate& cert,
                                      const SpectralReport& rep, const ExponentRecord& rec,
                                      const std::string& config_hash) {
    TextDocument doc;
    doc.comment("analysis of symbol '" + p.name() + "'");
    doc.put("version", kVersion);
    doc.put("config_hash", config_hash);
    doc.put("symbol_name", p.name());
    doc.put("n", p.dimension());
    doc.put("m", p.degree());
    doc.put("is_elliptic", cert.is_elliptic);
    doc.put("min_principal_on_sphere", cert.min_principal_on_sphere);
    doc.put("sphere_sample_count", cert.sample_count);
    put_vector(doc, "witness_direction", cert.witness_direction);
    doc.put("lipschitz_margin", cert.lipschitz_margin);
    doc.put("b_hat", rep.b_hat);
    doc.put("b_flagged_m2", rep.b_flagged_m2);
    doc.put("same_sign", rep.same_sign);
    if (rep.sign_witness) {
        put_vector(doc, "sign_witness_point", rep.sign_witness->point);
        doc.put("sign_witness_lambda_neg", rep.sign_witness->lambda_neg);
        doc.put("sign_witness_lambda_pos", rep.sign_witness->lambda_pos);
    }
    doc.put("L", rep.L);
    doc.put("c_lambda", rep.c_lambda);
    doc.put("c_grad", rep.c_grad);
    doc.put("classified", rep.classified);
    if (!rep.note.empty()) doc.put("note", rep.note);
    if (rep.degeneracy_witness) put_vector(doc, "degeneracy_witness", *rep.degeneracy_witness);
    doc.put("ray_slope_count", rep.ray_slopes.size());
    for (std::size_t i = 0; i < rep.ray_slopes.size(); ++i) {
        put_vector(doc, "ray_" + std::to_string(i) + "_direction", rep.ray_slopes[i].direction);
        doc.put("ray_" + std::to_string(i) + "_slope", rep.ray_slopes[i].slope);
    }
    doc.put("sigma", rec.sigma);
    doc.put("rho_b", rec.rho_b);
    doc.put("cui_small_t", rec.cui_small_t);
    doc.put("new_large_t", rec.new_large_t);
    doc.put("rho_ge_minus_half_n", rec.rho_ge_minus_half_n);
    doc.put("exponent_flagged", rec.flagged);
    return doc;
}

inline const char* target_name(ScanTarget t) { return t == ScanTarget::I ? "I" : "I1"; }

inline TextDocument scan_document(const DecayScan& scan, const std::string& config_hash) {
    TextDocument doc;
    doc.comment("decay scan");
    doc.put("version", kVersion);
    doc.put("config_hash", config_hash);
    doc.put("symbol_name", scan.symbol_name);
    doc.put("target", target_name(scan.target));
    doc.put("n", scan.n);
    doc.put("m", scan.m);
    doc.put("b", scan.b);
    doc.put("L", scan.L);
    doc.put("sigma", scan.sigma);
    doc.put("reliable", scan.reliable);
    doc.put("slope_small_t", scan.fit_small.valid ? scan.fit_small.slope
                                                  : std::numeric_limits<double>::quiet_NaN());
    doc.put("slope_large_t", scan.fit_large.valid ? scan.fit_large.slope
                                                  : std::numeric_limits<double>::quiet_NaN());
    doc.put("edge_slope_small", scan.edge_slope_small);
    doc.put("edge_slope_large", scan.edge_slope_large);
    doc.put("c_small", scan.c_small);
    doc.put("c_large", scan.c_large);
    doc.comment("rows: regime t amplitude eval_error amp_t_sigma amp_t_half_n x_star...");
    auto emit = [&](const ScanPoint& q, const char* regime, int idx) {
        std::string key = std::string("row_") + regime + "_" + std::to_string(idx);
        std::string val = format_real(q.t) + " " + format_real(q.amplitude) + " " +
                          format_real(q.eval_error) + " " +
                          format_real(q.amplitude * std::pow(q.t, scan.sigma)) + " " +
                          format_real(q.amplitude * std::pow(q.t, 0.5 * scan.n));
        for (double c : q.x_star) val += " " + format_real(c);
        doc.put(key, val);
    };
    doc.put("small_count", scan.small_t.size());
    for (std::size_t i = 0; i < scan.small_t.size(); ++i)
        emit(scan.small_t[i], "small", static_cast<int>(i));
    doc.put("large_count", scan.large_t.size());
    for (std::size_t i = 0; i < scan.large_t.size(); ++i)
        emit(scan.large_t[i], "large", static_cast<int>(i));
    return doc;
}

/// Parse a scan document back (verify/report run from stored artifacts).
inline DecayScan parse_scan_document(const std::string& text) {
    DecayScan scan;
    std::istringstream in(text);
    std::string line;
    auto value_of = [](const std::string& l) {
        const auto pos = l.find(" = ");
        return pos == std::string::npos ? std::string() : l.substr(pos + 3);
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto pos = line.find(" = ");
        if (pos == std::string::npos) continue;
        const std::string key = line.substr(0, pos);
        const std::string val = value_of(line);
        auto parse_point = [&](const std::string& v) {
            ScanPoint q;
            std::istringstream vs(v);
            double sig_w, half_w;
            vs >> q.t >> q.amplitude >> q.eval_error >> sig_w >> half_w;
            double c;
            while (vs >> c) q.x_star.push_back(c);
            return q;
        };
        if (key == "symbol_name") scan.symbol_name = val;
        else if (key == "target") scan.target = val == "I1" ? ScanTarget::I1 : ScanTarget::I;
        else if (key == "n") scan.n = std::stoi(val);
        else if (key == "m") scan.m = std::stoi(val);
        else if (key == "b") scan.b = std::stod(val);
        else if (key == "L") scan.L = std::stod(val);
        else if (key == "sigma") scan.sigma = std::stod(val);
        else if (key == "reliable") scan.reliable = val == "true";
        else if (key == "edge_slope_small") scan.edge_slope_small = std::stod(val);
        else if (key == "edge_slope_large") scan.edge_slope_large = std::stod(val);
        else if (key == "c_small") scan.c_small = std::stod(val);
        else if (key == "c_large") scan.c_large = std::stod(val);
        else if (key.rfind("row_small_", 0) == 0) scan.small_t.push_back(parse_point(val));
        else if (key.rfind("row_large_", 0) == 0) scan.large_t.push_back(parse_point(val));
    }
    auto refit = [](const std::vector<ScanPoint>& pts) {
        std::vector<double> ts, ys;
        for (const auto& q : pts) {
            ts.push_back(q.t);
            ys.push_back(q.amplitude);
        }
        return fit_powerlaw(ts, ys);
    };
    scan.fit_small = refit(scan.small_t);
    scan.fit_large = refit(scan.large_t);
    return scan;
}

inline TextDocument verdict_document(const VerdictReport& rep, const std::string& config_hash) {
    TextDocument doc;
    doc.comment("verdict for " + rep.theorem);
    doc.put("version", kVersion);
    doc.put("config_hash", config_hash);
    doc.put("theorem", rep.theorem);
    doc.put("sigma", rep.sigma);
    doc.put("c_small", rep.c_small);
    doc.put("c_large", rep.c_large);
    for (const auto& c : rep.checks) {
        doc.put("check." + c.name + ".applicable", c.applicable);
        doc.put("check." + c.name + ".pass", c.pass);
        doc.put("check." + c.name + ".measured", c.measured);
        doc.put("check." + c.name + ".threshold", c.threshold);
    }
    doc.put("verdict", std::string(rep.pass ? "PASS" : "FAIL"));
    return doc;
}

inline TextDocument comparison_document(const std::vector<ComparisonRow>& rows,
                                        const std::string& config_hash) {
    TextDocument doc;
    doc.comment("exponent comparison: this work vs prior small/large time rates");
    doc.put("version", kVersion);
    doc.put("config_hash", config_hash);
    for (const auto& r : rows) {
        doc.put(r.regime + ".this_exponent", r.this_exponent);
        doc.put(r.regime + ".yao_exponent", r.yao_exponent);
        doc.put(r.regime + ".cui_exponent", r.cui_exponent);
        doc.put(r.regime + ".measured_slope", r.measured_slope);
        if (!r.note.empty()) doc.put(r.regime + ".note", r.note);
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Journal
// ---------------------------------------------------------------------------

inline std::string file_digest(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "missing";
    std::stringstream ss;
    ss << f.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

inline void append_journal(const std::filesystem::path& out_dir, const std::string& command,
                           const std::string& config_hash, const std::string& input_digest,
                           const std::string& output_digest) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char ts[32];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    std::ofstream f(out_dir / "journal.txt", std::ios::app | std::ios::binary);
    f << "ts=" << ts << " command=" << command << " config=" << config_hash
      << " input=" << input_digest << " output=" << output_digest << " version=" << kVersion
      << "\n";
}

} // namespace hos
