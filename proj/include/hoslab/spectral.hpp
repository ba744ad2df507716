#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoslab/linalg.hpp"
#include "hoslab/sphere.hpp"
#include "hoslab/symbol.hpp"

namespace hos {

/// Eigenvalues below this magnitude count as numerically zero in the sign
/// coherence check.
inline constexpr double kEigenZeroTol = 1e-9;

struct SignWitness {
    std::vector<double> point;
    double lambda_neg = 0.0;
    double lambda_pos = 0.0;
};

struct RaySlope {
    std::vector<double> direction;
    double slope = 0.0; // d log(min |lambda|) / d log R over the top decade
};

struct SpectralReport {
    double b_hat = 0.0;
    bool b_flagged_m2 = false; // m = 2: (m-2)b vanishes, b reported as 1 by convention
    bool same_sign = false;
    std::optional<SignWitness> sign_witness;
    double L = 0.0;
    double c_lambda = 0.0; // inf of min|lambda_k| / |xi|^{(m-2)b} on the certified region
    double c_grad = 0.0;   // inf of |grad P| / |xi|^{m-1} on the certified region
    std::vector<RaySlope> ray_slopes;
    bool classified = false; // L found and sign check passed
    std::optional<std::vector<double>> degeneracy_witness; // ray point with exactly-zero min eigenvalue
    std::string note;
};

struct ExponentRecord {
    int n = 0;
    int m = 0;
    double b = 0.0;
    double sigma = 0.0;
    double rho_b = 0.0;
    double cui_small_t = 0.0; // n/m
    double new_large_t = 0.0; // -n/2
    bool rho_ge_minus_half_n = false;
    bool flagged = false; // b outside [1/2, 1] or m = 2 convention in play
};

/// Geometric radius grid.
struct RadiusGrid {
    double lo = 10.0;
    double hi = 1000.0;
    int count = 16;

    std::vector<double> points() const {
        if (!(lo > 0.0) || !(hi > lo) || count < 2)
            throw std::invalid_argument("RadiusGrid: need 0 < lo < hi and count >= 2");
        std::vector<double> r(static_cast<std::size_t>(count));
        const double q = std::log(hi / lo) / (count - 1);
        for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = lo * std::exp(q * i);
        return r;
    }
};

inline std::vector<double> hessian_eigenvalues(const PolynomialSymbol& p,
                                               const std::vector<double>& xi) {
    if (p.dimension() > 3) throw std::invalid_argument("hessian_eigenvalues: n <= 3 supported");
    return sym_eigenvalues(p.hessian(xi));
}

namespace detail {

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = k * sxx - sx * sx;
    if (den == 0.0) return 0.0;
    return (k * sxy - sx * sy) / den;
}

inline int default_direction_count(int n) { return n == 1 ? 2 : (n == 2 ? 64 : 256); }

inline std::vector<double> scale_vec(const std::vector<double>& w, double r) {
    std::vector<double> p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] * r;
    return p;
}

} // namespace detail

struct BEstimate {
    double b_hat = 0.0;
    bool flagged_m2 = false;
    std::vector<RaySlope> ray_slopes;
    std::optional<std::vector<double>> degeneracy_witness;
};

/// Per-ray log-log growth of the smallest Hessian eigenvalue magnitude, then
/// b_hat = (min slope) / (m - 2) clamped to [0, 1]. The fit runs over the top
/// decade of the radius grid. A ray with an exactly-zero minimum eigenvalue
/// short-circuits to b_hat = 0 with that point as witness.
inline BEstimate estimate_b(const PolynomialSymbol& p, int directions = 0,
                            RadiusGrid radii = RadiusGrid{}) {
    const int n = p.dimension();
    const int m = p.degree();
    BEstimate out;
    if (m == 2) {
        out.b_hat = 1.0;
        out.flagged_m2 = true;
        return out;
    }
    if (m < 3) throw std::invalid_argument("estimate_b: degree must be >= 2");
    if (directions <= 0) directions = detail::default_direction_count(n);

    const auto net = sphere_net(n, directions);
    const auto rs = radii.points();
    if (rs.back() / rs.front() < 99.0)
        throw std::invalid_argument("estimate_b: radius grid must span >= 2 decades");
    const double fit_lo = rs.back() / 10.0;

    double min_slope = std::numeric_limits<double>::infinity();
    for (const auto& w : net) {
        std::vector<double> lx, ly;
        for (double r : rs) {
            const auto ev = hessian_eigenvalues(p, detail::scale_vec(w, r));
            double mn = std::numeric_limits<double>::infinity();
            for (double l : ev) mn = std::min(mn, std::fabs(l));
            if (mn < 1e-280) {
                out.b_hat = 0.0;
                out.degeneracy_witness = detail::scale_vec(w, r);
                out.ray_slopes.push_back({w, 0.0});
                return out;
            }
            if (r >= fit_lo) {
                lx.push_back(std::log(r));
                ly.push_back(std::log(mn));
            }
        }
        const double s = detail::ls_slope(lx, ly);
        out.ray_slopes.push_back({w, s});
        min_slope = std::min(min_slope, s);
    }
    out.b_hat = std::clamp(min_slope / (m - 2), 0.0, 1.0);
    return out;
}

struct SameSignResult {
    bool same_sign = false;
    std::optional<SignWitness> witness;
    int skipped_zeros = 0;
};

/// Samples |xi| in [L, 10L] quasi-uniformly; true iff every eigenvalue with
/// |lambda| > 1e-9 carries one common sign across all samples.
inline SameSignResult same_sign_check(const PolynomialSymbol& p, double L, int samples = 512) {
    if (!(L > 0.0)) throw std::invalid_argument("same_sign_check: L must be positive");
    const int n = p.dimension();
    const int radii = 8;
    const int dirs = std::max(2, samples / radii);
    const auto net = sphere_net(n, dirs);

    SameSignResult res;
    int sign = 0; // 0: undetermined, +1 / -1 once seen
    for (int i = 0; i < radii; ++i) {
        const double r = L * std::pow(10.0, static_cast<double>(i) / (radii - 1));
        for (const auto& w : net) {
            const auto point = detail::scale_vec(w, r);
            const auto ev = hessian_eigenvalues(p, point);
            for (double l : ev) {
                if (std::fabs(l) <= kEigenZeroTol) {
                    ++res.skipped_zeros;
                    continue;
                }
                const int s = l > 0.0 ? 1 : -1;
                if (sign == 0) sign = s;
                else if (s != sign) {
                    res.same_sign = false;
                    res.witness = SignWitness{point, ev.front(), ev.back()};
                    return res;
                }
            }
        }
    }
    res.same_sign = true;
    return res;
}

struct LSearchResult {
    bool found = false;
    double L = 0.0;
    double c_lambda = 0.0;
    double c_grad = 0.0;
    std::vector<double> offending_direction; // direction of the failing infimum when not found
};

/// Smallest grid radius L such that on all samples with |xi| in [L, R_max]
/// the ratios min|lambda|/|xi|^{(m-2)b} and |grad P|/|xi|^{m-1} stay
/// positive. The reported constants are the sampled infima, so the bounds
/// hold on the sampled set by construction.
inline LSearchResult find_L(const PolynomialSymbol& p, double b,
                            RadiusGrid grid = RadiusGrid{0.5, 200.0, 32}, int directions = 0) {
    if (b < 0.0 || b > 1.0) throw std::invalid_argument("find_L: b must lie in [0, 1]");
    const int n = p.dimension();
    const int m = p.degree();
    if (directions <= 0) directions = detail::default_direction_count(n);
    const auto net = sphere_net(n, directions);
    const auto rs = grid.points();
    const std::size_t nr = rs.size();

    // Per-radius minima over directions, with the achieving direction.
    std::vector<double> min_lam(nr, std::numeric_limits<double>::infinity());
    std::vector<double> min_grd(nr, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> argdir(nr, 0);
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = rs[i];
        const double lam_scale = std::pow(r, (m - 2) * b);
        const double grd_scale = std::pow(r, m - 1);
        for (std::size_t d = 0; d < net.size(); ++d) {
            const auto point = detail::scale_vec(net[d], r);
            const auto ev = hessian_eigenvalues(p, point);
            double mn = std::numeric_limits<double>::infinity();
            for (double l : ev) mn = std::min(mn, std::fabs(l));
            const double rl = mn / lam_scale;
            const double rg = norm2(p.gradient(point)) / grd_scale;
            if (rl < min_lam[i]) {
                min_lam[i] = rl;
                argdir[i] = d;
            }
            min_grd[i] = std::min(min_grd[i], rg);
        }
    }
    // Suffix infima: candidate L = rs[i] certifies [rs[i], R_max].
    std::vector<double> suf_lam(nr), suf_grd(nr);
    double al = std::numeric_limits<double>::infinity();
    double ag = std::numeric_limits<double>::infinity();
    std::size_t worst = nr - 1;
    for (std::size_t i = nr; i-- > 0;) {
        if (min_lam[i] < al) {
            al = min_lam[i];
            worst = i;
        }
        ag = std::min(ag, min_grd[i]);
        suf_lam[i] = al;
        suf_grd[i] = ag;
    }

    LSearchResult res;
    constexpr double floor = 1e-9;
    for (std::size_t i = 0; i < nr; ++i) {
        if (suf_lam[i] > floor && suf_grd[i] > floor) {
            res.found = true;
            res.L = rs[i];
            res.c_lambda = suf_lam[i];
            res.c_grad = suf_grd[i];
            return res;
        }
    }
    res.found = false;
    res.offending_direction = net[argdir[worst]];
    return res;
}

/// sigma = n / ((2b - 1)(m - 2) + 2).
inline double sigma_exponent(int n, int m, double b) {
    if (n < 1 || m < 2) throw std::invalid_argument("sigma: need n >= 1, m >= 2");
    const double den = (2.0 * b - 1.0) * (m - 2) + 2.0;
    if (!(den > 0.0)) throw std::domain_error("sigma: non-positive denominator");
    return n / den;
}

/// rho_b = n ((m - 3) - b (m - 2)) / ((m - 2)(2b - 1) + 2).
inline double rho_b_exponent(int n, int m, double b) {
    if (n < 1 || m < 2) throw std::invalid_argument("rho_b: need n >= 1, m >= 2");
    const double den = (m - 2) * (2.0 * b - 1.0) + 2.0;
    if (!(den > 0.0)) throw std::domain_error("rho_b: non-positive denominator");
    return n * ((m - 3) - b * (m - 2)) / den;
}

inline ExponentRecord exponent_table(int n, int m, double b) {
    ExponentRecord rec;
    rec.n = n;
    rec.m = m;
    rec.b = b;
    rec.sigma = sigma_exponent(n, m, b);
    rec.rho_b = rho_b_exponent(n, m, b);
    rec.cui_small_t = static_cast<double>(n) / m;
    rec.new_large_t = -0.5 * n;
    rec.rho_ge_minus_half_n = rec.rho_b >= rec.new_large_t - 1e-12;
    rec.flagged = (b < 0.5 || b > 1.0) || m == 2;
    return rec;
}

/// Full classification pipeline: b estimate, threshold radius, sign check.
inline SpectralReport classify_symbol(const PolynomialSymbol& p,
                                      RadiusGrid b_radii = RadiusGrid{},
                                      RadiusGrid l_grid = RadiusGrid{0.5, 200.0, 32}) {
    SpectralReport rep;
    const auto be = estimate_b(p, 0, b_radii);
    rep.b_hat = be.b_hat;
    rep.b_flagged_m2 = be.flagged_m2;
    rep.ray_slopes = be.ray_slopes;
    rep.degeneracy_witness = be.degeneracy_witness;
    if (be.flagged_m2) rep.note = "m=2: (m-2)b degenerates; b=1 by convention";
    if (be.degeneracy_witness) {
        rep.note = "zero Hessian eigenvalue along a ray";
        rep.classified = false;
        return rep;
    }
    const auto ls = find_L(p, rep.b_hat, l_grid);
    if (!ls.found) {
        rep.note = "no threshold radius L certifies the lower bounds up to R_max";
        rep.classified = false;
        return rep;
    }
    rep.L = ls.L;
    rep.c_lambda = ls.c_lambda;
    rep.c_grad = ls.c_grad;
    const auto ss = same_sign_check(p, rep.L);
    rep.same_sign = ss.same_sign;
    rep.sign_witness = ss.witness;
    rep.classified = ss.same_sign;
    if (!ss.same_sign) rep.note = "Hessian eigenvalues change sign on |xi| >= L";
    return rep;
}

} // namespace hos
