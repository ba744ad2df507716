#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoslab/bump.hpp"
#include "hoslab/linalg.hpp"
#include "hoslab/sphere.hpp"
#include "hoslab/symbol.hpp"

namespace hos {

/// |x/t| below this counts as zero; the stationary cutoff phi2 is then
/// defined as identically 0 and its mass folds into phi3.
inline constexpr double kXOverTZero = 1e-12;

/// Geometry of one (t, x) evaluation: the stationary scale r and the
/// low-frequency radius that delimit the integration regions.
struct RegionContext {
    double t = 0.0;
    std::vector<double> x;
    double L = 0.0;
    int m = 2;
    double r = 0.0;               // |x/t|^{1/(m-1)}
    double low_freq_radius = 0.0; // |t|^{-1/m}

    RegionContext(double t_, std::vector<double> x_, double L_, int m_)
        : t(t_), x(std::move(x_)), L(L_), m(m_) {
        if (t == 0.0) throw std::invalid_argument("RegionContext: t must be nonzero");
        if (!(L > 0.0)) throw std::invalid_argument("RegionContext: L must be positive");
        if (m < 2) throw std::invalid_argument("RegionContext: m must be >= 2");
        r = std::pow(norm2(x) / std::fabs(t), 1.0 / (m - 1));
        low_freq_radius = std::pow(std::fabs(t), -1.0 / m);
    }

    double x_over_t_norm() const { return norm2(x) / std::fabs(t); }
};

enum Region : unsigned {
    kOmegaC = 1u << 0, // |xi| < L
    kOmega1 = 1u << 1,
    kOmega2 = 1u << 2,
    kOmega3 = 1u << 3,
};

/// Region membership as a set; Omega2 and Omega3 overlap on the band
/// |x/t|/2 < |grad P + x/t| < |x/t| by construction.
inline unsigned classify(const RegionContext& ctx, const PolynomialSymbol& p,
                         const std::vector<double>& xi) {
    const double nrm = norm2(xi);
    if (nrm < ctx.L) return kOmegaC;
    unsigned set = 0;
    if (nrm < ctx.low_freq_radius) set |= kOmega1;
    if (nrm > 0.5 * ctx.low_freq_radius) {
        auto g = p.gradient(xi);
        const double xt = ctx.x_over_t_norm();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.x[i] / ctx.t;
        const double dev = norm2(g);
        if (dev < xt) set |= kOmega2;
        if (dev > 0.5 * xt) set |= kOmega3;
    }
    return set;
}

struct CutoffValues {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
};

/// The proof's partition of unity: phi1 localizes low frequencies, phi2 the
/// stationary region, phi3 is the complement so the three sum to 1 exactly.
inline CutoffValues cutoffs(const RegionContext& ctx, const PolynomialSymbol& p,
                            const std::vector<double>& xi) {
    CutoffValues c;
    const double nrm = norm2(xi);
    c.phi1 = bump(nrm * std::pow(std::fabs(ctx.t), 1.0 / ctx.m));
    const double xt = ctx.x_over_t_norm();
    if (xt >= kXOverTZero) {
        auto g = p.gradient(xi);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += ctx.x[i] / ctx.t;
        c.phi2 = (1.0 - c.phi1) * bump(norm2(g) / xt);
    }
    c.phi3 = 1.0 - c.phi1 - c.phi2;
    return c;
}

/// Maximal 1/4-packing of S^{n-1}: pairwise chord distance >= 1/4,
/// dense-sample verified covering radius < 1/4. n = 1 degenerates to {+1,-1};
/// n = 2 admits the exact answer (25 equally spaced directions); n = 3 uses a
/// greedy sweep over a dense candidate net.
inline std::vector<std::vector<double>> angular_net(int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("angular_net: n must be 1, 2 or 3");
    if (n == 1) return {{1.0}, {-1.0}};
    if (n == 2) {
        // floor(2 pi / (2 asin(1/8))) = 25 points; spacing 2 pi / 25 keeps the
        // chord just above 1/4 and the covering radius well below it.
        std::vector<std::vector<double>> net;
        for (int k = 0; k < 25; ++k) {
            const double th = 2.0 * M_PI * k / 25.0;
            net.push_back({std::cos(th), std::sin(th)});
        }
        return net;
    }
    const auto candidates = sphere_net(n, 8192);
    std::vector<std::vector<double>> net;
    for (const auto& c : candidates) {
        bool ok = true;
        for (const auto& q : net)
            if (chord_dist(c, q) < 0.25) {
                ok = false;
                break;
            }
        if (ok) net.push_back(c);
    }
    // Covering check against a denser sample.
    const auto probe = sphere_net(n, 10000);
    for (const auto& q : probe) {
        double best = 2.0;
        for (const auto& v : net) best = std::min(best, chord_dist(q, v));
        if (best >= 0.25) throw std::logic_error("angular_net: covering radius >= 1/4");
    }
    return net;
}

/// Sector weights chi_v(xi) = zeta_v / sum_l zeta_l with
/// zeta_v = bump(4 |xi/|xi| - xi_v|). The covering radius < 1/4 guarantees a
/// positive denominator.
inline std::vector<double> chi_partition(const std::vector<std::vector<double>>& net,
                                         const std::vector<double>& xi) {
    const double nrm = norm2(xi);
    if (nrm == 0.0) throw std::invalid_argument("chi_partition: xi must be nonzero");
    std::vector<double> dir(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) dir[i] = xi[i] / nrm;
    std::vector<double> zeta(net.size());
    double sum = 0.0;
    for (std::size_t v = 0; v < net.size(); ++v) {
        zeta[v] = bump(4.0 * chord_dist(dir, net[v]));
        sum += zeta[v];
    }
    if (sum <= 0.0) throw std::logic_error("chi_partition: no sector covers the direction");
    for (auto& z : zeta) z /= sum;
    return zeta;
}

/// Newton multistart solve of grad P(xi) = -x/t. Starts on a uniform grid in
/// the ball of search_radius; singular-Hessian iterates abandon that start.
/// Solutions are deduplicated after sorting by coordinates.
inline std::vector<std::vector<double>> stationary_points(const PolynomialSymbol& p, double t,
                                                          const std::vector<double>& x,
                                                          double search_radius) {
    if (t == 0.0) throw std::invalid_argument("stationary_points: t must be nonzero");
    const int n = p.dimension();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("stationary_points: x dimension mismatch");
    if (!(search_radius > 0.0)) throw std::invalid_argument("stationary_points: bad radius");

    std::vector<double> target(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) target[i] = -x[i] / t;
    const double target_norm = norm2(target);
    const double res_tol = 1e-10 * std::max(1.0, target_norm);

    const int per_axis = n == 1 ? 9 : (n == 2 ? 7 : 5);
    std::vector<std::vector<double>> starts;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<double> s(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d)
            s[static_cast<std::size_t>(d)] =
                -search_radius + 2.0 * search_radius * idx[static_cast<std::size_t>(d)] / (per_axis - 1);
        starts.push_back(s);
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == per_axis) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == n) break;
    }

    std::vector<std::vector<double>> sols;
    for (auto xi : starts) {
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            auto f = p.gradient(xi);
            for (std::size_t i = 0; i < f.size(); ++i) f[i] -= target[i];
            if (norm2(f) < res_tol) {
                ok = true;
                break;
            }
            const SymMat jac = p.hessian(xi);
            std::vector<double> step;
            for (auto& v : f) v = -v;
            if (!solve_dense(jac, f, step)) break;
            double sn = norm2(step);
            // Damp absurd steps so distant starts cannot shoot to infinity.
            const double cap = 4.0 * search_radius;
            if (sn > cap)
                for (auto& v : step) v *= cap / sn;
            for (std::size_t i = 0; i < xi.size(); ++i) xi[i] += step[i];
            if (norm2(xi) > 50.0 * search_radius) break;
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& s : sols)
            if (chord_dist(s, xi) < 1e-7 * (1.0 + norm2(xi))) {
                dup = true;
                break;
            }
        if (!dup) sols.push_back(xi);
    }
    std::sort(sols.begin(), sols.end());
    return sols;
}

/// Numerically estimated annulus containment 2*C1*r < |xi| < C2*r of the
/// stationary region Omega2 along net directions.
struct AnnulusBounds {
    bool nonempty = false;
    double c1 = 0.0;
    double c2 = 0.0;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
};

inline AnnulusBounds annulus_bounds(const RegionContext& ctx, const PolynomialSymbol& p,
                                    int rays = 0, int scan = 400) {
    AnnulusBounds out;
    if (ctx.r <= 0.0) return out;
    const int n = p.dimension();
    if (rays <= 0) rays = n == 1 ? 2 : (n == 2 ? 64 : 128);
    const auto net = sphere_net(n, rays);
    double inner = std::numeric_limits<double>::infinity();
    double outer = 0.0;
    for (const auto& w : net) {
        for (int i = 0; i <= scan; ++i) {
            const double rad = ctx.r * (0.01 + 10.0 * static_cast<double>(i) / scan);
            std::vector<double> xi(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) xi[k] = w[k] * rad;
            if (classify(ctx, p, xi) & kOmega2) {
                inner = std::min(inner, rad);
                outer = std::max(outer, rad);
            }
        }
    }
    if (outer > 0.0) {
        out.nonempty = true;
        out.inner_radius = inner;
        out.outer_radius = outer;
        out.c1 = inner / (2.0 * ctx.r);
        out.c2 = outer / ctx.r;
    }
    return out;
}

struct GradientSeparationReport {
    bool vacuous = true;      // sector produced no sample pairs
    double c_emp = 0.0;       // min |grad P(xi) - grad P(xi')| / (r^{b(m-2)} |xi - xi'|)
    std::size_t pairs = 0;
    std::vector<double> sector_direction;
    AnnulusBounds annulus;
    double c1_r = 0.0; // C1 * r, to compare against L
};

/// Empirical check of the gradient-separation inequality on one sector of
/// the stationary region: samples pairs in Omega2^v and reports the worst
/// ratio constant. Deterministic given the seed.
inline GradientSeparationReport check_gradient_separation(const PolynomialSymbol& p, double b,
                                                          double L, double t,
                                                          const std::vector<double>& x,
                                                          int sector_samples, int pair_count,
                                                          std::uint64_t seed = 1) {
    const int n = p.dimension();
    RegionContext ctx(t, x, L, p.degree());
    GradientSeparationReport rep;
    rep.annulus = annulus_bounds(ctx, p);
    rep.c1_r = rep.annulus.c1 * ctx.r;
    if (!rep.annulus.nonempty) return rep;

    // Sector direction: aim at the stationary set via a representative
    // Omega2 point found during the annulus scan direction sweep.
    const auto net = angular_net(n);
    std::vector<double> xt(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = -x[i] / t;
    const double xtn = norm2(xt);
    std::vector<double> aim = net.front();
    if (xtn > 0.0) {
        // Gradients of elliptic symbols roughly align with the ray direction
        // at large radii, so seed the sector from the -x/t direction.
        double best = -2.0;
        for (const auto& v : net) {
            double d = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * xt[i] / xtn;
            if (d > best) {
                best = d;
                aim = v;
            }
        }
    }
    rep.sector_direction = aim;

    // Rejection-sample sector points.
    std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
    auto next_unit = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    std::vector<std::vector<double>> pts;
    const double rlo = rep.annulus.inner_radius;
    const double rhi = rep.annulus.outer_radius;
    for (int attempt = 0; attempt < 200 * sector_samples && static_cast<int>(pts.size()) < sector_samples;
         ++attempt) {
        std::vector<double> dir(static_cast<std::size_t>(n));
        double nn = 0.0;
        for (auto& d : dir) {
            d = 2.0 * next_unit() - 1.0;
            nn += d * d;
        }
        nn = std::sqrt(nn);
        if (nn < 1e-9) continue;
        for (auto& d : dir) d /= nn;
        if (chord_dist(dir, aim) >= 0.5) continue; // Omega2^v sector constraint
        const double rad = rlo + (rhi - rlo) * next_unit();
        std::vector<double> xi(dir.size());
        for (std::size_t i = 0; i < dir.size(); ++i) xi[i] = dir[i] * rad;
        if (!(classify(ctx, p, xi) & kOmega2)) continue;
        pts.push_back(xi);
    }
    if (pts.size() < 2) return rep;

    rep.vacuous = false;
    const double scale = std::pow(ctx.r, b * (p.degree() - 2));
    double cmin = std::numeric_limits<double>::infinity();
    std::size_t done = 0;
    for (int k = 0; k < pair_count; ++k) {
        const std::size_t i = static_cast<std::size_t>(next_unit() * pts.size());
        const std::size_t j = static_cast<std::size_t>(next_unit() * pts.size());
        if (i == j || i >= pts.size() || j >= pts.size()) continue;
        const double dist = chord_dist(pts[i], pts[j]);
        if (dist < 1e-12) continue;
        auto gi = p.gradient(pts[i]);
        const auto gj = p.gradient(pts[j]);
        for (std::size_t q = 0; q < gi.size(); ++q) gi[q] -= gj[q];
        cmin = std::min(cmin, norm2(gi) / (scale * dist));
        ++done;
    }
    rep.pairs = done;
    rep.c_emp = done > 0 ? cmin : 0.0;
    return rep;
}

} // namespace hos
