#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hoslab/linalg.hpp"
#include "hoslab/sphere.hpp"

namespace hos {

/// Multi-index: length-n tuple of non-negative integer exponents.
using MultiIndex = std::vector<int>;

/// Dense univariate polynomial, coefficients in ascending degree.
/// Used as the fast evaluation form on lines (Horner).
class Poly1 {
public:
    Poly1() = default;
    explicit Poly1(std::vector<double> coefs) : c_(std::move(coefs)) { trim(); }

    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
        return v;
    }

    Poly1 derivative() const {
        if (c_.size() <= 1) return Poly1{};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Poly1(std::move(d));
    }

    int degree() const { return c_.empty() ? 0 : static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coefficients() const { return c_; }

    /// Roots in [a, b] by sign-scan plus bisection. Resolution-limited: used
    /// to seed quadrature panel boundaries, not as a certified root finder.
    std::vector<double> real_roots_in(double a, double b, int scan = 512) const {
        std::vector<double> roots;
        if (c_.size() <= 1) return roots;
        double prev = (*this)(a);
        double xprev = a;
        for (int i = 1; i <= scan; ++i) {
            const double x = a + (b - a) * i / scan;
            const double v = (*this)(x);
            if (prev == 0.0) roots.push_back(xprev);
            else if (v != 0.0 && (prev < 0.0) != (v < 0.0)) {
                double lo = xprev, hi = x, flo = prev;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = (*this)(mid);
                    if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; }
                    else hi = mid;
                }
                roots.push_back(0.5 * (lo + hi));
            }
            prev = v;
            xprev = x;
        }
        if (prev == 0.0) roots.push_back(xprev);
        // Merge near-coincident hits (a grid sample landing on a root reports
        // both the sample and the bracketing pass).
        const double sep = 0.5 * (b - a) / scan;
        std::vector<double> out;
        for (double r : roots)
            if (out.empty() || r - out.back() > sep) out.push_back(r);
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

/// Sparse multivariate real polynomial P: the symbol of the evolution
/// equation. Immutable after construction; all operations are pure.
class PolynomialSymbol {
public:
    PolynomialSymbol() = default;

    /// Normalizes: drops exact-zero coefficients, validates exponents and
    /// finiteness, caches the total degree m. Duplicate multi-indices are
    /// rejected (they indicate a malformed source document).
    PolynomialSymbol(int dimension, const std::vector<std::pair<MultiIndex, double>>& terms,
                     std::string name = "")
        : n_(dimension), name_(std::move(name)) {
        if (n_ < 1) throw std::invalid_argument("symbol: dimension must be >= 1");
        for (const auto& [exp, coef] : terms) {
            if (static_cast<int>(exp.size()) != n_)
                throw std::invalid_argument("symbol: exponent tuple length does not match dimension");
            for (int e : exp)
                if (e < 0) throw std::invalid_argument("symbol: negative exponent");
            if (!std::isfinite(coef)) throw std::invalid_argument("symbol: non-finite coefficient");
            if (coef == 0.0) continue;
            auto [it, inserted] = terms_.emplace(exp, coef);
            (void)it;
            if (!inserted) throw std::invalid_argument("symbol: duplicate exponent tuple");
        }
        m_ = 0;
        for (const auto& [exp, coef] : terms_)
            m_ = std::max(m_, std::accumulate(exp.begin(), exp.end(), 0));
        flat_.assign(terms_.begin(), terms_.end());
    }

    int dimension() const { return n_; }
    int degree() const { return m_; } // total degree m; 0 for the zero polynomial
    bool is_zero() const { return terms_.empty(); }
    const std::string& name() const { return name_; }
    const std::map<MultiIndex, double>& terms() const { return terms_; }

    double eval(const std::vector<double>& xi) const {
        check_dim(xi);
        double s = 0.0;
        for (const auto& [exp, coef] : flat_) s += coef * power_product(exp, xi);
        return s;
    }

    std::vector<double> gradient(const std::vector<double>& xi) const {
        check_dim(xi);
        std::vector<double> g(static_cast<std::size_t>(n_), 0.0);
        for (const auto& [exp, coef] : flat_) {
            for (int j = 0; j < n_; ++j) {
                const int ej = exp[static_cast<std::size_t>(j)];
                if (ej == 0) continue;
                double p = coef * ej;
                for (int k = 0; k < n_; ++k) {
                    const int e = exp[static_cast<std::size_t>(k)] - (k == j ? 1 : 0);
                    p *= int_pow(xi[static_cast<std::size_t>(k)], e);
                }
                g[static_cast<std::size_t>(j)] += p;
            }
        }
        return g;
    }

    SymMat hessian(const std::vector<double>& xi) const {
        check_dim(xi);
        SymMat h(n_);
        // Build the upper triangle, then mirror: exactly symmetric output.
        for (int i = 0; i < n_; ++i) {
            for (int j = i; j < n_; ++j) {
                double s = 0.0;
                for (const auto& [exp, coef] : flat_) {
                    const int ei = exp[static_cast<std::size_t>(i)];
                    const int ej = exp[static_cast<std::size_t>(j)];
                    double f;
                    if (i == j) {
                        if (ei < 2) continue;
                        f = static_cast<double>(ei) * (ei - 1);
                    } else {
                        if (ei < 1 || ej < 1) continue;
                        f = static_cast<double>(ei) * ej;
                    }
                    double p = coef * f;
                    for (int k = 0; k < n_; ++k) {
                        int e = exp[static_cast<std::size_t>(k)];
                        if (k == i) e -= (i == j ? 2 : 1);
                        if (k == j && i != j) e -= 1;
                        p *= int_pow(xi[static_cast<std::size_t>(k)], e);
                    }
                    s += p;
                }
                h.at(i, j) = s;
                h.at(j, i) = s;
            }
        }
        return h;
    }

    /// Exactly the degree-k terms; zero polynomial (empty map) if none.
    PolynomialSymbol homogeneous_part(int k) const {
        if (k < 0 || k > m_) throw std::invalid_argument("homogeneous_part: k out of range");
        std::vector<std::pair<MultiIndex, double>> t;
        for (const auto& [exp, coef] : terms_)
            if (std::accumulate(exp.begin(), exp.end(), 0) == k) t.emplace_back(exp, coef);
        return PolynomialSymbol(n_, t, name_);
    }

    PolynomialSymbol partial_derivative(int j) const {
        if (j < 0 || j >= n_) throw std::invalid_argument("partial_derivative: bad variable");
        std::vector<std::pair<MultiIndex, double>> t;
        for (const auto& [exp, coef] : terms_) {
            const int ej = exp[static_cast<std::size_t>(j)];
            if (ej == 0) continue;
            MultiIndex e = exp;
            e[static_cast<std::size_t>(j)] -= 1;
            t.emplace_back(std::move(e), coef * ej);
        }
        return PolynomialSymbol(n_, t, name_);
    }

    PolynomialSymbol scaled(double c) const {
        std::vector<std::pair<MultiIndex, double>> t;
        for (const auto& [exp, coef] : terms_) t.emplace_back(exp, coef * c);
        return PolynomialSymbol(n_, t, name_);
    }

    /// Substitute a fixed value for variable j; result has dimension n-1.
    PolynomialSymbol substitute(int j, double value) const {
        if (n_ < 2) throw std::invalid_argument("substitute: dimension would drop below 1");
        if (j < 0 || j >= n_) throw std::invalid_argument("substitute: bad variable");
        std::map<MultiIndex, double> acc;
        for (const auto& [exp, coef] : terms_) {
            MultiIndex e;
            e.reserve(static_cast<std::size_t>(n_) - 1);
            for (int k = 0; k < n_; ++k)
                if (k != j) e.push_back(exp[static_cast<std::size_t>(k)]);
            acc[e] += coef * int_pow(value, exp[static_cast<std::size_t>(j)]);
        }
        std::vector<std::pair<MultiIndex, double>> t(acc.begin(), acc.end());
        return PolynomialSymbol(n_ - 1, t, name_);
    }

    /// Dense 1-D form (requires n = 1).
    Poly1 to_poly1() const {
        if (n_ != 1) throw std::invalid_argument("to_poly1: symbol is not univariate");
        std::vector<double> c(static_cast<std::size_t>(m_) + 1, 0.0);
        for (const auto& [exp, coef] : terms_) c[static_cast<std::size_t>(exp[0])] += coef;
        return Poly1(std::move(c));
    }

    /// True when every monomial has even total degree in each variable,
    /// which makes P invariant under xi -> -xi.
    bool is_even() const {
        for (const auto& [exp, coef] : terms_)
            for (int e : exp)
                if (e % 2 != 0) return false;
        return true;
    }

    bool operator==(const PolynomialSymbol& other) const {
        return n_ == other.n_ && terms_ == other.terms_;
    }

private:
    void check_dim(const std::vector<double>& xi) const {
        if (static_cast<int>(xi.size()) != n_)
            throw std::invalid_argument("symbol: point dimension mismatch");
    }

    static double int_pow(double x, int e) {
        double r = 1.0;
        while (e > 0) {
            if (e & 1) r *= x;
            x *= x;
            e >>= 1;
        }
        return r;
    }

    static double power_product(const MultiIndex& exp, const std::vector<double>& xi) {
        double p = 1.0;
        for (std::size_t k = 0; k < exp.size(); ++k) p *= int_pow(xi[k], exp[k]);
        return p;
    }

    int n_ = 1;
    int m_ = 0;
    std::string name_;
    std::map<MultiIndex, double> terms_;
    std::vector<std::pair<MultiIndex, double>> flat_; // map contents, iteration-friendly
};

/// Outcome of sampling |P_m| over the unit sphere.
struct EllipticityCertificate {
    bool is_elliptic = false;
    double min_principal_on_sphere = 0.0;
    int sample_count = 0;
    std::vector<double> witness_direction;
    double lipschitz_margin = 0.0; // net spacing x max |grad P_m| observed on the sphere
    double tolerance = 0.0;        // declared threshold the verdict compares against
};

/// Samples |P_m(omega)| over a quasi-uniform net of S^{n-1} (n = 1: the two
/// points +-1). The declared tolerance of the certificate is the caller's
/// floor raised to the Lipschitz safety margin (net spacing times the
/// largest sampled |grad P_m|), so a zero crossing hiding between net points
/// cannot be certified away; the verdict is min > tolerance.
inline EllipticityCertificate certify_elliptic(const PolynomialSymbol& p, int sphere_samples,
                                               double tol) {
    const int n = p.dimension();
    if (sphere_samples < 100 * n) throw std::invalid_argument("certify_elliptic: too few samples");
    if (!(tol > 0.0)) throw std::invalid_argument("certify_elliptic: tol must be positive");

    EllipticityCertificate cert;
    const PolynomialSymbol pm = p.homogeneous_part(p.degree());
    const auto net = sphere_net(n, sphere_samples);
    cert.sample_count = static_cast<int>(net.size());

    if (pm.is_zero()) {
        cert.is_elliptic = false;
        cert.min_principal_on_sphere = 0.0;
        cert.witness_direction = net.front();
        cert.tolerance = tol;
        return cert;
    }

    double best = std::numeric_limits<double>::infinity();
    double max_grad = 0.0;
    std::vector<double> witness = net.front();
    for (const auto& w : net) {
        const double v = std::fabs(pm.eval(w));
        max_grad = std::max(max_grad, norm2(pm.gradient(w)));
        if (v < best) {
            best = v;
            witness = w;
        }
    }
    double spacing = 0.0;
    if (n == 2) spacing = 2.0 * M_PI / cert.sample_count;
    else if (n == 3) spacing = 2.0 * std::sqrt(4.0 * M_PI / cert.sample_count);
    cert.min_principal_on_sphere = best;
    cert.witness_direction = witness;
    cert.lipschitz_margin = spacing * max_grad;
    cert.tolerance = std::max(tol, cert.lipschitz_margin);
    cert.is_elliptic = best > cert.tolerance;
    return cert;
}

} // namespace hos
