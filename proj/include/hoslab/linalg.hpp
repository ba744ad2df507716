#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hos {

/// Dense symmetric matrix, row-major, sized for n <= 3 but generic.
struct SymMat {
    int n = 0;
    std::vector<double> a; // n*n, row-major

    SymMat() = default;
    explicit SymMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Eigenvalues of a symmetric matrix, ascending. Closed forms for n = 1, 2;
/// cyclic Jacobi for larger n, run on a scaled copy until the off-diagonal
/// norm drops below 1e-13 relative to the matrix scale.
inline std::vector<double> sym_eigenvalues(const SymMat& m) {
    const int n = m.n;
    if (n <= 0) throw std::invalid_argument("sym_eigenvalues: empty matrix");
    for (double x : m.a)
        if (!std::isfinite(x)) throw std::runtime_error("sym_eigenvalues: non-finite entry");

    if (n == 1) return {m.at(0, 0)};
    if (n == 2) {
        const double a = m.at(0, 0), b = m.at(0, 1), d = m.at(1, 1);
        const double tr = a + d;
        const double disc = std::hypot(a - d, 2.0 * b);
        return {0.5 * (tr - disc), 0.5 * (tr + disc)};
    }

    // Jacobi on a scaled copy.
    double scale = 0.0;
    for (double x : m.a) scale = std::max(scale, std::fabs(x));
    if (scale == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

    SymMat w(n);
    for (std::size_t k = 0; k < m.a.size(); ++k) w.a[k] = m.a[k] / scale;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += w.at(i, j) * w.at(i, j);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 64 && off_norm() > 1e-13; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (w.at(q, q) - w.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double wkp = w.at(k, p), wkq = w.at(k, q);
                    w.at(k, p) = c * wkp - s * wkq;
                    w.at(k, q) = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double wpk = w.at(p, k), wqk = w.at(q, k);
                    w.at(p, k) = c * wpk - s * wqk;
                    w.at(q, k) = s * wpk + c * wqk;
                }
            }
        }
    }

    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = w.at(i, i) * scale;
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Solve A x = b for small symmetric A by Gaussian elimination with partial
/// pivoting. Returns false if the pivot collapses (singular system).
inline bool solve_dense(SymMat a, std::vector<double> b, std::vector<double>& x) {
    const int n = a.n;
    std::vector<int> piv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) piv[static_cast<std::size_t>(i)] = i;

    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return false;

    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a.at(r, col)) > std::fabs(a.at(best, col))) best = r;
        if (std::fabs(a.at(best, col)) < 1e-14 * scale) return false;
        if (best != col) {
            for (int k = 0; k < n; ++k) std::swap(a.at(col, k), a.at(best, k));
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(best)]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) / a.at(col, col);
            for (int k = col; k < n; ++k) a.at(r, k) -= f * a.at(col, k);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    x.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < n; ++k) s -= a.at(r, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(r)] = s / a.at(r, r);
    }
    return true;
}

} // namespace hos
