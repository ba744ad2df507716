#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hos {

/// Deterministic quasi-uniform net on the unit sphere S^{n-1}, n in {1,2,3}.
/// n = 1: the two points +1, -1. n = 2: equally spaced angles starting on the
/// +x axis (count rounded up to a multiple of 4 so all four semi-axes are
/// hit). n = 3: Fibonacci spiral augmented with the six semi-axes and the
/// eight diagonal directions, so exact coordinate degeneracies are sampled.
inline std::vector<std::vector<double>> sphere_net(int n, int count) {
    if (n < 1 || n > 3) throw std::invalid_argument("sphere_net: dimension must be 1, 2 or 3");
    std::vector<std::vector<double>> pts;
    if (n == 1) {
        pts.push_back({1.0});
        pts.push_back({-1.0});
        return pts;
    }
    if (count < 4) count = 4;
    if (n == 2) {
        const int k = ((count + 3) / 4) * 4;
        pts.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const double th = 2.0 * M_PI * i / k;
            pts.push_back({std::cos(th), std::sin(th)});
        }
        return pts;
    }
    // n == 3
    pts.reserve(static_cast<std::size_t>(count) + 14);
    const double golden = M_PI * (std::sqrt(5.0) + 1.0);
    for (int i = 0; i < count; ++i) {
        const double z = -1.0 + (2.0 * i + 1.0) / count;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * i;
        pts.push_back({rad * std::cos(th), rad * std::sin(th), z});
    }
    for (int d = 0; d < 3; ++d) {
        std::vector<double> p(3, 0.0), q(3, 0.0);
        p[static_cast<std::size_t>(d)] = 1.0;
        q[static_cast<std::size_t>(d)] = -1.0;
        pts.push_back(p);
        pts.push_back(q);
    }
    const double s = 1.0 / std::sqrt(3.0);
    for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
            for (int sz = -1; sz <= 1; sz += 2) pts.push_back({sx * s, sy * s, sz * s});
    return pts;
}

/// Chordal (Euclidean) distance between unit vectors.
inline double chord_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace hos
