#pragma once

#include <cmath>

namespace hos {

/// Canonical C-infinity plateau profile: 1 on [-1/2, 1/2], 0 outside (-1, 1),
/// symmetric, values in [0, 1]. The transition is the standard quotient of
/// exp(-1/v) terms, so the profile meets both plateaus with all derivatives 0.
/// Every cutoff in the library is built from this one function.
inline double bump(double s) {
    s = std::fabs(s);
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    const double v = 2.0 * s - 1.0; // in (0, 1)
    const double a = std::exp(-1.0 / v);
    const double b = std::exp(-1.0 / (1.0 - v));
    return b / (a + b);
}

} // namespace hos
