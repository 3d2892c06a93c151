#pragma once

#include <cmath>
#include <stdexcept>

namespace spmc {

/// Gaussian tail probability Q(x) = P(N(0,1) > x), evaluated through the
/// complementary error function: Q(x) = erfc(x / sqrt(2)) / 2.
inline double q_function(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("q_function: non-finite input");
    }
    return 0.5 * std::erfc(x * 0.7071067811865475244);
}

/// Inverse of q_function on (0, 1), by bisection. Handy for placing BER
/// thresholds; not performance critical.
inline double q_function_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("q_function_inverse: p must be in (0, 1)");
    }
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace spmc
