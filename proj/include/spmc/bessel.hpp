#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spmc {

namespace detail {

// Power series sum_n (x/2)^{2n+nu} / (n! (n+nu)!) for nu in {0, 1}.
// All terms positive, so no cancellation; converges quickly for x <= 15.
inline double bessel_i_series(double x, int nu) {
    const double q = 0.25 * x * x;
    double term = (nu == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int n = 1; n < 200; ++n) {
        term *= q / (static_cast<double>(n) * (n + nu));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// Asymptotic expansion of e^{-x} I_nu(x) * sqrt(2 pi x), i.e. the bracketed
// series of Abramowitz & Stegun 9.7.1. Valid for large x; terms are summed
// until they stop shrinking.
inline double bessel_i_scaled_asymptotic_bracket(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev_abs = std::numeric_limits<double>::max();
    for (int k = 0; k < 30; ++k) {
        const double odd = 2.0 * k + 1.0;
        term *= -(mu - odd * odd) / (8.0 * x * (k + 1.0));
        if (std::abs(term) >= prev_abs) break;
        prev_abs = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

inline constexpr double bessel_series_cutoff = 15.0;

} // namespace detail

/// Modified Bessel function of the first kind, order zero. Power series up to
/// the cutoff, asymptotic expansion beyond it; relative error <= 1e-10.
/// Overflows to +inf for kappa beyond ~713 (as I0 itself does).
inline double bessel_i0(double kappa) {
    if (std::isnan(kappa) || kappa < 0.0) {
        throw std::invalid_argument("bessel_i0: kappa must be >= 0");
    }
    if (kappa <= detail::bessel_series_cutoff) {
        return detail::bessel_i_series(kappa, 0);
    }
    const double bracket = detail::bessel_i_scaled_asymptotic_bracket(kappa, 0);
    return std::exp(kappa) / std::sqrt(2.0 * std::numbers::pi * kappa) * bracket;
}

/// Modified Bessel function of the first kind, order one.
inline double bessel_i1(double kappa) {
    if (std::isnan(kappa) || kappa < 0.0) {
        throw std::invalid_argument("bessel_i1: kappa must be >= 0");
    }
    if (kappa <= detail::bessel_series_cutoff) {
        return detail::bessel_i_series(kappa, 1);
    }
    const double bracket = detail::bessel_i_scaled_asymptotic_bracket(kappa, 1);
    return std::exp(kappa) / std::sqrt(2.0 * std::numbers::pi * kappa) * bracket;
}

/// Concentration-efficiency ratio rho(kappa) = I1(kappa)/I0(kappa).
///
/// Strictly increasing from 0 to 1; for large kappa the ratio is formed from
/// the exponentially scaled asymptotic brackets, so it never overflows.
inline double bessel_ratio_rho(double kappa) {
    if (std::isnan(kappa) || kappa < 0.0) {
        throw std::invalid_argument("bessel_ratio_rho: kappa must be >= 0");
    }
    if (std::isinf(kappa)) return 1.0;
    if (kappa <= detail::bessel_series_cutoff) {
        return detail::bessel_i_series(kappa, 1) / detail::bessel_i_series(kappa, 0);
    }
    return detail::bessel_i_scaled_asymptotic_bracket(kappa, 1) /
           detail::bessel_i_scaled_asymptotic_bracket(kappa, 0);
}

/// Upper limit used when inverting rho: dispersion below the resolvable floor
/// saturates to this concentration.
inline constexpr double kappa_saturation_cap = 1e6;

/// Inverse of bessel_ratio_rho by bisection. Resultant lengths at (or beyond)
/// the rho(cap) saturation point return the cap; callers detect saturation by
/// comparing against kappa_saturation_cap.
inline double concentration_from_resultant_length(double r) {
    if (std::isnan(r) || r < 0.0 || r > 1.0) {
        throw std::invalid_argument("concentration_from_resultant_length: r must be in [0, 1]");
    }
    if (r == 0.0) return 0.0;
    if (r >= bessel_ratio_rho(kappa_saturation_cap)) return kappa_saturation_cap;
    double lo = 0.0, hi = kappa_saturation_cap;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_ratio_rho(mid) < r) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace spmc
