#pragma once

#include <cmath>

#include "spmc/angles.hpp"
#include "spmc/rng.hpp"

namespace spmc {

/// Draws one sample from the von Mises density
///   p(phi | mu, kappa) = exp(kappa cos(phi - mu)) / (2 pi I0(kappa))
/// using the Best-Fisher wrapped-Cauchy rejection sampler (exact, no series
/// truncation). kappa = 0 degenerates to the circular uniform distribution;
/// kappa = +inf returns the mean.
inline WrappedAngle sample_von_mises(WrappedAngle mean, Concentration kappa, Rng& rng) {
    const double k = kappa.kappa();
    if (kappa.is_infinite()) {
        return mean;
    }
    if (k < 1e-12) {
        // Circular uniform on (-pi, pi].
        return WrappedAngle(pi - two_pi * rng.uniform());
    }

    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
    const double rho0 = (tau - std::sqrt(2.0 * tau)) / (2.0 * k);
    const double r = (1.0 + rho0 * rho0) / (2.0 * rho0);

    double f = 0.0;
    for (;;) {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double z = std::cos(pi * u1);
        f = (1.0 + r * z) / (r + z);
        const double c = k * (r - f);
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (c <= 0.0) continue;
        if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }

    const double u3 = rng.uniform();
    const double offset = (u3 < 0.5) ? -std::acos(f) : std::acos(f);
    return WrappedAngle(mean.value() + offset);
}

} // namespace spmc
