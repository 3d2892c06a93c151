#pragma once

#include <cmath>
#include <stdexcept>

#include "spmc/angles.hpp"
#include "spmc/errors.hpp"

namespace spmc {

/// Receive ULA parameters. All physics depends on the electrical spacing
/// d/lambda; the carrier frequency is carried along as metadata only.
struct ArrayGeometry {
    int num_rx = 4;                    // M >= 2
    double spacing_over_lambda = 0.5;  // d / lambda > 0
    double carrier_hz = 28e9;

    void validate() const {
        if (num_rx < 2) throw std::invalid_argument("ArrayGeometry: num_rx must be >= 2");
        if (!(spacing_over_lambda > 0.0)) {
            throw std::invalid_argument("ArrayGeometry: spacing_over_lambda must be > 0");
        }
    }

    int num_baselines() const { return num_rx - 1; }
};

/// Per-element spatial phase increment induced by a DoA:
/// wrap(2 pi (d/lambda) sin(doa)). The observable sector is |doa| < pi/2.
inline WrappedAngle doa_phase_increment(const ArrayGeometry& geom, double doa_rad) {
    geom.validate();
    if (!(std::abs(doa_rad) < pi / 2.0)) {
        throw OutOfSectorError("doa_phase_increment: |doa| must be < pi/2");
    }
    return WrappedAngle(two_pi * geom.spacing_over_lambda * std::sin(doa_rad));
}

/// Inverse map from a phase increment back to a DoA. Increments beyond the
/// geometric range |delta| <= 2 pi d/lambda clamp to the endfire limits.
inline double doa_from_phase_increment(const ArrayGeometry& geom, WrappedAngle delta) {
    geom.validate();
    const double s = delta.value() / (two_pi * geom.spacing_over_lambda);
    if (s >= 1.0) return pi / 2.0;
    if (s <= -1.0) return -pi / 2.0;
    return std::asin(s);
}

} // namespace spmc
