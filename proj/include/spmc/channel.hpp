#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/geometry.hpp"
#include "spmc/rng.hpp"

namespace spmc {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Channel and impairment configuration for one link.
///
/// snr_db is the per-baseline post-correlation observable SNR,
/// (A1 Am / 2)^2 / Var(n_c); the reference plane is documented in the CLI
/// help. rician_k_db = +inf disables fading (pure LOS).
struct ChannelConfig {
    double snr_db = 20.0;
    double rician_k_db = std::numeric_limits<double>::infinity();
    double phase_noise_std_deg = 0.0;     // common transmitter phase walk per symbol
    double agc_jitter_db = 0.0;           // per-antenna gain std
    double residual_phase_std_deg = 0.0;  // common residual disturbance nu_k

    void validate() const {
        if (!(phase_noise_std_deg >= 0.0)) {
            throw std::invalid_argument("ChannelConfig: phase_noise_std_deg must be >= 0");
        }
        if (!(agc_jitter_db >= 0.0)) {
            throw std::invalid_argument("ChannelConfig: agc_jitter_db must be >= 0");
        }
        if (!(residual_phase_std_deg >= 0.0)) {
            throw std::invalid_argument("ChannelConfig: residual_phase_std_deg must be >= 0");
        }
        if (std::isnan(rician_k_db)) {
            throw std::invalid_argument("ChannelConfig: rician_k_db must not be NaN");
        }
    }

    bool has_fading() const { return std::isfinite(rician_k_db); }

    /// Diffuse multipath folded into the common phase disturbance:
    /// std ~ sqrt(1 / (2 K)) radians in the high-K regime.
    double rician_phase_std_rad() const {
        if (!has_fading()) return 0.0;
        return std::sqrt(1.0 / (2.0 * db_to_linear(rician_k_db)));
    }

    double common_phase_disturbance_std_rad() const {
        const double res = deg_to_rad(residual_phase_std_deg);
        const double ric = rician_phase_std_rad();
        return std::sqrt(res * res + ric * ric);
    }
};

/// Everything random about the channel for one symbol interval, drawn up
/// front so the waveform synthesizer itself stays deterministic apart from
/// the phase-noise walk and thermal noise.
struct ChannelRealization {
    std::vector<double> amplitudes;   // A_m, one per antenna (gain x fade magnitude)
    double carrier_phase = 0.0;       // absolute RF phase at symbol start (unobservable)
    double phase_walk_std = 0.0;      // total psi random-walk std over the symbol, radians
    double noise_std = 0.0;           // per-sample bandpass noise std
    double common_disturbance = 0.0;  // nu_k, radians
};

/// Magnitude of a Rician fade with LOS power K/(K+1) and diffuse 1/(K+1).
inline double rician_magnitude(double k_db, Rng& rng) {
    if (std::isinf(k_db)) return 1.0;
    const double k = db_to_linear(k_db);
    const double los = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    const double re = los + sigma * rng.normal();
    const double im = sigma * rng.normal();
    return std::hypot(re, im);
}

/// Draws per-symbol amplitudes and disturbances from the channel config.
/// noise_std must be filled in by the caller that knows the waveform
/// discretization (see waveform_noise_std_for_snr).
inline ChannelRealization draw_channel_realization(const ArrayGeometry& geom,
                                                   const ChannelConfig& ch, Rng& rng) {
    geom.validate();
    ch.validate();
    ChannelRealization out;
    out.amplitudes.resize(static_cast<std::size_t>(geom.num_rx));
    const double agc_std = ch.agc_jitter_db;
    for (auto& a : out.amplitudes) {
        const double gain_db = (agc_std > 0.0) ? agc_std * rng.normal() : 0.0;
        a = std::pow(10.0, gain_db / 20.0) * rician_magnitude(ch.rician_k_db, rng);
    }
    out.carrier_phase = rng.uniform(-pi, pi);
    out.phase_walk_std = deg_to_rad(ch.phase_noise_std_deg);
    const double nu_std = ch.common_phase_disturbance_std_rad();
    out.common_disturbance = (nu_std > 0.0) ? nu_std * rng.normal() : 0.0;
    return out;
}

} // namespace spmc
