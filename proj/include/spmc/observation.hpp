#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/channel.hpp"
#include "spmc/geometry.hpp"
#include "spmc/rng.hpp"
#include "spmc/von_mises.hpp"
#include "spmc/waveform.hpp"

namespace spmc {

/// One symbol's worth of manifold observations: the normalized baseline
/// phasors q_m for m = 2..M, the pre-normalization magnitudes, and a
/// reliability flag per baseline (low-magnitude correlator outputs carry no
/// usable angle and are down-weighted by the fusion stage).
struct SymbolObservation {
    std::vector<ManifoldPoint> baselines;
    std::vector<double> raw_magnitudes;
    std::vector<bool> reliable;

    std::size_t num_baselines() const { return baselines.size(); }

    bool any_reliable() const {
        for (bool r : reliable) {
            if (r) return true;
        }
        return false;
    }
};

/// Default correlator-output normalization guard.
inline constexpr double default_normalize_epsilon = 1e-9;

/// Maps raw correlator pairs onto the unit circle: z -> z / (||z|| + eps),
/// re-projected to exact unit norm when ||z|| > 10 eps. Below that threshold
/// the baseline is flagged unreliable and the damped (non-unit) vector is
/// kept as-is; eps guards the zero vector.
inline SymbolObservation normalize_observation(const std::vector<std::pair<double, double>>& z_pairs,
                                               double epsilon = default_normalize_epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("normalize_observation: epsilon must be > 0");
    }
    SymbolObservation obs;
    obs.baselines.reserve(z_pairs.size());
    obs.raw_magnitudes.reserve(z_pairs.size());
    obs.reliable.reserve(z_pairs.size());
    for (const auto& [zc, zs] : z_pairs) {
        const double mag = std::hypot(zc, zs);
        obs.raw_magnitudes.push_back(mag);
        if (mag > 10.0 * epsilon) {
            obs.baselines.push_back(ManifoldPoint::unit_from(zc, zs));
            obs.reliable.push_back(true);
        } else {
            obs.baselines.push_back(ManifoldPoint(zc / (mag + epsilon), zs / (mag + epsilon)));
            obs.reliable.push_back(false);
        }
    }
    return obs;
}

/// Fast statistical front-end: emits q_m = exp(j((m-1) delta_theta + eps_m + nu))
/// directly, with eps_m ~ von Mises(0, kappa_m) per baseline and a common
/// disturbance nu per symbol. Amplitude effects (Rician fade magnitude, AGC
/// jitter) perturb only the raw magnitudes; normalization has already removed
/// them from the angles.
inline SymbolObservation generate_observation_statistical(const ArrayGeometry& geom,
                                                          const ChannelConfig& ch,
                                                          WrappedAngle delta_theta,
                                                          const std::vector<Concentration>& kappas,
                                                          Rng& rng) {
    geom.validate();
    ch.validate();
    const std::size_t n_base = static_cast<std::size_t>(geom.num_baselines());
    if (kappas.size() != n_base) {
        throw std::invalid_argument("generate_observation_statistical: kappas size must be M - 1");
    }

    const double nu_std = ch.common_phase_disturbance_std_rad();
    const double nu = (nu_std > 0.0) ? nu_std * rng.normal() : 0.0;

    std::vector<double> gains(static_cast<std::size_t>(geom.num_rx));
    for (auto& g : gains) {
        const double agc_db = (ch.agc_jitter_db > 0.0) ? ch.agc_jitter_db * rng.normal() : 0.0;
        g = std::pow(10.0, agc_db / 20.0) * rician_magnitude(ch.rician_k_db, rng);
    }

    SymbolObservation obs;
    obs.baselines.reserve(n_base);
    obs.raw_magnitudes.reserve(n_base);
    obs.reliable.reserve(n_base);
    for (std::size_t b = 0; b < n_base; ++b) {
        const double progression = static_cast<double>(b + 1) * delta_theta.value();
        double angle = progression;
        if (!kappas[b].is_infinite()) {
            angle += sample_von_mises(WrappedAngle(0.0), kappas[b], rng).value();
        }
        if (nu != 0.0) angle += nu;
        obs.baselines.push_back(ManifoldPoint::from_angle(WrappedAngle(angle)));
        obs.raw_magnitudes.push_back(0.5 * gains[0] * gains[b + 1]);
        obs.reliable.push_back(true);
    }
    return obs;
}

/// Full waveform-level pipeline for one symbol: draw a channel realization,
/// synthesize the M passband streams, correlate every baseline against
/// antenna 1, and normalize. This is the slow oracle the statistical model is
/// calibrated against.
inline SymbolObservation observe_waveform(const ArrayGeometry& geom, const WaveformConfig& wf,
                                          const ChannelConfig& ch, WrappedAngle delta_theta,
                                          Rng& rng) {
    ChannelRealization real = draw_channel_realization(geom, ch, rng);
    real.noise_std = waveform_noise_std_for_snr(ch.snr_db, wf);
    const auto streams = synthesize_passband(geom, wf, real, delta_theta, rng);

    std::vector<std::pair<double, double>> z;
    z.reserve(static_cast<std::size_t>(geom.num_baselines()));
    for (int m = 1; m < geom.num_rx; ++m) {
        z.push_back(correlate_quadrature(streams[0], streams[static_cast<std::size_t>(m)], wf));
    }
    SymbolObservation obs = normalize_observation(z);

    // The common residual disturbance of Eq-level modelling also applies to
    // the waveform path so the two front-ends share one impairment model.
    if (real.common_disturbance != 0.0) {
        for (std::size_t b = 0; b < obs.baselines.size(); ++b) {
            if (!obs.reliable[b]) continue;
            const WrappedAngle rotated(obs.baselines[b].angle().value() + real.common_disturbance);
            obs.baselines[b] = ManifoldPoint::from_angle(rotated);
        }
    }
    return obs;
}

} // namespace spmc
