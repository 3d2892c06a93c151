#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/channel.hpp"
#include "spmc/geometry.hpp"
#include "spmc/rng.hpp"

namespace spmc {

/// Discretization of the passband model. The carrier is normalized: one
/// carrier period spans samples_per_cycle samples regardless of carrier_hz,
/// which leaves the correlator math unchanged and keeps runtimes desk-scale.
struct WaveformConfig {
    int cycles_per_symbol = 64;
    int samples_per_cycle = 32;
    // The symbol-rate low-pass is realized as a boxcar average over whole
    // half-cycles (see correlate_quadrature); the cutoff fraction is kept as
    // descriptive metadata for the idealized filter it stands in for.
    double lpf_cutoff_fraction = 0.25;

    void validate() const {
        if (cycles_per_symbol < 2) {
            throw std::invalid_argument("WaveformConfig: cycles_per_symbol must be >= 2");
        }
        if (samples_per_cycle < 8 || samples_per_cycle % 4 != 0) {
            throw std::invalid_argument(
                "WaveformConfig: samples_per_cycle must be >= 8 and divisible by 4");
        }
        if (!(lpf_cutoff_fraction > 0.0 && lpf_cutoff_fraction < 0.5)) {
            throw std::invalid_argument("WaveformConfig: lpf_cutoff_fraction must be in (0, 0.5)");
        }
    }

    int samples_per_symbol() const { return cycles_per_symbol * samples_per_cycle; }

    /// First sample of the correlation window (one carrier cycle of transient
    /// is discarded).
    int window_start() const { return samples_per_cycle; }

    /// Window length, truncated to whole half-cycles so the 2 f_c product
    /// component integrates out exactly.
    int window_length() const {
        const int half = samples_per_cycle / 2;
        const int shift = samples_per_cycle / 4;
        const int avail = samples_per_symbol() - window_start() - shift;
        return (avail / half) * half;
    }
};

/// Per-sample bandpass noise std that realizes a requested post-correlation
/// observable SNR (A1 Am / 2)^2 / Var(n_c) at unit amplitudes.
///
/// For the boxcar correlator over L samples the effective noise variance is
/// sigma^2 / L + sigma^4 / L (antenna-noise cross terms plus the
/// noise-product term), which inverts in closed form.
inline double waveform_noise_std_for_snr(double snr_db, const WaveformConfig& wf) {
    wf.validate();
    const double l = static_cast<double>(wf.window_length());
    const double target_var = 0.25 / db_to_linear(snr_db);
    const double sigma2 = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * l * target_var));
    return std::sqrt(sigma2);
}

/// Synthesizes the M passband sample streams for one symbol:
///   r_m[n] = A_m cos(2 pi n / spc + psi[n] + (m-1) delta_theta) + w_m[n]
/// with a phase-noise trajectory psi common to every antenna (random walk,
/// total std ChannelRealization::phase_walk_std over the symbol) and
/// independent thermal noise per antenna.
inline std::vector<std::vector<double>> synthesize_passband(const ArrayGeometry& geom,
                                                            const WaveformConfig& wf,
                                                            const ChannelRealization& ch,
                                                            WrappedAngle delta_theta, Rng& rng) {
    geom.validate();
    wf.validate();
    if (ch.amplitudes.size() != static_cast<std::size_t>(geom.num_rx)) {
        throw std::invalid_argument("synthesize_passband: amplitudes size must equal num_rx");
    }
    const int n_samples = wf.samples_per_symbol();
    const double omega = two_pi / wf.samples_per_cycle;

    std::vector<double> psi(static_cast<std::size_t>(n_samples), 0.0);
    if (ch.phase_walk_std > 0.0) {
        const double step = ch.phase_walk_std / std::sqrt(static_cast<double>(n_samples));
        double acc = 0.0;
        for (auto& p : psi) {
            acc += step * rng.normal();
            p = acc;
        }
    }

    std::vector<std::vector<double>> streams(static_cast<std::size_t>(geom.num_rx));
    for (int m = 0; m < geom.num_rx; ++m) {
        auto& s = streams[static_cast<std::size_t>(m)];
        s.resize(static_cast<std::size_t>(n_samples));
        const double alpha = m * delta_theta.value();
        const double amp = ch.amplitudes[static_cast<std::size_t>(m)];
        for (int n = 0; n < n_samples; ++n) {
            s[static_cast<std::size_t>(n)] =
                amp * std::cos(omega * n + ch.carrier_phase + psi[static_cast<std::size_t>(n)] + alpha);
        }
        if (ch.noise_std > 0.0) {
            for (auto& x : s) x += ch.noise_std * rng.normal();
        }
    }
    return streams;
}

/// Quadrature antenna-domain correlator for one baseline.
///
/// z_c averages r1[n] rm[n]; z_s averages r1[n] rm[n - spc/4]. The
/// quarter-cycle delay realizes the 90-degree hybrid at the normalized
/// carrier, so for noiseless tones (z_c, z_s) = (A1 Am / 2)(cos, sin) of the
/// baseline phase difference.
inline std::pair<double, double> correlate_quadrature(const std::vector<double>& wave_1,
                                                      const std::vector<double>& wave_m,
                                                      const WaveformConfig& wf) {
    wf.validate();
    if (wave_1.size() != wave_m.size()) {
        throw std::invalid_argument("correlate_quadrature: stream lengths differ");
    }
    if (static_cast<int>(wave_1.size()) != wf.samples_per_symbol()) {
        throw std::invalid_argument("correlate_quadrature: stream length does not match config");
    }
    const int start = wf.window_start();
    const int len = wf.window_length();
    const int shift = wf.samples_per_cycle / 4;

    double acc_c = 0.0;
    double acc_s = 0.0;
    for (int n = start; n < start + len; ++n) {
        const double r1 = wave_1[static_cast<std::size_t>(n)];
        acc_c += r1 * wave_m[static_cast<std::size_t>(n)];
        acc_s += r1 * wave_m[static_cast<std::size_t>(n - shift)];
    }
    return {acc_c / len, acc_s / len};
}

} // namespace spmc
