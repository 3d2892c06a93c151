#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spmc/harness/config.hpp"

namespace spmc::harness {

struct PresetInfo {
    std::string name;
    std::string description;
};

inline std::vector<PresetInfo> preset_list() {
    return {
        {"fig2", "BER vs SNR, phase noise off: SPMC vs coherent baseline (16-ary, M = 4)"},
        {"fig3", "BER vs SNR under transmitter phase noise {1, 3, 10} deg (16-ary, M = 2)"},
        {"fig4", "DoA-error PDFs across array sizes M = {2, 4, 8, 16} at 15 dB"},
        {"fig5", "DoA RMSE vs SNR against the CRLB for M = {2, 4, 8, 16}"},
        {"peb-demo", "Position-error-bound map for the bundled 4-anchor square scene"},
    };
}

/// Built-in configurations mirroring the reference simulation setup:
/// 28 GHz carrier metadata, a 16-element transmit alphabet, half-wavelength
/// receive spacing, and a 10-degree default phase-noise std. Fading and the
/// common residual disturbance are off in the presets so that the sweeps
/// isolate thermal noise; enable them through a custom config file.
inline ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.geometry.carrier_hz = 28e9;
    c.geometry.spacing_over_lambda = 0.5;
    c.alphabet_size = 16;
    c.doa_true_deg = 20.0;

    if (name == "fig2") {
        c.mode = Mode::ber;
        c.geometry.num_rx = 4;
        c.trials = 1000000;
        c.snr_grid_db = {-5.0, -2.5, 0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0};
        c.channel.phase_noise_std_deg = 0.0;
        return c;
    }
    if (name == "fig3") {
        c.mode = Mode::ber_phase_noise;
        c.geometry.num_rx = 2;
        c.trials = 2000000;
        c.snr_grid_db = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
        c.sigma_phi_grid_deg = {1.0, 3.0, 10.0};
        c.channel.phase_noise_std_deg = 10.0;
        return c;
    }
    if (name == "fig4") {
        c.mode = Mode::error_pdf;
        c.trials = 100000;
        c.m_grid = {2, 4, 8, 16};
        c.channel.snr_db = 15.0;
        c.pdf_bins = 201;
        return c;
    }
    if (name == "fig5") {
        c.mode = Mode::rmse_crlb;
        c.trials = 20000;
        c.m_grid = {2, 4, 8, 16};
        c.snr_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
        return c;
    }
    if (name == "peb-demo") {
        c.mode = Mode::peb_map;
        c.scene_path = "scenes/peb_demo.json";
        return c;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

inline bool is_preset_name(const std::string& name) {
    for (const auto& p : preset_list()) {
        if (p.name == name) return true;
    }
    return false;
}

} // namespace spmc::harness
