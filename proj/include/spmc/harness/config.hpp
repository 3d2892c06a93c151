#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spmc/channel.hpp"
#include "spmc/geometry.hpp"
#include "spmc/harness/result.hpp"
#include "spmc/waveform.hpp"

namespace spmc::harness {

enum class Mode { ber, ber_phase_noise, error_pdf, rmse_crlb, peb_map };
enum class FrontendKind { statistical, waveform };

/// Phase-error model of the statistical front-end. The Gaussian variant
/// exists to validate the closed-form pairwise-error expression, which is
/// stated for Gaussian per-baseline noise.
enum class PhaseErrorModel { von_mises, gaussian };

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::ber: return "ber";
        case Mode::ber_phase_noise: return "ber-phase-noise";
        case Mode::error_pdf: return "error-pdf";
        case Mode::rmse_crlb: return "rmse-crlb";
        case Mode::peb_map: return "peb-map";
    }
    return "?";
}

inline Mode mode_from_name(const std::string& s) {
    if (s == "ber") return Mode::ber;
    if (s == "ber-phase-noise") return Mode::ber_phase_noise;
    if (s == "error-pdf") return Mode::error_pdf;
    if (s == "rmse-crlb") return Mode::rmse_crlb;
    if (s == "peb-map") return Mode::peb_map;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

/// Configuration validation failure; the message lists every offending field.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Optional rectangular evaluation grid for peb-map mode. When absent, the
/// grid is derived from the anchor bounding box.
struct PebGrid {
    bool automatic = true;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    int nx = 41, ny = 41;
};

struct ExperimentConfig {
    Mode mode = Mode::ber;
    std::uint64_t seed = 1;
    std::int64_t trials = 100000;
    int min_errors = 100;

    ArrayGeometry geometry{};
    ChannelConfig channel{};
    WaveformConfig waveform{};
    FrontendKind frontend = FrontendKind::statistical;

    int alphabet_size = 16;
    std::vector<double> alphabet_increments_rad; // overrides the uniform alphabet

    std::vector<double> snr_grid_db;
    std::vector<int> m_grid;
    std::vector<double> sigma_phi_grid_deg; // coherent curves, ber-phase-noise mode

    PhaseErrorModel phase_error_model = PhaseErrorModel::von_mises;
    double gaussian_sigma_eps_deg = 5.0;

    double doa_true_deg = 20.0;
    int pdf_bins = 201;
    int calibration_probes = 10000;

    std::string scene_path;
    PebGrid peb_grid{};

    void validate() const;
    nlohmann::json to_json() const;
    std::string config_hash() const { return hex64(fnv1a(to_json().dump())); }
};

inline void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    auto require = [&](bool ok, const char* field) {
        if (!ok) bad.emplace_back(field);
    };

    require(trials >= 1, "trials");
    require(min_errors >= 1, "min_errors");
    require(geometry.num_rx >= 2 && geometry.spacing_over_lambda > 0.0, "geometry");
    require(alphabet_size >= 2, "alphabet_size");
    require(pdf_bins >= 3 && pdf_bins % 2 == 1, "pdf_bins");
    require(calibration_probes >= 10000, "calibration_probes");
    require(std::abs(doa_true_deg) < 90.0, "doa_true_deg");
    require(gaussian_sigma_eps_deg > 0.0 || phase_error_model == PhaseErrorModel::von_mises,
            "gaussian_sigma_eps_deg");

    const bool needs_snr_grid =
        mode == Mode::ber || mode == Mode::ber_phase_noise || mode == Mode::rmse_crlb;
    if (needs_snr_grid) require(!snr_grid_db.empty(), "snr_grid_db");
    if (mode == Mode::rmse_crlb || mode == Mode::error_pdf) require(!m_grid.empty(), "m_grid");
    for (int m : m_grid) require(m >= 2, "m_grid");
    if (mode == Mode::ber_phase_noise) require(!sigma_phi_grid_deg.empty(), "sigma_phi_grid_deg");
    for (double s : sigma_phi_grid_deg) require(s >= 0.0, "sigma_phi_grid_deg");
    if (mode == Mode::peb_map) require(!scene_path.empty(), "scene_path");
    if (!peb_grid.automatic) {
        require(peb_grid.x_max > peb_grid.x_min && peb_grid.y_max > peb_grid.y_min &&
                    peb_grid.nx >= 2 && peb_grid.ny >= 2,
                "peb_grid");
    }

    try {
        channel.validate();
    } catch (const std::exception&) {
        bad.emplace_back("channel");
    }
    try {
        waveform.validate();
    } catch (const std::exception&) {
        bad.emplace_back("waveform");
    }

    if (!bad.empty()) {
        std::string msg = "invalid experiment config; offending fields:";
        for (const auto& f : bad) msg += " " + f;
        throw ConfigError(msg);
    }
}

inline nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["mode"] = mode_name(mode);
    j["seed"] = seed;
    j["trials"] = trials;
    j["min_errors"] = min_errors;
    j["geometry"] = {{"num_rx", geometry.num_rx},
                     {"spacing_over_lambda", geometry.spacing_over_lambda},
                     {"carrier_hz", geometry.carrier_hz}};
    nlohmann::json ch;
    ch["snr_db"] = channel.snr_db;
    if (std::isfinite(channel.rician_k_db)) ch["rician_k_db"] = channel.rician_k_db;
    ch["phase_noise_std_deg"] = channel.phase_noise_std_deg;
    ch["agc_jitter_db"] = channel.agc_jitter_db;
    ch["residual_phase_std_deg"] = channel.residual_phase_std_deg;
    j["channel"] = ch;
    j["waveform"] = {{"cycles_per_symbol", waveform.cycles_per_symbol},
                     {"samples_per_cycle", waveform.samples_per_cycle},
                     {"lpf_cutoff_fraction", waveform.lpf_cutoff_fraction}};
    j["frontend"] = frontend == FrontendKind::statistical ? "statistical" : "waveform";
    j["alphabet_size"] = alphabet_size;
    if (!alphabet_increments_rad.empty()) j["alphabet_increments_rad"] = alphabet_increments_rad;
    if (!snr_grid_db.empty()) j["snr_grid_db"] = snr_grid_db;
    if (!m_grid.empty()) j["m_grid"] = m_grid;
    if (!sigma_phi_grid_deg.empty()) j["sigma_phi_grid_deg"] = sigma_phi_grid_deg;
    j["phase_error_model"] =
        phase_error_model == PhaseErrorModel::von_mises ? "von_mises" : "gaussian";
    j["gaussian_sigma_eps_deg"] = gaussian_sigma_eps_deg;
    j["doa_true_deg"] = doa_true_deg;
    j["pdf_bins"] = pdf_bins;
    j["calibration_probes"] = calibration_probes;
    if (!scene_path.empty()) j["scene"] = scene_path;
    if (!peb_grid.automatic) {
        j["peb_grid"] = {{"x_min", peb_grid.x_min}, {"x_max", peb_grid.x_max},
                         {"y_min", peb_grid.y_min}, {"y_max", peb_grid.y_max},
                         {"nx", peb_grid.nx},       {"ny", peb_grid.ny}};
    }
    return j;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) {
            throw ConfigError("config: unknown key '" + (scope.empty() ? key : scope + "." + key) +
                              "'");
        }
    }
}

} // namespace detail

/// Parses a config from JSON, rejecting unknown keys. Missing keys keep their
/// defaults; validate() is the caller's final gate.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"mode", "seed", "trials", "min_errors", "geometry", "channel", "waveform", "frontend",
         "alphabet_size", "alphabet_increments_rad", "snr_grid_db", "m_grid", "sigma_phi_grid_deg",
         "phase_error_model", "gaussian_sigma_eps_deg", "doa_true_deg", "pdf_bins",
         "calibration_probes", "scene", "peb_grid"},
        "");

    ExperimentConfig c;
    if (j.contains("mode")) c.mode = mode_from_name(j["mode"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j["trials"].get<std::int64_t>();
    if (j.contains("min_errors")) c.min_errors = j["min_errors"].get<int>();

    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        detail::reject_unknown_keys(g, {"num_rx", "spacing_over_lambda", "carrier_hz"}, "geometry");
        if (g.contains("num_rx")) c.geometry.num_rx = g["num_rx"].get<int>();
        if (g.contains("spacing_over_lambda")) {
            c.geometry.spacing_over_lambda = g["spacing_over_lambda"].get<double>();
        }
        if (g.contains("carrier_hz")) c.geometry.carrier_hz = g["carrier_hz"].get<double>();
    }
    if (j.contains("channel")) {
        const auto& ch = j["channel"];
        detail::reject_unknown_keys(ch,
                                    {"snr_db", "rician_k_db", "phase_noise_std_deg",
                                     "agc_jitter_db", "residual_phase_std_deg"},
                                    "channel");
        if (ch.contains("snr_db")) c.channel.snr_db = ch["snr_db"].get<double>();
        if (ch.contains("rician_k_db")) c.channel.rician_k_db = ch["rician_k_db"].get<double>();
        if (ch.contains("phase_noise_std_deg")) {
            c.channel.phase_noise_std_deg = ch["phase_noise_std_deg"].get<double>();
        }
        if (ch.contains("agc_jitter_db")) c.channel.agc_jitter_db = ch["agc_jitter_db"].get<double>();
        if (ch.contains("residual_phase_std_deg")) {
            c.channel.residual_phase_std_deg = ch["residual_phase_std_deg"].get<double>();
        }
    }
    if (j.contains("waveform")) {
        const auto& w = j["waveform"];
        detail::reject_unknown_keys(
            w, {"cycles_per_symbol", "samples_per_cycle", "lpf_cutoff_fraction"}, "waveform");
        if (w.contains("cycles_per_symbol")) {
            c.waveform.cycles_per_symbol = w["cycles_per_symbol"].get<int>();
        }
        if (w.contains("samples_per_cycle")) {
            c.waveform.samples_per_cycle = w["samples_per_cycle"].get<int>();
        }
        if (w.contains("lpf_cutoff_fraction")) {
            c.waveform.lpf_cutoff_fraction = w["lpf_cutoff_fraction"].get<double>();
        }
    }
    if (j.contains("frontend")) {
        const auto s = j["frontend"].get<std::string>();
        if (s == "statistical") {
            c.frontend = FrontendKind::statistical;
        } else if (s == "waveform") {
            c.frontend = FrontendKind::waveform;
        } else {
            throw ConfigError("config: frontend must be 'statistical' or 'waveform'");
        }
    }
    if (j.contains("alphabet_size")) c.alphabet_size = j["alphabet_size"].get<int>();
    if (j.contains("alphabet_increments_rad")) {
        c.alphabet_increments_rad = j["alphabet_increments_rad"].get<std::vector<double>>();
    }
    if (j.contains("snr_grid_db")) c.snr_grid_db = j["snr_grid_db"].get<std::vector<double>>();
    if (j.contains("m_grid")) c.m_grid = j["m_grid"].get<std::vector<int>>();
    if (j.contains("sigma_phi_grid_deg")) {
        c.sigma_phi_grid_deg = j["sigma_phi_grid_deg"].get<std::vector<double>>();
    }
    if (j.contains("phase_error_model")) {
        const auto s = j["phase_error_model"].get<std::string>();
        if (s == "von_mises") {
            c.phase_error_model = PhaseErrorModel::von_mises;
        } else if (s == "gaussian") {
            c.phase_error_model = PhaseErrorModel::gaussian;
        } else {
            throw ConfigError("config: phase_error_model must be 'von_mises' or 'gaussian'");
        }
    }
    if (j.contains("gaussian_sigma_eps_deg")) {
        c.gaussian_sigma_eps_deg = j["gaussian_sigma_eps_deg"].get<double>();
    }
    if (j.contains("doa_true_deg")) c.doa_true_deg = j["doa_true_deg"].get<double>();
    if (j.contains("pdf_bins")) c.pdf_bins = j["pdf_bins"].get<int>();
    if (j.contains("calibration_probes")) c.calibration_probes = j["calibration_probes"].get<int>();
    if (j.contains("scene")) c.scene_path = j["scene"].get<std::string>();
    if (j.contains("peb_grid")) {
        const auto& g = j["peb_grid"];
        detail::reject_unknown_keys(g, {"x_min", "x_max", "y_min", "y_max", "nx", "ny"},
                                    "peb_grid");
        c.peb_grid.automatic = false;
        c.peb_grid.x_min = g["x_min"].get<double>();
        c.peb_grid.x_max = g["x_max"].get<double>();
        c.peb_grid.y_min = g["y_min"].get<double>();
        c.peb_grid.y_max = g["y_max"].get<double>();
        if (g.contains("nx")) c.peb_grid.nx = g["nx"].get<int>();
        if (g.contains("ny")) c.peb_grid.ny = g["ny"].get<int>();
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return config_from_json(j);
}

} // namespace spmc::harness
