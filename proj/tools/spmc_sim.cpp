// spmc-sim: Monte Carlo harness CLI for the SPMC LO-free receiver chain.
//
//   spmc-sim <mode> --config <file-or-preset> [--seed N] [--out csv]
//            [--threads N] [--frontend waveform|statistical] [--scene file]
//   spmc-sim presets [--dump <name>]
//
// Modes: ber, ber-phase-noise, error-pdf, rmse-crlb, peb-map.
//
// SNR convention: snr_db is the per-baseline post-correlation observable SNR,
// (A1 Am / 2)^2 / Var(n_c). The coherent benchmark is driven at the same
// value as its per-antenna symbol SNR; the two planes coincide at moderate
// and high SNR for the bundled waveform parameters.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "spmc/harness/experiments.hpp"
#include "spmc/harness/presets.hpp"

namespace {

spmc::harness::ExperimentConfig resolve_config(const std::string& spec) {
    if (spmc::harness::is_preset_name(spec)) {
        return spmc::harness::preset_config(spec);
    }
    return spmc::harness::load_config(spec);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPMC LO-free receiver simulation harness"};
    app.require_subcommand(1);

    std::string config_spec;
    std::string out_path;
    std::string scene_override;
    std::string frontend_override;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", config_spec, "Config JSON file or preset name")->required();
        sub->add_option("--seed", seed, "Master seed (overrides config)")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_path, "Output CSV path (default: stdout)");
        sub->add_option("--threads", threads, "Worker threads");
        sub->add_option("--frontend", frontend_override,
                        "Front-end override: statistical | waveform")
            ->check(CLI::IsMember({"statistical", "waveform"}));
        sub->add_option("--scene", scene_override, "Scene JSON (peb-map mode)");
    };

    CLI::App* mode_ber = app.add_subcommand("ber", "BER vs SNR, SPMC and coherent baseline");
    CLI::App* mode_pn =
        app.add_subcommand("ber-phase-noise", "BER vs SNR under transmitter phase noise");
    CLI::App* mode_pdf = app.add_subcommand("error-pdf", "DoA-error PDFs across array sizes");
    CLI::App* mode_rmse = app.add_subcommand("rmse-crlb", "DoA RMSE vs SNR against the CRLB");
    CLI::App* mode_peb = app.add_subcommand("peb-map", "Position-error-bound map for a scene");
    for (CLI::App* sub : {mode_ber, mode_pn, mode_pdf, mode_rmse, mode_peb}) {
        add_run_options(sub);
    }

    CLI::App* presets = app.add_subcommand("presets", "List built-in configurations");
    std::string dump_name;
    presets->add_option("--dump", dump_name, "Print one preset's config as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            if (!dump_name.empty()) {
                std::cout << spmc::harness::preset_config(dump_name).to_json().dump(2) << "\n";
                return 0;
            }
            for (const auto& p : spmc::harness::preset_list()) {
                std::printf("%-10s %s\n", p.name.c_str(), p.description.c_str());
            }
            return 0;
        }

        spmc::harness::ExperimentConfig config = resolve_config(config_spec);
        const spmc::harness::Mode requested =
            spmc::harness::mode_from_name(app.get_subcommands().front()->get_name());
        if (config.mode != requested) {
            std::cerr << "error: config is for mode '" << spmc::harness::mode_name(config.mode)
                      << "' but subcommand '" << spmc::harness::mode_name(requested)
                      << "' was given\n";
            return 2;
        }
        if (seed_set) config.seed = seed;
        if (!scene_override.empty()) config.scene_path = scene_override;
        if (!frontend_override.empty()) {
            config.frontend = frontend_override == "waveform"
                                  ? spmc::harness::FrontendKind::waveform
                                  : spmc::harness::FrontendKind::statistical;
        }

        const spmc::harness::SweepResult result = spmc::harness::run_experiment(config, threads);
        if (out_path.empty()) {
            std::cout << spmc::harness::to_csv(result);
        } else {
            spmc::harness::write_csv(out_path, result);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
