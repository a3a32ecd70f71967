// Command-line front end: config-driven runs (`run`), named presets
// (`preset`), epsilon sweeps (`sweep`) and process tomography (`tomo`).
// Exit codes: 0 success, 2 schema/usage problems, 3 engine capability.
// DTC_WORKERS caps the worker pool used for trajectories and sweep points.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dtc/experiment.hpp"

namespace {

void apply_overrides(dtc::ExperimentSpec& spec, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& steps, const std::optional<std::string>& engine) {
    if (seed) spec.seed = *seed;
    if (steps) spec.steps = *steps;
    if (engine) {
        if (*engine == "auto") spec.engine = dtc::Engine::auto_select;
        else if (*engine == "statevector") spec.engine = dtc::Engine::statevector;
        else if (*engine == "fermion") spec.engine = dtc::Engine::fermion;
        else throw dtc::SchemaError("engine", "must be auto, statevector or fermion");
    }
}

int run_and_report(const dtc::ExperimentSpec& spec, const std::string& out_dir) {
    const auto result = dtc::run_experiment(spec, out_dir);
    std::cout << "wrote " << result.artifacts.size() << " artifacts to " << out_dir << "\n";
    for (const auto& a : result.artifacts) std::cout << "  " << a << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet spin-chain simulator with noise injection, error mitigation and "
                 "spectral phase diagnostics"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<std::string> engine;

    auto* run_cmd = app.add_subcommand("run", "run an experiment spec (JSON)");
    std::string spec_path;
    run_cmd->add_option("spec", spec_path, "path to the spec file")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--seed", seed, "override the root seed");
    run_cmd->add_option("--steps", steps, "override the number of Floquet steps");
    run_cmd->add_option("--engine", engine, "override the engine (auto|statevector|fermion)");

    auto* preset_cmd = app.add_subcommand("preset", "run a named preset experiment");
    std::string preset_name;
    bool dump_spec = false;
    preset_cmd->add_option("name", preset_name, "preset name")->required();
    preset_cmd->add_option("--out", out_dir, "output directory");
    preset_cmd->add_option("--seed", seed, "override the root seed");
    preset_cmd->add_flag("--dump-spec", dump_spec, "print the spec JSON instead of running");

    auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with phase diagnostics");
    int sweep_n = 12;
    int sweep_steps = 50;
    std::uint64_t sweep_seed = 3;
    double eps_min = 0.02, eps_max = 0.20, eps_step = 0.02;
    double coherent = dtc::kDefaultCoherentAmplitude;
    bool fresh_disorder = false;
    sweep_cmd->add_option("--n", sweep_n, "chain length");
    sweep_cmd->add_option("--steps", sweep_steps, "Floquet steps");
    sweep_cmd->add_option("--seed", sweep_seed, "root seed");
    sweep_cmd->add_option("--eps-min", eps_min, "first epsilon");
    sweep_cmd->add_option("--eps-max", eps_max, "last epsilon");
    sweep_cmd->add_option("--eps-step", eps_step, "epsilon increment");
    sweep_cmd->add_option("--coherent", coherent, "coherent-error amplitude");
    sweep_cmd->add_flag("--fresh-disorder", fresh_disorder,
                        "draw a new disorder realization per sweep point");
    sweep_cmd->add_option("--out", out_dir, "output directory");

    auto* tomo_cmd = app.add_subcommand("tomo", "three-qubit process tomography of one step");
    long tomo_shots = 100000;
    std::uint64_t tomo_seed = 7;
    bool no_inject = false;
    tomo_cmd->add_option("--shots", tomo_shots, "shots per tomography setting (0 = exact only)");
    tomo_cmd->add_option("--seed", tomo_seed, "root seed");
    tomo_cmd->add_flag("--no-inject", no_inject, "skip injecting the reference error terms");
    tomo_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);

        if (run_cmd->parsed()) {
            std::ifstream is(spec_path);
            if (!is) {
                std::cerr << "cannot read spec file '" << spec_path << "'\n";
                return 2;
            }
            nlohmann::json j;
            try {
                is >> j;
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "spec is not valid JSON: " << e.what() << "\n";
                return 2;
            }
            auto spec = dtc::spec_from_json(j);
            apply_overrides(spec, seed, steps, engine);
            spec.validate();
            return run_and_report(spec, out_dir);
        }
        if (preset_cmd->parsed()) {
            auto spec = dtc::preset(preset_name);
            apply_overrides(spec, seed, steps, engine);
            if (dump_spec) {
                std::cout << dtc::to_json(spec).dump(2) << "\n";
                return 0;
            }
            return run_and_report(spec, out_dir);
        }
        if (sweep_cmd->parsed()) {
            auto spec = dtc::preset("fig3-sweep");
            spec.model.n_qubits = sweep_n;
            spec.steps = sweep_steps;
            spec.seed = sweep_seed;
            spec.model.coherent_amplitude = coherent;
            spec.sweep_pin_disorder = !fresh_disorder;
            spec.sweep_epsilons.clear();
            for (double e = eps_min; e <= eps_max + 1e-12; e += eps_step)
                spec.sweep_epsilons.push_back(e);
            return run_and_report(spec, out_dir);
        }
        if (tomo_cmd->parsed()) {
            auto spec = dtc::preset("s4-tomography");
            spec.seed = tomo_seed;
            spec.tomography.shots_per_setting = tomo_shots;
            spec.tomography.inject_reference_terms = !no_inject;
            return run_and_report(spec, out_dir);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const dtc::SchemaError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const dtc::UnsupportedModelError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return 3;
    } catch (const dtc::UnsupportedSizeError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
