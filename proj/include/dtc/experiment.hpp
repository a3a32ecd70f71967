#pragma once

// Config-driven experiment orchestration: JSON specs, named presets, engine
// selection, and machine-readable artifacts (CSV panels/spectra/tables plus a
// manifest). Everything derives from one root seed, so re-running a spec
// reproduces every output byte for byte.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtc/analysis.hpp"
#include "dtc/chain_model.hpp"
#include "dtc/common.hpp"
#include "dtc/mitigation.hpp"
#include "dtc/noise.hpp"
#include "dtc/panel.hpp"
#include "dtc/tomography.hpp"

namespace dtc {

inline constexpr const char* kVersion = "0.1.0";

enum class Engine { auto_select, statevector, fermion };

inline std::string to_string(Engine e) {
    switch (e) {
        case Engine::auto_select: return "auto";
        case Engine::statevector: return "statevector";
        case Engine::fermion: return "fermion";
    }
    return "?";
}

struct ModelSpec {
    int n_qubits = 12;
    double epsilon = 0.05;
    std::optional<std::vector<double>> couplings;  // explicit J_i; sampled when absent
    std::optional<std::vector<double>> z_fields;   // explicit b_i
    double coherent_amplitude = 0.0;               // sampled b_i when z_fields absent
    std::vector<PauliTerm> extra_pauli_terms;
};

struct NoiseSpec {
    bool enabled = false;
    bool site_sampled = true;                  // device-style per-qubit variation
    double eta0 = 0.03, eta1 = 0.03, depol = 0.018;  // used when not site_sampled
    long shots = 32768;
    int trajectories = 64;
};

struct TomographySpec {
    bool enabled = false;
    long shots_per_setting = 100000;
    bool inject_reference_terms = true;  // add the characterized 3-qubit error table
};

struct ExperimentSpec {
    std::string name = "custom";
    std::uint64_t seed = 1;
    ModelSpec model;
    InitialKind initial_kind = InitialKind::random_bit;
    std::vector<int> initial_bits;  // for kind=bitstring
    NoiseSpec noise;
    int steps = 50;
    Engine engine = Engine::auto_select;
    bool mitigation_enabled = false;
    MitigationParams mitigation;
    std::set<std::string> analyses;  // autocorrelator, spectrum, variance_h, decay, sweep
    std::vector<double> sweep_epsilons;
    bool sweep_pin_disorder = true;
    TomographySpec tomography;

    void validate() const {
        if (steps < 1) throw SchemaError("steps", "must be >= 1");
        for (const auto& a : analyses)
            if (a != "autocorrelator" && a != "spectrum" && a != "variance_h" && a != "decay" &&
                a != "sweep")
                throw SchemaError("analyses", "unknown analysis '" + a + "'");
        const bool wants_sweep = analyses.count("sweep") > 0;
        if (wants_sweep != !sweep_epsilons.empty())
            throw SchemaError("sweep", "sweep grid must be present iff analyses include 'sweep'");
        if (initial_kind == InitialKind::bitstring &&
            static_cast<int>(initial_bits.size()) != model.n_qubits)
            throw SchemaError("initial.bits", "bitstring initial state needs n_qubits bits");
        if (mitigation_enabled && !noise.enabled && !tomography.enabled)
            throw SchemaError("mitigation", "mitigation requires a noisy run");
    }
};

/// The dominant Pauli terms of the characterized three-qubit step error, used
/// as the injected ground truth of the tomography preset. One duplicated row
/// of the measured table enters once.
inline std::vector<PauliTerm> reference_error_terms() {
    return {{PauliString("IIX"), 0.118}, {PauliString("IIY"), 0.085},
            {PauliString("IIZ"), 0.126}, {PauliString("IXI"), 0.023},
            {PauliString("IYI"), 0.012}, {PauliString("IZI"), 0.033},
            {PauliString("IZX"), 0.038}, {PauliString("IZY"), 0.033},
            {PauliString("XII"), 0.024}, {PauliString("YZI"), 0.023},
            {PauliString("ZII"), 0.037}, {PauliString("ZYI"), 0.017}};
}

// --- JSON spec ------------------------------------------------------------------

namespace spec_detail {

template <typename T>
T require(const nlohmann::json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw SchemaError(path + key, "missing required field");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw SchemaError(path + key, "has the wrong type");
    }
}

}  // namespace spec_detail

inline nlohmann::json to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["seed"] = spec.seed;
    nlohmann::json model;
    model["n_qubits"] = spec.model.n_qubits;
    model["epsilon"] = spec.model.epsilon;
    if (spec.model.couplings) model["couplings"] = *spec.model.couplings;
    if (spec.model.z_fields) model["z_fields"] = *spec.model.z_fields;
    model["coherent_amplitude"] = spec.model.coherent_amplitude;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : spec.model.extra_pauli_terms) terms.push_back({t.op.str(), t.coeff});
    model["extra_pauli_terms"] = terms;
    j["model"] = model;
    nlohmann::json initial;
    initial["kind"] = to_string(spec.initial_kind);
    if (spec.initial_kind == InitialKind::bitstring) initial["bits"] = spec.initial_bits;
    j["initial"] = initial;
    if (spec.noise.enabled) {
        nlohmann::json n;
        n["site_sampled"] = spec.noise.site_sampled;
        n["eta0"] = spec.noise.eta0;
        n["eta1"] = spec.noise.eta1;
        n["depol_rate"] = spec.noise.depol;
        n["shots"] = spec.noise.shots;
        n["trajectories"] = spec.noise.trajectories;
        j["noise"] = n;
    } else {
        j["noise"] = "none";
    }
    j["steps"] = spec.steps;
    j["engine"] = to_string(spec.engine);
    if (spec.mitigation_enabled) {
        j["mitigation"] = {{"w0", spec.mitigation.w0},
                           {"wf", spec.mitigation.wf},
                           {"skip_steps", spec.mitigation.skip_steps},
                           {"avg_window", spec.mitigation.avg_window},
                           {"final_window", spec.mitigation.final_window}};
    } else {
        j["mitigation"] = "off";
    }
    j["analyses"] = spec.analyses;
    if (!spec.sweep_epsilons.empty())
        j["sweep"] = {{"epsilons", spec.sweep_epsilons}, {"pin_disorder", spec.sweep_pin_disorder}};
    if (spec.tomography.enabled)
        j["tomography"] = {{"shots_per_setting", spec.tomography.shots_per_setting},
                           {"inject_reference_terms", spec.tomography.inject_reference_terms}};
    return j;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    using spec_detail::require;
    ExperimentSpec spec;
    spec.name = j.value("name", std::string("custom"));
    spec.seed = j.value("seed", std::uint64_t{1});
    if (!j.contains("model")) throw SchemaError("model", "missing required field");
    const auto& jm = j.at("model");
    spec.model.n_qubits = require<int>(jm, "model.", "n_qubits");
    if (spec.model.n_qubits < 1) throw SchemaError("model.n_qubits", "must be >= 1");
    spec.model.epsilon = require<double>(jm, "model.", "epsilon");
    if (spec.model.epsilon < 0.0 || spec.model.epsilon > 1.0)
        throw SchemaError("model.epsilon", "must lie in [0,1]");
    if (jm.contains("couplings"))
        spec.model.couplings = require<std::vector<double>>(jm, "model.", "couplings");
    if (jm.contains("z_fields"))
        spec.model.z_fields = require<std::vector<double>>(jm, "model.", "z_fields");
    spec.model.coherent_amplitude = jm.value("coherent_amplitude", 0.0);
    if (jm.contains("extra_pauli_terms")) {
        for (const auto& t : jm.at("extra_pauli_terms")) {
            if (!t.is_array() || t.size() != 2)
                throw SchemaError("model.extra_pauli_terms", "entries must be [string, number]");
            try {
                spec.model.extra_pauli_terms.push_back(
                    {PauliString(t.at(0).get<std::string>()), t.at(1).get<double>()});
            } catch (const Error& e) {
                throw SchemaError("model.extra_pauli_terms", e.what());
            }
        }
    }
    if (j.contains("initial")) {
        const auto& ji = j.at("initial");
        try {
            spec.initial_kind = initial_kind_from_string(require<std::string>(ji, "initial.", "kind"));
        } catch (const InvalidConfigError& e) {
            throw SchemaError("initial.kind", e.what());
        }
        if (spec.initial_kind == InitialKind::bitstring)
            spec.initial_bits = require<std::vector<int>>(ji, "initial.", "bits");
    }
    if (j.contains("noise") && !j.at("noise").is_string()) {
        const auto& jn = j.at("noise");
        spec.noise.enabled = true;
        spec.noise.site_sampled = jn.value("site_sampled", true);
        spec.noise.eta0 = jn.value("eta0", 0.03);
        spec.noise.eta1 = jn.value("eta1", 0.03);
        spec.noise.depol = jn.value("depol_rate", 0.018);
        spec.noise.shots = jn.value("shots", 32768L);
        spec.noise.trajectories = jn.value("trajectories", 64);
        if (spec.noise.shots < 1) throw SchemaError("noise.shots", "must be >= 1");
        if (spec.noise.trajectories < 1) throw SchemaError("noise.trajectories", "must be >= 1");
    } else if (j.contains("noise") && j.at("noise").get<std::string>() != "none") {
        throw SchemaError("noise", "must be \"none\" or an object");
    }
    spec.steps = j.value("steps", 50);
    const std::string engine = j.value("engine", std::string("auto"));
    if (engine == "auto") spec.engine = Engine::auto_select;
    else if (engine == "statevector") spec.engine = Engine::statevector;
    else if (engine == "fermion") spec.engine = Engine::fermion;
    else throw SchemaError("engine", "must be auto, statevector or fermion");
    if (j.contains("mitigation") && !j.at("mitigation").is_string()) {
        const auto& jm2 = j.at("mitigation");
        spec.mitigation_enabled = true;
        spec.mitigation.w0 = jm2.value("w0", 0.15);
        spec.mitigation.wf = jm2.value("wf", spec.mitigation.w0 * 2.0 / 3.0);
        spec.mitigation.skip_steps = jm2.value("skip_steps", 13);
        spec.mitigation.avg_window = jm2.value("avg_window", 5);
        spec.mitigation.final_window = jm2.value("final_window", 6);
        try {
            spec.mitigation.validate(spec.steps);
        } catch (const Error& e) {
            throw SchemaError("mitigation", e.what());
        }
    } else if (j.contains("mitigation") && j.at("mitigation").get<std::string>() != "off") {
        throw SchemaError("mitigation", "must be \"off\" or an object");
    }
    if (j.contains("analyses"))
        for (const auto& a : j.at("analyses")) spec.analyses.insert(a.get<std::string>());
    if (j.contains("sweep")) {
        const auto& js = j.at("sweep");
        spec.sweep_epsilons = require<std::vector<double>>(js, "sweep.", "epsilons");
        spec.sweep_pin_disorder = js.value("pin_disorder", true);
    }
    if (j.contains("tomography")) {
        const auto& jt = j.at("tomography");
        spec.tomography.enabled = true;
        spec.tomography.shots_per_setting = jt.value("shots_per_setting", 100000L);
        spec.tomography.inject_reference_terms = jt.value("inject_reference_terms", true);
        if (spec.tomography.shots_per_setting < 0)
            throw SchemaError("tomography.shots_per_setting", "must be >= 0");
    }
    spec.validate();
    return spec;
}

// --- presets ---------------------------------------------------------------------

inline std::vector<std::string> preset_names() {
    return {"echo",   "fig2-dtc",     "fig2-thermal",  "fig3-sweep",
            "s1-neel", "s1-polarized", "s1-no-disorder", "s4-tomography"};
}

/// Fully populated end-to-end experiment specs at documented desk scales:
/// N=57 for ideal fermionic runs, N=12 for noisy statevector runs.
inline ExperimentSpec preset(const std::string& name) {
    ExperimentSpec spec;
    spec.name = name;
    if (name == "echo") {
        spec.seed = 11;
        spec.model.n_qubits = 57;
        spec.model.epsilon = 0.0;
        spec.engine = Engine::fermion;
        spec.analyses = {"autocorrelator"};
        return spec;
    }
    if (name == "fig2-dtc" || name == "fig2-thermal" || name == "s1-neel" ||
        name == "s1-polarized" || name == "s1-no-disorder") {
        spec.seed = 3;
        spec.model.n_qubits = 12;
        spec.model.epsilon = name == "fig2-thermal" ? 0.5 : 0.05;
        spec.model.coherent_amplitude = kDefaultCoherentAmplitude;
        spec.noise.enabled = true;
        spec.mitigation_enabled = true;
        spec.engine = Engine::statevector;
        spec.analyses = {"autocorrelator", "spectrum", "decay"};
        if (name == "s1-neel") spec.initial_kind = InitialKind::neel;
        if (name == "s1-polarized") spec.initial_kind = InitialKind::polarized;
        if (name == "s1-no-disorder")
            spec.model.couplings = std::vector<double>(11, std::numbers::pi / 4.0);
        return spec;
    }
    if (name == "fig3-sweep") {
        spec.seed = 1;
        spec.model.n_qubits = 12;
        spec.model.epsilon = 0.05;
        spec.model.coherent_amplitude = kDefaultCoherentAmplitude;
        spec.engine = Engine::statevector;
        spec.analyses = {"sweep"};
        for (int k = 1; k <= 10; ++k) spec.sweep_epsilons.push_back(0.02 * k);
        spec.sweep_pin_disorder = true;
        return spec;
    }
    if (name == "s4-tomography") {
        spec.seed = 7;
        spec.model.n_qubits = 3;
        spec.model.epsilon = 0.05;
        spec.tomography.enabled = true;
        spec.analyses = {};
        return spec;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw SchemaError("preset", "unknown preset '" + name + "'; known presets: " + known);
}

// --- materialization and run -------------------------------------------------------

inline ChainConfig materialize_config(const ExperimentSpec& spec) {
    ChainConfig cfg;
    if (spec.model.couplings) {
        cfg.n_qubits = spec.model.n_qubits;
        cfg.couplings = *spec.model.couplings;
        cfg.z_fields.assign(spec.model.n_qubits, 0.0);
        cfg.seed = spec.seed;
    } else if (spec.model.n_qubits >= 2) {
        cfg = sample_disorder(spec.model.n_qubits, spec.seed);
    } else {
        cfg.n_qubits = 1;
        cfg.z_fields = {0.0};
        cfg.seed = spec.seed;
    }
    cfg.epsilon = spec.model.epsilon;
    if (spec.model.z_fields) cfg.z_fields = *spec.model.z_fields;
    else if (spec.model.coherent_amplitude > 0.0)
        cfg.z_fields = sample_coherent_errors(spec.model.n_qubits, spec.model.coherent_amplitude,
                                              spec.seed);
    cfg.extra_pauli_terms = spec.model.extra_pauli_terms;
    cfg.validate();
    return cfg;
}

inline InitialState materialize_initial(const ExperimentSpec& spec) {
    if (spec.initial_kind == InitialKind::bitstring) return make_initial(spec.initial_bits);
    return make_initial(spec.initial_kind, spec.model.n_qubits, derive_seed(spec.seed, "initial"));
}

inline NoiseModel materialize_noise(const ExperimentSpec& spec) {
    if (!spec.noise.enabled) return NoiseModel::none(spec.model.n_qubits);
    NoiseModel m = spec.noise.site_sampled
                       ? NoiseModel::site_sampled(spec.model.n_qubits,
                                                  derive_seed(spec.seed, "noise"), spec.noise.shots)
                       : NoiseModel::uniform(spec.model.n_qubits, spec.noise.eta0, spec.noise.eta1,
                                             spec.noise.depol, spec.noise.shots);
    m.validate(spec.model.n_qubits);
    return m;
}

/// Resolves the model/noise pair onto an engine. Never approximates silently:
/// an interacting model or a noisy run refuses the fermion engine.
inline Engine select_engine(const ExperimentSpec& spec, const ChainConfig& cfg) {
    const bool fermion_capable = !cfg.has_coherent_errors() && !spec.noise.enabled;
    switch (spec.engine) {
        case Engine::fermion:
            if (!fermion_capable)
                throw UnsupportedModelError(
                    "fermion engine requires zero coherent errors and noise=\"none\"");
            return Engine::fermion;
        case Engine::statevector:
            return Engine::statevector;
        case Engine::auto_select:
            return fermion_capable ? Engine::fermion : Engine::statevector;
    }
    return Engine::statevector;
}

struct ExperimentResult {
    ChainConfig config;
    InitialState initial;
    Engine engine = Engine::statevector;
    TimeSeriesPanel raw;
    std::optional<MitigationOutput> mitigation;
    std::optional<SweepResult> sweep;
    std::vector<std::string> artifacts;
};

namespace run_detail {

inline TimeSeriesPanel simulate_raw(const ExperimentSpec& spec, const ChainConfig& cfg,
                                    const InitialState& initial, Engine engine) {
    if (engine == Engine::fermion)
        return evolve_covariance(covariance_from_bits(initial.bits), cfg, spec.steps);
    if (spec.noise.enabled)
        return run_noisy_experiment(cfg, initial, materialize_noise(spec), spec.steps,
                                    spec.noise.trajectories, derive_seed(spec.seed, "run"));
    return run_exact_experiment(cfg, initial, spec.steps);
}

inline void write_text(const std::string& path, const std::string& text,
                       std::vector<std::string>& artifacts) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << text;
    artifacts.push_back(path);
}

}  // namespace run_detail

/// Runs the experiment and writes all artifacts into out_dir.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);
    auto path = [&](const std::string& file) { return out_dir + "/" + file; };

    ExperimentResult result;
    result.config = materialize_config(spec);
    result.initial = materialize_initial(spec);

    nlohmann::json manifest;
    manifest["name"] = spec.name;
    manifest["version"] = kVersion;
    manifest["root_seed"] = spec.seed;
    manifest["spec"] = to_json(spec);
    manifest["config"] = to_json(result.config);
    manifest["config_hash"] = config_hash(result.config);
    manifest["initial_bits"] = result.initial.bits;
    manifest["steps"] = spec.steps;

    run_detail::write_text(path("spec.json"), to_json(spec).dump(2) + "\n", result.artifacts);
    run_detail::write_text(path("config.json"), to_json(result.config).dump(2) + "\n",
                           result.artifacts);

    if (spec.tomography.enabled) {
        auto cfg = result.config;
        if (cfg.n_qubits > kTomographyMaxQubits)
            throw UnsupportedSizeError("tomography preset needs n_qubits <= 3");
        const auto ideal = ptm_of_config_step(cfg);
        auto noisy_cfg = cfg;
        if (spec.tomography.inject_reference_terms) {
            for (const auto& term : reference_error_terms())
                noisy_cfg.extra_pauli_terms.push_back(term);
        }
        const auto exact = ptm_of_config_step(noisy_cfg);
        const auto gen_exact = error_generator(exact, ideal);
        write_coefficients_csv(path("coefficients_exact.csv"), gen_exact.hamiltonian_coeffs);
        result.artifacts.push_back(path("coefficients_exact.csv"));
        manifest["tomography"]["dissipative_residual_exact"] =
            gen_exact.dissipative_residual_norm;
        if (spec.tomography.shots_per_setting > 0) {
            const auto sampled = tomographic_reconstruction(
                noisy_cfg, nullptr, spec.tomography.shots_per_setting,
                derive_seed(spec.seed, "tomo-shots"));
            const auto gen_sampled = error_generator(sampled, ideal);
            write_coefficients_csv(path("coefficients_sampled.csv"),
                                   gen_sampled.hamiltonian_coeffs);
            result.artifacts.push_back(path("coefficients_sampled.csv"));
            manifest["tomography"]["dissipative_residual_sampled"] =
                gen_sampled.dissipative_residual_norm;
            manifest["tomography"]["shots_per_setting"] = spec.tomography.shots_per_setting;
        }
        run_detail::write_text(path("manifest.json"), manifest.dump(2) + "\n", result.artifacts);
        return result;
    }

    if (!spec.sweep_epsilons.empty()) {
        SweepOptions opt;
        opt.n_qubits = spec.model.n_qubits;
        opt.steps = spec.steps;
        opt.seed = spec.seed;
        opt.pin_disorder = spec.sweep_pin_disorder;
        opt.coherent_amplitude = spec.model.coherent_amplitude;
        opt.initial = spec.initial_kind == InitialKind::bitstring ? InitialKind::random_bit
                                                                  : spec.initial_kind;
        opt.with_noise = spec.noise.enabled;
        if (spec.noise.enabled) {
            opt.noise = materialize_noise(spec);
            opt.trajectories = spec.noise.trajectories;
            opt.mitigation = spec.mitigation;
        }
        result.sweep = sweep_epsilon(spec.sweep_epsilons, opt);
        write_phase_diagram_csv(path("phase_diagram.csv"), *result.sweep);
        result.artifacts.push_back(path("phase_diagram.csv"));
        manifest["sweep"]["epsilon_c"] = result.sweep->epsilon_c;
        manifest["sweep"]["pin_disorder"] = spec.sweep_pin_disorder;
        run_detail::write_text(path("manifest.json"), manifest.dump(2) + "\n", result.artifacts);
        return result;
    }

    result.engine = select_engine(spec, result.config);
    manifest["engine"] = to_string(result.engine);
    if (spec.noise.enabled) manifest["noise"] = to_json(materialize_noise(spec));
    else manifest["noise"] = "none";

    result.raw = run_detail::simulate_raw(spec, result.config, result.initial, result.engine);
    result.raw.initial_bits = result.initial.bits;
    write_panel_csv(path("panel_raw.csv"), result.raw);
    result.artifacts.push_back(path("panel_raw.csv"));
    write_panel_json(path("panel_raw.json"), result.raw,
                     {{"config_hash", config_hash(result.config)}, {"root_seed", spec.seed}});
    result.artifacts.push_back(path("panel_raw.json"));

    const TimeSeriesPanel* final_panel = &result.raw;
    if (spec.mitigation_enabled) {
        auto ref_spec = spec;
        ref_spec.model.epsilon = 0.0;
        auto ref_cfg = result.config;
        ref_cfg.epsilon = 0.0;
        auto reference = spec.noise.enabled
                             ? run_noisy_experiment(ref_cfg, result.initial,
                                                    materialize_noise(spec), spec.steps,
                                                    spec.noise.trajectories,
                                                    derive_seed(spec.seed, "reference"))
                             : run_exact_experiment(ref_cfg, result.initial, spec.steps);
        result.mitigation = run_mitigation(result.raw, reference, spec.mitigation);
        write_panel_csv(path("panel_corrected.csv"), result.mitigation->corrected);
        result.artifacts.push_back(path("panel_corrected.csv"));
        write_panel_csv(path("panel_mitigated.csv"), result.mitigation->mitigated);
        result.artifacts.push_back(path("panel_mitigated.csv"));
        write_panel_json(path("panel_mitigated.json"), result.mitigation->mitigated,
                         {{"config_hash", config_hash(result.config)}, {"root_seed", spec.seed}});
        result.artifacts.push_back(path("panel_mitigated.json"));
        final_panel = &result.mitigation->mitigated;
        nlohmann::json etas = nlohmann::json::array();
        for (const auto& e : result.mitigation->etas)
            etas.push_back({{"eta0", e.eta0}, {"eta1", e.eta1}, {"flagged", e.flagged}});
        manifest["mitigation"]["etas"] = etas;
        nlohmann::json fits = nlohmann::json::array();
        for (const auto& f : result.mitigation->reference_fits)
            fits.push_back({{"a", f.a},
                            {"b", f.b},
                            {"c", f.c},
                            {"rms_residual", f.rms_residual},
                            {"converged", f.converged}});
        manifest["mitigation"]["reference_fits"] = fits;
        std::vector<int> retained(result.mitigation->mitigated.retained.begin(),
                                  result.mitigation->mitigated.retained.end());
        manifest["mitigation"]["retained"] = retained;
    }

    if (spec.analyses.count("autocorrelator") || spec.analyses.count("spectrum") ||
        spec.analyses.count("variance_h") || spec.analyses.count("decay")) {
        const auto corr = autocorrelator(*final_panel, result.initial.bits);
        if (spec.analyses.count("autocorrelator")) {
            write_panel_csv(path("autocorrelator.csv"), corr);
            result.artifacts.push_back(path("autocorrelator.csv"));
        }
        if (spec.analyses.count("spectrum") || spec.analyses.count("variance_h")) {
            const auto spec_res = spectrum(corr);
            if (spec.analyses.count("spectrum")) {
                write_spectrum_csv(path("spectrum.csv"), spec_res);
                result.artifacts.push_back(path("spectrum.csv"));
            }
            if (spec.analyses.count("variance_h"))
                manifest["analysis"]["var_h"] = variance_h(spec_res, final_panel->retained);
        }
        if (spec.analyses.count("decay")) {
            const auto decay = decay_constants(corr, spec.mitigation.skip_steps);
            manifest["analysis"]["delta_bar"] = decay.delta_bar;
            manifest["analysis"]["delta"] = decay.delta;
        }
    }
    run_detail::write_text(path("manifest.json"), manifest.dump(2) + "\n", result.artifacts);
    return result;
}

}  // namespace dtc
