#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtc/chain_model.hpp"
#include "dtc/common.hpp"
#include "dtc/panel.hpp"
#include "dtc/rng.hpp"
#include "dtc/statevector.hpp"

namespace dtc {

/// Hardware-style stochastic noise: per-qubit asymmetric readout flips
/// (eta0 = P(read 1 | 0), eta1 = P(read 0 | 1)) and a per-qubit per-step
/// uniform Pauli channel of strength depol_rate.
struct NoiseModel {
    std::vector<double> eta0;
    std::vector<double> eta1;
    std::vector<double> depol_rate;
    long shots = 32768;

    static NoiseModel none(int n_qubits) {
        NoiseModel m;
        m.eta0.assign(n_qubits, 0.0);
        m.eta1.assign(n_qubits, 0.0);
        m.depol_rate.assign(n_qubits, 0.0);
        return m;
    }

    static NoiseModel uniform(int n_qubits, double e0, double e1, double p, long shots = 32768) {
        NoiseModel m;
        m.eta0.assign(n_qubits, e0);
        m.eta1.assign(n_qubits, e1);
        m.depol_rate.assign(n_qubits, p);
        m.shots = shots;
        m.validate(n_qubits);
        return m;
    }

    /// Site-to-site variation in the style of the device's quoted ranges:
    /// readout errors in [2.5e-2, 3.7e-2], depolarization around the value
    /// that damps an unperturbed echo to ~0.3 by step 50.
    static NoiseModel site_sampled(int n_qubits, std::uint64_t seed, long shots = 32768) {
        NoiseModel m;
        Rng r0(derive_seed(seed, "noise-eta0"));
        Rng r1(derive_seed(seed, "noise-eta1"));
        Rng rp(derive_seed(seed, "noise-depol"));
        m.eta0.resize(n_qubits);
        m.eta1.resize(n_qubits);
        m.depol_rate.resize(n_qubits);
        for (int q = 0; q < n_qubits; ++q) {
            m.eta0[q] = r0.uniform(0.025, 0.037);
            m.eta1[q] = r1.uniform(0.025, 0.037);
            m.depol_rate[q] = rp.uniform(0.012, 0.024);
        }
        m.shots = shots;
        return m;
    }

    void validate(int n_qubits) const {
        auto check_len = [&](const std::vector<double>& v, const char* name) {
            if (static_cast<int>(v.size()) != n_qubits)
                throw InvalidConfigError(std::string(name) + " must have one entry per qubit");
        };
        check_len(eta0, "eta0");
        check_len(eta1, "eta1");
        check_len(depol_rate, "depol_rate");
        for (int q = 0; q < n_qubits; ++q) {
            if (eta0[q] < 0.0 || eta0[q] >= 0.5 || eta1[q] < 0.0 || eta1[q] >= 0.5)
                throw InvalidConfigError("readout error probabilities must lie in [0, 0.5)");
            if (depol_rate[q] < 0.0 || depol_rate[q] >= 1.0)
                throw InvalidConfigError("depol_rate must lie in [0, 1)");
        }
        if (shots < 1) throw InvalidConfigError("shots must be positive");
    }

    bool is_trivial() const {
        for (double v : eta0)
            if (v != 0.0) return false;
        for (double v : eta1)
            if (v != 0.0) return false;
        for (double v : depol_rate)
            if (v != 0.0) return false;
        return true;
    }
};

inline nlohmann::json to_json(const NoiseModel& m) {
    return {{"eta0", m.eta0}, {"eta1", m.eta1}, {"depol_rate", m.depol_rate}, {"shots", m.shots}};
}

inline NoiseModel noise_from_json(const nlohmann::json& j) {
    NoiseModel m;
    m.eta0 = j.at("eta0").get<std::vector<double>>();
    m.eta1 = j.at("eta1").get<std::vector<double>>();
    m.depol_rate = j.at("depol_rate").get<std::vector<double>>();
    m.shots = j.value("shots", 32768L);
    return m;
}

/// Independent per-qubit classical bit flips: 0 -> 1 with eta0, 1 -> 0 with eta1.
inline std::vector<int> apply_readout_error(const std::vector<int>& true_bits,
                                            const NoiseModel& noise, Rng& rng) {
    noise.validate(static_cast<int>(true_bits.size()));
    std::vector<int> out(true_bits.size());
    for (std::size_t q = 0; q < true_bits.size(); ++q) {
        const double flip_p = true_bits[q] ? noise.eta1[q] : noise.eta0[q];
        out[q] = rng.bernoulli(flip_p) ? 1 - true_bits[q] : true_bits[q];
    }
    return out;
}

/// One stochastic noise slice: each qubit independently suffers X, Y or Z
/// (uniformly chosen) with probability depol_rate. Averaged over trajectories
/// this is the depolarizing channel contracting every Bloch component by
/// (1 - 4p/3) per step.
inline void trajectory_step(PureState& state, const std::vector<double>& depol_rate, Rng& rng) {
    static constexpr char kPaulis[3] = {'X', 'Y', 'Z'};
    if (static_cast<int>(depol_rate.size()) != state.n_qubits())
        throw InvalidConfigError("depol_rate must have one entry per qubit");
    for (int q = 0; q < state.n_qubits(); ++q) {
        if (depol_rate[q] <= 0.0) continue;
        if (rng.bernoulli(depol_rate[q]))
            apply_pauli(state, q, kPaulis[rng.below(3)]);
    }
}

/// Per-qubit measurement tallies across recorded steps.
struct ShotPanel {
    int n_qubits = 0;
    int n_steps = 0;
    long shots = 0;
    std::vector<long> one_counts;  // [q * (n_steps+1) + t]

    ShotPanel() = default;
    ShotPanel(int nq, int steps, long shots_)
        : n_qubits(nq), n_steps(steps), shots(shots_),
          one_counts(static_cast<std::size_t>(nq) * (steps + 1), 0) {}

    long& ones(int q, int t) { return one_counts[static_cast<std::size_t>(q) * (n_steps + 1) + t]; }
    long ones(int q, int t) const {
        return one_counts[static_cast<std::size_t>(q) * (n_steps + 1) + t];
    }

    /// (n0 - n1)/shots estimator of <Z_q(t)>.
    double estimate(int q, int t) const {
        return 1.0 - 2.0 * static_cast<double>(ones(q, t)) / static_cast<double>(shots);
    }
};

/// Measures `noise.shots` computational-basis samples of the state through the
/// readout channel and tallies per-qubit outcomes. Only per-qubit tallies are
/// stored, so each qubit's count is drawn from its exact marginal
/// Binomial(shots, p1 (1-eta1) + p0 eta0).
inline ShotPanel sample_shots(const PureState& state, const NoiseModel& noise, Rng& rng) {
    noise.validate(state.n_qubits());
    const auto p1 = one_probabilities(state);
    ShotPanel panel(state.n_qubits(), 0, noise.shots);
    for (int q = 0; q < state.n_qubits(); ++q) {
        const double read1 = p1[q] * (1.0 - noise.eta1[q]) + (1.0 - p1[q]) * noise.eta0[q];
        panel.ones(q, 0) = rng.binomial(noise.shots, read1);
    }
    return panel;
}

/// Full raw-data generator: Monte-Carlo Pauli trajectories interleaved with
/// Floquet steps, shot-sampled at every step, averaged over trajectories.
/// Deterministic in root_seed; trajectories run in parallel but are reduced
/// in index order.
inline TimeSeriesPanel run_noisy_experiment(const ChainConfig& cfg, const InitialState& initial,
                                            const NoiseModel& noise, int steps, int n_trajectories,
                                            std::uint64_t root_seed) {
    cfg.validate();
    noise.validate(cfg.n_qubits);
    if (static_cast<int>(initial.bits.size()) != cfg.n_qubits)
        throw InvalidConfigError("initial state and config disagree on qubit count");
    if (n_trajectories < 1) throw InvalidConfigError("need at least one trajectory");

    const FloquetEngine engine(cfg);
    const int nq = cfg.n_qubits;
    std::vector<std::vector<double>> per_traj(n_trajectories);

    parallel_for(static_cast<std::size_t>(n_trajectories), [&](std::size_t k) {
        Rng rng(derive_seed(root_seed, "trajectory", k));
        PureState st = PureState::from_bits(initial.bits);
        std::vector<double> acc(static_cast<std::size_t>(nq) * (steps + 1));
        auto record = [&](int t) {
            auto tallies = sample_shots(st, noise, rng);
            for (int q = 0; q < nq; ++q)
                acc[static_cast<std::size_t>(q) * (steps + 1) + t] = tallies.estimate(q, 0);
        };
        record(0);
        for (int t = 1; t <= steps; ++t) {
            engine.step(st);
            trajectory_step(st, noise.depol_rate, rng);
            record(t);
        }
        per_traj[k] = std::move(acc);
    });

    TimeSeriesPanel panel(nq, steps, Stage::raw);
    panel.initial_bits = initial.bits;
    for (int k = 0; k < n_trajectories; ++k)
        for (std::size_t i = 0; i < panel.values.size(); ++i) panel.values[i] += per_traj[k][i];
    for (auto& v : panel.values) v /= n_trajectories;
    return panel;
}

/// Shot-free exact panel from the dense engine (the noiseless oracle).
inline TimeSeriesPanel run_exact_experiment(const ChainConfig& cfg, const InitialState& initial,
                                            int steps) {
    cfg.validate();
    if (static_cast<int>(initial.bits.size()) != cfg.n_qubits)
        throw InvalidConfigError("initial state and config disagree on qubit count");
    const FloquetEngine engine(cfg);
    PureState st = PureState::from_bits(initial.bits);
    TimeSeriesPanel panel(cfg.n_qubits, steps, Stage::raw);
    panel.initial_bits = initial.bits;
    auto record = [&](int t) {
        auto pol = exact_polarizations(st);
        for (int q = 0; q < cfg.n_qubits; ++q) panel.at(q, t) = pol[q];
    };
    record(0);
    for (int t = 1; t <= steps; ++t) {
        engine.step(st);
        record(t);
    }
    return panel;
}

}  // namespace dtc
