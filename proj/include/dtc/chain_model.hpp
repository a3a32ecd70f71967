#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtc/common.hpp"
#include "dtc/pauli.hpp"
#include "dtc/rng.hpp"

namespace dtc {

/// Interval the disordered Ising couplings are drawn from, centered on pi/4.
inline constexpr double kCouplingLow = std::numbers::pi / 8.0;
inline constexpr double kCouplingHigh = 3.0 * std::numbers::pi / 8.0;

/// Default magnitude bound of the random longitudinal fields.
inline constexpr double kDefaultCoherentAmplitude = std::numbers::pi / 25.0;

/// Full definition of one Floquet period on an open chain: imperfect global
/// flip (epsilon), nearest-neighbour Ising phases (couplings) and the
/// coherent-error unitary exp(-i H_add) with H_add = sum b_i Z_i + extra terms.
struct ChainConfig {
    int n_qubits = 0;
    double epsilon = 0.0;
    std::vector<double> couplings;        // J_i, length n_qubits - 1
    std::vector<double> z_fields;         // b_i, length n_qubits
    std::vector<PauliTerm> extra_pauli_terms;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_qubits < 1) throw InvalidConfigError("n_qubits must be >= 1");
        if (epsilon < 0.0 || epsilon > 1.0) throw InvalidConfigError("epsilon must lie in [0,1]");
        if (static_cast<int>(couplings.size()) != n_qubits - 1)
            throw InvalidConfigError("couplings must have length n_qubits-1 (open chain)");
        if (static_cast<int>(z_fields.size()) != n_qubits)
            throw InvalidConfigError("z_fields must have length n_qubits");
        for (const auto& term : extra_pauli_terms) {
            if (term.op.size() != n_qubits)
                throw InvalidConfigError("extra pauli term '" + term.op.str() +
                                         "' does not act on " + std::to_string(n_qubits) + " sites");
            if (term.op.weight() < 1)
                throw InvalidConfigError("extra pauli terms must have weight >= 1");
        }
    }

    /// True when the model leaves the free-fermion class (any coherent error).
    bool has_coherent_errors() const {
        for (double b : z_fields)
            if (b != 0.0) return true;
        return !extra_pauli_terms.empty();
    }
};

enum class InitialKind { bitstring, polarized, neel, random_bit };

inline std::string to_string(InitialKind k) {
    switch (k) {
        case InitialKind::bitstring: return "bitstring";
        case InitialKind::polarized: return "polarized";
        case InitialKind::neel: return "neel";
        case InitialKind::random_bit: return "random-bit";
    }
    return "?";
}

inline InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "bitstring") return InitialKind::bitstring;
    if (s == "polarized") return InitialKind::polarized;
    if (s == "neel") return InitialKind::neel;
    if (s == "random-bit") return InitialKind::random_bit;
    throw InvalidConfigError("unknown initial state kind '" + s + "'");
}

/// A computational-basis product state; bits are always materialized.
struct InitialState {
    InitialKind kind = InitialKind::polarized;
    std::vector<int> bits;

    /// +1 / -1 polarization of qubit q at t=0.
    int sign(int q) const { return bits[q] ? -1 : 1; }
};

/// Draws each J_i independently and uniformly from [pi/8, 3*pi/8].
/// Deterministic in (n_qubits, seed); z_fields come back zero.
inline ChainConfig sample_disorder(int n_qubits, std::uint64_t seed) {
    if (n_qubits < 2) throw InvalidConfigError("sample_disorder needs n_qubits >= 2");
    ChainConfig cfg;
    cfg.n_qubits = n_qubits;
    cfg.seed = seed;
    cfg.z_fields.assign(n_qubits, 0.0);
    Rng rng(derive_seed(seed, "disorder"));
    cfg.couplings.resize(n_qubits - 1);
    for (auto& j : cfg.couplings) j = rng.uniform(kCouplingLow, kCouplingHigh);
    return cfg;
}

/// Random longitudinal fields b_i, uniform on [-amplitude, amplitude].
inline std::vector<double> sample_coherent_errors(int n_qubits, double amplitude,
                                                  std::uint64_t seed) {
    if (amplitude < 0.0) throw InvalidConfigError("coherent error amplitude must be >= 0");
    std::vector<double> fields(n_qubits);
    Rng rng(derive_seed(seed, "coherent"));
    for (auto& b : fields) b = rng.uniform(-amplitude, amplitude);
    return fields;
}

inline InitialState make_initial(InitialKind kind, int n_qubits, std::uint64_t seed = 0) {
    if (n_qubits < 1) throw InvalidConfigError("make_initial needs n_qubits >= 1");
    InitialState st;
    st.kind = kind;
    st.bits.assign(n_qubits, 0);
    switch (kind) {
        case InitialKind::polarized:
            break;
        case InitialKind::neel:
            for (int q = 0; q < n_qubits; ++q) st.bits[q] = q % 2;
            break;
        case InitialKind::random_bit: {
            Rng rng(derive_seed(seed, "initial-bits"));
            for (auto& b : st.bits) b = rng.bernoulli(0.5) ? 1 : 0;
            break;
        }
        case InitialKind::bitstring:
            throw InvalidConfigError("bitstring initial state requires explicit bits");
    }
    return st;
}

inline InitialState make_initial(const std::vector<int>& bits) {
    for (int b : bits)
        if (b != 0 && b != 1) throw InvalidConfigError("initial bits must be 0/1");
    InitialState st;
    st.kind = InitialKind::bitstring;
    st.bits = bits;
    return st;
}

// --- JSON form: {n_qubits, epsilon, couplings, z_fields, extra_pauli_terms, seed} ---

inline nlohmann::json to_json(const ChainConfig& cfg) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : cfg.extra_pauli_terms) terms.push_back({t.op.str(), t.coeff});
    return nlohmann::json{{"n_qubits", cfg.n_qubits},
                          {"epsilon", cfg.epsilon},
                          {"couplings", cfg.couplings},
                          {"z_fields", cfg.z_fields},
                          {"extra_pauli_terms", terms},
                          {"seed", cfg.seed}};
}

inline ChainConfig chain_config_from_json(const nlohmann::json& j) {
    ChainConfig cfg;
    cfg.n_qubits = j.at("n_qubits").get<int>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.couplings = j.at("couplings").get<std::vector<double>>();
    cfg.z_fields = j.at("z_fields").get<std::vector<double>>();
    if (j.contains("extra_pauli_terms")) {
        for (const auto& t : j.at("extra_pauli_terms")) {
            cfg.extra_pauli_terms.push_back({PauliString(t.at(0).get<std::string>()),
                                             t.at(1).get<double>()});
        }
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.validate();
    return cfg;
}

inline std::uint64_t config_hash(const ChainConfig& cfg) {
    return fnv1a64(to_json(cfg).dump());
}

}  // namespace dtc
