#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtc/common.hpp"

namespace dtc {

enum class Stage { raw, measurement_corrected, fully_mitigated };

inline std::string to_string(Stage s) {
    switch (s) {
        case Stage::raw: return "raw";
        case Stage::measurement_corrected: return "measurement-corrected";
        case Stage::fully_mitigated: return "fully-mitigated";
    }
    return "?";
}

/// Per-qubit polarization series <Z_q(t)> for t = 0..n_steps, with provenance.
/// Mitigated values may leave [-1,1] slightly and are reported unclipped.
struct TimeSeriesPanel {
    int n_qubits = 0;
    int n_steps = 0;
    Stage stage = Stage::raw;
    std::vector<double> values;     // [q * (n_steps+1) + t]
    std::vector<int> initial_bits;  // ideal z_q(0) signs: bit b -> sign 1-2b
    std::vector<char> retained;     // set at the fully-mitigated stage

    TimeSeriesPanel() = default;
    TimeSeriesPanel(int nq, int steps, Stage st = Stage::raw)
        : n_qubits(nq), n_steps(steps), stage(st),
          values(static_cast<std::size_t>(nq) * (steps + 1), 0.0),
          initial_bits(nq, 0), retained(nq, 1) {}

    double& at(int q, int t) { return values[static_cast<std::size_t>(q) * (n_steps + 1) + t]; }
    double at(int q, int t) const { return values[static_cast<std::size_t>(q) * (n_steps + 1) + t]; }

    int initial_sign(int q) const { return initial_bits[q] ? -1 : 1; }

    std::vector<double> series(int q) const {
        auto first = values.begin() + static_cast<std::ptrdiff_t>(q) * (n_steps + 1);
        return std::vector<double>(first, first + n_steps + 1);
    }

    /// Mean over qubits at each step, optionally restricted to retained ones.
    std::vector<double> qubit_average(bool retained_only = false) const {
        std::vector<double> avg(n_steps + 1, 0.0);
        int count = 0;
        for (int q = 0; q < n_qubits; ++q) {
            if (retained_only && !retained[q]) continue;
            ++count;
            for (int t = 0; t <= n_steps; ++t) avg[t] += at(q, t);
        }
        if (count > 0)
            for (auto& v : avg) v /= count;
        return avg;
    }
};

/// CSV columns: step,qubit,value,stage,retained — fixed step-major order.
inline void write_panel_csv(std::ostream& os, const TimeSeriesPanel& panel) {
    os << "step,qubit,value,stage,retained\n";
    const std::string stage = to_string(panel.stage);
    for (int t = 0; t <= panel.n_steps; ++t)
        for (int q = 0; q < panel.n_qubits; ++q)
            os << t << ',' << q << ',' << format_double(panel.at(q, t)) << ',' << stage << ','
               << (panel.retained[q] ? 1 : 0) << '\n';
}

inline void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_panel_csv(os, panel);
}

inline void write_panel_json(const std::string& path, const TimeSeriesPanel& panel,
                             const nlohmann::json& metadata) {
    nlohmann::json j;
    j["n_qubits"] = panel.n_qubits;
    j["n_steps"] = panel.n_steps;
    j["stage"] = to_string(panel.stage);
    j["initial_bits"] = panel.initial_bits;
    std::vector<int> ret(panel.retained.begin(), panel.retained.end());
    j["retained"] = ret;
    nlohmann::json rows = nlohmann::json::array();
    for (int q = 0; q < panel.n_qubits; ++q) rows.push_back(panel.series(q));
    j["values"] = rows;
    j["metadata"] = metadata;
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << j.dump(2) << '\n';
}

}  // namespace dtc
