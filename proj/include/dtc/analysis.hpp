#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include "dtc/common.hpp"
#include "dtc/fermion.hpp"
#include "dtc/mitigation.hpp"
#include "dtc/noise.hpp"
#include "dtc/panel.hpp"

namespace dtc {

/// Per-qubit amplitude spectra on the frequency grid k/T in units of the
/// driving frequency omega_D; h_q is the amplitude in the subharmonic bin at
/// omega_D/2. Normalization: a pure alternating series (-1)^t has h = 1.
struct SpectralResult {
    int n_qubits = 0;
    int n_bins = 0;
    std::vector<double> frequencies;  // in units of omega_D
    std::vector<double> amplitudes;   // [q * n_bins + k]
    std::vector<double> h;

    double amp(int q, int k) const { return amplitudes[static_cast<std::size_t>(q) * n_bins + k]; }

    /// Mean over qubits of the per-qubit amplitude in bin k.
    std::vector<double> qubit_average() const {
        std::vector<double> avg(n_bins, 0.0);
        for (int q = 0; q < n_qubits; ++q)
            for (int k = 0; k < n_bins; ++k) avg[k] += amp(q, k);
        for (auto& v : avg) v /= n_qubits;
        return avg;
    }
};

namespace detail {

inline std::vector<double> dft_amplitudes(const double* s, int len) {
    std::vector<double> amps(len);
    for (int k = 0; k < len; ++k) {
        std::complex<double> acc{0.0, 0.0};
        const double w = -2.0 * std::numbers::pi * k / len;
        for (int t = 0; t < len; ++t) acc += s[t] * std::complex<double>(std::cos(w * t), std::sin(w * t));
        amps[k] = std::abs(acc) / len;
    }
    return amps;
}

}  // namespace detail

/// DFT of each qubit's series over the window t = skip .. skip+len-1 with
/// len = n_steps - skip samples. The window length must be even (and >= 8) so
/// the grid contains the bin exactly at omega_D/2; with an odd count the
/// caller pads or truncates first.
inline SpectralResult spectrum(const TimeSeriesPanel& panel, int skip = 0) {
    const int len = panel.n_steps - skip;
    if (len < 8) throw InvalidConfigError("spectrum needs at least 8 samples");
    if (len % 2 != 0)
        throw InvalidConfigError(
            "spectrum window has no exact omega_D/2 bin for an odd sample count");
    SpectralResult res;
    res.n_qubits = panel.n_qubits;
    res.n_bins = len;
    res.frequencies.resize(len);
    for (int k = 0; k < len; ++k) res.frequencies[k] = static_cast<double>(k) / len;
    res.amplitudes.resize(static_cast<std::size_t>(panel.n_qubits) * len);
    res.h.resize(panel.n_qubits);
    std::vector<double> buf(len);
    for (int q = 0; q < panel.n_qubits; ++q) {
        for (int t = 0; t < len; ++t) buf[t] = panel.at(q, skip + t);
        auto amps = detail::dft_amplitudes(buf.data(), len);
        std::copy(amps.begin(), amps.end(),
                  res.amplitudes.begin() + static_cast<std::size_t>(q) * len);
        res.h[q] = amps[len / 2];
    }
    return res;
}

/// Spin-spin autocorrelator panel z_q(0) * <Z_q(t)>.
inline TimeSeriesPanel autocorrelator(const TimeSeriesPanel& panel,
                                      const std::vector<int>& initial_bits) {
    if (static_cast<int>(initial_bits.size()) != panel.n_qubits)
        throw InvalidConfigError("initial bits and panel disagree on qubit count");
    TimeSeriesPanel out = panel;
    out.initial_bits = initial_bits;
    for (int q = 0; q < panel.n_qubits; ++q) {
        const double z0 = initial_bits[q] ? -1.0 : 1.0;
        for (int t = 0; t <= panel.n_steps; ++t) out.at(q, t) = z0 * panel.at(q, t);
    }
    return out;
}

/// Population variance of {h_q} over retained qubits.
inline double variance_h(const SpectralResult& spectral, const std::vector<char>& retained) {
    double mean = 0.0;
    int count = 0;
    for (int q = 0; q < spectral.n_qubits; ++q) {
        if (!retained.empty() && !retained[q]) continue;
        mean += spectral.h[q];
        ++count;
    }
    if (count < 2)
        throw UndefinedVarianceError("variance needs at least two retained qubits");
    mean /= count;
    double var = 0.0;
    for (int q = 0; q < spectral.n_qubits; ++q) {
        if (!retained.empty() && !retained[q]) continue;
        var += (spectral.h[q] - mean) * (spectral.h[q] - mean);
    }
    return var / count;
}

struct DecayResult {
    std::vector<double> delta;  // per-qubit decay constant, clamped at 0
    std::vector<char> fit_ok;
    double delta_bar = 0.0;     // mean over fit_ok qubits
};

/// Log-linear fit |<Z_q>|(t) ~ exp(-delta_q t) over t >= skip_steps, skipping
/// points with |value| < 1e-3. Sign alternation drops out through the modulus.
inline DecayResult decay_constants(const TimeSeriesPanel& panel, int skip_steps = 13) {
    if (panel.n_steps <= skip_steps + 4)
        throw InvalidConfigError("decay fit needs steps beyond skip_steps + 4");
    DecayResult res;
    res.delta.assign(panel.n_qubits, 0.0);
    res.fit_ok.assign(panel.n_qubits, 0);
    double sum = 0.0;
    int n_ok = 0;
    for (int q = 0; q < panel.n_qubits; ++q) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int t = skip_steps; t <= panel.n_steps; ++t) {
            const double v = std::abs(panel.at(q, t));
            if (v < 1e-3) continue;
            const double y = std::log(v);
            sx += t;
            sy += y;
            sxx += static_cast<double>(t) * t;
            sxy += t * y;
            ++m;
        }
        if (m < 4) continue;
        const double denom = m * sxx - sx * sx;
        if (denom == 0.0) continue;
        const double slope = (m * sxy - sx * sy) / denom;
        res.delta[q] = std::max(0.0, -slope);
        res.fit_ok[q] = 1;
        sum += res.delta[q];
        ++n_ok;
    }
    if (n_ok > 0) res.delta_bar = sum / n_ok;
    return res;
}

// --- epsilon sweep -----------------------------------------------------------

struct SweepOptions {
    int n_qubits = 12;
    int steps = 50;
    std::uint64_t seed = 0;
    bool pin_disorder = true;  // one realization shared by every sweep point
    double coherent_amplitude = kDefaultCoherentAmplitude;
    InitialKind initial = InitialKind::random_bit;
    bool with_noise = false;
    NoiseModel noise;          // used when with_noise
    int trajectories = 64;
    MitigationParams mitigation;
    int spectrum_skip = 0;
    int decay_skip = 2;  // fit window start; thermal points decay out well
                         // before the mitigation transient window ends
};

struct SweepRow {
    double epsilon = 0.0;
    double var_h = 0.0;
    double delta_bar = 0.0;
    int n_retained = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double epsilon_c = 0.0;  // grid argmax of var_h
};

/// Builds the model for one sweep point. With pin_disorder the couplings,
/// fields and bits are identical across epsilons; otherwise each point draws
/// a fresh realization from its own sub-seed.
inline ChainConfig sweep_point_config(const SweepOptions& opt, double epsilon, std::size_t index) {
    const std::uint64_t seed =
        opt.pin_disorder ? opt.seed : derive_seed(opt.seed, "sweep-point", index);
    auto cfg = sample_disorder(opt.n_qubits, seed);
    cfg.epsilon = epsilon;
    if (opt.coherent_amplitude > 0.0)
        cfg.z_fields = sample_coherent_errors(opt.n_qubits, opt.coherent_amplitude, seed);
    return cfg;
}

inline SweepResult sweep_epsilon(const std::vector<double>& eps_list, const SweepOptions& opt) {
    if (eps_list.empty()) throw InvalidConfigError("sweep needs at least one epsilon");
    SweepResult result;
    result.rows.resize(eps_list.size());
    parallel_for(eps_list.size(), [&](std::size_t i) {
        const auto cfg = sweep_point_config(opt, eps_list[i], i);
        const std::uint64_t point_seed =
            opt.pin_disorder ? opt.seed : derive_seed(opt.seed, "sweep-point", i);
        const auto initial = make_initial(opt.initial, opt.n_qubits, point_seed);

        TimeSeriesPanel panel;
        std::vector<char> retained(opt.n_qubits, 1);
        if (opt.with_noise) {
            auto raw = run_noisy_experiment(cfg, initial, opt.noise, opt.steps, opt.trajectories,
                                            derive_seed(point_seed, "sweep-run", i));
            auto ref_cfg = cfg;
            ref_cfg.epsilon = 0.0;
            auto ref = run_noisy_experiment(ref_cfg, initial, opt.noise, opt.steps,
                                            opt.trajectories, derive_seed(point_seed, "sweep-ref", i));
            auto mit = run_mitigation(raw, ref, opt.mitigation);
            panel = std::move(mit.mitigated);
            retained = panel.retained;
        } else {
            panel = run_exact_experiment(cfg, initial, opt.steps);
        }
        const auto corr = autocorrelator(panel, initial.bits);
        const auto spec = spectrum(corr, opt.spectrum_skip);
        SweepRow row;
        row.epsilon = eps_list[i];
        row.var_h = variance_h(spec, retained);
        row.delta_bar = decay_constants(corr, opt.decay_skip).delta_bar;
        row.n_retained = 0;
        for (char r : retained) row.n_retained += r;
        result.rows[i] = row;
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        if (result.rows[i].var_h > result.rows[best].var_h) best = i;
    result.epsilon_c = result.rows[best].epsilon;
    return result;
}

// --- CSV writers --------------------------------------------------------------

inline void write_phase_diagram_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << "epsilon,var_h,delta_bar,n_retained\n";
    for (const auto& row : sweep.rows)
        os << format_double(row.epsilon) << ',' << format_double(row.var_h) << ','
           << format_double(row.delta_bar) << ',' << row.n_retained << '\n';
}

inline void write_spectrum_csv(const std::string& path, const SpectralResult& spec) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << "qubit,frequency,amplitude\n";
    for (int q = 0; q < spec.n_qubits; ++q)
        for (int k = 0; k < spec.n_bins; ++k)
            os << q << ',' << format_double(spec.frequencies[k]) << ','
               << format_double(spec.amp(q, k)) << '\n';
}

}  // namespace dtc
