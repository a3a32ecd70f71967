#pragma once

// The two-stage error-mitigation scheme: empirical measurement-error
// correction (normalize每 polarization so |<Z>(0)| = 1 against its late-time
// floor), then depolarization rescaling against an exponential fit of the
// eps = 0 reference run, with qubit filtering.
//
// All depolarization-stage formulas act on the de-staggered autocorrelator
// u_q(t) = (-1)^t z_q(0) <Z_q(t)>, which is +1 for a perfect echo; the
// alternating sign of the raw polarization would otherwise make the
// exponential model and the window averages meaningless. Panels keep the
// staggered polarization convention at every interface.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dtc/common.hpp"
#include "dtc/panel.hpp"

namespace dtc {

struct MitigationParams {
    double w0 = 0.15;        // reference-plateau cutoff W_0
    double wf = 0.10;        // thermal threshold W_f = (2/3) W_0
    int skip_steps = 13;     // initial transient discarded from window averages
    int avg_window = 5;      // width of the window averages
    int final_window = 6;    // points averaged into <Z>_final; even so period-2
                             // signal surviving at late times cancels
    double fit_rms_bound = 0.1;  // rms residual above which a fit is not converged

    void validate(int n_steps) const {
        if (!(0.0 < wf && wf < w0 && w0 <= 1.0))
            throw InvalidConfigError("need 0 < wf < w0 <= 1");
        if (avg_window < 1 || final_window < 1) throw InvalidConfigError("windows must be >= 1");
        if (skip_steps < 0 || skip_steps + avg_window > n_steps)
            throw InvalidConfigError("skip_steps + avg_window must fit into n_steps");
    }
};

/// sign with the convention sign(0) = +1 used throughout the rescaling stage.
inline double sign_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Inverts the asymmetric readout channel on one expectation value:
/// <Z>_corr = (<Z>_meas + Delta) / (1 - 2 eta_bar).
inline double correct_measurement(double z_meas, double eta_bar, double delta) {
    if (eta_bar >= 0.5)
        throw NonInvertibleChannelError("readout channel with eta_bar >= 1/2 is not invertible");
    return (z_meas + delta) / (1.0 - 2.0 * eta_bar);
}

struct NormalizationResult {
    std::vector<double> corrected;
    double final_mean = 0.0;
    double denom = 0.0;
    bool degenerate = false;  // |m(0) - final| below threshold; series passed through
};

/// Empirical measurement correction of one polarization series:
/// <Z>_corr(t) = (<Z>(t) - <Z>_final) / |<Z>(0) - <Z>_final| with <Z>_final
/// the mean of the last final_window points. Output has |value(0)| = 1.
inline NormalizationResult normalize_empirical(const std::vector<double>& series,
                                               int final_window) {
    if (static_cast<int>(series.size()) < final_window + 1)
        throw InvalidConfigError("series too short for the requested final window");
    NormalizationResult res;
    double sum = 0.0;
    for (int k = 0; k < final_window; ++k) sum += series[series.size() - 1 - k];
    res.final_mean = sum / final_window;
    res.denom = std::abs(series[0] - res.final_mean);
    if (res.denom < 1e-6) {
        res.degenerate = true;
        res.corrected = series;
        return res;
    }
    res.corrected.resize(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        res.corrected[t] = (series[t] - res.final_mean) / res.denom;
    return res;
}

struct EtaEstimate {
    double eta0 = 0.0;
    double eta1 = 0.0;
    bool flagged = false;  // degenerate normalization or estimates outside [0, 0.5]
};

/// Effective empirical readout parameters of one series:
/// eta0 = (1 - |m(0) - final| - final)/2, eta1 = (1 - |m(0) - final| + final)/2.
/// Values are reported even when slightly out of range (then flagged).
inline EtaEstimate extract_eta(const std::vector<double>& series, int final_window) {
    const auto norm = normalize_empirical(series, final_window);
    EtaEstimate est;
    if (norm.degenerate) {
        est.flagged = true;
        return est;
    }
    est.eta0 = 0.5 * (1.0 - norm.denom - norm.final_mean);
    est.eta1 = 0.5 * (1.0 - norm.denom + norm.final_mean);
    est.flagged = est.eta0 < -1e-12 || est.eta0 > 0.5 || est.eta1 < -1e-12 || est.eta1 > 0.5;
    return est;
}

struct ExponentialFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rms_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

/// Damped least squares for y(t) ~ a e^{-b t} + c over t = 0..size-1, b >= 0.
inline ExponentialFit fit_exponential(const std::vector<double>& y, double rms_bound = 0.1) {
    const int n = static_cast<int>(y.size());
    if (n < 4) return {};
    ExponentialFit fit;
    fit.a = y.front() - y.back();
    fit.b = 1.0 / n;
    fit.c = y.back();
    if (std::abs(fit.a) < 1e-9) fit.b = 0.0;  // tie-break: constant data pins b at 0

    auto rms = [&](double a, double b, double c) {
        double s = 0.0;
        for (int t = 0; t < n; ++t) {
            const double r = a * std::exp(-b * t) + c - y[t];
            s += r * r;
        }
        return std::sqrt(s / n);
    };

    double lambda = 1e-3;
    double current = rms(fit.a, fit.b, fit.c);
    bool stalled = false;
    for (int iter = 0; iter < 200 && !stalled; ++iter) {
        // normal equations J^T J dx = -J^T r with Levenberg damping
        double jtj[3][3] = {};
        double jtr[3] = {};
        for (int t = 0; t < n; ++t) {
            const double e = std::exp(-fit.b * t);
            const double r = fit.a * e + fit.c - y[t];
            const double row[3] = {e, -fit.a * t * e, 1.0};
            for (int i = 0; i < 3; ++i) {
                jtr[i] += row[i] * r;
                for (int j = 0; j < 3; ++j) jtj[i][j] += row[i] * row[j];
            }
        }
        double m[3][4];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] = jtj[i][j] + (i == j ? lambda * (jtj[i][i] + 1e-12) : 0.0);
            m[i][3] = -jtr[i];
        }
        // gaussian elimination, 3x3
        bool singular = false;
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r2 = col + 1; r2 < 3; ++r2)
                if (std::abs(m[r2][col]) > std::abs(m[piv][col])) piv = r2;
            if (std::abs(m[piv][col]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(m[piv], m[col]);
            for (int r2 = 0; r2 < 3; ++r2) {
                if (r2 == col) continue;
                const double f = m[r2][col] / m[col][col];
                for (int j = col; j < 4; ++j) m[r2][j] -= f * m[col][j];
            }
        }
        if (singular) break;
        const double da = m[0][3] / m[0][0];
        const double db = m[1][3] / m[1][1];
        const double dc = m[2][3] / m[2][2];
        const double na = fit.a + da;
        const double nb = std::max(0.0, fit.b + db);
        const double nc = fit.c + dc;
        const double trial = rms(na, nb, nc);
        if (trial < current) {
            const double improvement = current - trial;
            fit.a = na;
            fit.b = nb;
            fit.c = nc;
            current = trial;
            lambda = std::max(lambda * 0.5, 1e-12);
            if (improvement < 1e-10 && std::abs(da) + std::abs(db) + std::abs(dc) < 1e-10)
                stalled = true;
        } else {
            lambda *= 8.0;
            if (lambda > 1e10) stalled = true;
        }
    }
    if (std::abs(fit.a) < 1e-9) fit.b = 0.0;
    fit.rms_residual = current;
    fit.converged = current <= rms_bound;
    return fit;
}

/// Fit of the transformed reference series (u + sign(u))/2 = a e^{-b t} + c,
/// where u is the de-staggered eps=0 autocorrelator of one qubit.
inline ExponentialFit fit_reference_decay(const std::vector<double>& destaggered_reference,
                                          double rms_bound = 0.1) {
    std::vector<double> y(destaggered_reference.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double u = destaggered_reference[t];
        y[t] = 0.5 * (u + sign_plus(u));
    }
    return fit_exponential(y, rms_bound);
}

namespace detail {

/// De-staggered autocorrelator u_q(t) = (-1)^t z_q(0) value_q(t) of one qubit.
inline std::vector<double> destagger(const TimeSeriesPanel& panel, int q) {
    std::vector<double> u(panel.n_steps + 1);
    const double z0 = panel.initial_sign(q);
    for (int t = 0; t <= panel.n_steps; ++t)
        u[t] = (t % 2 ? -1.0 : 1.0) * z0 * panel.at(q, t);
    return u;
}

inline double window_mean_abs(const std::vector<double>& series, int skip, int window) {
    double s = 0.0;
    for (int t = skip; t < skip + window; ++t) s += std::abs(series[t]);
    return s / window;
}

inline double window_mean(const std::vector<double>& series, int skip, int window) {
    double s = 0.0;
    for (int t = skip; t < skip + window; ++t) s += series[t];
    return s / window;
}

}  // namespace detail

/// Reference-decay fits for every qubit of the (measurement-corrected) eps=0 panel.
inline std::vector<ExponentialFit> fit_reference_panel(const TimeSeriesPanel& reference,
                                                       const MitigationParams& params) {
    std::vector<ExponentialFit> fits(reference.n_qubits);
    for (int q = 0; q < reference.n_qubits; ++q)
        fits[q] = fit_reference_decay(detail::destagger(reference, q), params.fit_rms_bound);
    return fits;
}

/// Step-1 filter: a qubit stays when its eps=0 plateau (mean |u| over the
/// window after the transient) clears W_0 and its reference fit converged.
inline std::vector<char> filter_qubits(const TimeSeriesPanel& reference,
                                       const std::vector<ExponentialFit>& reference_fits,
                                       const MitigationParams& params) {
    params.validate(reference.n_steps);
    std::vector<char> retained(reference.n_qubits, 0);
    for (int q = 0; q < reference.n_qubits; ++q) {
        const auto u = detail::destagger(reference, q);
        const double plateau = detail::window_mean_abs(u, params.skip_steps, params.avg_window);
        retained[q] = (plateau >= params.w0 && reference_fits[q].converged) ? 1 : 0;
    }
    return retained;
}

inline std::vector<char> filter_qubits(const TimeSeriesPanel& reference,
                                       const MitigationParams& params) {
    return filter_qubits(reference, fit_reference_panel(reference, params), params);
}

/// Steps 2-3: thermal qubits (window mean inside [-W_f, W_f]) pass through;
/// the rest are rescaled for t >= skip_steps by
///   M(t) = (u_bar / u0_bar) (u(t) + sign(u(t))) / (a e^{-b t} + c) - sign(u(t)).
/// Produces the fully-mitigated panel (staggered convention restored).
inline TimeSeriesPanel rescale_magnetization(const TimeSeriesPanel& corrected,
                                             const TimeSeriesPanel& reference,
                                             const std::vector<ExponentialFit>& reference_fits,
                                             const std::vector<char>& retained,
                                             const MitigationParams& params) {
    params.validate(corrected.n_steps);
    if (corrected.n_qubits != reference.n_qubits || corrected.n_steps != reference.n_steps)
        throw InvalidConfigError("panel and reference shapes disagree");
    TimeSeriesPanel out = corrected;
    out.stage = Stage::fully_mitigated;
    out.retained = retained;
    for (int q = 0; q < corrected.n_qubits; ++q) {
        if (!retained[q]) continue;
        const auto u = detail::destagger(corrected, q);
        const auto u0 = detail::destagger(reference, q);
        const double ubar = detail::window_mean(u, params.skip_steps, params.avg_window);
        const double u0bar = detail::window_mean(u0, params.skip_steps, params.avg_window);
        if (std::abs(ubar) <= params.wf) continue;  // thermalizing qubit, no rescale
        const auto& fit = reference_fits[q];
        if (!fit.converged || std::abs(u0bar) < 1e-12) {
            out.retained[q] = 0;  // no usable reference for this qubit
            continue;
        }
        const double ratio = ubar / u0bar;
        const double z0 = corrected.initial_sign(q);
        for (int t = params.skip_steps; t <= corrected.n_steps; ++t) {
            const double denom = fit.a * std::exp(-fit.b * t) + fit.c;
            if (std::abs(denom) < 1e-3) {
                out.retained[q] = 0;
                break;
            }
            const double sgn = sign_plus(u[t]);
            const double rescaled = ratio * (u[t] + sgn) / denom - sgn;
            out.at(q, t) = (t % 2 ? -1.0 : 1.0) * z0 * rescaled;
        }
    }
    return out;
}

struct MitigationOutput {
    TimeSeriesPanel corrected;            // measurement-corrected panel
    TimeSeriesPanel reference_corrected;  // same for the eps=0 reference
    TimeSeriesPanel mitigated;            // fully mitigated, retained flags set
    std::vector<ExponentialFit> reference_fits;
    std::vector<EtaEstimate> etas;        // empirical readout estimates per qubit
    std::vector<char> degenerate;         // normalization skipped for these qubits
};

/// Full pipeline on raw polarization panels (the eps run and its eps=0 twin).
/// Every series subtracts its own late-time mean (the formula's numerator),
/// but the normalization scale |m(0) - final| comes from the eps=0 reference,
/// which is the run that characterizes the readout channel. Dividing a
/// signal-free qubit by its own denominator would amplify shot noise into
/// fake signal.
inline MitigationOutput run_mitigation(const TimeSeriesPanel& raw,
                                       const TimeSeriesPanel& raw_reference,
                                       const MitigationParams& params) {
    params.validate(raw.n_steps);
    if (raw.n_qubits != raw_reference.n_qubits || raw.n_steps != raw_reference.n_steps)
        throw InvalidConfigError("panel and reference shapes disagree");
    MitigationOutput out;
    out.corrected = raw;
    out.corrected.stage = Stage::measurement_corrected;
    out.reference_corrected = raw_reference;
    out.reference_corrected.stage = Stage::measurement_corrected;
    out.etas.resize(raw.n_qubits);
    out.degenerate.assign(raw.n_qubits, 0);
    for (int q = 0; q < raw.n_qubits; ++q) {
        const auto norm_ref = normalize_empirical(raw_reference.series(q), params.final_window);
        out.etas[q] = extract_eta(raw_reference.series(q), params.final_window);
        if (norm_ref.degenerate) {
            out.degenerate[q] = 1;
            continue;  // both series pass through uncorrected
        }
        const auto norm_run = normalize_empirical(raw.series(q), params.final_window);
        for (int t = 0; t <= raw.n_steps; ++t) {
            out.reference_corrected.at(q, t) = norm_ref.corrected[t];
            out.corrected.at(q, t) = (raw.at(q, t) - norm_run.final_mean) / norm_ref.denom;
        }
    }
    out.reference_fits = fit_reference_panel(out.reference_corrected, params);
    auto retained = filter_qubits(out.reference_corrected, out.reference_fits, params);
    for (int q = 0; q < raw.n_qubits; ++q)
        if (out.degenerate[q]) retained[q] = 0;
    out.mitigated = rescale_magnetization(out.corrected, out.reference_corrected,
                                          out.reference_fits, retained, params);
    return out;
}

}  // namespace dtc
