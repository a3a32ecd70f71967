#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dtc/analysis.hpp"

using namespace dtc;
using Catch::Matchers::WithinAbs;

namespace {

TimeSeriesPanel series_panel(const std::vector<std::vector<double>>& rows) {
    TimeSeriesPanel p(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()) - 1);
    for (int q = 0; q < p.n_qubits; ++q)
        for (int t = 0; t <= p.n_steps; ++t) p.at(q, t) = rows[q][t];
    return p;
}

}  // namespace

TEST_CASE("autocorrelator of a noiseless echo alternates", "[analysis]") {
    auto cfg = sample_disorder(6, 3);
    auto initial = make_initial(InitialKind::random_bit, 6, 4);
    auto panel = run_exact_experiment(cfg, initial, 20);
    auto corr = autocorrelator(panel, initial.bits);
    for (int q = 0; q < 6; ++q)
        for (int t = 0; t <= 20; ++t)
            REQUIRE_THAT(corr.at(q, t), WithinAbs(t % 2 ? -1.0 : 1.0, 1e-12));
}

TEST_CASE("autocorrelator of the zero panel is zero", "[analysis]") {
    TimeSeriesPanel p(3, 10);
    auto corr = autocorrelator(p, {1, 0, 1});
    for (double v : corr.values) REQUIRE(v == 0.0);
}

TEST_CASE("thermal-phase autocorrelator decays fast at N=12", "[analysis]") {
    // coherent fields make the chain interacting; the bare model would show
    // finite-size revivals at this size
    auto cfg = sample_disorder(12, 3);
    cfg.epsilon = 0.5;
    cfg.z_fields = sample_coherent_errors(12, kDefaultCoherentAmplitude, 3);
    auto initial = make_initial(InitialKind::random_bit, 12, 4);
    auto panel = run_exact_experiment(cfg, initial, 50);
    auto corr = autocorrelator(panel, initial.bits);
    auto avg = corr.qubit_average();
    for (int t = 10; t <= 50; ++t) REQUIRE(std::abs(avg[t]) < 0.1);
}

TEST_CASE("pure subharmonic tone has h=1 and empty spectrum elsewhere", "[analysis]") {
    std::vector<double> tone(51);
    for (int t = 0; t <= 50; ++t) tone[t] = (t % 2 ? -1.0 : 1.0);
    auto spec = spectrum(series_panel({tone}));
    REQUIRE(spec.n_bins == 50);
    REQUIRE_THAT(spec.h[0], WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(spec.frequencies[25], WithinAbs(0.5, 1e-15));
    for (int k = 0; k < 50; ++k)
        if (k != 25) REQUIRE_THAT(spec.amp(0, k), WithinAbs(0.0, 1e-12));
}

TEST_CASE("constant series has no subharmonic weight", "[analysis]") {
    std::vector<double> flat(51, 0.7);
    auto spec = spectrum(series_panel({flat}));
    REQUIRE_THAT(spec.h[0], WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(spec.amp(0, 0), WithinAbs(0.7, 1e-12));
}

TEST_CASE("damped tone matches the finite geometric sum", "[analysis]") {
    const double gamma = 0.05;
    const int T = 50;
    std::vector<double> s(T + 1);
    for (int t = 0; t <= T; ++t) s[t] = std::exp(-gamma * t) * (t % 2 ? -1.0 : 1.0);
    auto spec = spectrum(series_panel({s}));
    // (1/T) sum_{t<T} e^{-gamma t}
    const double expect = (1.0 - std::exp(-gamma * T)) / (1.0 - std::exp(-gamma)) / T;
    REQUIRE_THAT(spec.h[0], WithinAbs(expect, 1e-12));
}

TEST_CASE("odd sample counts are rejected", "[analysis]") {
    TimeSeriesPanel p(1, 49);  // 49 samples in the window
    REQUIRE_THROWS_AS(spectrum(p), InvalidConfigError);
    TimeSeriesPanel q(1, 50);
    REQUIRE_NOTHROW(spectrum(q));
    REQUIRE_THROWS_AS(spectrum(q, 1), InvalidConfigError);  // 49 after skip
    TimeSeriesPanel tiny(1, 6);
    REQUIRE_THROWS_AS(spectrum(tiny), InvalidConfigError);
}

TEST_CASE("parseval identity holds for the chosen normalization", "[analysis]") {
    Rng rng(15);
    std::vector<double> s(41);
    for (auto& v : s) v = rng.uniform(-1, 1);
    auto spec = spectrum(series_panel({s}));
    double amp2 = 0.0;
    for (int k = 0; k < spec.n_bins; ++k) amp2 += spec.amp(0, k) * spec.amp(0, k);
    double norm2 = 0.0;
    for (int t = 0; t < 40; ++t) norm2 += s[t] * s[t];
    REQUIRE_THAT(amp2, WithinAbs(norm2 / 40.0, 1e-10));
}

TEST_CASE("h is invariant under a global sign flip", "[analysis]") {
    Rng rng(16);
    std::vector<double> s(31), neg(31);
    for (int t = 0; t <= 30; ++t) {
        s[t] = rng.uniform(-1, 1);
        neg[t] = -s[t];
    }
    auto a = spectrum(series_panel({s}));
    auto b = spectrum(series_panel({neg}));
    REQUIRE_THAT(a.h[0], WithinAbs(b.h[0], 1e-14));
}

TEST_CASE("variance of subharmonic amplitudes", "[analysis]") {
    SpectralResult spec;
    spec.n_qubits = 2;
    spec.h = {0.0, 1.0};
    REQUIRE_THAT(variance_h(spec, {}), WithinAbs(0.25, 1e-15));

    spec.n_qubits = 4;
    spec.h = {0.3, 0.3, 0.3, 0.3};
    REQUIRE_THAT(variance_h(spec, {}), WithinAbs(0.0, 1e-15));

    // permutation invariance
    SpectralResult p1, p2;
    p1.n_qubits = p2.n_qubits = 3;
    p1.h = {0.1, 0.5, 0.9};
    p2.h = {0.9, 0.1, 0.5};
    REQUIRE_THAT(variance_h(p1, {}), WithinAbs(variance_h(p2, {}), 1e-15));

    // common rescaling multiplies the variance by c^2
    SpectralResult scaled = p1;
    for (auto& v : scaled.h) v *= 3.0;
    REQUIRE_THAT(variance_h(scaled, {}), WithinAbs(9.0 * variance_h(p1, {}), 1e-12));

    SpectralResult lonely;
    lonely.n_qubits = 3;
    lonely.h = {0.1, 0.2, 0.3};
    REQUIRE_THROWS_AS(variance_h(lonely, {1, 0, 0}), UndefinedVarianceError);
}

TEST_CASE("decay constants from exact exponential data", "[analysis]") {
    std::vector<double> s(51), tone(51);
    for (int t = 0; t <= 50; ++t) {
        s[t] = std::exp(-0.1 * t) * (t % 2 ? -1.0 : 1.0);
        tone[t] = (t % 2 ? -1.0 : 1.0);
    }
    auto res = decay_constants(series_panel({s, tone}));
    REQUIRE(res.fit_ok[0] == 1);
    REQUIRE_THAT(res.delta[0], WithinAbs(0.1, 1e-6));
    REQUIRE(res.fit_ok[1] == 1);
    REQUIRE_THAT(res.delta[1], WithinAbs(0.0, 1e-12));

    // alternation removal: same rate with and without staggering
    std::vector<double> plain(51);
    for (int t = 0; t <= 50; ++t) plain[t] = std::exp(-0.1 * t);
    auto res2 = decay_constants(series_panel({plain}));
    REQUIRE_THAT(res2.delta[0], WithinAbs(res.delta[0], 1e-10));
}

TEST_CASE("growing series clamps at zero and sparse series fails", "[analysis]") {
    std::vector<double> grow(51), dead(51, 0.0);
    for (int t = 0; t <= 50; ++t) grow[t] = 0.1 * std::exp(0.05 * t);
    dead[14] = 0.5;
    dead[15] = 0.4;
    auto res = decay_constants(series_panel({grow, dead}));
    REQUIRE(res.fit_ok[0] == 1);
    REQUIRE(res.delta[0] == 0.0);
    REQUIRE(res.fit_ok[1] == 0);  // fewer than 4 usable points
}

TEST_CASE("decay constant contrast between DTC and thermal phases", "[analysis]") {
    // noiseless N=12 statevector runs with coherent fields; the thermal decay
    // completes before the default transient window, so fit from t=2
    const auto initial = make_initial(InitialKind::random_bit, 12, 4);
    auto cfg = sample_disorder(12, 3);
    cfg.z_fields = sample_coherent_errors(12, kDefaultCoherentAmplitude, 3);
    cfg.epsilon = 0.02;
    auto dtc = autocorrelator(run_exact_experiment(cfg, initial, 50), initial.bits);
    cfg.epsilon = 0.5;
    auto thermal = autocorrelator(run_exact_experiment(cfg, initial, 50), initial.bits);
    const double d_dtc = decay_constants(dtc, 2).delta_bar;
    const double d_thermal = decay_constants(thermal, 2).delta_bar;
    REQUIRE(d_thermal > 5.0 * d_dtc);
}

TEST_CASE("single-point sweep at epsilon zero", "[analysis]") {
    SweepOptions opt;
    opt.n_qubits = 8;
    opt.steps = 30;
    opt.seed = 3;
    opt.coherent_amplitude = 0.0;
    auto res = sweep_epsilon({0.0}, opt);
    REQUIRE(res.rows.size() == 1);
    REQUIRE_THAT(res.rows[0].delta_bar, WithinAbs(0.0, 1e-9));
    REQUIRE(res.rows[0].n_retained == 8);
    REQUIRE_THAT(res.rows[0].var_h, WithinAbs(0.0, 1e-12));
}

TEST_CASE("sweep is deterministic in the root seed", "[analysis]") {
    SweepOptions opt;
    opt.n_qubits = 6;
    opt.steps = 30;
    opt.seed = 9;
    const std::vector<double> eps = {0.05, 0.2, 0.5};
    auto a = sweep_epsilon(eps, opt);
    auto b = sweep_epsilon(eps, opt);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        REQUIRE(a.rows[i].var_h == b.rows[i].var_h);
        REQUIRE(a.rows[i].delta_bar == b.rows[i].delta_bar);
    }
    REQUIRE(a.epsilon_c == b.epsilon_c);
}

TEST_CASE("pinned disorder reuses one realization, fresh draws differ", "[analysis]") {
    SweepOptions opt;
    opt.n_qubits = 5;
    opt.seed = 21;
    auto pinned0 = sweep_point_config(opt, 0.1, 0);
    auto pinned1 = sweep_point_config(opt, 0.2, 1);
    REQUIRE(pinned0.couplings == pinned1.couplings);
    REQUIRE(pinned0.z_fields == pinned1.z_fields);
    opt.pin_disorder = false;
    auto fresh0 = sweep_point_config(opt, 0.1, 0);
    auto fresh1 = sweep_point_config(opt, 0.2, 1);
    REQUIRE(fresh0.couplings != fresh1.couplings);
}
