#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "dtc/fermion.hpp"
#include "dtc/rng.hpp"
#include "dtc/statevector.hpp"

using namespace dtc;
using Catch::Matchers::WithinAbs;

namespace {

/// Statevector oracle panel for small chains.
TimeSeriesPanel statevector_panel(const ChainConfig& cfg, const std::vector<int>& bits, int steps) {
    auto st = PureState::from_bits(bits);
    FloquetEngine engine(cfg);
    TimeSeriesPanel panel(cfg.n_qubits, steps);
    panel.initial_bits = bits;
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

}  // namespace

TEST_CASE("covariance from bits reads back the bits", "[fermion]") {
    auto all_up = covariance_from_bits({0, 0, 0, 0});
    auto pol = read_polarizations(all_up);
    for (double z : pol) REQUIRE_THAT(z, WithinAbs(1.0, 1e-14));

    auto neel = covariance_from_bits({0, 1, 0, 1});
    pol = read_polarizations(neel);
    REQUIRE_THAT(pol[0], WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(pol[1], WithinAbs(-1.0, 1e-14));
    REQUIRE_THAT(pol[2], WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(pol[3], WithinAbs(-1.0, 1e-14));

    REQUIRE(antisymmetry_defect(neel) == 0.0);
    REQUIRE(spectral_bound(neel) <= 1.0 + 1e-10);
}

TEST_CASE("flip layer structure", "[fermion]") {
    auto id = flip_layer_update(1.0, 5);
    REQUIRE((id.o - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-14);

    auto half_turn = flip_layer_update(0.0, 3);
    REQUIRE((half_turn.o + Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);

    auto generic = flip_layer_update(0.37, 8);
    REQUIRE((generic.o * generic.o.transpose() - Eigen::MatrixXd::Identity(16, 16))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
}

TEST_CASE("ising layer structure", "[fermion]") {
    auto id = ising_layer_update({0.0, 0.0, 0.0}, 4);
    REQUIRE((id.o - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);

    // diagonal gate leaves a bitstring's polarization alone
    auto cov = covariance_from_bits({0, 0});
    auto u = ising_layer_update({std::numbers::pi / 4.0}, 2);
    cov.gamma = u.o * cov.gamma * u.o.transpose();
    cov.displacement = u.o * cov.displacement;
    auto pol = read_polarizations(cov);
    REQUIRE_THAT(pol[0], WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(pol[1], WithinAbs(1.0, 1e-14));

    REQUIRE_THROWS_AS(ising_layer_update({0.1}, 4), InvalidConfigError);
}

TEST_CASE("composite step matches the statevector oracle at N=8", "[fermion]") {
    auto cfg = sample_disorder(8, 21);
    cfg.epsilon = 0.11;
    auto bits = make_initial(InitialKind::random_bit, 8, 77).bits;
    auto sv = statevector_panel(cfg, bits, 50);
    auto fm = evolve_covariance(covariance_from_bits(bits), cfg, 50);
    double worst = 0.0;
    for (int q = 0; q < 8; ++q)
        for (int t = 0; t <= 50; ++t) worst = std::max(worst, std::abs(sv.at(q, t) - fm.at(q, t)));
    REQUIRE(worst < 1e-8);
}

TEST_CASE("oracle equivalence across sizes, epsilons and seeds", "[fermion]") {
    for (int n : {4, 8, 12}) {
        for (double eps : {0.0, 0.05, 0.11, 0.5}) {
            for (std::uint64_t seed : {1ull, 2ull}) {
                auto cfg = sample_disorder(n, seed);
                cfg.epsilon = eps;
                auto bits = make_initial(InitialKind::random_bit, n, seed + 10).bits;
                auto sv = statevector_panel(cfg, bits, 20);
                auto fm = evolve_covariance(covariance_from_bits(bits), cfg, 20);
                double worst = 0.0;
                for (int q = 0; q < n; ++q)
                    for (int t = 0; t <= 20; ++t)
                        worst = std::max(worst, std::abs(sv.at(q, t) - fm.at(q, t)));
                INFO("n=" << n << " eps=" << eps << " seed=" << seed);
                REQUIRE(worst < 1e-8);
            }
        }
    }
}

TEST_CASE("exact echo for the full 57-qubit chain", "[fermion]") {
    auto cfg = sample_disorder(57, 5);
    auto bits = make_initial(InitialKind::random_bit, 57, 6).bits;
    auto panel = evolve_covariance(covariance_from_bits(bits), cfg, 50);
    for (int t = 0; t <= 50; ++t) {
        const double stagger = (t % 2) ? -1.0 : 1.0;
        for (int q = 0; q < 57; ++q) {
            const double expect = stagger * (bits[q] ? -1.0 : 1.0);
            REQUIRE_THAT(panel.at(q, t), WithinAbs(expect, 1e-10));
        }
    }
}

TEST_CASE("57-qubit evolution is fast and keeps its invariants", "[fermion]") {
    auto cfg = sample_disorder(57, 8);
    cfg.epsilon = 0.05;
    auto bits = make_initial(InitialKind::random_bit, 57, 9).bits;
    auto cov = covariance_from_bits(bits);
    const Eigen::MatrixXd o =
        ising_layer_update(cfg.couplings, 57).o * flip_layer_update(cfg.epsilon, 57).o;
    const auto start = std::chrono::steady_clock::now();
    for (int t = 0; t < 50; ++t) {
        cov.gamma = o * cov.gamma * o.transpose();
        cov.displacement = o * cov.displacement;
        read_polarizations(cov);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(secs < 1.0);
    REQUIRE(antisymmetry_defect(cov) < 1e-9);
    REQUIRE(spectral_bound(cov) < 1.0 + 1e-9);
    REQUIRE_THAT(cov.displacement.norm(), WithinAbs(1.0, 1e-9));
}

TEST_CASE("fermion engine refuses interacting models", "[fermion]") {
    auto cfg = sample_disorder(6, 3);
    cfg.z_fields[2] = 0.05;
    auto cov = covariance_from_bits(make_initial(InitialKind::random_bit, 6, 1).bits);
    REQUIRE_THROWS_AS(evolve_covariance(cov, cfg, 5), UnsupportedModelError);
}

TEST_CASE("thermal-regime read-back falls back to pivoted pfaffians", "[fermion]") {
    // eps = 0.5 drives polarizations toward zero where the fast pass degrades;
    // cross-check the hybrid against the statevector oracle
    auto cfg = sample_disorder(10, 14);
    cfg.epsilon = 0.5;
    auto bits = make_initial(InitialKind::random_bit, 10, 15).bits;
    auto sv = statevector_panel(cfg, bits, 40);
    auto fm = evolve_covariance(covariance_from_bits(bits), cfg, 40);
    double worst = 0.0;
    for (int q = 0; q < 10; ++q)
        for (int t = 0; t <= 40; ++t) worst = std::max(worst, std::abs(sv.at(q, t) - fm.at(q, t)));
    REQUIRE(worst < 1e-8);
}

TEST_CASE("single-qubit chain matches the closed-form rotation", "[fermion]") {
    ChainConfig cfg;
    cfg.n_qubits = 1;
    cfg.epsilon = 0.3;
    cfg.z_fields = {0.0};
    const std::vector<int> bits = {1};
    auto panel = evolve_covariance(covariance_from_bits(bits), cfg, 12);
    for (int t = 0; t <= 12; ++t) {
        const double expect = -std::cos(std::numbers::pi * (1.0 - cfg.epsilon) * t);
        REQUIRE_THAT(panel.at(0, t), WithinAbs(expect, 1e-12));
    }
}

TEST_CASE("pfaffian agrees with direct expansion", "[fermion]") {
    // 4x4: Pf = a01 a23 - a02 a13 + a03 a12
    Rng rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                a(i, j) = rng.uniform(-2, 2);
                a(j, i) = -a(i, j);
            }
        const double direct = a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
        Eigen::MatrixXd copy = a;
        REQUIRE_THAT(pfaffian_inplace(copy), WithinAbs(direct, 1e-12));
        // Pf(A)^2 = det(A)
        copy = a;
        const double pf = pfaffian_inplace(copy);
        REQUIRE_THAT(pf * pf, WithinAbs(a.determinant(), 1e-10));
    }
}
