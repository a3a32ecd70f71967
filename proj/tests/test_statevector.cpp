#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "dtc/rng.hpp"
#include "dtc/statevector.hpp"

using namespace dtc;
using Catch::Matchers::WithinAbs;

namespace {

PureState random_state(int n, std::uint64_t seed) {
    PureState st(n);
    Rng rng(seed);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < st.dim(); ++i) {
        st[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        norm2 += std::norm(st[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < st.dim(); ++i) st[i] *= inv;
    return st;
}

}  // namespace

TEST_CASE("perfect flip maps a bitstring to its complement", "[statevector]") {
    auto st = PureState::from_bits({0, 0, 0, 0});
    apply_flip(st, 0.0);
    auto pol = exact_polarizations(st);
    for (double z : pol) REQUIRE_THAT(z, WithinAbs(-1.0, 1e-12));
}

TEST_CASE("epsilon=1 flip is the identity up to phase", "[statevector]") {
    auto st = random_state(5, 3);
    auto before = exact_polarizations(st);
    apply_flip(st, 1.0);
    auto after = exact_polarizations(st);
    for (int q = 0; q < 5; ++q) REQUIRE_THAT(after[q], WithinAbs(before[q], 1e-12));
}

TEST_CASE("single qubit flip angle", "[statevector]") {
    auto st = PureState::from_bits({0});
    apply_flip(st, 0.05);
    // <Z> = cos((1-eps) pi) = -0.98769 at eps = 0.05
    REQUIRE_THAT(exact_polarizations(st)[0], WithinAbs(std::cos(0.95 * std::numbers::pi), 1e-12));
    REQUIRE_THAT(exact_polarizations(st)[0], WithinAbs(-0.98769, 5e-6));
}

TEST_CASE("ising layer is diagonal on bitstrings", "[statevector]") {
    auto st = PureState::from_bits({1, 0, 1, 1});
    std::vector<double> j = {0.4, 1.1, 0.2};
    apply_ising(st, j);
    auto pol = exact_polarizations(st);
    REQUIRE_THAT(pol[0], WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(pol[1], WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(pol[2], WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(pol[3], WithinAbs(-1.0, 1e-12));
}

TEST_CASE("ising phases on a two-qubit superposition", "[statevector]") {
    // (|00> + |01>)/sqrt2 picks up e^{-i pi/4} on |00> and e^{+i pi/4} on |01>
    PureState st(2);
    st[0] = 1.0 / std::sqrt(2.0);
    st[1] = 1.0 / std::sqrt(2.0);  // qubit 0 set
    apply_ising(st, {std::numbers::pi / 4.0});
    const cplx relative = st[1] / st[0];
    REQUIRE_THAT(relative.real(), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(relative.imag(), WithinAbs(1.0, 1e-12));  // e^{i pi/2}
}

TEST_CASE("ising layer preserves the norm", "[statevector]") {
    auto st = random_state(8, 11);
    std::vector<double> j(7);
    Rng rng(5);
    for (auto& v : j) v = rng.uniform(0, 2);
    apply_ising(st, j);
    REQUIRE_THAT(st.norm(), WithinAbs(1.0, 1e-12));
    REQUIRE_THROWS_AS(apply_ising(st, {0.1, 0.2}), InvalidConfigError);
}

TEST_CASE("zero coherent errors act as the identity", "[statevector]") {
    auto st = random_state(4, 7);
    auto copy = st;
    apply_coherent_errors(st, {0, 0, 0, 0});
    for (std::size_t i = 0; i < st.dim(); ++i)
        REQUIRE_THAT(std::abs(st[i] - copy[i]), WithinAbs(0.0, 1e-14));
}

TEST_CASE("single-site longitudinal field rotates <X>", "[statevector]") {
    // |+> under exp(-i b Z): <X> = cos(2b), with b = 0.126
    PureState st(1);
    st[0] = st[1] = 1.0 / std::sqrt(2.0);
    apply_coherent_errors(st, {0.126});
    const cplx xval = std::conj(st[0]) * st[1] + std::conj(st[1]) * st[0];
    REQUIRE_THAT(xval.real(), WithinAbs(std::cos(2 * 0.126), 1e-12));
}

TEST_CASE("non-commuting error terms match the dense exponential", "[statevector]") {
    // single qubit, H = 0.118 X + 0.126 Z
    Eigen::Matrix2cd h = 0.118 * pauli_mats::single('X') + 0.126 * pauli_mats::single('Z');
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
    Eigen::Vector2cd phases;
    for (int i = 0; i < 2; ++i) phases[i] = std::exp(cplx(0, -es.eigenvalues()[i]));
    Eigen::Matrix2cd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    auto st = random_state(1, 21);
    Eigen::Vector2cd expected = u * Eigen::Vector2cd(st[0], st[1]);
    apply_coherent_errors(st, {0.126}, {{PauliString("X"), 0.118}});
    REQUIRE_THAT(std::abs(st[0] - expected[0]), WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(std::abs(st[1] - expected[1]), WithinAbs(0.0, 1e-10));
}

TEST_CASE("multi-site error terms match explicit op order", "[statevector]") {
    // compare FloquetEngine::step against the three separate layer calls
    auto cfg = sample_disorder(5, 33);
    cfg.epsilon = 0.07;
    cfg.z_fields = sample_coherent_errors(5, 0.12, 3);
    cfg.extra_pauli_terms = {{PauliString("IZXII"), 0.038}, {PauliString("IIYZI"), 0.023}};
    auto st = random_state(5, 55);
    auto manual = st;
    FloquetEngine engine(cfg);
    engine.step(st);
    apply_flip(manual, cfg.epsilon);
    apply_ising(manual, cfg.couplings);
    apply_coherent_errors(manual, cfg.z_fields, cfg.extra_pauli_terms);
    for (std::size_t i = 0; i < st.dim(); ++i)
        REQUIRE_THAT(std::abs(st[i] - manual[i]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("echo identity at epsilon=0", "[statevector]") {
    // any bitstring is an eigenstate of the unperturbed period
    Rng rng(2024);
    for (int rep = 0; rep < 3; ++rep) {
        auto cfg = sample_disorder(6, 100 + rep);
        std::vector<int> bits(6);
        for (auto& b : bits) b = rng.bernoulli(0.5);
        auto st = PureState::from_bits(bits);
        FloquetEngine engine(cfg);
        for (int t = 1; t <= 10; ++t) {
            engine.step(st);
            auto pol = exact_polarizations(st);
            for (int q = 0; q < 6; ++q) {
                const double expect = (t % 2 ? -1.0 : 1.0) * (bits[q] ? -1.0 : 1.0);
                REQUIRE_THAT(pol[q], WithinAbs(expect, 1e-12));
            }
        }
    }
}

TEST_CASE("norm drift over 50 floquet steps stays tiny", "[statevector]") {
    auto cfg = sample_disorder(12, 9);
    cfg.epsilon = 0.11;
    cfg.z_fields = sample_coherent_errors(12, 0.1, 9);
    auto st = PureState::from_bits(make_initial(InitialKind::random_bit, 12, 4).bits);
    FloquetEngine engine(cfg);
    for (int t = 0; t < 50; ++t) engine.step(st);
    REQUIRE_THAT(st.norm(), WithinAbs(1.0, 1e-10));
}

TEST_CASE("exact polarizations of reference states", "[statevector]") {
    auto st = PureState::from_bits({0, 1, 1, 0});
    auto pol = exact_polarizations(st);
    REQUIRE(pol == std::vector<double>{1.0, -1.0, -1.0, 1.0});

    PureState uniform(3);
    for (std::size_t i = 0; i < uniform.dim(); ++i) uniform[i] = std::sqrt(1.0 / 8.0);
    for (double z : exact_polarizations(uniform)) REQUIRE_THAT(z, WithinAbs(0.0, 1e-12));

    PureState ghz(2);
    ghz[0] = ghz[3] = 1.0 / std::sqrt(2.0);
    for (double z : exact_polarizations(ghz)) REQUIRE_THAT(z, WithinAbs(0.0, 1e-12));
}

TEST_CASE("dense cap is enforced", "[statevector]") {
    REQUIRE_THROWS_AS(PureState(23), UnsupportedSizeError);
    REQUIRE_NOTHROW(PureState(10));
    ChainConfig big;
    big.n_qubits = 30;
    big.couplings.assign(29, 0.5);
    big.z_fields.assign(30, 0.0);
    REQUIRE_THROWS_AS(FloquetEngine(big), UnsupportedSizeError);
}

TEST_CASE("state and config dimension mismatch is rejected", "[statevector]") {
    auto cfg = sample_disorder(4, 1);
    auto st = PureState::from_bits({0, 0, 0});
    REQUIRE_THROWS_AS(floquet_step(st, cfg), InvalidConfigError);
}
