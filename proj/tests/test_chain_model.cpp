#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dtc/chain_model.hpp"

using namespace dtc;

TEST_CASE("disorder stays inside [pi/8, 3pi/8]", "[chain]") {
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        auto cfg = sample_disorder(57, seed);
        REQUIRE(cfg.couplings.size() == 56);
        for (double j : cfg.couplings) {
            REQUIRE(j >= kCouplingLow);
            REQUIRE(j <= kCouplingHigh);
        }
        for (double b : cfg.z_fields) REQUIRE(b == 0.0);
    }
}

TEST_CASE("disorder is deterministic in (n, seed)", "[chain]") {
    auto a = sample_disorder(12, 42);
    auto b = sample_disorder(12, 42);
    REQUIRE(a.couplings == b.couplings);
    auto c = sample_disorder(12, 43);
    REQUIRE(a.couplings != c.couplings);
}

TEST_CASE("disorder mean approaches pi/4", "[chain]") {
    double sum = 0.0;
    long count = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        auto cfg = sample_disorder(51, seed);  // 2000 * 50 = 1e5 couplings
        for (double j : cfg.couplings) sum += j;
        count += static_cast<long>(cfg.couplings.size());
    }
    REQUIRE(count == 100000);
    REQUIRE(std::abs(sum / count - std::numbers::pi / 4.0) < 0.01);
}

TEST_CASE("sample_disorder rejects chains shorter than 2", "[chain]") {
    REQUIRE_THROWS_AS(sample_disorder(1, 7), InvalidConfigError);
}

TEST_CASE("coherent errors respect the amplitude bound", "[chain]") {
    const double amp = kDefaultCoherentAmplitude;
    auto fields = sample_coherent_errors(57, amp, 5);
    REQUIRE(fields.size() == 57);
    for (double b : fields) REQUIRE(std::abs(b) <= amp);

    auto zeros = sample_coherent_errors(8, 0.0, 5);
    for (double b : zeros) REQUIRE(b == 0.0);

    REQUIRE(sample_coherent_errors(8, amp, 11) == sample_coherent_errors(8, amp, 11));
    REQUIRE_THROWS_AS(sample_coherent_errors(8, -0.1, 1), InvalidConfigError);
}

TEST_CASE("initial states materialize their bits", "[chain]") {
    auto neel = make_initial(InitialKind::neel, 4);
    REQUIRE(neel.bits == std::vector<int>{0, 1, 0, 1});

    auto pol = make_initial(InitialKind::polarized, 3);
    REQUIRE(pol.bits == std::vector<int>{0, 0, 0});

    auto r1 = make_initial(InitialKind::random_bit, 57, 123);
    auto r2 = make_initial(InitialKind::random_bit, 57, 123);
    REQUIRE(r1.bits == r2.bits);
    REQUIRE(r1.bits.size() == 57);
    bool has_one = false, has_zero = false;
    for (int b : r1.bits) (b ? has_one : has_zero) = true;
    REQUIRE((has_one && has_zero));
}

TEST_CASE("config json round trip", "[chain]") {
    auto cfg = sample_disorder(6, 17);
    cfg.epsilon = 0.05;
    cfg.z_fields = sample_coherent_errors(6, 0.1, 17);
    cfg.extra_pauli_terms.push_back({PauliString("IIXIII"), 0.118});
    cfg.extra_pauli_terms.push_back({PauliString("IZYIII"), 0.033});
    auto back = chain_config_from_json(to_json(cfg));
    REQUIRE(back.n_qubits == cfg.n_qubits);
    REQUIRE(back.epsilon == cfg.epsilon);
    REQUIRE(back.couplings == cfg.couplings);
    REQUIRE(back.z_fields == cfg.z_fields);
    REQUIRE(back.extra_pauli_terms.size() == 2);
    REQUIRE(back.extra_pauli_terms[1].op.str() == "IZYIII");
    REQUIRE(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config validation catches inconsistent shapes", "[chain]") {
    ChainConfig cfg;
    cfg.n_qubits = 4;
    cfg.epsilon = 0.1;
    cfg.couplings = {0.3, 0.3};  // needs 3
    cfg.z_fields = {0, 0, 0, 0};
    REQUIRE_THROWS_AS(cfg.validate(), InvalidConfigError);
    cfg.couplings = {0.3, 0.3, 0.3};
    REQUIRE_NOTHROW(cfg.validate());
    cfg.extra_pauli_terms.push_back({PauliString("XX"), 0.1});  // wrong length
    REQUIRE_THROWS_AS(cfg.validate(), InvalidConfigError);
    cfg.extra_pauli_terms = {{PauliString("IIII"), 0.1}};  // weight 0
    REQUIRE_THROWS_AS(cfg.validate(), InvalidConfigError);
}

TEST_CASE("pauli strings parse and index", "[chain]") {
    PauliString p("IIX");
    REQUIRE(p.weight() == 1);
    REQUIRE(p.at(2) == 'X');
    REQUIRE_THROWS_AS(PauliString("IQX"), InvalidConfigError);
    for (std::size_t i = 0; i < 64; ++i)
        REQUIRE(pauli_index(pauli_from_index(i, 3)) == i);
}
