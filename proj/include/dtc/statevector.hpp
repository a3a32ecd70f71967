#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dtc/chain_model.hpp"
#include "dtc/common.hpp"

namespace dtc {

/// Largest chain the dense simulator accepts by default.
inline constexpr int kDefaultDenseCap = 22;

using cplx = std::complex<double>;

/// Dense amplitude vector over the 2^N computational basis. Qubit q owns bit q
/// of the basis index; bit 0 means Z = +1.
class PureState {
public:
    PureState(int n_qubits, int dense_cap = kDefaultDenseCap) : n_(n_qubits) {
        if (n_qubits < 1) throw InvalidConfigError("state needs at least one qubit");
        if (n_qubits > dense_cap)
            throw UnsupportedSizeError("dense simulation capped at " + std::to_string(dense_cap) +
                                       " qubits; requested " + std::to_string(n_qubits));
        amps_.assign(std::size_t{1} << n_, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    static PureState from_bits(const std::vector<int>& bits, int dense_cap = kDefaultDenseCap) {
        PureState st(static_cast<int>(bits.size()), dense_cap);
        std::size_t idx = 0;
        for (std::size_t q = 0; q < bits.size(); ++q) {
            if (bits[q] != 0 && bits[q] != 1) throw InvalidConfigError("bits must be 0/1");
            idx |= static_cast<std::size_t>(bits[q]) << q;
        }
        st.amps_[0] = 0.0;
        st.amps_[idx] = 1.0;
        return st;
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    std::vector<cplx>& amplitudes() { return amps_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

private:
    std::vector<cplx> amps_;
    int n_;
};

/// exp(i a X) with a = (pi/2)(1-epsilon) on every qubit: the imperfect global
/// spin flip. epsilon=0 flips every bit (up to phase), epsilon=1 is a no-op.
inline void apply_flip(PureState& state, double epsilon) {
    const double a = 0.5 * std::numbers::pi * (1.0 - epsilon);
    const double c = std::cos(a);
    const cplx is{0.0, std::sin(a)};
    const std::size_t dim = state.dim();
    for (int q = 0; q < state.n_qubits(); ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; ++base) {
            if (base & bit) continue;
            const cplx a0 = state[base];
            const cplx a1 = state[base | bit];
            state[base] = c * a0 + is * a1;
            state[base | bit] = is * a0 + c * a1;
        }
    }
}

namespace detail {

/// Phase angle sum J_i z_i z_{i+1} of one basis state.
inline double ising_angle(std::size_t basis, const std::vector<double>& couplings) {
    double th = 0.0;
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const bool differ = ((basis >> i) ^ (basis >> (i + 1))) & 1u;
        th += differ ? -couplings[i] : couplings[i];
    }
    return th;
}

inline double z_field_angle(std::size_t basis, const std::vector<double>& z_fields) {
    double th = 0.0;
    for (std::size_t q = 0; q < z_fields.size(); ++q)
        th += ((basis >> q) & 1u) ? -z_fields[q] : z_fields[q];
    return th;
}

/// Applies a dense gate to the given (not necessarily contiguous) qubits.
inline void apply_gate_on_sites(PureState& state, const Eigen::MatrixXcd& gate,
                                const std::vector<int>& sites) {
    const int k = static_cast<int>(sites.size());
    const std::size_t sub = std::size_t{1} << k;
    if (gate.rows() != static_cast<Eigen::Index>(sub) || gate.cols() != gate.rows())
        throw InvalidConfigError("gate dimension does not match site count");
    std::size_t mask = 0;
    for (int s : sites) mask |= std::size_t{1} << s;
    const std::size_t dim = state.dim();
    std::vector<cplx> scratch(sub);
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & mask) continue;  // visit each coset once via its lowest member
        for (std::size_t x = 0; x < sub; ++x) {
            std::size_t idx = base;
            for (int b = 0; b < k; ++b)
                if ((x >> b) & 1u) idx |= std::size_t{1} << sites[b];
            scratch[x] = state[idx];
        }
        for (std::size_t r = 0; r < sub; ++r) {
            cplx acc{0.0, 0.0};
            for (std::size_t cidx = 0; cidx < sub; ++cidx) acc += gate(r, cidx) * scratch[cidx];
            std::size_t idx = base;
            for (int b = 0; b < k; ++b)
                if ((r >> b) & 1u) idx |= std::size_t{1} << sites[b];
            state[idx] = acc;
        }
    }
}

/// exp(-i H) for Hermitian H via its eigendecomposition.
inline Eigen::MatrixXcd expm_minus_i(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(cplx(0.0, -es.eigenvalues()[i]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Support of the non-commuting part of H_add, plus the dense unitary
/// exp(-i H_S) on it. Z fields off the support commute with everything on it,
/// so they can be applied as exact diagonal phases separately.
struct CoherentErrorPlan {
    std::vector<int> support;          // sites covered by the dense gate
    Eigen::MatrixXcd gate;             // exp(-i H_S), dim 2^|support|
    std::vector<double> diagonal_fields;  // z fields outside the support

    static CoherentErrorPlan build(const std::vector<double>& z_fields,
                                   const std::vector<PauliTerm>& extra, int n_qubits,
                                   int support_cap = 12) {
        CoherentErrorPlan plan;
        plan.diagonal_fields = z_fields;
        if (extra.empty()) return plan;
        std::set<int> supp;
        for (const auto& term : extra)
            for (int s = 0; s < term.op.size(); ++s)
                if (term.op.at(s) != 'I') supp.insert(s);
        plan.support.assign(supp.begin(), supp.end());
        const int k = static_cast<int>(plan.support.size());
        if (k > support_cap)
            throw UnsupportedSizeError("extra pauli terms span " + std::to_string(k) +
                                       " sites; dense exponential capped at " +
                                       std::to_string(support_cap));
        // local index of each chain site inside the dense block
        std::vector<int> local(n_qubits, -1);
        for (int b = 0; b < k; ++b) local[plan.support[b]] = b;
        const std::size_t sub = std::size_t{1} << k;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(sub, sub);
        for (const auto& term : extra) {
            std::string restricted(k, 'I');
            for (int s = 0; s < term.op.size(); ++s)
                if (term.op.at(s) != 'I') restricted[local[s]] = term.op.at(s);
            h += term.coeff * pauli_matrix(PauliString(restricted));
        }
        for (int b = 0; b < k; ++b) {
            const int site = plan.support[b];
            if (z_fields[site] != 0.0) {
                std::string zs(k, 'I');
                zs[b] = 'Z';
                h += z_fields[site] * pauli_matrix(PauliString(zs));
                plan.diagonal_fields[site] = 0.0;  // moved into the dense block
            } else {
                plan.diagonal_fields[site] = 0.0;
            }
        }
        plan.gate = expm_minus_i(h);
        return plan;
    }
};

}  // namespace detail

/// Diagonal nearest-neighbour Ising phases exp(-i sum J_i Z_i Z_{i+1}).
inline void apply_ising(PureState& state, const std::vector<double>& couplings) {
    if (static_cast<int>(couplings.size()) != state.n_qubits() - 1)
        throw InvalidConfigError("couplings length must equal n_qubits-1");
    const std::size_t dim = state.dim();
    for (std::size_t basis = 0; basis < dim; ++basis) {
        const double th = detail::ising_angle(basis, couplings);
        state[basis] *= cplx(std::cos(th), -std::sin(th));
    }
}

/// Coherent-error unitary exp(-i H_add), H_add = sum b_i Z_i + sum c_k P_k.
/// The Z-only part is an exact diagonal; non-commuting extra terms go through
/// a single dense matrix exponential on their joint support.
inline void apply_coherent_errors(PureState& state, const std::vector<double>& z_fields,
                                  const std::vector<PauliTerm>& extra = {}) {
    if (static_cast<int>(z_fields.size()) != state.n_qubits())
        throw InvalidConfigError("z_fields length must equal n_qubits");
    auto plan = detail::CoherentErrorPlan::build(z_fields, extra, state.n_qubits());
    if (!plan.support.empty()) detail::apply_gate_on_sites(state, plan.gate, plan.support);
    const std::size_t dim = state.dim();
    for (std::size_t basis = 0; basis < dim; ++basis) {
        const double th = detail::z_field_angle(basis, plan.diagonal_fields);
        state[basis] *= cplx(std::cos(th), -std::sin(th));
    }
}

/// One Floquet period: flip, then Ising phases, then the error unitary.
inline void floquet_step(PureState& state, const ChainConfig& cfg) {
    if (cfg.n_qubits != state.n_qubits())
        throw InvalidConfigError("config and state disagree on qubit count");
    apply_flip(state, cfg.epsilon);
    apply_ising(state, cfg.couplings);
    apply_coherent_errors(state, cfg.z_fields, cfg.extra_pauli_terms);
}

/// Shot-free per-qubit polarizations <Z_q>.
inline std::vector<double> exact_polarizations(const PureState& state) {
    const int n = state.n_qubits();
    std::vector<double> pol(n, 0.0);
    const std::size_t dim = state.dim();
    for (std::size_t basis = 0; basis < dim; ++basis) {
        const double p = std::norm(state[basis]);
        if (p == 0.0) continue;
        for (int q = 0; q < n; ++q) pol[q] += ((basis >> q) & 1u) ? -p : p;
    }
    return pol;
}

/// Marginal probabilities P(bit_q = 1).
inline std::vector<double> one_probabilities(const PureState& state) {
    const int n = state.n_qubits();
    std::vector<double> p1(n, 0.0);
    const std::size_t dim = state.dim();
    for (std::size_t basis = 0; basis < dim; ++basis) {
        const double p = std::norm(state[basis]);
        if (p == 0.0) continue;
        for (int q = 0; q < n; ++q)
            if ((basis >> q) & 1u) p1[q] += p;
    }
    return p1;
}

/// Applies one single-qubit Pauli in place.
inline void apply_pauli(PureState& state, int qubit, char letter) {
    const std::size_t bit = std::size_t{1} << qubit;
    const std::size_t dim = state.dim();
    switch (letter) {
        case 'X':
            for (std::size_t base = 0; base < dim; ++base) {
                if (base & bit) continue;
                std::swap(state[base], state[base | bit]);
            }
            break;
        case 'Y':
            for (std::size_t base = 0; base < dim; ++base) {
                if (base & bit) continue;
                const cplx a0 = state[base];
                const cplx a1 = state[base | bit];
                state[base] = cplx(0.0, -1.0) * a1;
                state[base | bit] = cplx(0.0, 1.0) * a0;
            }
            break;
        case 'Z':
            for (std::size_t base = 0; base < dim; ++base)
                if (base & bit) state[base] = -state[base];
            break;
        default:
            throw InvalidConfigError("apply_pauli expects X, Y or Z");
    }
}

/// Stepper bound to one ChainConfig: merges all diagonal phases (Ising plus the
/// Z fields outside the dense support) into one precomputed table.
class FloquetEngine {
public:
    explicit FloquetEngine(ChainConfig cfg, int dense_cap = kDefaultDenseCap) : cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.n_qubits > dense_cap)
            throw UnsupportedSizeError("dense simulation capped at " + std::to_string(dense_cap) +
                                       " qubits; requested " + std::to_string(cfg_.n_qubits));
        plan_ = detail::CoherentErrorPlan::build(cfg_.z_fields, cfg_.extra_pauli_terms,
                                                 cfg_.n_qubits);
        const std::size_t dim = std::size_t{1} << cfg_.n_qubits;
        diag_.resize(dim);
        for (std::size_t basis = 0; basis < dim; ++basis) {
            const double th = detail::ising_angle(basis, cfg_.couplings) +
                              detail::z_field_angle(basis, plan_.diagonal_fields);
            diag_[basis] = cplx(std::cos(th), -std::sin(th));
        }
        const double a = 0.5 * std::numbers::pi * (1.0 - cfg_.epsilon);
        flip_c_ = std::cos(a);
        flip_is_ = cplx(0.0, std::sin(a));
    }

    const ChainConfig& config() const { return cfg_; }

    void step(PureState& state) const {
        if (state.n_qubits() != cfg_.n_qubits)
            throw InvalidConfigError("config and state disagree on qubit count");
        const std::size_t dim = state.dim();
        for (int q = 0; q < cfg_.n_qubits; ++q) {
            const std::size_t bit = std::size_t{1} << q;
            for (std::size_t base = 0; base < dim; ++base) {
                if (base & bit) continue;
                const cplx a0 = state[base];
                const cplx a1 = state[base | bit];
                state[base] = flip_c_ * a0 + flip_is_ * a1;
                state[base | bit] = flip_is_ * a0 + flip_c_ * a1;
            }
        }
        if (!plan_.support.empty()) {
            // diagonal phases commute with nothing in the dense block, keep order:
            // Ising first, then the error unitary exp(-i H_S)
            for (std::size_t basis = 0; basis < dim; ++basis) state[basis] *= ising_only(basis);
            detail::apply_gate_on_sites(state, plan_.gate, plan_.support);
            for (std::size_t basis = 0; basis < dim; ++basis) state[basis] *= zrest_only(basis);
        } else {
            for (std::size_t basis = 0; basis < dim; ++basis) state[basis] *= diag_[basis];
        }
    }

private:
    cplx ising_only(std::size_t basis) const {
        const double th = detail::ising_angle(basis, cfg_.couplings);
        return cplx(std::cos(th), -std::sin(th));
    }
    cplx zrest_only(std::size_t basis) const {
        const double th = detail::z_field_angle(basis, plan_.diagonal_fields);
        return cplx(std::cos(th), -std::sin(th));
    }

    ChainConfig cfg_;
    detail::CoherentErrorPlan plan_;
    std::vector<cplx> diag_;
    double flip_c_ = 0.0;
    cplx flip_is_{0.0, 0.0};
};

}  // namespace dtc
