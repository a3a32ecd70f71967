#pragma once

// Free-fermion (matchgate) engine for the ideal coherent-error-free chain.
//
// Jordan-Wigner convention (fixed here, used nowhere else): strings run along
// X, so that both circuit layers act quadratically on the Majorana operators
//
//     m_{2s}   = (prod_{j<s} X_j) Z_s,      m_{2s+1} = (prod_{j<s} X_j) Y_s,
//
// with Z_s = 1 - 2 c_s^dag c_s fixing the spin-to-fermion dictionary. Then
//
//     X_s         =  i m_{2s}   m_{2s+1}   -> flip layer: per-site rotation,
//     Z_s Z_{s+1} =  i m_{2s+1} m_{2s+2}   -> Ising layer: bond rotation,
//
// and one period conjugates the Majorana frame by an orthogonal matrix
// O = O_ising * O_flip. A computational bitstring |b> is *not* an even
// Gaussian state in this convention: it factorizes as
//
//     |b><b| = (1 + z_0 m_0)/2 * prod_s (1 + z_s z_{s+1} i m_{2s+1} m_{2s+2})/2,
//
// i.e. bond covariance Gamma_{2s+1,2s+2} = z_s z_{s+1} plus one linear
// (parity-odd) factor, carried below as the displacement vector d = z_0 e_0.
// The observable is itself a string, Z_i = i^i m_0 m_1 ... m_{2i}, and Wick's
// theorem with the single displacement gives the closed form
//
//     <Z_i(t)> = Pf [ [0,  d^T], [-d,  Gamma] ]  restricted to m_0..m_{2i},
//
// with Gamma(t) = O^t Gamma O^t^T and d(t) = O^t d. All leading Pfaffians come
// out of one tridiagonalization pass; indices whose pass went through a small
// pivot are recomputed individually with pivoting.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dtc/chain_model.hpp"
#include "dtc/common.hpp"
#include "dtc/panel.hpp"

namespace dtc {

/// Gaussian-plus-displacement representation of the chain state. gamma is the
/// real antisymmetric 2N x 2N Majorana covariance, Gamma_ab = (i/2) <[m_a, m_b]>;
/// displacement carries the one parity-odd factor a bitstring state has in
/// this convention (it pairs with a formal ancilla Majorana in the read-back).
struct MajoranaCovariance {
    Eigen::MatrixXd gamma;
    Eigen::VectorXd displacement;
    int n_qubits = 0;
};

/// One circuit layer's conjugation action on the Majorana frame, Gamma -> O Gamma O^T.
struct OrthogonalUpdate {
    Eigen::MatrixXd o;
};

inline MajoranaCovariance covariance_from_bits(const std::vector<int>& bits) {
    const int n = static_cast<int>(bits.size());
    if (n < 1) throw InvalidConfigError("covariance_from_bits needs at least one bit");
    MajoranaCovariance cov;
    cov.n_qubits = n;
    cov.gamma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cov.displacement = Eigen::VectorXd::Zero(2 * n);
    auto sign = [&](int q) { return bits[q] ? -1.0 : 1.0; };
    for (int s = 0; s + 1 < n; ++s) {
        const double bond = sign(s) * sign(s + 1);
        cov.gamma(2 * s + 1, 2 * s + 2) = bond;
        cov.gamma(2 * s + 2, 2 * s + 1) = -bond;
    }
    cov.displacement[0] = sign(0);
    return cov;
}

/// Conjugation by exp(i pi/2 (1-eps) sum X_s): independent rotation of each
/// site pair (m_{2s}, m_{2s+1}) by angle pi (1-eps). eps=0 gives -identity
/// blocks, eps=1 the identity.
inline OrthogonalUpdate flip_layer_update(double epsilon, int n_qubits) {
    const double th = std::numbers::pi * (1.0 - epsilon);
    const double c = std::cos(th), s = std::sin(th);
    OrthogonalUpdate u;
    u.o = Eigen::MatrixXd::Identity(2 * n_qubits, 2 * n_qubits);
    for (int site = 0; site < n_qubits; ++site) {
        const int p = 2 * site, q = 2 * site + 1;
        u.o(p, p) = c;
        u.o(p, q) = -s;
        u.o(q, p) = s;
        u.o(q, q) = c;
    }
    return u;
}

/// Conjugation by exp(-i sum J_s Z_s Z_{s+1}): bond pairs (m_{2s+1}, m_{2s+2})
/// rotate by 2 J_s; the first and last Majorana are untouched.
inline OrthogonalUpdate ising_layer_update(const std::vector<double>& couplings, int n_qubits) {
    if (static_cast<int>(couplings.size()) != n_qubits - 1)
        throw InvalidConfigError("couplings length must equal n_qubits-1");
    OrthogonalUpdate u;
    u.o = Eigen::MatrixXd::Identity(2 * n_qubits, 2 * n_qubits);
    for (int s = 0; s + 1 < n_qubits; ++s) {
        const double a = 2.0 * couplings[s];
        const double c = std::cos(a), sn = std::sin(a);
        const int p = 2 * s + 1, q = 2 * s + 2;
        u.o(p, p) = c;
        u.o(p, q) = sn;
        u.o(q, p) = -sn;
        u.o(q, q) = c;
    }
    return u;
}

/// Pfaffian of a real antisymmetric matrix, Parlett-Reid elimination with
/// greedy pivoting. The argument is consumed.
inline double pfaffian_inplace(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n % 2 != 0) return 0.0;
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index best = k + 1;
        double mag = std::abs(a(k, k + 1));
        for (Eigen::Index j = k + 2; j < n; ++j) {
            if (std::abs(a(k, j)) > mag) {
                mag = std::abs(a(k, j));
                best = j;
            }
        }
        if (mag == 0.0) return 0.0;
        if (best != k + 1) {
            a.row(k + 1).swap(a.row(best));
            a.col(k + 1).swap(a.col(best));
            pf = -pf;
        }
        const double piv = a(k, k + 1);
        pf *= piv;
        if (k + 2 < n) {
            const auto tail = Eigen::seq(k + 2, n - 1);
            Eigen::VectorXd v = a(k, tail) / piv;
            Eigen::VectorXd w = a(k + 1, tail);
            a(tail, tail).noalias() += w * v.transpose() - v * w.transpose();
        }
    }
    return pf;
}

namespace detail {

/// All <Z_i> in one pivot-free pass over the bordered matrix; returns false in
/// ok[i] when the prefix ending at qubit i met a small pivot or large
/// multiplier and needs the pivoted fallback.
inline void nested_polarizations(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& d, int n,
                                 std::vector<double>& vals, std::vector<char>& ok) {
    const Eigen::Index m = 2 * n + 1;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    b(0, Eigen::seq(1, m - 1)) = d.transpose();
    b(Eigen::seq(1, m - 1), 0) = -d;
    b(Eigen::seq(1, m - 1), Eigen::seq(1, m - 1)) = gamma;
    vals.assign(n, 0.0);
    ok.assign(n, 1);
    bool degraded = false;
    double cum = 1.0;
    for (Eigen::Index k = 0; k + 1 < m; k += 2) {
        const double piv = b(k, k + 1);
        cum *= piv;
        const int qubit = static_cast<int>(k / 2);
        if (qubit < n) {
            vals[qubit] = cum;
            ok[qubit] = degraded ? 0 : 1;
        }
        if (k + 2 >= m) break;
        if (std::abs(piv) < 1e-6) {
            degraded = true;
            continue;
        }
        const auto tail = Eigen::seq(k + 2, m - 1);
        Eigen::VectorXd v = b(k, tail) / piv;
        if (v.cwiseAbs().maxCoeff() > 1e4) degraded = true;
        Eigen::VectorXd w = b(k + 1, tail);
        b(tail, tail).noalias() += w * v.transpose() - v * w.transpose();
    }
}

inline double bordered_pfaffian(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& d, int qubit) {
    const Eigen::Index k = 2 * qubit + 1;  // Majoranas m_0..m_{2 qubit}
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 1, k + 1);
    a(0, Eigen::seq(1, k)) = d.head(k).transpose();
    a(Eigen::seq(1, k), 0) = -d.head(k);
    a(Eigen::seq(1, k), Eigen::seq(1, k)) = gamma.topLeftCorner(k, k);
    return pfaffian_inplace(a);
}

}  // namespace detail

/// Per-qubit <Z_i> of the represented state.
inline std::vector<double> read_polarizations(const MajoranaCovariance& cov) {
    std::vector<double> vals;
    std::vector<char> ok;
    detail::nested_polarizations(cov.gamma, cov.displacement, cov.n_qubits, vals, ok);
    for (int q = 0; q < cov.n_qubits; ++q)
        if (!ok[q]) vals[q] = detail::bordered_pfaffian(cov.gamma, cov.displacement, q);
    return vals;
}

/// Worst antisymmetry violation max |Gamma + Gamma^T|.
inline double antisymmetry_defect(const MajoranaCovariance& cov) {
    return (cov.gamma + cov.gamma.transpose()).cwiseAbs().maxCoeff();
}

/// Largest singular value of Gamma; physical states stay <= 1.
inline double spectral_bound(const MajoranaCovariance& cov) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov.gamma);
    return svd.singularValues().maxCoeff();
}

/// Evolves the covariance through `steps` Floquet periods and reads back the
/// polarization panel for t = 0..steps. Refuses interacting models: any
/// coherent-error term breaks the quadratic structure this engine relies on.
inline TimeSeriesPanel evolve_covariance(MajoranaCovariance cov, const ChainConfig& cfg,
                                         int steps) {
    cfg.validate();
    if (cfg.n_qubits != cov.n_qubits)
        throw InvalidConfigError("config and covariance disagree on qubit count");
    if (cfg.has_coherent_errors())
        throw UnsupportedModelError(
            "fermion engine handles only the ideal model; coherent-error terms require the "
            "statevector engine");
    const Eigen::MatrixXd o =
        ising_layer_update(cfg.couplings, cfg.n_qubits).o * flip_layer_update(cfg.epsilon, cfg.n_qubits).o;
    TimeSeriesPanel panel(cfg.n_qubits, steps, Stage::raw);
    auto record = [&](int t) {
        const auto vals = read_polarizations(cov);
        for (int q = 0; q < cfg.n_qubits; ++q) panel.at(q, t) = vals[q];
    };
    record(0);
    for (int q = 0; q < cfg.n_qubits; ++q) panel.initial_bits[q] = panel.at(q, 0) < 0.0 ? 1 : 0;
    for (int t = 1; t <= steps; ++t) {
        cov.gamma = o * cov.gamma * o.transpose();
        cov.displacement = o * cov.displacement;
        record(t);
    }
    return panel;
}

}  // namespace dtc
