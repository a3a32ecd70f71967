#pragma once

// Small-n process tomography: Pauli-transfer-matrix reconstruction of one
// (noisy) Floquet step from an informationally complete preparation set,
// post-gate error generator L = log(G H^{-1}), and projection of L onto the
// Hamiltonian generator directions -i[P_a, .].

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "dtc/chain_model.hpp"
#include "dtc/common.hpp"
#include "dtc/noise.hpp"
#include "dtc/pauli.hpp"
#include "dtc/rng.hpp"
#include "dtc/statevector.hpp"

namespace dtc {

inline constexpr int kTomographyMaxQubits = 3;

/// R_ab = tr(P_a Lambda(P_b)) / 2^n over the Pauli basis (base-4 index order).
struct ProcessTransferMatrix {
    Eigen::MatrixXd r;
    int n_qubits = 0;
};

namespace tomo_detail {

// single-site Pauli products P_a P_b = phase * P_c, letters 0..3 = I,X,Y,Z
struct SiteProd {
    int letter;
    std::complex<double> phase;
};

inline SiteProd site_prod(int a, int b) {
    using namespace std::complex_literals;
    if (a == 0) return {b, 1.0};
    if (b == 0) return {a, 1.0};
    if (a == b) return {0, 1.0};
    // XY=iZ, YZ=iX, ZX=iY and the reversed orders pick up the conjugate
    static constexpr int third[4][4] = {{0, 0, 0, 0}, {0, 0, 3, 2}, {0, 3, 0, 1}, {0, 2, 1, 0}};
    const bool forward = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
    return {third[a][b], forward ? std::complex<double>(1.0i) : std::complex<double>(-1.0i)};
}

inline int letter_of(std::size_t pauli_index, int site) {
    return static_cast<int>((pauli_index >> (2 * site)) & 3u);
}

/// P_a P_b = phase * P_result over n sites.
inline std::pair<std::size_t, std::complex<double>> pauli_product(std::size_t a, std::size_t b,
                                                                  int n) {
    std::size_t result = 0;
    std::complex<double> phase = 1.0;
    for (int s = 0; s < n; ++s) {
        const auto sp = site_prod(letter_of(a, s), letter_of(b, s));
        result |= static_cast<std::size_t>(sp.letter) << (2 * s);
        phase *= sp.phase;
    }
    return {result, phase};
}

inline std::vector<Eigen::MatrixXcd> all_pauli_matrices(int n) {
    const std::size_t count = std::size_t{1} << (2 * n);
    std::vector<Eigen::MatrixXcd> mats(count);
    for (std::size_t a = 0; a < count; ++a) mats[a] = pauli_matrix(pauli_from_index(a, n));
    return mats;
}

}  // namespace tomo_detail

/// Dense one-period unitary for chains small enough to tomograph.
inline Eigen::MatrixXcd dense_period_unitary(const ChainConfig& cfg) {
    cfg.validate();
    if (cfg.n_qubits > kTomographyMaxQubits)
        throw UnsupportedSizeError("dense period unitary capped at 3 qubits");
    const int n = cfg.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    auto site_string = [&](int q, char l) {
        std::string s(n, 'I');
        s[q] = l;
        return PauliString(s);
    };
    Eigen::MatrixXcd hflip = Eigen::MatrixXcd::Zero(dim, dim);
    for (int q = 0; q < n; ++q) hflip += pauli_matrix(site_string(q, 'X'));
    const auto u1 = detail::expm_minus_i(-0.5 * std::numbers::pi * (1.0 - cfg.epsilon) * hflip);
    Eigen::MatrixXcd hising = Eigen::MatrixXcd::Zero(dim, dim);
    for (int b = 0; b + 1 < n; ++b) {
        std::string s(n, 'I');
        s[b] = 'Z';
        s[b + 1] = 'Z';
        hising += cfg.couplings[b] * pauli_matrix(PauliString(s));
    }
    const auto u2 = detail::expm_minus_i(hising);
    Eigen::MatrixXcd hadd = Eigen::MatrixXcd::Zero(dim, dim);
    for (int q = 0; q < n; ++q)
        if (cfg.z_fields[q] != 0.0) hadd += cfg.z_fields[q] * pauli_matrix(site_string(q, 'Z'));
    for (const auto& term : cfg.extra_pauli_terms) hadd += term.coeff * pauli_matrix(term.op);
    const auto u3 = detail::expm_minus_i(hadd);
    return u3 * u2 * u1;
}

/// Analytic PTM of a unitary map.
inline ProcessTransferMatrix ptm_of_unitary(const Eigen::MatrixXcd& u, int n) {
    if (n > kTomographyMaxQubits) throw UnsupportedSizeError("ptm construction capped at 3 qubits");
    const std::size_t dim = std::size_t{1} << n;
    if (u.rows() != static_cast<Eigen::Index>(dim) || u.cols() != u.rows())
        throw InvalidConfigError("unitary dimension does not match qubit count");
    const auto paulis = tomo_detail::all_pauli_matrices(n);
    const std::size_t count = paulis.size();
    ProcessTransferMatrix ptm;
    ptm.n_qubits = n;
    ptm.r.resize(count, count);
    for (std::size_t b = 0; b < count; ++b) {
        const Eigen::MatrixXcd evolved = u * paulis[b] * u.adjoint();
        for (std::size_t a = 0; a < count; ++a)
            ptm.r(a, b) = (paulis[a] * evolved).trace().real() / static_cast<double>(dim);
    }
    return ptm;
}

inline ProcessTransferMatrix ptm_of_config_step(const ChainConfig& cfg) {
    return ptm_of_unitary(dense_period_unitary(cfg), cfg.n_qubits);
}

namespace tomo_detail {

/// Exact per-qubit depolarizing channel on a small density matrix.
inline Eigen::MatrixXcd depolarize(const Eigen::MatrixXcd& rho, const std::vector<double>& rates,
                                   const std::vector<Eigen::MatrixXcd>& paulis, int n) {
    Eigen::MatrixXcd out = rho;
    for (int q = 0; q < n; ++q) {
        const double p = rates[q];
        if (p == 0.0) continue;
        const std::size_t x = std::size_t{1} << (2 * q);
        Eigen::MatrixXcd mixed =
            paulis[x] * out * paulis[x] + paulis[2 * x] * out * paulis[2 * x] +
            paulis[3 * x] * out * paulis[3 * x];
        out = (1.0 - p) * out + (p / 3.0) * mixed;
    }
    return out;
}

/// Outcome distribution of measuring every qubit in basis `basis[q]`
/// (0=X,1=Y,2=Z), after pushing the state through the readout flips.
inline Eigen::VectorXd outcome_distribution(const Eigen::MatrixXcd& rho,
                                            const std::vector<int>& basis,
                                            const NoiseModel* noise, int n) {
    const std::size_t dim = std::size_t{1} << n;
    // single-qubit rotations mapping the chosen basis onto Z
    Eigen::Matrix2cd hadamard, sdg;
    hadamard << 1, 1, 1, -1;
    hadamard /= std::sqrt(2.0);
    sdg << 1, 0, 0, std::complex<double>(0, -1);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        // wrap outward so qubit q lands on basis-index bit q
        Eigen::Matrix2cd r;
        if (basis[q] == 0) r = hadamard;
        else if (basis[q] == 1) r = hadamard * sdg;
        else r = Eigen::Matrix2cd::Identity();
        Eigen::MatrixXcd next(v.rows() * 2, v.cols() * 2);
        next.topLeftCorner(v.rows(), v.cols()) = r(0, 0) * v;
        next.topRightCorner(v.rows(), v.cols()) = r(0, 1) * v;
        next.bottomLeftCorner(v.rows(), v.cols()) = r(1, 0) * v;
        next.bottomRightCorner(v.rows(), v.cols()) = r(1, 1) * v;
        v.swap(next);
    }
    const Eigen::MatrixXcd rotated = v * rho * v.adjoint();
    Eigen::VectorXd p(dim);
    for (std::size_t o = 0; o < dim; ++o) p[o] = std::max(0.0, rotated(o, o).real());
    p /= p.sum();
    if (noise != nullptr) {
        Eigen::VectorXd flipped = Eigen::VectorXd::Zero(dim);
        for (std::size_t o = 0; o < dim; ++o) {
            // spread outcome o over readout-flipped outcomes
            for (std::size_t m = 0; m < dim; ++m) {
                double w = 1.0;
                for (int q = 0; q < n; ++q) {
                    const bool truth = (o >> q) & 1u;
                    const bool seen = (m >> q) & 1u;
                    const double flip = truth ? noise->eta1[q] : noise->eta0[q];
                    w *= (truth == seen) ? (1.0 - flip) : flip;
                }
                flipped[m] += w * p[o];
            }
        }
        p = flipped;
    }
    return p;
}

}  // namespace tomo_detail

/// Reconstructs the PTM of one noisy Floquet step by simulating the full
/// preparation/measurement protocol: product inputs from {|0>,|1>,|+>,|+i>}
/// per qubit, readout in all 3^n Pauli product bases. shots_per_setting = 0
/// uses exact outcome frequencies.
inline ProcessTransferMatrix tomographic_reconstruction(const ChainConfig& cfg,
                                                        const NoiseModel* noise,
                                                        long shots_per_setting,
                                                        std::uint64_t seed = 0) {
    cfg.validate();
    const int n = cfg.n_qubits;
    if (n > kTomographyMaxQubits)
        throw UnsupportedSizeError("tomographic reconstruction capped at 3 qubits");
    if (noise != nullptr) noise->validate(n);
    if (shots_per_setting < 0) throw InvalidConfigError("shots_per_setting must be >= 0");
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t n_pauli = std::size_t{1} << (2 * n);
    const auto paulis = tomo_detail::all_pauli_matrices(n);
    const Eigen::MatrixXcd u = dense_period_unitary(cfg);

    // preparation design: state index digits 0..3 per qubit = |0>,|1>,|+>,|+i>
    // with Bloch rows over (I,X,Y,Z)
    static constexpr double kPrepBloch[4][4] = {
        {1, 0, 0, 1}, {1, 0, 0, -1}, {1, 1, 0, 0}, {1, 0, 1, 0}};
    const std::size_t n_prep = std::size_t{1} << (2 * n);

    Eigen::MatrixXd design(n_prep, n_pauli);
    for (std::size_t prep = 0; prep < n_prep; ++prep)
        for (std::size_t b = 0; b < n_pauli; ++b) {
            double c = 1.0;
            for (int q = 0; q < n; ++q)
                c *= kPrepBloch[(prep >> (2 * q)) & 3u][tomo_detail::letter_of(b, q)];
            design(prep, b) = c;
        }

    // single-qubit preparation states
    std::array<Eigen::Vector2cd, 4> kets;
    kets[0] << 1, 0;
    kets[1] << 0, 1;
    kets[2] << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    kets[3] << 1.0 / std::sqrt(2.0), std::complex<double>(0, 1.0 / std::sqrt(2.0));

    Rng rng(derive_seed(seed, "tomography"));
    Eigen::MatrixXd measured = Eigen::MatrixXd::Zero(n_prep, n_pauli);
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n_prep, n_pauli);

    const int n_bases = static_cast<int>(std::pow(3, n));
    for (std::size_t prep = 0; prep < n_prep; ++prep) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
        for (int q = 0; q < n; ++q) {
            const auto& k = kets[(prep >> (2 * q)) & 3u];
            Eigen::VectorXcd next(psi.size() * 2);
            next.head(psi.size()) = k[0] * psi;
            next.tail(psi.size()) = k[1] * psi;
            psi.swap(next);
        }
        Eigen::MatrixXcd rho = (u * psi) * (u * psi).adjoint();
        if (noise != nullptr) rho = tomo_detail::depolarize(rho, noise->depol_rate, paulis, n);

        for (int bi = 0; bi < n_bases; ++bi) {
            std::vector<int> basis(n);
            int rem = bi;
            for (int q = 0; q < n; ++q) {
                basis[q] = rem % 3;
                rem /= 3;
            }
            Eigen::VectorXd p = tomo_detail::outcome_distribution(rho, basis, noise, n);
            if (shots_per_setting > 0) {
                // multinomial counts by sequential binomial splitting
                Eigen::VectorXd freq = Eigen::VectorXd::Zero(dim);
                long remaining = shots_per_setting;
                double ptail = 1.0;
                for (std::size_t o = 0; o < dim && remaining > 0; ++o) {
                    const double cond = ptail > 1e-300 ? std::min(1.0, p[o] / ptail) : 1.0;
                    const long c = (o + 1 == dim) ? remaining : rng.binomial(remaining, cond);
                    freq[o] = static_cast<double>(c);
                    remaining -= c;
                    ptail -= p[o];
                }
                p = freq / static_cast<double>(shots_per_setting);
            }
            // every Pauli with letters in {I, basis_q} is estimated from this base
            for (std::size_t sub = 0; sub < dim; ++sub) {
                std::size_t pidx = 0;
                for (int q = 0; q < n; ++q)
                    if ((sub >> q) & 1u) pidx |= static_cast<std::size_t>(basis[q] + 1) << (2 * q);
                double val = 0.0;
                for (std::size_t o = 0; o < dim; ++o) {
                    int par = 0;
                    for (int q = 0; q < n; ++q)
                        if (((sub >> q) & 1u) && ((o >> q) & 1u)) par ^= 1;
                    val += (par ? -1.0 : 1.0) * p[o];
                }
                measured(prep, pidx) += val;
                weights(prep, pidx) += 1.0;
            }
        }
    }
    for (std::size_t prep = 0; prep < n_prep; ++prep)
        for (std::size_t a = 0; a < n_pauli; ++a) measured(prep, a) /= weights(prep, a);

    // least squares rows: design * R_row(a) = measured(:, a)
    const auto qr = design.colPivHouseholderQr();
    if (qr.rank() < static_cast<Eigen::Index>(n_pauli))
        throw Error("preparation design is rank deficient: underdetermined system");
    ProcessTransferMatrix ptm;
    ptm.n_qubits = n;
    ptm.r = qr.solve(measured).transpose();
    return ptm;
}

/// Hamiltonian generator directions: K_a = PTM of rho -> -i [P_a, rho].
/// (K_a)_{cd} = 2 Im(phase of P_a P_d) on the product Pauli index.
inline Eigen::MatrixXd hamiltonian_generator(std::size_t a, int n) {
    const std::size_t count = std::size_t{1} << (2 * n);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(count, count);
    for (std::size_t d = 0; d < count; ++d) {
        const auto [res, phase] = tomo_detail::pauli_product(a, d, n);
        const double w = 2.0 * phase.imag();
        if (w != 0.0) k(res, d) = w;
    }
    return k;
}

/// Least-squares projection of L onto the span of the 4^n - 1 Hamiltonian
/// generators; the basis is orthogonal under the Frobenius inner product
/// (verified at construction). Returns coefficients in Pauli index order.
inline std::vector<PauliTerm> hamiltonian_projection(const Eigen::MatrixXd& l_matrix, int n) {
    const std::size_t count = std::size_t{1} << (2 * n);
    if (l_matrix.rows() != static_cast<Eigen::Index>(count) || l_matrix.cols() != l_matrix.rows())
        throw InvalidConfigError("generator dimension does not match qubit count");
    std::vector<PauliTerm> coeffs;
    coeffs.reserve(count - 1);
    std::vector<Eigen::MatrixXd> basis(count);
    for (std::size_t a = 1; a < count; ++a) {
        basis[a] = hamiltonian_generator(a, n);
        const double norm2 = basis[a].squaredNorm();
        if (norm2 <= 0.0) throw Error("degenerate hamiltonian generator basis");
        for (std::size_t b = 1; b < a; ++b) {
            const double overlap = (basis[a].array() * basis[b].array()).sum();
            if (std::abs(overlap) > 1e-9 * norm2)
                throw Error("hamiltonian generator basis lost orthogonality");
        }
        coeffs.push_back({pauli_from_index(a, n),
                          (basis[a].array() * l_matrix.array()).sum() / norm2});
    }
    return coeffs;
}

/// Post-gate error generator decomposition.
struct ErrorGenerator {
    Eigen::MatrixXd l_matrix;
    std::vector<PauliTerm> hamiltonian_coeffs;
    double dissipative_residual_norm = 0.0;
};

/// L = log(G H^{-1}) via the principal real matrix logarithm, split into its
/// Hamiltonian part and the Frobenius norm of everything else.
inline ErrorGenerator error_generator(const ProcessTransferMatrix& g,
                                      const ProcessTransferMatrix& h) {
    if (g.n_qubits != h.n_qubits) throw InvalidConfigError("process matrices disagree on size");
    const int n = g.n_qubits;
    const Eigen::MatrixXd m =
        h.r.transpose().partialPivLu().solve(g.r.transpose()).transpose();  // G H^{-1}
    // principal branch exists only away from the negative real axis
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const auto ev = es.eigenvalues()[i];
        if (ev.real() < 0.0 && std::abs(ev.imag()) < 1e-9 * (1.0 + std::abs(ev.real())))
            throw BranchFailureError(
                "eigenvalue of G H^{-1} lies on the negative real axis; the principal matrix "
                "logarithm is not defined");
    }
    ErrorGenerator gen;
    gen.l_matrix = m.log();
    gen.hamiltonian_coeffs = hamiltonian_projection(gen.l_matrix, n);
    Eigen::MatrixXd residual = gen.l_matrix;
    std::size_t idx = 0;
    for (std::size_t a = 1; a < (std::size_t{1} << (2 * n)); ++a, ++idx)
        residual -= gen.hamiltonian_coeffs[idx].coeff * hamiltonian_generator(a, n);
    gen.dissipative_residual_norm = residual.norm();
    return gen;
}

/// Coefficient table in the layout (pauli_string, coefficient).
inline void write_coefficients_csv(const std::string& path, const std::vector<PauliTerm>& coeffs) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << "pauli_string,coefficient\n";
    for (const auto& term : coeffs) os << term.op.str() << ',' << format_double(term.coeff) << '\n';
}

}  // namespace dtc
