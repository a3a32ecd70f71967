#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtc/common.hpp"

namespace dtc {

/// Tensor-product Pauli operator written site by site, e.g. "IIX" is the
/// identity on sites 1 and 2 and X on site 3 (leftmost letter = site 1).
class PauliString {
public:
    PauliString() = default;

    explicit PauliString(std::string letters) : letters_(std::move(letters)) {
        for (char c : letters_) {
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                throw InvalidConfigError("pauli string may contain only I/X/Y/Z, got '" +
                                         std::string(1, c) + "'");
        }
    }

    static PauliString identity(int n_sites) { return PauliString(std::string(n_sites, 'I')); }

    int size() const { return static_cast<int>(letters_.size()); }

    char at(int site) const { return letters_.at(site); }

    int weight() const {
        int w = 0;
        for (char c : letters_)
            if (c != 'I') ++w;
        return w;
    }

    const std::string& str() const { return letters_; }

    bool operator==(const PauliString& other) const { return letters_ == other.letters_; }
    bool operator<(const PauliString& other) const { return letters_ < other.letters_; }

private:
    std::string letters_;
};

/// One term coeff * P of a Pauli-sum Hamiltonian.
struct PauliTerm {
    PauliString op;
    double coeff = 0.0;
};

namespace pauli_mats {

using Mat2 = Eigen::Matrix2cd;

inline Mat2 single(char letter) {
    using namespace std::complex_literals;
    Mat2 m;
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -1i, 1i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw InvalidConfigError("unknown pauli letter");
    }
    return m;
}

}  // namespace pauli_mats

/// Dense matrix of a PauliString on n qubits. Site k acts on qubit k, whose
/// basis-index bit is bit k (least significant = site 1); kron order follows.
inline Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
    const int n = p.size();
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (int site = 0; site < n; ++site) {
        // wrap sites outward so site k lands on basis-index bit k
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        const auto s = pauli_mats::single(p.at(site));
        next.topLeftCorner(m.rows(), m.cols()) = s(0, 0) * m;
        next.topRightCorner(m.rows(), m.cols()) = s(0, 1) * m;
        next.bottomLeftCorner(m.rows(), m.cols()) = s(1, 0) * m;
        next.bottomRightCorner(m.rows(), m.cols()) = s(1, 1) * m;
        m.swap(next);
    }
    if (static_cast<std::size_t>(m.rows()) != dim) throw Error("internal kron error");
    return m;
}

/// Enumerates all 4^n PauliStrings in base-4 order (I<X<Y<Z per site, site 1
/// fastest). Index 0 is the identity.
inline PauliString pauli_from_index(std::size_t index, int n) {
    static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
    std::string s(n, 'I');
    for (int site = 0; site < n; ++site) {
        s[site] = kLetters[index % 4];
        index /= 4;
    }
    return PauliString(s);
}

inline std::size_t pauli_index(const PauliString& p) {
    std::size_t idx = 0;
    for (int site = p.size() - 1; site >= 0; --site) {
        std::size_t digit = 0;
        switch (p.at(site)) {
            case 'I': digit = 0; break;
            case 'X': digit = 1; break;
            case 'Y': digit = 2; break;
            case 'Z': digit = 3; break;
        }
        idx = idx * 4 + digit;
    }
    return idx;
}

}  // namespace dtc
