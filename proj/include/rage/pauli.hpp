#pragma once

#include <map>
#include <string>
#include <vector>

#include "rage/dense_tensor.hpp"

namespace rage {

/// Pauli string over n qubits: one letter from {I, X, Y, Z} per site plus a
/// coefficient. Letters are stored as a plain string, site 0 first.
struct PauliString {
    int n_sites = 0;
    std::string letters;
    Complex coefficient{1.0, 0.0};

    PauliString() = default;
    PauliString(int n, std::string l, Complex c = Complex(1.0, 0.0));

    /// Sites carrying a non-identity letter, ascending.
    std::vector<int> support() const;
    bool is_diagonal() const;  // only I and Z letters

    static Eigen::Matrix2cd letter_matrix(char letter);
    Eigen::Matrix2cd site_matrix(int site) const { return letter_matrix(letters[site]); }

    /// Exact product with phase tracking; throws if the result is not a
    /// Hermitian Pauli (i.e. if the factors anticommute).
    PauliString multiply(const PauliString& other) const;
    bool commutes_with(const PauliString& other) const;
};

/// Weighted sum of Pauli strings plus optional lattice metadata.
struct HamiltonianSum {
    int n_sites = 0;
    std::vector<PauliString> terms;

    struct Lattice {
        int lx = 0;
        int ly = 0;
        bool periodic = false;
    } lattice;

    HamiltonianSum() = default;
    explicit HamiltonianSum(int n) : n_sites(n) {}

    void add(const std::string& letters, Complex coefficient);
    bool is_hermitian(double tol = 1e-12) const;
    int max_support() const;
};

/// coefficient * tensor product of per-site operators; sites absent from the
/// map carry the identity. The common currency of all evaluation paths.
struct ProductOperator {
    Complex coefficient{1.0, 0.0};
    std::map<int, MatrixXcd> site_ops;

    ProductOperator() = default;
    explicit ProductOperator(Complex c) : coefficient(c) {}

    static ProductOperator from_pauli(const PauliString& p);
    ProductOperator with_op(int site, const MatrixXcd& op) const;
};

}  // namespace rage
