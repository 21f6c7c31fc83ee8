#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rage/dense_tensor.hpp"
#include "rage/pauli.hpp"

namespace rage {

/// Pairwise phase data of the graph layer. For every unordered pair (a, b)
/// there is a symmetric q x q phase matrix with vanishing first row/column;
/// the qubit case is the [1][1] entry. The total phase picked up by a basis
/// state is the sum over unordered pairs of phi[a][b](s_a, s_b) — phase
/// gates are counted once per pair.
class AdjacencyPhases {
public:
    AdjacencyPhases(int n_sites, int local_dim = 2);

    int n_sites() const { return n_; }
    int local_dim() const { return q_; }

    /// Qubit-case scalar phase (the [1][1] entry), a != b.
    double phase(int a, int b) const;
    void set_phase(int a, int b, double value);
    void add_phase(int a, int b, double value);  // reduced mod 2*pi

    /// phi_{a,b}[s, t] with the symmetry phi_{a,b}[s,t] = phi_{b,a}[t,s].
    double entry(int a, int b, int s, int t) const;
    /// Sets the symmetric pair matrix for (a, b); rows/cols with index 0
    /// must vanish.
    void set_pair_matrix(int a, int b, const Eigen::MatrixXd& phi);
    Eigen::MatrixXd pair_matrix(int a, int b) const;

    /// Phases seen at site c when site a holds digit s_a: the vector over
    /// s_c of phi_{a,c}[s_a, s_c]. Used by the dressed-observable paths.
    Eigen::VectorXd site_phases(int a, int c, int s_a) const;

    bool is_zero() const;
    std::vector<std::pair<int, int>> nonzero_pairs() const;

private:
    int n_;
    int q_;
    std::vector<Eigen::MatrixXd> pair_;  // indexed by unordered pair (a < b)

    std::size_t pair_index(int a, int b) const;
};

/// Per-site rotation V = x0*1 + i(x1*sx - x2*sy + x3*sz) with unit x in R^4.
class LocalRotations {
public:
    explicit LocalRotations(int n_sites);
    static LocalRotations identity(int n_sites) { return LocalRotations(n_sites); }

    int n_sites() const { return static_cast<int>(x_.size()); }
    const Eigen::Vector4d& parameters(int site) const { return x_[site]; }
    void set_parameters(int site, const Eigen::Vector4d& x);

    Eigen::Matrix2cd matrix(int site) const;
    static Eigen::Matrix2cd matrix_from(const Eigen::Vector4d& x);
    bool is_identity(double tol = 1e-14) const;

private:
    std::vector<Eigen::Vector4d> x_;
};

/// Stabilizer generators stored as Pauli strings with signs +-1.
struct StabilizerGroup {
    int n_qubits = 0;
    std::vector<PauliString> generators;  // coefficients are +-1

    void add(const std::string& letters, int sign);
    bool generators_commute() const;
    /// Rank of the (X|Z) block over GF(2).
    int symplectic_rank() const;
};

/// phi = pi on edges, 0 elsewhere.
AdjacencyPhases graph_state_phases(int n_sites, const std::vector<std::pair<int, int>>& edges);

/// K_a = sigma_x^(a) prod_{b in N_a} sigma_z^(b), one per vertex.
std::vector<PauliString> stabilizer_operators(int n_sites,
                                              const std::vector<std::pair<int, int>>& edges);

struct GraphForm {
    std::vector<std::pair<int, int>> edges;
    /// Per-site single-qubit Clifford correction, applied to the graph state
    /// to recover a joint +1 eigenstate of the input generators. The tag is
    /// the generator word (over H, S, Z) in application order.
    std::vector<std::string> correction_tags;
    std::vector<Eigen::Matrix2cd> corrections;
};

/// Reduction to graph form via Gaussian elimination over GF(2) with local
/// Clifford moves; requires a full-rank group.
GraphForm stabilizer_to_graph(const StabilizerGroup& s);

/// Extends a commuting, possibly rank-deficient generating set to n
/// independent commuting generators.
StabilizerGroup complete_stabilizer_group(const StabilizerGroup& s);

}  // namespace rage
