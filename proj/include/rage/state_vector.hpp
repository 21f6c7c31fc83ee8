#pragma once

#include <vector>

#include "rage/dense_tensor.hpp"
#include "rage/pauli.hpp"

namespace rage {

class MpsState;
class TtsState;
struct RageState;
class PepsState;

/// Brute-force dense state vector. Site 0 is the most significant digit of
/// the amplitude index; the cap is 2^14 amplitudes.
class StateVector {
public:
    StateVector(int num_sites, int local_dim, VectorXcd amplitudes);
    static StateVector zero_state(int num_sites, int local_dim = 2);

    int num_sites() const { return num_sites_; }
    int local_dim() const { return local_dim_; }
    const VectorXcd& amplitudes() const { return amps_; }
    VectorXcd& amplitudes() { return amps_; }

    double norm_squared() const { return amps_.squaredNorm(); }
    void normalize();

    int digit(std::size_t basis_index, int site) const;
    std::size_t with_digit(std::size_t basis_index, int site, int value) const;

    static constexpr std::size_t kMaxDimension = std::size_t(1) << 14;

private:
    int num_sites_;
    int local_dim_;
    VectorXcd amps_;
};

StateVector expand(const MpsState& state);
StateVector expand(const TtsState& state);
StateVector expand(const RageState& state);
StateVector expand(const PepsState& state);

/// <psi|H|psi> / <psi|psi>; throws if the imaginary residue exceeds 1e-8.
double exact_expectation(const StateVector& state, const HamiltonianSum& op);

Complex exact_matrix_element(const StateVector& bra, const HamiltonianSum& op,
                             const StateVector& ket);

struct GroundStateResult {
    double energy;
    double first_excited;
    StateVector state;
    bool degenerate;
};

/// Dense diagonalization of the full Hamiltonian (qubits only, <= 14 sites).
GroundStateResult exact_ground_state(const HamiltonianSum& h);

MatrixXcd dense_hamiltonian(const HamiltonianSum& h);

double fidelity(const StateVector& a, const StateVector& b);

/// Squared Schmidt coefficients across the (left_sites | rest) cut,
/// descending. Sums to 1 for normalized input.
std::vector<double> schmidt_spectrum(const StateVector& state, const std::vector<int>& left_sites);

/// Reduced density matrix on `sites` (ascending site order, first site most
/// significant), normalized by the state norm.
MatrixXcd partial_trace(const StateVector& state, const std::vector<int>& sites);

Complex product_expectation(const StateVector& state, const ProductOperator& op);

// Dense gate application, used as the circuit-evolution reference.
void apply_dense_single_qubit(StateVector& state, int site, const Eigen::Matrix2cd& u);
void apply_dense_controlled_phase(StateVector& state, int a, int b, double angle);

}  // namespace rage
