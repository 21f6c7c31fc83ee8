#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "rage/mps.hpp"
#include "rage/pauli.hpp"
#include "rage/tts.hpp"
#include "rage/wgs.hpp"

namespace rage {

/// Tensor-network backbone composed with the adjacency-phase layer and
/// per-site local rotations.
struct RageState {
    std::variant<MpsState, TtsState> backbone;
    AdjacencyPhases phases;
    LocalRotations rotations;

    RageState(MpsState b, AdjacencyPhases p, LocalRotations v);
    RageState(TtsState b, AdjacencyPhases p, LocalRotations v);

    bool has_mps() const { return std::holds_alternative<MpsState>(backbone); }
    const MpsState& mps() const { return std::get<MpsState>(backbone); }
    MpsState& mps() { return std::get<MpsState>(backbone); }
    const TtsState& tts() const { return std::get<TtsState>(backbone); }
    TtsState& tts() { return std::get<TtsState>(backbone); }

    int n_sites() const;
    int local_dim() const;
};

/// Conjugates coeff * prod O_i through rotations and the phase layer:
/// returns product terms summing to W^dag (V^dag O V) W. Sites whose rotated
/// operator has off-diagonal entries branch over their nonzero transitions.
std::vector<ProductOperator> dress_through_layer(const ProductOperator& op,
                                                 const AdjacencyPhases& phases,
                                                 const std::vector<MatrixXcd>* rotations,
                                                 int branch_limit = 4096);

std::vector<MatrixXcd> rotation_matrices(const LocalRotations& rotations, int local_dim);

double rage_norm_squared(const RageState& r);

/// Unnormalized <psi| coeff * prod O_i |psi> for the full graph-enhanced state.
Complex rage_product_value(const RageState& r, const ProductOperator& op);

/// Reduced density on the ascending support, unit trace. The MPS route runs
/// phase-modified transfer products; the TTS route evaluates phase-dressed
/// product observables.
MatrixXcd rage_reduced_density(const RageState& r, const std::vector<int>& support);
MatrixXcd rage_reduced_density_mps(const RageState& r, const std::vector<int>& support);
MatrixXcd rage_reduced_density_tts(const RageState& r, const std::vector<int>& support);

/// Dispatches per term: reduced densities for small supports, dressed
/// product terms beyond.
double rage_expectation(const RageState& r, const HamiltonianSum& h);

/// Hamiltonian terms dressed to backbone-level product terms.
std::vector<ProductOperator> rage_dressed_terms(const RageState& r, const HamiltonianSum& h);

struct UpdateResult {
    RageState state;
    double energy;
    bool skipped = false;
};

/// Generalized-eigenproblem update of one backbone tensor; phases and
/// rotations are untouched and the metric is the bare backbone metric.
UpdateResult rage_optimize_tensor(const RageState& r, int site_or_vertex, const HamiltonianSum& h,
                                  double metric_cutoff = 1e-12);

/// 4x4 real symmetric eigenproblem over the rotation parameters of one site.
UpdateResult rage_optimize_rotation(const RageState& r, int site, const HamiltonianSum& h);

struct PhaseOptimizationCoefficients {
    double a;      // constant part
    double b;      // cos coefficient
    double gamma;  // sin coefficient
};

/// Energy dependence on one pair phase recovered from probes at 0, pi/2, pi
/// and validated at a fourth angle.
PhaseOptimizationCoefficients rage_phase_coefficients(const RageState& r, int site_a, int site_b,
                                                      const HamiltonianSum& h);

/// Closed-form minimizer of a + b cos(phi) + gamma sin(phi).
double phase_minimizer(const PhaseOptimizationCoefficients& c);

UpdateResult rage_optimize_phase(const RageState& r, int site_a, int site_b,
                                 const HamiltonianSum& h);

struct AlternatingSchedule {
    bool tensors = true;
    bool rotations = true;
    bool phases = true;
    bool gradient_refinement = true;
};

struct AlternatingResult {
    RageState state;
    std::vector<double> energy_trace;
    int rounds = 0;
    bool converged = false;
    bool stall_detected = false;
    double seconds = 0.0;
};

AlternatingResult rage_alternating_minimize(const RageState& r, const HamiltonianSum& h,
                                            const AlternatingSchedule& schedule, double rel_tol,
                                            int max_rounds);

/// Sum-of-products form of W^dag p W; for a two-site Pauli support this is a
/// matrix product operator of bond dimension <= 4.
struct PhaseConjugatedOperator {
    int n_sites = 0;
    std::vector<ProductOperator> branches;
    int bond_dimension() const { return static_cast<int>(branches.size()); }
    MatrixXcd dense() const;  // oracle-scale only
};

PhaseConjugatedOperator pauli_conjugate_through_phases(const PauliString& p,
                                                       const AdjacencyPhases& phases,
                                                       const LocalRotations& rotations);

struct CliffordGate {
    enum class Kind { H, S, CZ, CNOT };
    Kind kind;
    int a;
    int b = -1;
};

struct CliffordCircuit {
    int n_qubits = 0;
    std::vector<CliffordGate> gates;
    MatrixXcd dense() const;
};

/// Exact symplectic update with sign: returns C^dag p C.
PauliString pauli_conjugate_through_clifford(const PauliString& p, const CliffordCircuit& c);

}  // namespace rage
