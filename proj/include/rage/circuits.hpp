#pragma once

#include <cstdint>
#include <vector>

#include "rage/rage_state.hpp"
#include "rage/rng.hpp"
#include "rage/state_vector.hpp"

namespace rage {

struct Gate {
    enum class Kind { single_qubit, controlled_phase };
    Kind kind = Kind::single_qubit;
    int site_a = 0;
    int site_b = -1;
    double angle = 0.0;          // controlled_phase
    Eigen::Matrix2cd matrix;     // single_qubit

    static Gate single(int site, const Eigen::Matrix2cd& u);
    /// diag(1, e^{i angle}) on one site.
    static Gate phase(int site, double angle);
    static Gate controlled(int a, int b, double angle);

    bool is_diagonal(double tol = 1e-14) const;
    void check_unitary(double tol = 1e-12) const;
};

struct Circuit {
    int n_sites = 0;
    std::vector<Gate> gates;
    std::uint64_t seed = 0;  // generation metadata
    int n_blocks = 0;
};

/// Exact: the pair phase entry absorbs the angle; the backbone is untouched.
RageState apply_controlled_phase(const RageState& r, const Gate& g);

struct SingleQubitUpdateOptions {
    int target_bond_dim = 0;  // 0 keeps the current bond dimension
    bool update_adjacency_row = false;
    int sweeps = 2;
    double metric_cutoff = 1e-12;
};

struct SingleQubitUpdateResult {
    RageState state;
    double fidelity_bound;  // achieved overlap quotient against the target
};

/// Overlap-maximizing per-site updates of the backbone toward gate|state>,
/// with optional adjacency-row refinement on the acted row. MPS backbone,
/// identity rotations.
SingleQubitUpdateResult apply_single_qubit_variational(const RageState& r, const Gate& g,
                                                       const SingleQubitUpdateOptions& opts);

struct RowUpdateResult {
    RageState state;
    double quotient_before;
    double quotient_after;
    double delta_phase;  // accepted change of the pair phase entry
    bool accepted;
};

/// Optimal a*1 + i*b*ZZ dressing between the acted and target site, chosen by
/// a 2x2 eigenproblem on the overlap quotient against gate|target>.
RowUpdateResult update_adjacency_row(const RageState& r, int acted_site, int target_site,
                                     const RageState& target, const Eigen::Matrix2cd& gate);

/// Per-site overlap-quotient sweeps of the backbone of `r` toward
/// gate|target>. The phases of `r` and `target` must agree off the gate row.
SingleQubitUpdateResult fit_backbone_toward(const RageState& r, const RageState& target,
                                            int gate_site, const Eigen::Matrix2cd& gate,
                                            int sweeps, double metric_cutoff = 1e-12);

/// n fractional gates (principal matrix root) whose product is the input.
std::vector<Gate> incremental_gate_schedule(const Gate& g, int n_steps);

/// Per block: one uniform-random single-qubit phase gate plus one
/// uniform-random controlled phase on a distinct pair.
Circuit random_circuit(int n_sites, int n_blocks, std::uint64_t seed);

/// Hadamards plus controlled phases pi/2^(j-i); no final swap layer, so the
/// output is in bit-reversed order relative to the textbook transform.
Circuit qft_circuit(int n_sites);

/// First-order product formula for ZZ couplings plus X and Z fields.
Circuit trotter_circuit(const HamiltonianSum& h, double dt, int n_steps);

/// Dense application of a gate list to the oracle state.
void apply_circuit_dense(StateVector& state, const Circuit& c);

struct FidelityTraces {
    std::vector<double> mps;   // per gate; empty when the method is off
    std::vector<double> rage;
};

struct SimulateOptions {
    bool run_mps = true;
    bool run_rage = true;
    int mps_sweeps = 2;
    double metric_cutoff = 1e-12;
};

/// Runs the circuit on the dense oracle and the requested ansatz methods,
/// recording the fidelity against the exact state after every gate.
FidelityTraces simulate_with_fidelity(const Circuit& c, const RageState& initial,
                                      const SimulateOptions& opts);

}  // namespace rage
