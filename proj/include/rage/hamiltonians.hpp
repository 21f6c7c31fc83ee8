#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rage/pauli.hpp"
#include "rage/wgs.hpp"

namespace rage {

/// H = J sum_<a,b> Z_a Z_b + B sum_a X_a on an lx x ly grid, row-major site
/// order.
HamiltonianSum ising_2d(int lx, int ly, double j, double b, bool periodic);

/// Nearest-neighbor XX + YY + ZZ.
HamiltonianSum heisenberg_2d(int lx, int ly, bool periodic);

/// Anti-ferromagnetic Heisenberg couplings J_ij ~ Normal(1, 0.1), open
/// boundary, seed-reproducible.
HamiltonianSum spin_glass_2d(int lx, int ly, std::uint64_t seed);

/// Open chain, sum over unordered pairs of Z_i Z_j / |i-j| plus transverse
/// X fields.
HamiltonianSum long_range_ising(int n, double b);

/// -sum_a K_a for the graph's stabilizer operators.
HamiltonianSum graph_hamiltonian(int n_sites, const std::vector<std::pair<int, int>>& edges);

/// -sum_a K_a + sum_i h_i Z_i (or X/Y via `axis`).
HamiltonianSum disturbed_graph_hamiltonian(int n_sites,
                                           const std::vector<std::pair<int, int>>& edges,
                                           const std::vector<double>& fields, char axis = 'Z');

struct ToricCode {
    int lx = 0;  // vertex grid
    int ly = 0;
    int n_qubits = 0;  // one per lattice edge
    HamiltonianSum hamiltonian;
    StabilizerGroup generators;  // independent plaquettes and crosses (one cross dropped)
};

/// Plaquette X-loops and vertex Z-crosses on a periodic vertex grid with one
/// cross omitted to keep the generating set independent.
ToricCode toric_code_hamiltonian(int lx, int ly);

struct PerturbedToricModel {
    HamiltonianSum hamiltonian;  // -J sum K_a + B sum sigma_axis in graph form
    std::vector<std::pair<int, int>> graph_edges;
    StabilizerGroup completed_generators;
};

/// Graph-form perturbed model: the toric stabilizers are completed to full
/// rank, reduced to a graph, and the graph's K_a operators carry the -J
/// part; uniform fields of strength b along `axis` perturb it.
PerturbedToricModel kitaev_perturbed(int lx, int ly, double j, double b, char axis = 'Z');

}  // namespace rage
