#include "rage/hamiltonians.hpp"

#include <stdexcept>
#include <string>

#include "rage/rng.hpp"

namespace rage {

namespace {

int grid_site(int lx, int x, int y) {
    return y * lx + x;
}

std::vector<std::pair<int, int>> grid_edges(int lx, int ly, bool periodic) {
    std::vector<std::pair<int, int>> edges;
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            const int s = grid_site(lx, x, y);
            if (x + 1 < lx) {
                edges.emplace_back(s, grid_site(lx, x + 1, y));
            } else if (periodic && lx > 2) {
                edges.emplace_back(s, grid_site(lx, 0, y));
            }
            if (y + 1 < ly) {
                edges.emplace_back(s, grid_site(lx, x, y + 1));
            } else if (periodic && ly > 2) {
                edges.emplace_back(s, grid_site(lx, x, 0));
            }
        }
    }
    // A periodic extent of exactly 2 still has one wrap bond per pair.
    if (periodic && lx == 2) {
        for (int y = 0; y < ly; ++y) {
            edges.emplace_back(grid_site(lx, 0, y), grid_site(lx, 1, y));
        }
    }
    if (periodic && ly == 2) {
        for (int x = 0; x < lx; ++x) {
            edges.emplace_back(grid_site(lx, x, 0), grid_site(lx, x, 1));
        }
    }
    return edges;
}

std::string two_site(int n, int a, int b, char la, char lb) {
    std::string s(n, 'I');
    s[a] = la;
    s[b] = lb;
    return s;
}

std::string one_site(int n, int a, char la) {
    std::string s(n, 'I');
    s[a] = la;
    return s;
}

}  // namespace

HamiltonianSum ising_2d(int lx, int ly, double j, double b, bool periodic) {
    if (lx < 1 || ly < 1 || lx * ly < 2) {
        throw std::invalid_argument("grid too small");
    }
    const int n = lx * ly;
    HamiltonianSum h(n);
    h.lattice = {lx, ly, periodic};
    for (const auto& [a, c] : grid_edges(lx, ly, periodic)) {
        h.add(two_site(n, a, c, 'Z', 'Z'), j);
    }
    if (b != 0.0) {
        for (int a = 0; a < n; ++a) {
            h.add(one_site(n, a, 'X'), b);
        }
    }
    return h;
}

HamiltonianSum heisenberg_2d(int lx, int ly, bool periodic) {
    if (lx < 1 || ly < 1 || lx * ly < 2) {
        throw std::invalid_argument("grid too small");
    }
    const int n = lx * ly;
    HamiltonianSum h(n);
    h.lattice = {lx, ly, periodic};
    for (const auto& [a, c] : grid_edges(lx, ly, periodic)) {
        h.add(two_site(n, a, c, 'X', 'X'), 1.0);
        h.add(two_site(n, a, c, 'Y', 'Y'), 1.0);
        h.add(two_site(n, a, c, 'Z', 'Z'), 1.0);
    }
    return h;
}

HamiltonianSum spin_glass_2d(int lx, int ly, std::uint64_t seed) {
    if (lx < 1 || ly < 1 || lx * ly < 2) {
        throw std::invalid_argument("grid too small");
    }
    const int n = lx * ly;
    HamiltonianSum h(n);
    h.lattice = {lx, ly, false};
    Rng rng(seed);
    for (const auto& [a, c] : grid_edges(lx, ly, false)) {
        const double j = rng.gaussian(1.0, 0.1);
        h.add(two_site(n, a, c, 'X', 'X'), j);
        h.add(two_site(n, a, c, 'Y', 'Y'), j);
        h.add(two_site(n, a, c, 'Z', 'Z'), j);
    }
    return h;
}

HamiltonianSum long_range_ising(int n, double b) {
    if (n < 2) {
        throw std::invalid_argument("chain too short");
    }
    HamiltonianSum h(n);
    h.lattice = {n, 1, false};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            h.add(two_site(n, i, j, 'Z', 'Z'), 1.0 / static_cast<double>(j - i));
        }
    }
    if (b != 0.0) {
        for (int i = 0; i < n; ++i) {
            h.add(one_site(n, i, 'X'), b);
        }
    }
    return h;
}

HamiltonianSum graph_hamiltonian(int n_sites, const std::vector<std::pair<int, int>>& edges) {
    HamiltonianSum h(n_sites);
    for (const auto& k : stabilizer_operators(n_sites, edges)) {
        h.terms.emplace_back(n_sites, k.letters, Complex(-1.0, 0.0));
    }
    return h;
}

HamiltonianSum disturbed_graph_hamiltonian(int n_sites,
                                           const std::vector<std::pair<int, int>>& edges,
                                           const std::vector<double>& fields, char axis) {
    if (static_cast<int>(fields.size()) != n_sites) {
        throw std::invalid_argument("one field per site required");
    }
    if (axis != 'X' && axis != 'Y' && axis != 'Z') {
        throw std::invalid_argument("field axis must be X, Y or Z");
    }
    HamiltonianSum h = graph_hamiltonian(n_sites, edges);
    for (int i = 0; i < n_sites; ++i) {
        if (fields[i] != 0.0) {
            h.add(one_site(n_sites, i, axis), fields[i]);
        }
    }
    return h;
}

ToricCode toric_code_hamiltonian(int lx, int ly) {
    if (lx < 2 || ly < 2) {
        throw std::invalid_argument("vertex grid must be at least 2x2");
    }
    ToricCode out;
    out.lx = lx;
    out.ly = ly;
    // Qubits on lattice edges of the periodic vertex grid: edge 0 of a
    // vertex points right, edge 1 points down.
    const int n = 2 * lx * ly;
    out.n_qubits = n;
    auto right_edge = [&](int x, int y) { return 2 * grid_site(lx, x % lx, y % ly); };
    auto down_edge = [&](int x, int y) { return 2 * grid_site(lx, x % lx, y % ly) + 1; };

    HamiltonianSum h(n);
    StabilizerGroup gens;
    gens.n_qubits = n;

    // Plaquette loops (X type): right(x,y), down(x+1,y), right(x,y+1), down(x,y).
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            std::string s(n, 'I');
            s[right_edge(x, y)] = 'X';
            s[down_edge(x + 1, y)] = 'X';
            s[right_edge(x, y + 1)] = 'X';
            s[down_edge(x, y)] = 'X';
            h.terms.emplace_back(n, s, Complex(-1.0, 0.0));
            gens.add(s, 1);
        }
    }
    // Vertex crosses (Z type): right(x,y), right(x-1,y), down(x,y), down(x,y-1);
    // the lexicographically last vertex is omitted.
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            if (x == lx - 1 && y == ly - 1) {
                continue;
            }
            std::string s(n, 'I');
            s[right_edge(x, y)] = 'Z';
            s[right_edge(x + lx - 1, y)] = 'Z';
            s[down_edge(x, y)] = 'Z';
            s[down_edge(x, y + ly - 1)] = 'Z';
            h.terms.emplace_back(n, s, Complex(-1.0, 0.0));
            gens.add(s, 1);
        }
    }
    out.hamiltonian = std::move(h);
    out.generators = std::move(gens);
    return out;
}

PerturbedToricModel kitaev_perturbed(int lx, int ly, double j, double b, char axis) {
    const ToricCode code = toric_code_hamiltonian(lx, ly);
    const StabilizerGroup completed = complete_stabilizer_group(code.generators);
    const GraphForm graph = stabilizer_to_graph(completed);

    PerturbedToricModel out;
    out.graph_edges = graph.edges;
    out.completed_generators = completed;
    HamiltonianSum h = graph_hamiltonian(code.n_qubits, graph.edges);
    for (auto& term : h.terms) {
        term.coefficient *= j;
    }
    if (b != 0.0) {
        for (int i = 0; i < code.n_qubits; ++i) {
            std::string s(code.n_qubits, 'I');
            s[i] = axis;
            h.add(s, b);
        }
    }
    out.hamiltonian = std::move(h);
    return out;
}

}  // namespace rage
