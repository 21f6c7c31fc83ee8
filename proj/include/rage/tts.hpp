#pragma once

#include <map>
#include <utility>
#include <vector>

#include "rage/dense_tensor.hpp"
#include "rage/mps.hpp"
#include "rage/pauli.hpp"
#include "rage/rng.hpp"
#include "rage/tree_topology.hpp"

namespace rage {

/// Tree tensor state: one tensor per internal vertex, with one index per
/// incident edge following the topology's incident-edge order. Leaf edges
/// carry the physical dimension.
class TtsState {
public:
    TtsState(TreeTopology topology, int local_dim, std::map<int, DenseTensor> tensors);

    static TtsState random(const TreeTopology& topology, int local_dim, Rng& rng,
                           bool normalized = true);
    /// Bond dimensions collapse to 1; amplitudes are the product of the
    /// given per-site vectors.
    static TtsState product_state(const TreeTopology& topology,
                                  const std::vector<VectorXcd>& local_states);

    const TreeTopology& topology() const { return topo_; }
    int n_sites() const { return topo_.n_sites; }
    int local_dim() const { return local_dim_; }

    const DenseTensor& tensor(int vertex) const;
    void set_tensor(int vertex, DenseTensor t);

    std::vector<std::size_t> expected_shape(int vertex) const;
    void check_consistent() const;

    /// Shrink a bond edge's recorded dimension (after QR absorptions).
    void set_edge_dim(int edge, std::size_t dim) { topo_.edges[edge].dim = dim; }

private:
    TreeTopology topo_;
    int local_dim_;
    std::map<int, DenseTensor> tensors_;
};

double tts_norm_squared(const TtsState& t);

/// <psi| O_1 (x) ... (x) O_N |psi> by leaf-to-root recursion (unnormalized).
Complex tts_product_expectation(const TtsState& t, const std::vector<MatrixXcd>& site_ops);

/// Same with identities implied off the operator's support.
Complex tts_product_value(const TtsState& t, const ProductOperator& op);

EffectivePair tts_effective_pair(const TtsState& t, int vertex, const HamiltonianSum& h);
EffectivePair tts_effective_pair_products(const TtsState& t, int vertex,
                                          const std::vector<ProductOperator>& products);

/// QR orthonormalization of every chain toward the center; the represented
/// state is unchanged and the metric at the center becomes the identity.
TtsState tts_canonicalize(const TtsState& t, int center_vertex);

std::pair<TtsState, SweepTrace> tts_sweep_minimize(const TtsState& t, const HamiltonianSum& h,
                                                   int max_sweeps, double rel_tol);
std::pair<TtsState, SweepTrace> tts_sweep_minimize_products(
    const TtsState& t, const std::vector<ProductOperator>& products, const SweepOptions& opts);

/// Depth-first order of internal vertices from the topology root.
std::vector<int> tts_sweep_order(const TreeTopology& topo);

}  // namespace rage
