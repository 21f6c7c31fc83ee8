#pragma once

#include <cstddef>
#include <vector>

namespace rage {

/// Tree of internal tensor vertices and leaf vertices carrying the physical
/// sites. Edges between internal vertices are bonds with an explicit
/// dimension; an edge to a leaf is a physical index (dimension fixed by the
/// owning state's local dimension, stored as 0 here).
struct TreeTopology {
    struct Edge {
        int a = -1;
        int b = -1;
        std::size_t dim = 0;  // 0 marks a physical (leaf) edge
    };

    int n_vertices = 0;
    int n_sites = 0;
    int root = 0;  // an internal vertex; sweep traversals start here
    std::vector<Edge> edges;
    std::vector<int> leaf_site;               // per vertex: site id, or -1 if internal
    std::vector<std::vector<int>> incident;   // per vertex: incident edge ids, tensor index order

    bool is_leaf(int v) const { return leaf_site[v] >= 0; }
    int other_end(int edge, int v) const;
    int degree(int v) const { return static_cast<int>(incident[v].size()); }
    std::vector<int> internal_vertices() const;
    /// Internal vertex the given physical site hangs off, and the edge id.
    std::pair<int, int> site_attachment(int site) const;

    /// Vertices in the component containing `other_end(edge, v)` when the
    /// edge is removed; used for cache invalidation and structure checks.
    std::vector<int> far_component(int edge, int v) const;

    void validate() const;  // connected, acyclic, leaf/internal degree rules
};

/// Subcubic tree: leaves are paired two per outer tensor (one spare leaf for
/// odd counts) and the outer tensors are joined pairwise into a balanced
/// tree; internal vertices keep degree <= 3. Bond dimensions are chi capped
/// by the rank a bipartition can carry.
TreeTopology subcubic_tree(int n_sites, int chi, int local_dim = 2);

/// Path of internal vertices, one leaf each; the flat-tree layout whose
/// instantiation is an open-boundary MPS. Bonds capped like subcubic_tree.
TreeTopology chain_tree(int n_sites, int chi, int local_dim = 2);

}  // namespace rage
