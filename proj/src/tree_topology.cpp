#include "rage/tree_topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rage {

int TreeTopology::other_end(int edge, int v) const {
    const Edge& e = edges[edge];
    if (e.a == v) return e.b;
    if (e.b == v) return e.a;
    throw std::invalid_argument("vertex not on edge");
}

std::vector<int> TreeTopology::internal_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < n_vertices; ++v) {
        if (!is_leaf(v)) {
            out.push_back(v);
        }
    }
    return out;
}

std::pair<int, int> TreeTopology::site_attachment(int site) const {
    for (int v = 0; v < n_vertices; ++v) {
        if (leaf_site[v] == site) {
            const int e = incident[v].front();
            return {other_end(e, v), e};
        }
    }
    throw std::invalid_argument("site not found");
}

std::vector<int> TreeTopology::far_component(int edge, int v) const {
    const int start = other_end(edge, v);
    std::vector<int> out;
    std::vector<bool> seen(n_vertices, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        out.push_back(u);
        for (int e : incident[u]) {
            if (e == edge) {
                continue;
            }
            const int w = other_end(e, u);
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return out;
}

void TreeTopology::validate() const {
    if (n_vertices <= 0 || static_cast<int>(leaf_site.size()) != n_vertices ||
        static_cast<int>(incident.size()) != n_vertices) {
        throw std::invalid_argument("inconsistent topology arrays");
    }
    if (static_cast<int>(edges.size()) != n_vertices - 1) {
        throw std::invalid_argument("a tree on V vertices needs V-1 edges");
    }
    int leaves = 0;
    for (int v = 0; v < n_vertices; ++v) {
        if (is_leaf(v)) {
            ++leaves;
            if (degree(v) != 1) {
                throw std::invalid_argument("leaves must have degree 1");
            }
        } else if (degree(v) < 2 && n_vertices > 1) {
            throw std::invalid_argument("internal vertices must have degree >= 2");
        }
    }
    if (leaves != n_sites) {
        throw std::invalid_argument("leaf count must equal site count");
    }
    if (is_leaf(root)) {
        throw std::invalid_argument("root must be internal");
    }
    // Connectivity (acyclicity follows from the edge count).
    std::vector<bool> seen(n_vertices, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int visited = 0;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        ++visited;
        for (int e : incident[u]) {
            const int w = other_end(e, u);
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    if (visited != n_vertices) {
        throw std::invalid_argument("topology is not connected");
    }
}

namespace {

struct Builder {
    TreeTopology topo;

    int add_vertex(int site) {
        topo.leaf_site.push_back(site);
        topo.incident.emplace_back();
        return topo.n_vertices++;
    }

    int add_edge(int a, int b, std::size_t dim) {
        const int id = static_cast<int>(topo.edges.size());
        topo.edges.push_back({a, b, dim});
        topo.incident[a].push_back(id);
        topo.incident[b].push_back(id);
        return id;
    }
};

std::size_t capped_dim(int chi, int local_dim, int n_small_side) {
    double cap = 1.0;
    for (int i = 0; i < n_small_side && cap < static_cast<double>(chi); ++i) {
        cap *= local_dim;
    }
    return static_cast<std::size_t>(std::min<double>(chi, cap));
}

}  // namespace

TreeTopology subcubic_tree(int n_sites, int chi, int local_dim) {
    if (n_sites < 2) {
        throw std::invalid_argument("subcubic_tree needs at least 2 sites");
    }
    if (chi < 1) {
        throw std::invalid_argument("chi must be >= 1");
    }
    Builder b;
    b.topo.n_sites = n_sites;

    // Outer tensors holding two sites each (one site for an odd leftover).
    struct Cluster {
        int vertex;
        int n_sites;
    };
    std::vector<Cluster> clusters;
    for (int s = 0; s < n_sites; s += 2) {
        const int outer = b.add_vertex(-1);
        const int leaf1 = b.add_vertex(s);
        b.add_edge(outer, leaf1, 0);
        int held = 1;
        if (s + 1 < n_sites) {
            const int leaf2 = b.add_vertex(s + 1);
            b.add_edge(outer, leaf2, 0);
            held = 2;
        }
        clusters.push_back({outer, held});
    }

    // Pairwise balanced joins; only the final root may take three children.
    std::function<Cluster(std::vector<Cluster>)> join = [&](std::vector<Cluster> list) -> Cluster {
        if (list.size() == 1) {
            return list.front();
        }
        const std::size_t half = (list.size() + 1) / 2;
        std::vector<Cluster> left(list.begin(), list.begin() + half);
        std::vector<Cluster> right(list.begin() + half, list.end());
        const Cluster cl = join(std::move(left));
        const Cluster cr = join(std::move(right));
        const int u = b.add_vertex(-1);
        b.add_edge(u, cl.vertex, capped_dim(chi, local_dim, std::min(cl.n_sites, n_sites - cl.n_sites)));
        b.add_edge(u, cr.vertex, capped_dim(chi, local_dim, std::min(cr.n_sites, n_sites - cr.n_sites)));
        return {u, cl.n_sites + cr.n_sites};
    };

    if (clusters.size() == 1) {
        b.topo.root = clusters.front().vertex;
    } else if (clusters.size() == 3) {
        const int u = b.add_vertex(-1);
        for (const Cluster& c : clusters) {
            b.add_edge(u, c.vertex, capped_dim(chi, local_dim, std::min(c.n_sites, n_sites - c.n_sites)));
        }
        b.topo.root = u;
    } else {
        b.topo.root = join(clusters).vertex;
    }
    b.topo.validate();
    return b.topo;
}

TreeTopology chain_tree(int n_sites, int chi, int local_dim) {
    if (n_sites < 2) {
        throw std::invalid_argument("chain_tree needs at least 2 sites");
    }
    if (chi < 1) {
        throw std::invalid_argument("chi must be >= 1");
    }
    Builder b;
    b.topo.n_sites = n_sites;
    int prev = -1;
    for (int s = 0; s < n_sites; ++s) {
        const int v = b.add_vertex(-1);
        const int leaf = b.add_vertex(s);
        b.add_edge(v, leaf, 0);
        if (prev >= 0) {
            b.add_edge(prev, v, capped_dim(chi, local_dim, std::min(s, n_sites - s)));
        }
        prev = v;
    }
    b.topo.root = 0;
    b.topo.validate();
    return b.topo;
}

}  // namespace rage
