#include "rage/tts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <tuple>

#include "rage/linalg.hpp"

namespace rage {

TtsState::TtsState(TreeTopology topology, int local_dim, std::map<int, DenseTensor> tensors)
    : topo_(std::move(topology)), local_dim_(local_dim), tensors_(std::move(tensors)) {
    topo_.validate();
    check_consistent();
}

std::vector<std::size_t> TtsState::expected_shape(int vertex) const {
    std::vector<std::size_t> shape;
    for (int e : topo_.incident[vertex]) {
        const auto& edge = topo_.edges[e];
        shape.push_back(edge.dim == 0 ? static_cast<std::size_t>(local_dim_) : edge.dim);
    }
    return shape;
}

void TtsState::check_consistent() const {
    if (local_dim_ < 2) {
        throw std::invalid_argument("local dimension must be >= 2");
    }
    for (int v : topo_.internal_vertices()) {
        auto it = tensors_.find(v);
        if (it == tensors_.end()) {
            throw std::invalid_argument("missing tensor for internal vertex");
        }
        if (it->second.shape() != expected_shape(v)) {
            throw std::invalid_argument("tensor shape does not match incident edges");
        }
    }
}

const DenseTensor& TtsState::tensor(int vertex) const {
    auto it = tensors_.find(vertex);
    if (it == tensors_.end()) {
        throw std::invalid_argument("vertex has no tensor");
    }
    return it->second;
}

void TtsState::set_tensor(int vertex, DenseTensor t) {
    tensors_.at(vertex) = std::move(t);
}

TtsState TtsState::random(const TreeTopology& topology, int local_dim, Rng& rng,
                          bool normalized) {
    std::map<int, DenseTensor> tensors;
    for (int v : topology.internal_vertices()) {
        std::vector<std::size_t> shape;
        for (int e : topology.incident[v]) {
            const auto& edge = topology.edges[e];
            shape.push_back(edge.dim == 0 ? static_cast<std::size_t>(local_dim) : edge.dim);
        }
        tensors.emplace(v, DenseTensor::random(shape, rng));
    }
    TtsState t(topology, local_dim, std::move(tensors));
    if (normalized) {
        const double n2 = tts_norm_squared(t);
        if (n2 > 0.0) {
            const int count = static_cast<int>(topology.internal_vertices().size());
            const double scale = std::pow(n2, -0.5 / count);
            for (int v : topology.internal_vertices()) {
                t.set_tensor(v, t.tensor(v).scaled(scale));
            }
        }
    }
    return t;
}

TtsState TtsState::product_state(const TreeTopology& topology,
                                 const std::vector<VectorXcd>& local_states) {
    if (static_cast<int>(local_states.size()) != topology.n_sites) {
        throw std::invalid_argument("one local state per site required");
    }
    const int q = static_cast<int>(local_states.front().size());
    TreeTopology topo = topology;
    for (auto& e : topo.edges) {
        if (e.dim != 0) {
            e.dim = 1;
        }
    }
    std::map<int, DenseTensor> tensors;
    for (int v : topo.internal_vertices()) {
        std::vector<std::size_t> shape;
        std::vector<int> leaf_axes;
        std::vector<int> leaf_sites;
        for (std::size_t j = 0; j < topo.incident[v].size(); ++j) {
            const int e = topo.incident[v][j];
            if (topo.edges[e].dim == 0) {
                shape.push_back(static_cast<std::size_t>(q));
                leaf_axes.push_back(static_cast<int>(j));
                leaf_sites.push_back(topo.leaf_site[topo.other_end(e, v)]);
            } else {
                shape.push_back(1);
            }
        }
        DenseTensor t(shape);
        std::vector<std::size_t> idx(shape.size(), 0);
        const std::size_t total = t.size();
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t tmp = flat;
            for (std::size_t j = shape.size(); j-- > 0;) {
                idx[j] = tmp % shape[j];
                tmp /= shape[j];
            }
            Complex val(1.0, 0.0);
            for (std::size_t a = 0; a < leaf_axes.size(); ++a) {
                val *= local_states[leaf_sites[a]](static_cast<Eigen::Index>(idx[leaf_axes[a]]));
            }
            t[flat] = val;
        }
        tensors.emplace(v, std::move(t));
    }
    return TtsState(std::move(topo), q, std::move(tensors));
}

namespace {

int axis_of(const std::vector<int>& labels, int label) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) {
            return static_cast<int>(i);
        }
    }
    throw std::logic_error("label not found");
}

MatrixXcd op_for_site(const ProductOperator* op, int site, int q) {
    if (op != nullptr) {
        auto it = op->site_ops.find(site);
        if (it != op->site_ops.end()) {
            return it->second;
        }
    }
    return MatrixXcd::Identity(q, q);
}

// Cache of directed subtree blocks, keyed by (edge, toward). term index -1
// addresses the identity (metric) blocks.
struct BlockCache {
    std::map<std::tuple<int, int, int>, MatrixXcd> blocks;
    const std::vector<ProductOperator>* products = nullptr;

    void invalidate(const TreeTopology& topo, int vertex) {
        for (auto it = blocks.begin(); it != blocks.end();) {
            const auto& [term, edge, toward] = it->first;
            bool hit = false;
            for (int u : topo.far_component(edge, toward)) {
                if (u == vertex) {
                    hit = true;
                    break;
                }
            }
            it = hit ? blocks.erase(it) : std::next(it);
        }
    }
};

// Block for the subtree across `edge` from `toward`: B[ket, bra] with
// ket/bra the edge index of the ket and conjugated tensors.
MatrixXcd subtree_block(const TtsState& t, int edge, int toward, const ProductOperator* op,
                        int term_index, BlockCache* cache) {
    if (cache != nullptr) {
        auto it = cache->blocks.find({term_index, edge, toward});
        if (it != cache->blocks.end()) {
            return it->second;
        }
    }
    const TreeTopology& topo = t.topology();
    const int w = topo.other_end(edge, toward);
    const DenseTensor& a = t.tensor(w);
    const int q = t.local_dim();

    DenseTensor m = a;
    std::vector<int> labels = topo.incident[w];
    const int bra_offset = static_cast<int>(topo.edges.size()) + 1;
    for (int f : topo.incident[w]) {
        if (f == edge) {
            continue;
        }
        const int pos = axis_of(labels, f);
        DenseTensor factor({1});
        if (topo.edges[f].dim == 0) {
            const int site = topo.leaf_site[topo.other_end(f, w)];
            const MatrixXcd o = op_for_site(op, site, q);
            factor = DenseTensor::from_matrix(o, {static_cast<std::size_t>(q)},
                                              {static_cast<std::size_t>(q)});
        } else {
            const MatrixXcd b = subtree_block(t, f, w, op, term_index, cache);
            factor = DenseTensor::from_matrix(b, {static_cast<std::size_t>(b.rows())},
                                              {static_cast<std::size_t>(b.cols())});
        }
        // Leaf ops are (bra, ket): contract the ket axis; blocks are
        // (ket, bra): contract the ket axis as well.
        const std::size_t contract_axis = (topo.edges[f].dim == 0) ? 1 : 0;
        m = DenseTensor::contract(m, factor, {{static_cast<std::size_t>(pos), contract_axis}});
        labels.erase(labels.begin() + pos);
        labels.push_back(f + bra_offset);
    }

    // Close with the conjugated tensor over all bra labels.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j < topo.incident[w].size(); ++j) {
        const int f = topo.incident[w][j];
        if (f == edge) {
            continue;
        }
        pairs.push_back({static_cast<std::size_t>(axis_of(labels, f + bra_offset)), j});
    }
    const DenseTensor closed = DenseTensor::contract(m, a.conjugate(), pairs);
    // Remaining axes: the edge index from m (ket) and from conj(a) (bra).
    MatrixXcd out = closed.as_matrix(1);
    if (cache != nullptr) {
        cache->blocks.emplace(std::make_tuple(term_index, edge, toward), out);
    }
    return out;
}

// Full contraction of <psi| prod O |psi> rooted at an internal vertex.
Complex contract_all(const TtsState& t, const ProductOperator* op) {
    const TreeTopology& topo = t.topology();
    const int r = topo.root;
    const DenseTensor& a = t.tensor(r);
    const int q = t.local_dim();

    DenseTensor m = a;
    std::vector<int> labels = topo.incident[r];
    const int bra_offset = static_cast<int>(topo.edges.size()) + 1;
    for (int f : topo.incident[r]) {
        const int pos = axis_of(labels, f);
        DenseTensor factor({1});
        std::size_t contract_axis = 0;
        if (topo.edges[f].dim == 0) {
            const int site = topo.leaf_site[topo.other_end(f, r)];
            const MatrixXcd o = op_for_site(op, site, q);
            factor = DenseTensor::from_matrix(o, {static_cast<std::size_t>(q)},
                                              {static_cast<std::size_t>(q)});
            contract_axis = 1;
        } else {
            const MatrixXcd b = subtree_block(t, f, r, op, -2, nullptr);
            factor = DenseTensor::from_matrix(b, {static_cast<std::size_t>(b.rows())},
                                              {static_cast<std::size_t>(b.cols())});
        }
        m = DenseTensor::contract(m, factor, {{static_cast<std::size_t>(pos), contract_axis}});
        labels.erase(labels.begin() + pos);
        labels.push_back(f + bra_offset);
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j < topo.incident[r].size(); ++j) {
        const int f = topo.incident[r][j];
        pairs.push_back({static_cast<std::size_t>(axis_of(labels, f + bra_offset)), j});
    }
    const DenseTensor closed = DenseTensor::contract(m, a.conjugate(), pairs);
    return closed[0];
}

}  // namespace

double tts_norm_squared(const TtsState& t) {
    return contract_all(t, nullptr).real();
}

Complex tts_product_expectation(const TtsState& t, const std::vector<MatrixXcd>& site_ops) {
    if (static_cast<int>(site_ops.size()) != t.n_sites()) {
        throw std::invalid_argument("one operator per site required");
    }
    ProductOperator op;
    for (int s = 0; s < t.n_sites(); ++s) {
        if (site_ops[s].rows() != t.local_dim() || site_ops[s].cols() != t.local_dim()) {
            throw std::invalid_argument("operator dimension mismatch");
        }
        op.site_ops[s] = site_ops[s];
    }
    return contract_all(t, &op);
}

Complex tts_product_value(const TtsState& t, const ProductOperator& op) {
    return op.coefficient * contract_all(t, &op);
}

namespace {

// factors[j](ket, bra) per incident axis; builds sum_j-products quadratic form.
void accumulate_vertex_form(MatrixXcd& target, const std::vector<MatrixXcd>& factors,
                            const std::vector<std::size_t>& dims, Complex coeff) {
    const std::size_t k = dims.size();
    const std::size_t total = target.rows();
    std::vector<std::size_t> ket(k), bra(k);
    for (std::size_t kf = 0; kf < total; ++kf) {
        std::size_t tmp = kf;
        for (std::size_t j = k; j-- > 0;) {
            ket[j] = tmp % dims[j];
            tmp /= dims[j];
        }
        for (std::size_t bf = 0; bf < total; ++bf) {
            tmp = bf;
            for (std::size_t j = k; j-- > 0;) {
                bra[j] = tmp % dims[j];
                tmp /= dims[j];
            }
            Complex val = coeff;
            for (std::size_t j = 0; j < k && val != Complex(0.0, 0.0); ++j) {
                val *= factors[j](static_cast<Eigen::Index>(ket[j]),
                                  static_cast<Eigen::Index>(bra[j]));
            }
            target(static_cast<Eigen::Index>(bf), static_cast<Eigen::Index>(kf)) += val;
        }
    }
}

EffectivePair effective_pair_impl(const TtsState& t, int vertex,
                                  const std::vector<ProductOperator>& products,
                                  BlockCache* cache) {
    const TreeTopology& topo = t.topology();
    if (vertex < 0 || vertex >= topo.n_vertices || topo.is_leaf(vertex)) {
        throw std::invalid_argument("effective pair requires an internal vertex");
    }
    const int q = t.local_dim();
    const std::vector<std::size_t> dims = t.expected_shape(vertex);
    std::size_t total = 1;
    for (std::size_t d : dims) {
        total *= d;
    }
    EffectivePair out;
    out.h = MatrixXcd::Zero(total, total);
    out.metric = MatrixXcd::Zero(total, total);

    auto factors_for = [&](const ProductOperator* op, int term_index) {
        std::vector<MatrixXcd> factors;
        for (int f : topo.incident[vertex]) {
            if (topo.edges[f].dim == 0) {
                const int site = topo.leaf_site[topo.other_end(f, vertex)];
                // store as (ket, bra): transpose of <bra|O|ket>
                factors.push_back(op_for_site(op, site, q).transpose());
            } else {
                factors.push_back(subtree_block(t, f, vertex, op, term_index, cache));
            }
        }
        return factors;
    };

    accumulate_vertex_form(out.metric, factors_for(nullptr, -1), dims, Complex(1.0, 0.0));
    for (std::size_t ti = 0; ti < products.size(); ++ti) {
        accumulate_vertex_form(out.h, factors_for(&products[ti], static_cast<int>(ti)), dims,
                               products[ti].coefficient);
    }
    return out;
}

}  // namespace

EffectivePair tts_effective_pair_products(const TtsState& t, int vertex,
                                          const std::vector<ProductOperator>& products) {
    return effective_pair_impl(t, vertex, products, nullptr);
}

EffectivePair tts_effective_pair(const TtsState& t, int vertex, const HamiltonianSum& h) {
    std::vector<ProductOperator> products;
    for (const auto& term : h.terms) {
        products.push_back(ProductOperator::from_pauli(term));
    }
    return tts_effective_pair_products(t, vertex, products);
}

namespace {

// QR the tensor at u toward `edge`, absorbing R into the far tensor. The
// represented state is unchanged; the edge dimension may shrink.
void absorb_toward(TtsState& t, int u, int edge) {
    const TreeTopology& topo = t.topology();
    const int pos = axis_of(topo.incident[u], edge);
    const DenseTensor a = t.tensor(u);
    const std::size_t rank = a.rank();
    const std::size_t d_old = a.dim(static_cast<std::size_t>(pos));

    std::vector<std::size_t> perm;
    std::vector<std::size_t> other_dims;
    for (std::size_t j = 0; j < rank; ++j) {
        if (static_cast<int>(j) != pos) {
            perm.push_back(j);
            other_dims.push_back(a.dim(j));
        }
    }
    perm.push_back(static_cast<std::size_t>(pos));
    const QrPair qr = qr_reduce(a.transpose(perm).as_matrix(rank - 1));
    const std::size_t rnew = static_cast<std::size_t>(qr.q.cols());

    // New tensor at u: Q with the edge axis (now rnew wide) back at `pos`.
    std::vector<std::size_t> inv(rank);
    for (std::size_t j = 0; j < rank; ++j) {
        inv[perm[j]] = j;
    }
    DenseTensor qt = DenseTensor::from_matrix(qr.q, other_dims, {rnew}).transpose(inv);

    // Absorb R into the far tensor over its edge axis.
    const int w = topo.other_end(edge, u);
    const int posw = axis_of(topo.incident[w], edge);
    const DenseTensor rt = DenseTensor::from_matrix(qr.r, {rnew}, {d_old});
    DenseTensor wt = DenseTensor::contract(t.tensor(w), rt,
                                           {{static_cast<std::size_t>(posw), 1}});
    std::vector<std::size_t> wperm;
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < wt.rank(); ++j) {
        if (static_cast<int>(j) == posw) {
            wperm.push_back(wt.rank() - 1);
        } else {
            wperm.push_back(cursor);
            ++cursor;
        }
    }
    t.set_tensor(u, std::move(qt));
    t.set_tensor(w, wt.transpose(wperm));
    t.set_edge_dim(edge, rnew);
}

std::vector<int> path_between(const TreeTopology& topo, int from, int to) {
    // BFS over internal vertices through bond edges.
    std::vector<int> parent(topo.n_vertices, -1);
    std::vector<int> parent_edge(topo.n_vertices, -1);
    std::vector<int> queue{from};
    parent[from] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        if (u == to) {
            break;
        }
        for (int e : topo.incident[u]) {
            if (topo.edges[e].dim == 0) {
                continue;
            }
            const int w = topo.other_end(e, u);
            if (parent[w] < 0) {
                parent[w] = u;
                parent_edge[w] = e;
                queue.push_back(w);
            }
        }
    }
    std::vector<int> path{to};
    int cur = to;
    while (cur != from) {
        cur = parent[cur];
        path.push_back(cur);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

double products_energy_tts(const TtsState& t, const std::vector<ProductOperator>& products) {
    Complex num(0.0, 0.0);
    for (const auto& op : products) {
        num += tts_product_value(t, op);
    }
    return num.real() / tts_norm_squared(t);
}

DenseTensor tensor_from_vector(const VectorXcd& x, const std::vector<std::size_t>& dims) {
    DenseTensor t(dims);
    for (std::size_t i = 0; i < static_cast<std::size_t>(x.size()); ++i) {
        t[i] = x(static_cast<Eigen::Index>(i));
    }
    return t;
}

}  // namespace

TtsState tts_canonicalize(const TtsState& input, int center_vertex) {
    const TreeTopology& topo = input.topology();
    if (center_vertex < 0 || center_vertex >= topo.n_vertices || topo.is_leaf(center_vertex)) {
        throw std::invalid_argument("center must be an internal vertex");
    }
    TtsState t = input;
    // BFS distances from the center over bond edges.
    std::vector<int> dist(topo.n_vertices, -1);
    std::vector<int> toward(topo.n_vertices, -1);  // edge toward the center
    std::vector<int> queue{center_vertex};
    dist[center_vertex] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int e : topo.incident[u]) {
            if (topo.edges[e].dim == 0) {
                continue;
            }
            const int w = topo.other_end(e, u);
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                toward[w] = e;
                queue.push_back(w);
            }
        }
    }
    std::vector<int> order = topo.internal_vertices();
    std::sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
    for (int v : order) {
        if (v == center_vertex) {
            continue;
        }
        absorb_toward(t, v, toward[v]);
    }
    return t;
}

std::vector<int> tts_sweep_order(const TreeTopology& topo) {
    std::vector<int> order;
    std::vector<bool> seen(topo.n_vertices, false);
    std::function<void(int)> dfs = [&](int v) {
        seen[v] = true;
        order.push_back(v);
        for (int e : topo.incident[v]) {
            if (topo.edges[e].dim == 0) {
                continue;
            }
            const int w = topo.other_end(e, v);
            if (!seen[w]) {
                dfs(w);
            }
        }
    };
    dfs(topo.root);
    return order;
}

std::pair<TtsState, SweepTrace> tts_sweep_minimize_products(
    const TtsState& input, const std::vector<ProductOperator>& products,
    const SweepOptions& opts) {
    if (opts.max_sweeps < 1) {
        throw std::invalid_argument("max_sweeps must be >= 1");
    }
    const std::vector<int> order = tts_sweep_order(input.topology());
    TtsState t = tts_canonicalize(input, order.front());
    int center = order.front();

    SweepTrace trace;
    trace.energies.push_back(products_energy_tts(t, products));

    BlockCache cache;
    auto move_center = [&](int target) {
        if (target == center) {
            return;
        }
        const std::vector<int> path = path_between(t.topology(), center, target);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            int edge = -1;
            for (int e : t.topology().incident[path[i]]) {
                if (t.topology().edges[e].dim != 0 &&
                    t.topology().other_end(e, path[i]) == path[i + 1]) {
                    edge = e;
                    break;
                }
            }
            absorb_toward(t, path[i], edge);
            cache.invalidate(t.topology(), path[i]);
            cache.invalidate(t.topology(), path[i + 1]);
        }
        center = target;
    };

    auto update_vertex = [&](int v) {
        move_center(v);
        const EffectivePair pair = effective_pair_impl(t, v, products, &cache);
        try {
            const GeneralizedEigSolution sol = solve_generalized_eig_min(
                (pair.h + pair.h.adjoint()) * 0.5, pair.metric, opts.metric_cutoff);
            t.set_tensor(v, tensor_from_vector(sol.eigenvector, t.expected_shape(v)));
            cache.invalidate(t.topology(), v);
            trace.energies.push_back(sol.eigenvalue);
        } catch (const std::runtime_error&) {
            ++trace.skipped_updates;
        }
    };

    double sweep_energy = trace.energies.front();
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int v : order) {
            update_vertex(v);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            update_vertex(*it);
        }
        trace.sweeps_run = sweep + 1;
        const double current = trace.energies.back();
        const double scale = std::max(1.0, std::abs(current));
        if (std::abs(current - sweep_energy) < opts.rel_tol * scale) {
            trace.converged = true;
            break;
        }
        sweep_energy = current;
    }
    return {std::move(t), std::move(trace)};
}

std::pair<TtsState, SweepTrace> tts_sweep_minimize(const TtsState& t, const HamiltonianSum& h,
                                                   int max_sweeps, double rel_tol) {
    std::vector<ProductOperator> products;
    for (const auto& term : h.terms) {
        products.push_back(ProductOperator::from_pauli(term));
    }
    SweepOptions opts;
    opts.max_sweeps = max_sweeps;
    opts.rel_tol = rel_tol;
    return tts_sweep_minimize_products(t, products, opts);
}

}  // namespace rage
