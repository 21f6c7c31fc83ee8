#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <rage/hamiltonians.hpp>
#include <rage/serialize.hpp>
#include <rage/state_vector.hpp>
#include <rage/tts.hpp>

using namespace rage;

namespace {

VectorXcd basis(int which) {
    VectorXcd v = VectorXcd::Zero(2);
    v(which) = 1.0;
    return v;
}

HamiltonianSum z_field(int n) {
    HamiltonianSum h(n);
    for (int i = 0; i < n; ++i) {
        std::string s(n, 'I');
        s[i] = 'Z';
        h.add(s, 1.0);
    }
    return h;
}

std::vector<MatrixXcd> identity_ops(int n) {
    return std::vector<MatrixXcd>(n, MatrixXcd::Identity(2, 2));
}

}  // namespace

TEST_CASE("six-site subcubic tree has the drawn layout") {
    const TreeTopology topo = subcubic_tree(6, 4);
    CHECK(topo.n_sites == 6);
    const auto internal = topo.internal_vertices();
    CHECK(internal.size() == 4);  // three outer tensors plus the root
    CHECK(topo.degree(topo.root) == 3);
    int outer_with_two_leaves = 0;
    for (int v : internal) {
        if (v == topo.root) {
            continue;
        }
        int leaves = 0;
        for (int e : topo.incident[v]) {
            if (topo.edges[e].dim == 0) {
                ++leaves;
            }
        }
        CHECK(topo.degree(v) == 3);
        if (leaves == 2) {
            ++outer_with_two_leaves;
        }
    }
    CHECK(outer_with_two_leaves == 3);
}

TEST_CASE("two-site subcubic tree is a single tensor with two physical legs") {
    const TreeTopology topo = subcubic_tree(2, 4);
    CHECK(topo.internal_vertices().size() == 1);
    CHECK(topo.degree(topo.root) == 2);
}

TEST_CASE("sixteen-site subcubic tree structure") {
    const TreeTopology topo = subcubic_tree(16, 3);
    CHECK(topo.n_sites == 16);
    int leaves = 0;
    for (int v = 0; v < topo.n_vertices; ++v) {
        if (topo.is_leaf(v)) {
            ++leaves;
        } else {
            CHECK(topo.degree(v) <= 3);
            CHECK(topo.degree(v) >= 2);
        }
    }
    CHECK(leaves == 16);
    CHECK(static_cast<int>(topo.edges.size()) == topo.n_vertices - 1);
}

TEST_CASE("chain tree is a path") {
    const TreeTopology topo = chain_tree(3, 4);
    int bonds = 0;
    for (const auto& e : topo.edges) {
        if (e.dim != 0) {
            ++bonds;
        }
    }
    CHECK(bonds == 2);
}

TEST_CASE("chain-tree TTS expands to the equivalent open MPS") {
    Rng rng(21);
    const int n = 5;
    const TreeTopology topo = chain_tree(n, 3);
    const TtsState t = TtsState::random(topo, 2, rng);

    // Rebuild the open MPS from the same tensors, axis-matched via the
    // incident-edge roles.
    std::vector<DenseTensor> sites;
    for (int pos = 0; pos < n; ++pos) {
        const auto [vertex, edge] = topo.site_attachment(pos);
        const DenseTensor& a = t.tensor(vertex);
        std::vector<int> inc = topo.incident[vertex];
        int leaf_axis = -1, left_axis = -1, right_axis = -1;
        for (std::size_t j = 0; j < inc.size(); ++j) {
            const auto& e = topo.edges[inc[j]];
            if (e.dim == 0) {
                leaf_axis = static_cast<int>(j);
                continue;
            }
            const int other = topo.other_end(inc[j], vertex);
            bool is_left = false;
            for (int f : topo.incident[other]) {
                if (topo.edges[f].dim == 0 &&
                    topo.leaf_site[topo.other_end(f, other)] == pos - 1) {
                    is_left = true;
                }
            }
            (is_left ? left_axis : right_axis) = static_cast<int>(j);
        }
        std::vector<std::size_t> perm;
        auto push = [&](int axis) {
            if (axis >= 0) {
                perm.push_back(static_cast<std::size_t>(axis));
            }
        };
        push(left_axis);
        push(right_axis);
        push(leaf_axis);
        DenseTensor arranged = a.transpose(perm);
        if (left_axis < 0) {
            arranged = arranged.reshape({1, arranged.dim(0), arranged.dim(1)});
        } else if (right_axis < 0) {
            arranged = arranged.reshape({arranged.dim(0), 1, arranged.dim(1)});
        }
        sites.push_back(arranged);
    }
    const MpsState mps(Boundary::open, 2, std::move(sites));
    const StateVector a = expand(t);
    const StateVector b = expand(mps);
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        CHECK(std::abs(a.amplitudes()(i) - b.amplitudes()(i)) < 1e-12);
    }
}

TEST_CASE("product expectation of identities is the norm") {
    Rng rng(22);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    CHECK(tts_product_expectation(t, identity_ops(6)).real() ==
          doctest::Approx(tts_norm_squared(t)).epsilon(1e-12));
    CHECK(tts_norm_squared(t) == doctest::Approx(1.0).epsilon(1e-10));  // normalized
}

TEST_CASE("sigma_z product on the all-zero product state") {
    const TreeTopology topo = subcubic_tree(6, 2);
    const TtsState t =
        TtsState::product_state(topo, std::vector<VectorXcd>(6, basis(0)));
    std::vector<MatrixXcd> ops(6, MatrixXcd(PauliString::letter_matrix('Z')));
    CHECK(tts_product_expectation(t, ops).real() == doctest::Approx(1.0));
}

TEST_CASE("random product observables match the oracle") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const TreeTopology topo = subcubic_tree(8, 3);
        const TtsState t = TtsState::random(topo, 2, rng);
        std::vector<MatrixXcd> ops;
        ProductOperator op;
        for (int i = 0; i < 8; ++i) {
            MatrixXcd o(2, 2);
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    o(r, c) = rng.uniform_complex();
                }
            }
            ops.push_back(o);
            op.site_ops[i] = o;
        }
        const Complex direct = tts_product_expectation(t, ops);
        const Complex ref = product_expectation(expand(t), op);
        CHECK(std::abs(direct - ref) < 1e-10);
    }
}

TEST_CASE("effective pair identities") {
    Rng rng(24);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    HamiltonianSum identity(6);
    identity.add("IIIIII", 1.0);
    const int vertex = topo.root;
    const EffectivePair pair = tts_effective_pair(t, vertex, identity);
    CHECK((pair.h - pair.metric).cwiseAbs().maxCoeff() < 1e-12);

    const HamiltonianSum h = ising_2d(2, 3, 1.0, 0.6, false);
    const EffectivePair hp = tts_effective_pair(t, vertex, h);
    const DenseTensor& a = t.tensor(vertex);
    VectorXcd x(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        x(static_cast<Eigen::Index>(i)) = a[i];
    }
    const double norm2 = tts_norm_squared(t);
    const double energy = exact_expectation(expand(t), h);
    CHECK((x.adjoint() * hp.metric * x)(0, 0).real() == doctest::Approx(norm2).epsilon(1e-9));
    CHECK((x.adjoint() * hp.h * x)(0, 0).real() ==
          doctest::Approx(energy * norm2).epsilon(1e-9));
}

TEST_CASE("canonicalization: preserved state and unit metric at any center") {
    Rng rng(25);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    for (int v : topo.internal_vertices()) {
        const TtsState canon = tts_canonicalize(t, v);
        CHECK(fidelity(expand(t), expand(canon)) == doctest::Approx(1.0).epsilon(1e-10));
        const EffectivePair pair = tts_effective_pair_products(canon, v, {});
        const MatrixXcd id = MatrixXcd::Identity(pair.metric.rows(), pair.metric.cols());
        CHECK((pair.metric - id).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("non-center tensors satisfy the isometry relation") {
    Rng rng(29);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    const int center = topo.root;
    const TtsState canon = tts_canonicalize(t, center);
    const TreeTopology& ct = canon.topology();
    for (int v : ct.internal_vertices()) {
        if (v == center) {
            continue;
        }
        // Find the edge toward the center (BFS parent).
        // The tensor contracted with its conjugate over all other axes must
        // give the identity on that axis.
        std::vector<int> dist(ct.n_vertices, -1);
        std::vector<int> toward(ct.n_vertices, -1);
        std::vector<int> queue{center};
        dist[center] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            for (int e : ct.incident[u]) {
                if (ct.edges[e].dim == 0) continue;
                const int w = ct.other_end(e, u);
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    toward[w] = e;
                    queue.push_back(w);
                }
            }
        }
        const DenseTensor& a = canon.tensor(v);
        int pos = -1;
        for (std::size_t j = 0; j < ct.incident[v].size(); ++j) {
            if (ct.incident[v][j] == toward[v]) {
                pos = static_cast<int>(j);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t j = 0; j < a.rank(); ++j) {
            if (static_cast<int>(j) != pos) {
                pairs.push_back({j, j});
            }
        }
        const DenseTensor gram = DenseTensor::contract(a, a.conjugate(), pairs);
        const std::size_t d = a.dim(static_cast<std::size_t>(pos));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const Complex expected = (i == j) ? Complex(1, 0) : Complex(0, 0);
                CHECK(std::abs(gram.at({i, j}) - expected) < 1e-10);
            }
        }
    }
}

TEST_CASE("product states canonicalize to themselves up to gauge") {
    const TreeTopology topo = subcubic_tree(4, 3);
    const TtsState t =
        TtsState::product_state(topo, std::vector<VectorXcd>(4, basis(1)));
    const TtsState canon = tts_canonicalize(t, topo.root);
    CHECK(fidelity(expand(t), expand(canon)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sweep reaches the product ground state of a field sum") {
    Rng rng(26);
    const TreeTopology topo = subcubic_tree(6, 2);
    const TtsState init = TtsState::random(topo, 2, rng);
    const auto [final_state, trace] = tts_sweep_minimize(init, z_field(6), 3, 1e-8);
    CHECK(trace.energies.back() == doctest::Approx(-6.0).epsilon(1e-8));
    for (std::size_t i = 1; i < trace.energies.size(); ++i) {
        CHECK(trace.energies[i] <= trace.energies[i - 1] + 1e-10);
    }
}

TEST_CASE("sweep converges on a small transverse Ising chain") {
    Rng rng(27);
    HamiltonianSum h(6);
    for (int i = 0; i + 1 < 6; ++i) {
        std::string s(6, 'I');
        s[i] = 'Z';
        s[i + 1] = 'Z';
        h.add(s, 1.0);
    }
    for (int i = 0; i < 6; ++i) {
        std::string s(6, 'I');
        s[i] = 'X';
        h.add(s, 1.0);
    }
    const double exact = exact_ground_state(h).energy;
    const TreeTopology topo = chain_tree(6, 8);
    const TtsState init = TtsState::random(topo, 2, rng);
    const auto [final_state, trace] = tts_sweep_minimize(init, h, 25, 1e-10);
    CHECK(std::abs(trace.energies.back() - exact) / std::abs(exact) < 1e-6);
}

TEST_CASE("tts serialization round trip") {
    Rng rng(28);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    std::stringstream buffer;
    write_tts(buffer, t);
    const TtsState back = read_tts(buffer);
    CHECK(fidelity(expand(t), expand(back)) == doctest::Approx(1.0).epsilon(1e-12));
}
