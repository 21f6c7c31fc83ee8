#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rage/hamiltonians.hpp>
#include <rage/mps.hpp>
#include <rage/rage_state.hpp>
#include <rage/state_vector.hpp>
#include <rage/wgs.hpp>

using namespace rage;

namespace {

VectorXcd plus_state() {
    VectorXcd v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

RageState plus_backbone_with(const AdjacencyPhases& phases) {
    const int n = phases.n_sites();
    const MpsState m =
        MpsState::product_state(Boundary::open, std::vector<VectorXcd>(n, plus_state()));
    return RageState(m, phases, LocalRotations(n));
}

double stabilizer_expectation(const StateVector& psi, const PauliString& k) {
    HamiltonianSum h(k.n_sites);
    h.terms.push_back(k);
    return exact_expectation(psi, h);
}

std::vector<std::pair<int, int>> ring(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
    }
    return edges;
}

}  // namespace

TEST_CASE("empty edge set gives the plus product state") {
    const AdjacencyPhases phases = graph_state_phases(3, {});
    CHECK(phases.is_zero());
    const StateVector psi = expand(plus_backbone_with(phases));
    for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
        CHECK(std::abs(psi.amplitudes()(i) - Complex(1.0 / std::sqrt(8.0), 0)) < 1e-12);
    }
}

TEST_CASE("single edge gives the two-qubit graph state") {
    const AdjacencyPhases phases = graph_state_phases(2, {{0, 1}});
    const StateVector psi = expand(plus_backbone_with(phases));
    CHECK(std::abs(psi.amplitudes()(3) - Complex(-0.5, 0)) < 1e-12);
}

TEST_CASE("self-loops are rejected") {
    CHECK_THROWS_AS(graph_state_phases(3, {{1, 1}}), std::invalid_argument);
}

TEST_CASE("ring graph state satisfies all stabilizers") {
    const auto edges = ring(4);
    const AdjacencyPhases phases = graph_state_phases(4, edges);
    const StateVector psi = expand(plus_backbone_with(phases));
    for (const auto& k : stabilizer_operators(4, edges)) {
        CHECK(stabilizer_expectation(psi, k) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("stabilizer operators read off the definition") {
    const auto ops = stabilizer_operators(1, {});
    CHECK(ops[0].letters == "X");

    const auto path = stabilizer_operators(3, {{0, 1}, {1, 2}});
    CHECK(path[1].letters == "ZXZ");
}

TEST_CASE("stabilizers of random trees commute") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        // Random tree on 7 vertices.
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < 7; ++v) {
            edges.emplace_back(rng.uniform_int(v), v);
        }
        const auto ops = stabilizer_operators(7, edges);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            for (std::size_t j = i + 1; j < ops.size(); ++j) {
                CHECK(ops[i].commutes_with(ops[j]));
            }
        }
    }
}

TEST_CASE("phase layer equals direct dense gate application") {
    Rng rng(4);
    const int n = 5;
    AdjacencyPhases phases(n, 2);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            phases.set_phase(a, b, rng.uniform(0.0, 2.0 * M_PI));
        }
    }
    const MpsState m = MpsState::random(Boundary::open, n, 2, 2, rng);
    const RageState r(m, phases, LocalRotations(n));
    StateVector direct = expand(m);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            apply_dense_controlled_phase(direct, a, b, phases.phase(a, b));
        }
    }
    const StateVector layered = expand(r);
    for (Eigen::Index i = 0; i < direct.amplitudes().size(); ++i) {
        CHECK(std::abs(direct.amplitudes()(i) - layered.amplitudes()(i)) < 1e-12);
    }
}

TEST_CASE("qudit pair matrices validate their structure") {
    AdjacencyPhases phases(3, 3);
    Eigen::MatrixXd good = Eigen::MatrixXd::Zero(3, 3);
    good(1, 1) = 0.3;
    good(1, 2) = 0.7;
    good(2, 1) = 0.7;
    good(2, 2) = 1.1;
    phases.set_pair_matrix(0, 2, good);
    CHECK(phases.entry(0, 2, 1, 2) == doctest::Approx(0.7));
    CHECK(phases.entry(2, 0, 2, 1) == doctest::Approx(0.7));

    Eigen::MatrixXd bad_first_row = good;
    bad_first_row(0, 1) = 0.5;
    CHECK_THROWS_AS(phases.set_pair_matrix(0, 1, bad_first_row), std::invalid_argument);
    Eigen::MatrixXd asym = good;
    asym(1, 2) = 0.9;
    CHECK_THROWS_AS(phases.set_pair_matrix(0, 1, asym), std::invalid_argument);
}

TEST_CASE("rotation parameterization is unitary and unit-norm checked") {
    LocalRotations rot(2);
    CHECK(rot.is_identity());
    Eigen::Vector4d x(0.5, 0.5, 0.5, 0.5);
    rot.set_parameters(0, x);
    const Eigen::Matrix2cd v = rot.matrix(0);
    CHECK((v.adjoint() * v - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(rot.set_parameters(1, Eigen::Vector4d(1, 1, 0, 0)), std::invalid_argument);
}

TEST_CASE("graph-form input reduces to itself") {
    const auto edges = ring(4);
    StabilizerGroup s;
    s.n_qubits = 4;
    for (const auto& k : stabilizer_operators(4, edges)) {
        s.add(k.letters, 1);
    }
    const GraphForm form = stabilizer_to_graph(s);
    const bool same_ring =
        form.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    CHECK(same_ring);
    for (const auto& tag : form.correction_tags) {
        CHECK(tag == "I");
    }
}

TEST_CASE("GHZ stabilizers reduce to a graph passing the oracle check") {
    StabilizerGroup s;
    s.n_qubits = 3;
    s.add("XXX", 1);
    s.add("ZZI", 1);
    s.add("IZZ", 1);
    const GraphForm form = stabilizer_to_graph(s);

    // Build the graph state, apply the corrections, and verify every input
    // generator has expectation +1.
    const AdjacencyPhases phases = graph_state_phases(3, form.edges);
    StateVector psi = expand(plus_backbone_with(phases));
    for (int i = 0; i < 3; ++i) {
        apply_dense_single_qubit(psi, i, form.corrections[i]);
    }
    for (const auto& g : s.generators) {
        CHECK(stabilizer_expectation(psi, g) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("rank-deficient groups are rejected with guidance") {
    StabilizerGroup s;
    s.n_qubits = 2;
    s.add("ZZ", 1);
    s.add("ZZ", 1);
    CHECK_THROWS_AS(stabilizer_to_graph(s), std::invalid_argument);
}

TEST_CASE("completed toric generators reduce to a graph passing the oracle check") {
    const ToricCode code = toric_code_hamiltonian(2, 3);
    const StabilizerGroup completed = complete_stabilizer_group(code.generators);
    REQUIRE(completed.generators.size() == 12);
    const GraphForm form = stabilizer_to_graph(completed);

    const AdjacencyPhases phases = graph_state_phases(12, form.edges);
    StateVector psi = expand(plus_backbone_with(phases));
    for (int i = 0; i < 12; ++i) {
        apply_dense_single_qubit(psi, i, form.corrections[i]);
    }
    for (const auto& g : completed.generators) {
        CHECK(stabilizer_expectation(psi, g) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // The original (incomplete) generators are stabilizers too.
    for (const auto& g : code.generators.generators) {
        CHECK(stabilizer_expectation(psi, g) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("random graph stabilizers reduce back to themselves via oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 5 + trial;
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (rng.uniform() < 0.4) {
                    edges.emplace_back(a, b);
                }
            }
        }
        StabilizerGroup s;
        s.n_qubits = n;
        for (const auto& k : stabilizer_operators(n, edges)) {
            s.add(k.letters, 1);
        }
        const GraphForm form = stabilizer_to_graph(s);
        const AdjacencyPhases phases = graph_state_phases(n, form.edges);
        StateVector psi = expand(plus_backbone_with(phases));
        for (int i = 0; i < n; ++i) {
            apply_dense_single_qubit(psi, i, form.corrections[i]);
        }
        for (const auto& g : s.generators) {
            CHECK(stabilizer_expectation(psi, g) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}
