#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rage/hamiltonians.hpp>
#include <rage/linalg.hpp>
#include <rage/mps.hpp>
#include <rage/rage_state.hpp>
#include <rage/state_vector.hpp>
#include <rage/tts.hpp>
#include <rage/wgs.hpp>

using namespace rage;

namespace {

VectorXcd plus_state() {
    VectorXcd v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

AdjacencyPhases random_phases(int n, Rng& rng) {
    AdjacencyPhases p(n, 2);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            p.set_phase(a, b, rng.uniform(0.0, 2.0 * M_PI));
        }
    }
    return p;
}

LocalRotations random_rotations(int n, Rng& rng) {
    LocalRotations rot(n);
    for (int i = 0; i < n; ++i) {
        Eigen::Vector4d x;
        for (int k = 0; k < 4; ++k) {
            x(k) = rng.uniform(-1.0, 1.0);
        }
        x.normalize();
        rot.set_parameters(i, x);
    }
    return rot;
}

std::vector<std::pair<int, int>> ring(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
    }
    return edges;
}

}  // namespace

TEST_CASE("reduced density reduces to the backbone at zero phases") {
    Rng rng(1);
    const MpsState m = MpsState::random(Boundary::closed, 6, 2, 2, rng);
    const RageState r(m, AdjacencyPhases(6, 2), LocalRotations(6));
    const MatrixXcd a = rage_reduced_density_mps(r, {1, 3});
    const MatrixXcd b = mps_reduced_density(m, {1, 3});
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("graph-state marginal is maximally mixed") {
    const MpsState m =
        MpsState::product_state(Boundary::open, std::vector<VectorXcd>(2, plus_state()));
    AdjacencyPhases phases(2, 2);
    phases.set_phase(0, 1, M_PI);
    const RageState r(m, phases, LocalRotations(2));
    const MatrixXcd rho = rage_reduced_density_mps(r, {0});
    CHECK(std::abs(rho(0, 0) - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(rho(1, 1) - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(rho(0, 1)) < 1e-12);
}

TEST_CASE("MPS-backbone reduced densities match the oracle with rotations") {
    Rng rng(2);
    for (int trial = 0; trial < 8; ++trial) {
        const MpsState m = MpsState::random(Boundary::closed, 8, 2, 2, rng);
        const RageState r(m, random_phases(8, rng), random_rotations(8, rng));
        const MatrixXcd rho = rage_reduced_density_mps(r, {2, 5});
        const MatrixXcd ref = partial_trace(expand(r), {2, 5});
        CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("TTS-backbone reduced densities at zero phases reduce to the bare evaluation") {
    Rng rng(3);
    const TreeTopology topo = subcubic_tree(6, 3);
    const TtsState t = TtsState::random(topo, 2, rng);
    const RageState r(t, AdjacencyPhases(6, 2), LocalRotations(6));
    const MatrixXcd rho = rage_reduced_density_tts(r, {1, 4});
    const MatrixXcd ref = partial_trace(expand(t), {1, 4});
    CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qudit TTS reduced densities match the dense oracle") {
    Rng rng(4);
    const int n = 4;
    const int q = 3;
    const TreeTopology topo = subcubic_tree(n, 3, q);
    const TtsState t = TtsState::random(topo, q, rng);
    AdjacencyPhases phases(n, q);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(q, q);
            for (int s = 1; s < q; ++s) {
                for (int u = s; u < q; ++u) {
                    phi(s, u) = phi(u, s) = rng.uniform(0.0, 2.0 * M_PI);
                }
            }
            phases.set_pair_matrix(a, b, phi);
        }
    }
    const RageState r(t, phases, LocalRotations(n));
    const MatrixXcd rho = rage_reduced_density_tts(r, {0, 2});
    const MatrixXcd ref = partial_trace(expand(r), {0, 2});
    CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("uniform graph phases on the subcubic plus-backbone mix connected marginals") {
    const int n = 6;
    const TreeTopology topo = subcubic_tree(n, 2);
    const TtsState t =
        TtsState::product_state(topo, std::vector<VectorXcd>(n, plus_state()));
    const AdjacencyPhases phases = graph_state_phases(n, ring(n));
    const RageState r(t, phases, LocalRotations(n));
    for (int site = 0; site < n; ++site) {
        const MatrixXcd rho = rage_reduced_density_tts(r, {site});
        CHECK(std::abs(rho(0, 0) - Complex(0.5, 0)) < 1e-10);
        CHECK(std::abs(rho(0, 1)) < 1e-10);
    }
}

TEST_CASE("rage expectation basics and oracle equivalence") {
    Rng rng(5);
    HamiltonianSum identity(6);
    identity.add("IIIIII", 1.0);
    const MpsState m = MpsState::random(Boundary::closed, 6, 2, 2, rng);
    const RageState r(m, random_phases(6, rng), random_rotations(6, rng));
    CHECK(rage_expectation(r, identity) == doctest::Approx(1.0).epsilon(1e-10));

    const HamiltonianSum h = ising_2d(3, 3, 1.0, 0.8, false);
    const MpsState m9 = MpsState::random(Boundary::closed, 9, 2, 2, rng);
    const RageState r9(m9, random_phases(9, rng), random_rotations(9, rng));
    CHECK(rage_expectation(r9, h) ==
          doctest::Approx(exact_expectation(expand(r9), h)).epsilon(1e-9));
}

TEST_CASE("graph-state RAGE state reaches the stabilizer ground energy") {
    const int n = 6;
    const auto edges = ring(n);
    const MpsState m =
        MpsState::product_state(Boundary::open, std::vector<VectorXcd>(n, plus_state()));
    const RageState r(m, graph_state_phases(n, edges), LocalRotations(n));
    const HamiltonianSum h = graph_hamiltonian(n, edges);
    CHECK(rage_expectation(r, h) == doctest::Approx(-n).epsilon(1e-10));
    // Large-support route agrees with the oracle as well.
    CHECK(exact_expectation(expand(r), h) == doctest::Approx(-n).epsilon(1e-10));
}

TEST_CASE("tensor update reduces to the bare update at zero phases") {
    Rng rng(6);
    const HamiltonianSum h = ising_2d(1, 5, 1.0, 0.9, false);
    const MpsState m = MpsState::random(Boundary::closed, 5, 2, 2, rng);
    const RageState r(m, AdjacencyPhases(5, 2), LocalRotations(5));
    const UpdateResult u = rage_optimize_tensor(r, 2, h);
    const EffectivePair pair = mps_effective_pair(m, 2, h);
    const GeneralizedEigSolution sol =
        solve_generalized_eig_min((pair.h + pair.h.adjoint()) * 0.5, pair.metric);
    CHECK(u.energy == doctest::Approx(sol.eigenvalue).epsilon(1e-10));
}

TEST_CASE("tensor updates never increase the energy") {
    Rng rng(7);
    const auto edges = ring(4);
    const HamiltonianSum h =
        disturbed_graph_hamiltonian(4, edges, std::vector<double>(4, 0.3));
    for (int trial = 0; trial < 10; ++trial) {
        const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
        const RageState r(m, graph_state_phases(4, edges), random_rotations(4, rng));
        const double before = rage_expectation(r, h);
        const UpdateResult u = rage_optimize_tensor(r, trial % 4, h);
        CHECK(u.energy <= before + 1e-10);
        CHECK(rage_expectation(u.state, h) == doctest::Approx(u.energy).epsilon(1e-9));
    }
}

TEST_CASE("converged tensor updates are fixed points") {
    Rng rng(8);
    const HamiltonianSum h = ising_2d(1, 4, 1.0, 1.0, false);
    const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
    RageState r(m, AdjacencyPhases(4, 2), LocalRotations(4));
    double energy = rage_expectation(r, h);
    for (int pass = 0; pass < 400; ++pass) {
        const double before = energy;
        for (int site = 0; site < 4; ++site) {
            const UpdateResult u = rage_optimize_tensor(r, site, h);
            r = u.state;
            energy = u.energy;
        }
        if (std::abs(before - energy) < 1e-13) {
            break;
        }
    }
    const UpdateResult again = rage_optimize_tensor(r, 0, h);
    CHECK(std::abs(again.energy - energy) < 1e-9);
}

TEST_CASE("rotation update solves the single-qubit optimum") {
    const MpsState m =
        MpsState::product_state(Boundary::open, std::vector<VectorXcd>(1, plus_state()));
    RageState r(m, AdjacencyPhases(1, 2), LocalRotations(1));
    HamiltonianSum h(1);
    h.add("Z", 1.0);
    const UpdateResult u = rage_optimize_rotation(r, 0, h);
    CHECK(u.energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(rage_expectation(u.state, h) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("rotation update leaves invariant terms unchanged") {
    Rng rng(9);
    const MpsState m = MpsState::random(Boundary::closed, 3, 2, 2, rng);
    RageState r(m, AdjacencyPhases(3, 2), LocalRotations(3));
    HamiltonianSum h(3);
    h.add("III", 2.5);  // invariant under any rotation
    const double before = rage_expectation(r, h);
    const UpdateResult u = rage_optimize_rotation(r, 1, h);
    CHECK(u.energy == doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("rotation updates are monotone across seeds") {
    Rng rng(10);
    const HamiltonianSum h = ising_2d(2, 2, 1.0, 0.7, false);
    for (int seed = 0; seed < 50; ++seed) {
        const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
        const RageState r(m, random_phases(4, rng), random_rotations(4, rng));
        const double before = rage_expectation(r, h);
        const UpdateResult u = rage_optimize_rotation(r, seed % 4, h);
        CHECK(u.energy <= before + 1e-10);
        CHECK(rage_expectation(u.state, h) == doctest::Approx(u.energy).epsilon(1e-8));
    }
}

TEST_CASE("phase coefficients vanish off the support") {
    Rng rng(11);
    const MpsState m = MpsState::random(Boundary::closed, 5, 2, 2, rng);
    const RageState r(m, random_phases(5, rng), LocalRotations(5));
    HamiltonianSum h(5);
    h.add("ZZIII", 1.0);  // diagonal: no phase dependence at all
    const PhaseOptimizationCoefficients c = rage_phase_coefficients(r, 3, 4, h);
    CHECK(std::abs(c.b) < 1e-12);
    CHECK(std::abs(c.gamma) < 1e-12);
}

TEST_CASE("phase coefficients of sigma_x on |++>") {
    const MpsState m =
        MpsState::product_state(Boundary::open, std::vector<VectorXcd>(2, plus_state()));
    const RageState r(m, AdjacencyPhases(2, 2), LocalRotations(2));
    HamiltonianSum h(2);
    h.add("XI", 1.0);
    const PhaseOptimizationCoefficients c = rage_phase_coefficients(r, 0, 1, h);
    CHECK(c.a == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(c.b == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(c.gamma) < 1e-10);
}

TEST_CASE("phase model is exactly trigonometric and the minimizer matches a dense scan") {
    Rng rng(12);
    const HamiltonianSum h = ising_2d(2, 2, 1.0, 1.1, false);
    const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
    const RageState r(m, random_phases(4, rng), random_rotations(4, rng));
    const PhaseOptimizationCoefficients c = rage_phase_coefficients(r, 0, 2, h);

    auto energy_at = [&](double phi) {
        RageState probe = r;
        probe.phases.set_phase(0, 2, phi);
        return rage_expectation(probe, h);
    };
    for (int k = 0; k < 25; ++k) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const double model = c.a + c.b * std::cos(phi) + c.gamma * std::sin(phi);
        CHECK(std::abs(model - energy_at(phi)) < 1e-9);
    }

    const double phi_star = phase_minimizer(c);
    double best_phi = 0.0;
    double best = 1e300;
    for (int k = 0; k < 360; ++k) {
        const double phi = k * 2.0 * M_PI / 360.0;
        const double e = energy_at(phi);
        if (e < best) {
            best = e;
            best_phi = phi;
        }
    }
    double diff = std::abs(phi_star - best_phi);
    diff = std::min(diff, 2.0 * M_PI - diff);
    CHECK(diff < 0.02);
}

TEST_CASE("cosine minimizer convention") {
    PhaseOptimizationCoefficients c{0.0, 1.0, 0.0};
    CHECK(phase_minimizer(c) == doctest::Approx(M_PI));
}

TEST_CASE("phase updates are monotone and converge to fixed points") {
    Rng rng(13);
    const auto edges = ring(4);
    const HamiltonianSum h =
        disturbed_graph_hamiltonian(4, edges, std::vector<double>(4, 0.2));
    const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
    RageState r(m, random_phases(4, rng), LocalRotations(4));
    double energy = rage_expectation(r, h);
    for (int pass = 0; pass < 400; ++pass) {
        const double before = energy;
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                const UpdateResult u = rage_optimize_phase(r, a, b, h);
                CHECK(u.energy <= energy + 1e-10);
                r = u.state;
                energy = u.energy;
            }
        }
        if (std::abs(before - energy) < 1e-13) {
            break;
        }
    }
    // A converged phase is a fixed point.
    const UpdateResult again = rage_optimize_phase(r, 0, 1, h);
    CHECK(std::abs(again.energy - energy) < 1e-9);
}

TEST_CASE("alternating minimization solves a two-qubit disturbed graph model") {
    Rng rng(14);
    const std::vector<std::pair<int, int>> edge{{0, 1}};
    const HamiltonianSum h = disturbed_graph_hamiltonian(2, edge, {0.35, -0.2});
    const double exact = exact_ground_state(h).energy;
    const MpsState m = MpsState::random(Boundary::open, 2, 1, 2, rng);
    const RageState init(m, AdjacencyPhases(2, 2), LocalRotations(2));
    AlternatingSchedule schedule;
    const AlternatingResult result = rage_alternating_minimize(init, h, schedule, 1e-10, 60);
    CHECK(std::abs(result.energy_trace.back() - exact) < 1e-8);
    for (std::size_t i = 1; i < result.energy_trace.size(); ++i) {
        CHECK(result.energy_trace[i] <= result.energy_trace[i - 1] + 1e-10);
    }
}

TEST_CASE("empty schedule leaves the state unchanged") {
    Rng rng(15);
    const MpsState m = MpsState::random(Boundary::closed, 4, 2, 2, rng);
    const RageState init(m, random_phases(4, rng), LocalRotations(4));
    const HamiltonianSum h = ising_2d(2, 2, 1.0, 0.5, false);
    AlternatingSchedule schedule;
    schedule.tensors = false;
    schedule.rotations = false;
    schedule.phases = false;
    schedule.gradient_refinement = false;
    const AlternatingResult result = rage_alternating_minimize(init, h, schedule, 1e-9, 5);
    CHECK(result.energy_trace.size() >= 1);
    CHECK(fidelity(expand(init), expand(result.state)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed-phase tensors-only run nails the undisturbed ring model at D=1") {
    Rng rng(16);
    const int n = 6;
    const auto edges = ring(n);
    const HamiltonianSum h = graph_hamiltonian(n, edges);
    const MpsState m = MpsState::random(Boundary::open, n, 1, 2, rng);
    const RageState init(m, graph_state_phases(n, edges), LocalRotations(n));
    AlternatingSchedule schedule;
    schedule.rotations = false;
    schedule.phases = false;
    schedule.gradient_refinement = false;
    const AlternatingResult result = rage_alternating_minimize(init, h, schedule, 1e-10, 20);
    CHECK(std::abs(result.energy_trace.back() + n) < 1e-9);
}

TEST_CASE("pauli conjugation through phases: diagonal strings are unchanged") {
    Rng rng(17);
    const AdjacencyPhases phases = random_phases(4, rng);
    const PauliString p(4, "IZII");
    const PhaseConjugatedOperator conj = pauli_conjugate_through_phases(p, phases,
                                                                        LocalRotations(4));
    CHECK(conj.bond_dimension() == 1);
    const MatrixXcd dense = conj.dense();
    const HamiltonianSum single = [&] {
        HamiltonianSum h(4);
        h.add("IZII", 1.0);
        return h;
    }();
    CHECK((dense - dense_hamiltonian(single)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pauli conjugation: the graph neighbor rule") {
    AdjacencyPhases phases(3, 2);
    phases.set_phase(0, 1, M_PI);
    const PauliString p(3, "XII");
    const PhaseConjugatedOperator conj =
        pauli_conjugate_through_phases(p, phases, LocalRotations(3));
    CHECK(conj.bond_dimension() <= 2);
    HamiltonianSum expected(3);
    expected.add("XZI", 1.0);
    CHECK((conj.dense() - dense_hamiltonian(expected)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pauli conjugation matches dense conjugation for random rows") {
    Rng rng(18);
    const int n = 5;
    for (int trial = 0; trial < 5; ++trial) {
        const AdjacencyPhases phases = random_phases(n, rng);
        const PauliString p(n, "XIIYI");
        const PhaseConjugatedOperator conj =
            pauli_conjugate_through_phases(p, phases, LocalRotations(n));
        CHECK(conj.bond_dimension() <= 4);

        // Dense reference: W^dag P W.
        const std::size_t dim = 1 << n;
        MatrixXcd w = MatrixXcd::Zero(dim, dim);
        const StateVector ref = StateVector::zero_state(n);
        for (std::size_t idx = 0; idx < dim; ++idx) {
            double theta = 0.0;
            for (int a = 0; a < n; ++a) {
                for (int b = a + 1; b < n; ++b) {
                    theta += phases.entry(a, b, ref.digit(idx, a), ref.digit(idx, b));
                }
            }
            w(idx, idx) = std::exp(Complex(0.0, theta));
        }
        HamiltonianSum hp(n);
        hp.terms.push_back(p);
        const MatrixXcd dense_ref = w.adjoint() * dense_hamiltonian(hp) * w;
        CHECK((conj.dense() - dense_ref).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("clifford conjugation rules") {
    CliffordCircuit c;
    c.n_qubits = 2;
    c.gates.push_back({CliffordGate::Kind::H, 0});
    PauliString x(2, "XI");
    CHECK(pauli_conjugate_through_clifford(x, c).letters == "ZI");

    CliffordCircuit cnot;
    cnot.n_qubits = 2;
    cnot.gates.push_back({CliffordGate::Kind::CNOT, 0, 1});
    CHECK(pauli_conjugate_through_clifford(x, cnot).letters == "XX");
}

TEST_CASE("random clifford circuits match dense conjugation exactly") {
    Rng rng(19);
    const int n = 6;
    for (int trial = 0; trial < 3; ++trial) {
        CliffordCircuit c;
        c.n_qubits = n;
        for (int g = 0; g < 20; ++g) {
            const int kind = rng.uniform_int(4);
            if (kind == 0) {
                c.gates.push_back({CliffordGate::Kind::H, rng.uniform_int(n)});
            } else if (kind == 1) {
                c.gates.push_back({CliffordGate::Kind::S, rng.uniform_int(n)});
            } else {
                const int a = rng.uniform_int(n);
                int b = rng.uniform_int(n - 1);
                if (b >= a) ++b;
                c.gates.push_back({kind == 2 ? CliffordGate::Kind::CZ : CliffordGate::Kind::CNOT,
                                   a, b});
            }
        }
        std::string letters(n, 'I');
        letters[rng.uniform_int(n)] = 'X';
        letters[rng.uniform_int(n)] = 'Y';
        const PauliString p(n, letters);
        const PauliString image = pauli_conjugate_through_clifford(p, c);

        const MatrixXcd u = c.dense();
        HamiltonianSum hp(n);
        hp.terms.push_back(p);
        const MatrixXcd dense_ref = u.adjoint() * dense_hamiltonian(hp) * u;
        HamiltonianSum him(n);
        him.terms.push_back(image);
        CHECK((dense_hamiltonian(him) - dense_ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("reduction consistency: zero layer equals backbone routines exactly") {
    Rng rng(20);
    const HamiltonianSum h = ising_2d(2, 3, 1.0, 0.4, false);
    const MpsState m = MpsState::random(Boundary::closed, 6, 3, 2, rng);
    const RageState r(m, AdjacencyPhases(6, 2), LocalRotations(6));
    CHECK(rage_expectation(r, h) == doctest::Approx(mps_expectation(m, h)).epsilon(1e-12));
    CHECK(rage_norm_squared(r) == doctest::Approx(mps_norm_squared(m)).epsilon(1e-12));
}
