#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rage/hamiltonians.hpp>
#include <rage/state_vector.hpp>

using namespace rage;

TEST_CASE("single-bond Ising has ground energy -1") {
    const HamiltonianSum h = ising_2d(1, 2, 1.0, 0.0, false);
    CHECK(h.terms.size() == 1);
    CHECK(exact_ground_state(h).energy == doctest::Approx(-1.0));
}

TEST_CASE("4x4 periodic Ising term counts") {
    const HamiltonianSum h = ising_2d(4, 4, 1.0, 2.0, true);
    int zz = 0, x = 0;
    for (const auto& t : h.terms) {
        (t.support().size() == 2 ? zz : x)++;
    }
    CHECK(zz == 32);
    CHECK(x == 16);
    CHECK(h.is_hermitian());
}

TEST_CASE("2x2 periodic Ising regression energy") {
    // Frozen from the dense oracle.
    const HamiltonianSum h = ising_2d(2, 2, 1.0, 1.0, true);
    CHECK(exact_ground_state(h).energy ==
          doctest::Approx(-8.543116820279428).epsilon(1e-12));
}

TEST_CASE("Heisenberg basics") {
    const HamiltonianSum bond = heisenberg_2d(1, 2, false);
    CHECK(bond.terms.size() == 3);
    CHECK(exact_ground_state(bond).energy == doctest::Approx(-3.0));

    const HamiltonianSum h = heisenberg_2d(2, 2, true);
    CHECK(h.terms.size() == 24);  // 3 letters x 8 torus edges
    CHECK(exact_ground_state(h).energy == doctest::Approx(-16.0).epsilon(1e-12));
}

TEST_CASE("spin glass couplings are seeded and sane") {
    const HamiltonianSum a = spin_glass_2d(3, 3, 42);
    const HamiltonianSum b = spin_glass_2d(3, 3, 42);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(a.terms[i].coefficient == b.terms[i].coefficient);
        CHECK(a.terms[i].letters == b.terms[i].letters);
    }
    // All couplings within mean +- 6 sigma.
    for (const auto& t : a.terms) {
        CHECK(t.coefficient.real() > 1.0 - 0.6);
        CHECK(t.coefficient.real() < 1.0 + 0.6);
    }
    // XX, YY, ZZ share the coupling per bond.
    for (std::size_t i = 0; i < a.terms.size(); i += 3) {
        CHECK(a.terms[i].coefficient == a.terms[i + 1].coefficient);
        CHECK(a.terms[i].coefficient == a.terms[i + 2].coefficient);
    }
}

TEST_CASE("spin glass 2x2 regression energy") {
    const HamiltonianSum h = spin_glass_2d(2, 2, 1);
    CHECK(h.terms[0].coefficient.real() ==
          doctest::Approx(0.916725856553433).epsilon(1e-12));
    CHECK(exact_ground_state(h).energy ==
          doctest::Approx(-7.457687279954389).epsilon(1e-12));
}

TEST_CASE("long-range Ising couplings by hand") {
    const HamiltonianSum two = long_range_ising(2, 0.0);
    REQUIRE(two.terms.size() == 1);
    CHECK(two.terms[0].coefficient.real() == doctest::Approx(1.0));

    const HamiltonianSum three = long_range_ising(3, 0.0);
    REQUIRE(three.terms.size() == 3);
    CHECK(three.terms[0].coefficient.real() == doctest::Approx(1.0));   // (0,1)
    CHECK(three.terms[1].coefficient.real() == doctest::Approx(0.5));   // (0,2)
    CHECK(three.terms[2].coefficient.real() == doctest::Approx(1.0));   // (1,2)
}

TEST_CASE("long-range Ising n=8 regression energy") {
    const HamiltonianSum h = long_range_ising(8, 1.0);
    CHECK(h.terms.size() == 36);
    CHECK(exact_ground_state(h).energy ==
          doctest::Approx(-9.365084036870043).epsilon(1e-12));
}

TEST_CASE("graph Hamiltonian on a single vertex and a ring") {
    const HamiltonianSum single = graph_hamiltonian(1, {});
    REQUIRE(single.terms.size() == 1);
    CHECK(single.terms[0].letters == "X");
    CHECK(exact_ground_state(single).energy == doctest::Approx(-1.0));

    const std::vector<std::pair<int, int>> ring{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    const HamiltonianSum h = graph_hamiltonian(4, ring);
    const GroundStateResult g = exact_ground_state(h);
    CHECK(g.energy == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK_FALSE(g.degenerate);
}

TEST_CASE("disturbed graph Hamiltonian perturbation scaling") {
    const std::vector<std::pair<int, int>> ring{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    const double e0 = exact_ground_state(graph_hamiltonian(4, ring)).energy;
    CHECK(exact_ground_state(disturbed_graph_hamiltonian(4, ring, {0, 0, 0, 0})).energy ==
          doctest::Approx(e0));
    // O(h^2) shift for a tiny uniform field.
    double previous_shift = 0.0;
    for (double field : {2e-2, 1e-2}) {
        const HamiltonianSum h =
            disturbed_graph_hamiltonian(4, ring, std::vector<double>(4, field));
        const double shift = std::abs(exact_ground_state(h).energy - e0);
        if (previous_shift > 0.0) {
            // Quartering the field strength should quarter the shift.
            CHECK(shift < previous_shift / 2.5);
        }
        previous_shift = shift;
    }
}

TEST_CASE("toric code structure on the 2x3 lattice") {
    const ToricCode code = toric_code_hamiltonian(2, 3);
    CHECK(code.n_qubits == 12);
    CHECK(code.generators.generators.size() == 11);  // 6 loops + 5 crosses
    CHECK(code.generators.generators_commute());
    CHECK(code.generators.symplectic_rank() == 10);

    const StabilizerGroup completed = complete_stabilizer_group(code.generators);
    CHECK(completed.generators.size() == 12);
    CHECK(completed.generators_commute());
    CHECK(completed.symplectic_rank() == 12);
}

TEST_CASE("perturbed toric model at zero field") {
    const PerturbedToricModel model = kitaev_perturbed(2, 3, 1.0, 0.0);
    CHECK(model.hamiltonian.terms.size() == 12);
    const GroundStateResult g = exact_ground_state(model.hamiltonian);
    CHECK(g.energy == doctest::Approx(-12.0).epsilon(1e-12));
}

TEST_CASE("every builder is Hermitian and matches its dense construction") {
    const std::vector<HamiltonianSum> all{
        ising_2d(2, 2, 1.0, 0.5, true),    heisenberg_2d(2, 2, false),
        spin_glass_2d(2, 2, 3),            long_range_ising(4, 1.0),
        graph_hamiltonian(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}),
        kitaev_perturbed(2, 2, 1.0, 0.3).hamiltonian,
    };
    for (const auto& h : all) {
        CHECK(h.is_hermitian());
        const MatrixXcd dense = dense_hamiltonian(h);
        CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}
