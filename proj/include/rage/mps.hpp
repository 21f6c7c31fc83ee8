#pragma once

#include <utility>
#include <vector>

#include "rage/dense_tensor.hpp"
#include "rage/pauli.hpp"
#include "rage/rng.hpp"

namespace rage {

enum class Boundary { open, closed };

/// Matrix product state. Site tensors are stored rank-3 as
/// (left bond, right bond, physical); open boundaries are realized by a
/// wrap bond of dimension 1, so both boundary kinds share one layout.
/// Per-bond dimensions may vary.
class MpsState {
public:
    MpsState(Boundary boundary, int local_dim, std::vector<DenseTensor> sites);

    static MpsState product_state(Boundary boundary, const std::vector<VectorXcd>& local_states);
    /// All sites |0>.
    static MpsState basis_zero(Boundary boundary, int n_sites, int local_dim = 2);
    /// Entries uniform on [-1,1] in both real and imaginary part, then the
    /// state is scaled to unit norm.
    static MpsState random(Boundary boundary, int n_sites, int bond_dim, int local_dim, Rng& rng,
                           bool normalized = true);

    Boundary boundary() const { return boundary_; }
    int n_sites() const { return static_cast<int>(sites_.size()); }
    int local_dim() const { return local_dim_; }

    const DenseTensor& site(int i) const { return sites_[i]; }
    void set_site(int i, DenseTensor t);

    int left_dim(int i) const { return static_cast<int>(sites_[i].dim(0)); }
    int right_dim(int i) const { return static_cast<int>(sites_[i].dim(1)); }

    /// A_s as a (left x right) matrix.
    MatrixXcd site_matrix(int i, int s) const;

    /// Transfer matrix sum_{s,r} op(r,s) A_s (x) conj(A_r), mapping the
    /// doubled left bond space to the doubled right bond space.
    MatrixXcd transfer_with_op(int i, const MatrixXcd& op) const;
    MatrixXcd transfer_identity(int i) const;
    MatrixXcd transfer_resolved(int i, int s_ket, int s_bra) const;

    void check_consistent() const;

private:
    Boundary boundary_;
    int local_dim_;
    std::vector<DenseTensor> sites_;
};

double mps_norm_squared(const MpsState& m);

/// Unnormalized <psi| coeff * prod O_i |psi> evaluated by transfer products.
Complex mps_product_value(const MpsState& m, const ProductOperator& op);

/// Reduced density matrix on the ascending support (first site most
/// significant), normalized to unit trace.
MatrixXcd mps_reduced_density(const MpsState& m, const std::vector<int>& support);

double mps_expectation(const MpsState& m, const HamiltonianSum& h);

struct EffectivePair {
    MatrixXcd h;
    MatrixXcd metric;
};

/// Quadratic forms over the site tensor (flattened row-major as
/// (left, right, phys)) reproducing energy numerator and norm.
EffectivePair mps_effective_pair(const MpsState& m, int site, const HamiltonianSum& h);
EffectivePair mps_effective_pair_products(const MpsState& m, int site,
                                          const std::vector<ProductOperator>& products);

struct SweepTrace {
    std::vector<double> energies;  // initial energy, then one entry per site update
    int skipped_updates = 0;       // degenerate-metric sites left untouched
    int sweeps_run = 0;
    bool converged = false;
};

struct SweepOptions {
    int max_sweeps = 50;
    double rel_tol = 1e-9;
    double metric_cutoff = 1e-12;
};

std::pair<MpsState, SweepTrace> mps_sweep_minimize(const MpsState& m, const HamiltonianSum& h,
                                                   int max_sweeps, double rel_tol);

/// Sweep driver over pre-expanded product terms; the entry point shared with
/// the graph-enhanced tensor updates.
std::pair<MpsState, SweepTrace> mps_sweep_minimize_products(
    const MpsState& m, const std::vector<ProductOperator>& products, const SweepOptions& opts);

/// Gauge with isometries on both sides of `center`; open boundary only.
MpsState mps_canonicalize_open(const MpsState& m, int center);

}  // namespace rage
