#pragma once

#include <utility>
#include <vector>

#include "rage/dense_tensor.hpp"
#include "rage/mps.hpp"
#include "rage/rng.hpp"
#include "rage/state_vector.hpp"
#include "rage/wgs.hpp"

namespace rage {

/// Projected entangled pair state on an lx x ly grid. Site tensors are
/// stored rank-5 as (up, left, down, right, phys); bonds leaving the grid
/// have dimension 1, which realizes the corner/edge/bulk ranks.
class PepsState {
public:
    PepsState(int lx, int ly, int local_dim, std::vector<DenseTensor> tensors);

    static PepsState random(int lx, int ly, int bond_dim, int local_dim, Rng& rng);
    static PepsState product_state(int lx, int ly, const std::vector<VectorXcd>& local_states);

    int lx() const { return lx_; }
    int ly() const { return ly_; }
    int n_sites() const { return lx_ * ly_; }
    int local_dim() const { return local_dim_; }

    int site_index(int x, int y) const { return y * lx_ + x; }
    const DenseTensor& tensor(int x, int y) const { return tensors_[site_index(x, y)]; }

private:
    int lx_;
    int ly_;
    int local_dim_;
    std::vector<DenseTensor> tensors_;
};

/// Dense amplitudes (raster site order); the independent reference used to
/// validate the B-tensor contraction routes.
StateVector peps_expand(const PepsState& p);

/// Exact norm^2 (ops absent) or product-operator expectation through dense
/// expansion; capped at 12 sites.
Complex peps_exact_contract(const PepsState& p, const std::vector<MatrixXcd>* site_ops = nullptr);

/// Doubled-index tensor B over ((u,u'),(l,l'),(d,d'),(r,r')): with an
/// operator, sum_{s,s'} <s'|op|s> A^s (x) conj(A^{s'}).
DenseTensor peps_b_tensor(const PepsState& p, int x, int y, const MatrixXcd* op = nullptr);

struct BoundaryContractionReport {
    std::vector<double> row_discarded_weight;  // one entry per absorbed row
    Complex value;
    int chi;
};

/// Row-by-row boundary contraction (top to bottom), compressing the boundary
/// to bond dimension chi after each row; truncation loss is reported, never
/// raised.
BoundaryContractionReport peps_boundary_contract(const PepsState& p, int chi,
                                                 const std::vector<MatrixXcd>* site_ops = nullptr);

/// Reduced density matrix on two sites of the graph-enhanced PEPS: matrix
/// elements are phase-dressed B-grid contractions at boundary cap chi,
/// symmetrized and normalized to unit trace.
MatrixXcd rage_peps_reduced_density(const PepsState& backbone, const AdjacencyPhases& phases,
                                    const LocalRotations& rotations, std::pair<int, int> support,
                                    int chi);

}  // namespace rage
