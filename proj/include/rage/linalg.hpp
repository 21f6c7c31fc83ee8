#pragma once

#include <Eigen/Dense>

#include "rage/dense_tensor.hpp"

namespace rage {

struct QrPair {
    MatrixXcd q;  // orthonormal columns
    MatrixXcd r;  // upper triangular, nonnegative real diagonal
};

/// Thin QR with the diagonal of r fixed to be real and nonnegative.
QrPair qr_reduce(const MatrixXcd& m);

struct TruncatedSvd {
    MatrixXcd u;
    VectorXd s;  // descending
    MatrixXcd v;  // u * s.asDiagonal() * v reconstructs the input
    double discarded_weight;  // sum of squared dropped singular values
};

TruncatedSvd truncated_svd(const MatrixXcd& m, int max_rank);

struct GeneralizedEigSolution {
    double eigenvalue;
    VectorXcd eigenvector;  // unit norm under the retained metric; phase fixed
    int metric_rank;  // effective rank of the metric after the cutoff
    double smallest_kept_metric_eigenvalue;
};

/// Multiply by the phase that makes the largest-magnitude entry real and
/// nonnegative (first such entry on ties).
void fix_global_phase(VectorXcd& v);

/// Minimal eigenpair of h x = lambda metric x, restricted to the subspace of
/// metric eigenvalues above cutoff * (largest metric eigenvalue). Throws if
/// the metric is numerically zero.
GeneralizedEigSolution solve_generalized_eig_min(const MatrixXcd& h, const MatrixXcd& metric,
                                                 double cutoff = 1e-12);

}  // namespace rage
