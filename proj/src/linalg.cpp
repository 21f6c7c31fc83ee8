#include "rage/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace rage {

QrPair qr_reduce(const MatrixXcd& m) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw std::invalid_argument("qr_reduce requires a non-empty matrix");
    }
    Eigen::HouseholderQR<MatrixXcd> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(m.rows(), k);
    MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    // Rotate each column pair so diag(r) is real and nonnegative.
    for (Eigen::Index i = 0; i < k; ++i) {
        const Complex d = r(i, i);
        if (std::abs(d) > 0.0) {
            const Complex phase = d / std::abs(d);
            r.row(i) *= std::conj(phase);
            q.col(i) *= phase;
        }
    }
    return {std::move(q), std::move(r)};
}

TruncatedSvd truncated_svd(const MatrixXcd& m, int max_rank) {
    if (max_rank < 1) {
        throw std::invalid_argument("max_rank must be >= 1");
    }
    Eigen::JacobiSVD<MatrixXcd> svd;
    Eigen::BDCSVD<MatrixXcd> bdc;
    MatrixXcd u_full, v_full;
    VectorXd s_full;
    if (std::min(m.rows(), m.cols()) <= 16) {
        svd.compute(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = svd.matrixU();
        v_full = svd.matrixV();
        s_full = svd.singularValues();
    } else {
        bdc.compute(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = bdc.matrixU();
        v_full = bdc.matrixV();
        s_full = bdc.singularValues();
    }
    const Eigen::Index k = std::min<Eigen::Index>(max_rank, s_full.size());
    double discarded = 0.0;
    for (Eigen::Index i = k; i < s_full.size(); ++i) {
        discarded += s_full(i) * s_full(i);
    }
    TruncatedSvd out;
    out.u = u_full.leftCols(k);
    out.s = s_full.head(k);
    out.v = v_full.leftCols(k).adjoint();
    out.discarded_weight = discarded;
    return out;
}

void fix_global_phase(VectorXcd& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag + 1e-15) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag <= 0.0) {
        return;
    }
    const Complex phase = v(best) / std::abs(v(best));
    v *= std::conj(phase);
}

GeneralizedEigSolution solve_generalized_eig_min(const MatrixXcd& h, const MatrixXcd& metric,
                                                 double cutoff) {
    if (h.rows() != h.cols() || metric.rows() != metric.cols() || h.rows() != metric.rows()) {
        throw std::invalid_argument("h and metric must be square and of equal dimension");
    }
    if (cutoff <= 0.0) {
        throw std::invalid_argument("cutoff must be positive");
    }

    Eigen::SelfAdjointEigenSolver<MatrixXcd> metric_eig(metric);
    const VectorXd mvals = metric_eig.eigenvalues();
    const double mmax = mvals.maxCoeff();
    if (!(mmax > 0.0)) {
        throw std::runtime_error("metric is numerically zero: degenerate state");
    }
    const double threshold = cutoff * mmax;

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < mvals.size(); ++i) {
        if (mvals(i) > threshold) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        throw std::runtime_error("metric is numerically zero: degenerate state");
    }

    MatrixXcd basis(metric.rows(), static_cast<Eigen::Index>(kept.size()));
    double smallest_kept = mvals(kept.front());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const Eigen::Index i = kept[j];
        smallest_kept = std::min(smallest_kept, mvals(i));
        basis.col(static_cast<Eigen::Index>(j)) =
            metric_eig.eigenvectors().col(i) / std::sqrt(mvals(i));
    }

    const MatrixXcd h_proj = basis.adjoint() * h * basis;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig((h_proj + h_proj.adjoint()) * 0.5);
    GeneralizedEigSolution out;
    out.eigenvalue = eig.eigenvalues()(0);
    out.eigenvector = basis * eig.eigenvectors().col(0);
    out.metric_rank = static_cast<int>(kept.size());
    out.smallest_kept_metric_eigenvalue = smallest_kept;
    fix_global_phase(out.eigenvector);
    return out;
}

}  // namespace rage
