#include "rage/peps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rage/linalg.hpp"

namespace rage {

PepsState::PepsState(int lx, int ly, int local_dim, std::vector<DenseTensor> tensors)
    : lx_(lx), ly_(ly), local_dim_(local_dim), tensors_(std::move(tensors)) {
    if (lx_ < 1 || ly_ < 1) {
        throw std::invalid_argument("grid dimensions must be >= 1");
    }
    if (local_dim_ < 2) {
        throw std::invalid_argument("local dimension must be >= 2");
    }
    if (static_cast<int>(tensors_.size()) != lx_ * ly_) {
        throw std::invalid_argument("one tensor per grid site required");
    }
    for (int y = 0; y < ly_; ++y) {
        for (int x = 0; x < lx_; ++x) {
            const DenseTensor& t = tensors_[site_index(x, y)];
            if (t.rank() != 5) {
                throw std::invalid_argument("site tensors must be rank 5 (u,l,d,r,phys)");
            }
            if (static_cast<int>(t.dim(4)) != local_dim_) {
                throw std::invalid_argument("physical dimension mismatch");
            }
            if (y == 0 && t.dim(0) != 1) {
                throw std::invalid_argument("top row must have a trivial up bond");
            }
            if (x == 0 && t.dim(1) != 1) {
                throw std::invalid_argument("left column must have a trivial left bond");
            }
            if (y == ly_ - 1 && t.dim(2) != 1) {
                throw std::invalid_argument("bottom row must have a trivial down bond");
            }
            if (x == lx_ - 1 && t.dim(3) != 1) {
                throw std::invalid_argument("right column must have a trivial right bond");
            }
            if (y > 0 && t.dim(0) != tensors_[site_index(x, y - 1)].dim(2)) {
                throw std::invalid_argument("vertical bond mismatch");
            }
            if (x > 0 && t.dim(1) != tensors_[site_index(x - 1, y)].dim(3)) {
                throw std::invalid_argument("horizontal bond mismatch");
            }
        }
    }
}

PepsState PepsState::random(int lx, int ly, int bond_dim, int local_dim, Rng& rng) {
    std::vector<DenseTensor> tensors;
    const std::size_t d = static_cast<std::size_t>(bond_dim);
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            const std::size_t up = (y == 0) ? 1 : d;
            const std::size_t left = (x == 0) ? 1 : d;
            const std::size_t down = (y == ly - 1) ? 1 : d;
            const std::size_t right = (x == lx - 1) ? 1 : d;
            tensors.push_back(
                DenseTensor::random({up, left, down, right, static_cast<std::size_t>(local_dim)},
                                    rng));
        }
    }
    return PepsState(lx, ly, local_dim, std::move(tensors));
}

PepsState PepsState::product_state(int lx, int ly, const std::vector<VectorXcd>& local_states) {
    if (static_cast<int>(local_states.size()) != lx * ly) {
        throw std::invalid_argument("one local state per site required");
    }
    const int q = static_cast<int>(local_states.front().size());
    std::vector<DenseTensor> tensors;
    for (int i = 0; i < lx * ly; ++i) {
        DenseTensor t({1, 1, 1, 1, static_cast<std::size_t>(q)});
        for (int s = 0; s < q; ++s) {
            t[static_cast<std::size_t>(s)] = local_states[i](s);
        }
        tensors.push_back(std::move(t));
    }
    return PepsState(lx, ly, q, std::move(tensors));
}

StateVector peps_expand(const PepsState& p) {
    const int lx = p.lx();
    const int ly = p.ly();
    const int q = p.local_dim();
    if (lx * ly > 14) {
        throw std::invalid_argument("grid too large for dense expansion");
    }

    // Frontier tensor axes: [phys..., down-bond per column, right-bond].
    std::vector<std::size_t> shape(static_cast<std::size_t>(lx) + 1, 1);
    DenseTensor frontier(shape);
    frontier[0] = 1.0;
    int n_phys = 0;
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            // Contract the frontier's column-x down bond with the site's up
            // bond and the running right bond with the site's left bond.
            const std::size_t col_axis = static_cast<std::size_t>(n_phys + x);
            const std::size_t right_axis = static_cast<std::size_t>(n_phys + lx);
            DenseTensor next = DenseTensor::contract(frontier, p.tensor(x, y),
                                                     {{col_axis, 0}, {right_axis, 1}});
            // Appended axes: (down, right, phys); restore canonical order.
            const std::size_t rank = next.rank();
            std::vector<std::size_t> perm;
            for (std::size_t i = 0; i < static_cast<std::size_t>(n_phys); ++i) {
                perm.push_back(i);
            }
            perm.push_back(rank - 1);  // the new physical axis
            std::size_t cursor = static_cast<std::size_t>(n_phys);
            for (int c = 0; c < lx; ++c) {
                if (c == x) {
                    perm.push_back(rank - 3);  // new down bond for this column
                } else {
                    perm.push_back(cursor++);
                }
            }
            perm.push_back(rank - 2);  // new right bond
            frontier = next.transpose(perm);
            ++n_phys;
        }
    }
    // Remaining bond axes are all dimension 1.
    std::size_t dim = 1;
    for (int i = 0; i < lx * ly; ++i) {
        dim *= static_cast<std::size_t>(q);
    }
    VectorXcd amps(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        amps(static_cast<Eigen::Index>(i)) = frontier[i];
    }
    return StateVector(lx * ly, q, std::move(amps));
}

Complex peps_exact_contract(const PepsState& p, const std::vector<MatrixXcd>* site_ops) {
    if (p.n_sites() > 12) {
        throw std::invalid_argument("exact contraction capped at 12 sites");
    }
    const StateVector psi = peps_expand(p);
    if (site_ops == nullptr) {
        return Complex(psi.norm_squared(), 0.0);
    }
    if (static_cast<int>(site_ops->size()) != p.n_sites()) {
        throw std::invalid_argument("one operator per site required");
    }
    ProductOperator op;
    for (int i = 0; i < p.n_sites(); ++i) {
        op.site_ops[i] = (*site_ops)[i];
    }
    return product_expectation(psi, op);
}

DenseTensor peps_b_tensor(const PepsState& p, int x, int y, const MatrixXcd* op) {
    const DenseTensor& a = p.tensor(x, y);
    const int q = p.local_dim();
    const std::size_t u = a.dim(0), l = a.dim(1), d = a.dim(2), r = a.dim(3);
    DenseTensor b({u * u, l * l, d * d, r * r});
    const DenseTensor ac = a.conjugate();
    for (int s = 0; s < q; ++s) {
        for (int sp = 0; sp < q; ++sp) {
            Complex w(1.0, 0.0);
            if (op != nullptr) {
                w = (*op)(sp, s);
            } else if (s != sp) {
                w = 0.0;
            }
            if (w == Complex(0.0, 0.0)) {
                continue;
            }
            for (std::size_t iu = 0; iu < u; ++iu)
                for (std::size_t iup = 0; iup < u; ++iup)
                    for (std::size_t il = 0; il < l; ++il)
                        for (std::size_t ilp = 0; ilp < l; ++ilp)
                            for (std::size_t id = 0; id < d; ++id)
                                for (std::size_t idp = 0; idp < d; ++idp)
                                    for (std::size_t ir = 0; ir < r; ++ir)
                                        for (std::size_t irp = 0; irp < r; ++irp) {
                                            b.at({iu * u + iup, il * l + ilp, id * d + idp,
                                                  ir * r + irp}) +=
                                                w *
                                                a.at({iu, il, id, ir,
                                                      static_cast<std::size_t>(s)}) *
                                                ac.at({iup, ilp, idp, irp,
                                                       static_cast<std::size_t>(sp)});
                                        }
        }
    }
    return b;
}

namespace {

// Truncate an open-boundary MPS to bond <= chi; returns the summed squared
// discarded singular values. Left-canonicalizes first so each bond cut is
// against the true Schmidt values.
double compress_boundary(MpsState& m, int chi) {
    const int n = m.n_sites();
    if (n == 1) {
        return 0.0;
    }
    m = mps_canonicalize_open(m, n - 1);
    double discarded = 0.0;
    for (int i = n - 1; i > 0; --i) {
        const DenseTensor& t = m.site(i);
        const std::size_t dl = t.dim(0), dr = t.dim(1), q = t.dim(2);
        const MatrixXcd view = t.as_matrix(1);  // dl x (dr*q)
        const TruncatedSvd svd = truncated_svd(view, chi);
        discarded += svd.discarded_weight;
        const std::size_t keep = static_cast<std::size_t>(svd.s.size());
        m.set_site(i, DenseTensor::from_matrix(svd.v, {keep}, {dr, q}));
        const MatrixXcd carry = svd.u * svd.s.asDiagonal();  // dl x keep
        const DenseTensor& prev = m.site(i - 1);
        const std::size_t pl = prev.dim(0), pq = prev.dim(2);
        DenseTensor updated({pl, keep, pq});
        for (std::size_t k = 0; k < pl; ++k) {
            for (std::size_t lnew = 0; lnew < keep; ++lnew) {
                for (std::size_t s = 0; s < pq; ++s) {
                    Complex acc(0.0, 0.0);
                    for (std::size_t j = 0; j < dl; ++j) {
                        acc += prev.at({k, j, s}) * carry(j, lnew);
                    }
                    updated.at({k, lnew, s}) = acc;
                }
            }
        }
        m.set_site(i - 1, std::move(updated));
    }
    return discarded;
}

MpsState row_as_boundary(const PepsState& p, int y, const std::vector<MatrixXcd>* site_ops) {
    std::vector<DenseTensor> sites;
    for (int x = 0; x < p.lx(); ++x) {
        const MatrixXcd* op =
            (site_ops != nullptr) ? &(*site_ops)[p.site_index(x, y)] : nullptr;
        const DenseTensor b = peps_b_tensor(p, x, y, op);
        // (u=1, l, d, r) -> MPS site (l, r, phys=d)
        sites.push_back(b.reshape({b.dim(1), b.dim(2), b.dim(3)}).transpose({0, 2, 1}));
    }
    const int phys = static_cast<int>(sites.front().dim(2));
    return MpsState(Boundary::open, phys, std::move(sites));
}

}  // namespace

BoundaryContractionReport peps_boundary_contract(const PepsState& p, int chi,
                                                 const std::vector<MatrixXcd>* site_ops) {
    if (chi < 1) {
        throw std::invalid_argument("chi must be >= 1");
    }
    if (site_ops != nullptr && static_cast<int>(site_ops->size()) != p.n_sites()) {
        throw std::invalid_argument("one operator per site required");
    }
    const int lx = p.lx();
    const int ly = p.ly();
    BoundaryContractionReport report;
    report.chi = chi;

    if (ly == 1) {
        MatrixXcd prod = MatrixXcd::Identity(1, 1);
        for (int x = 0; x < lx; ++x) {
            const MatrixXcd* op =
                (site_ops != nullptr) ? &(*site_ops)[p.site_index(x, 0)] : nullptr;
            const DenseTensor b = peps_b_tensor(p, x, 0, op);
            prod = prod * b.reshape({b.dim(1), b.dim(3)}).as_matrix(1);
        }
        report.value = prod(0, 0);
        return report;
    }

    MpsState boundary = row_as_boundary(p, 0, site_ops);
    for (int y = 1; y < ly - 1; ++y) {
        // Apply the row MPO: phys index of the boundary meets the row's up.
        std::vector<DenseTensor> sites;
        for (int x = 0; x < lx; ++x) {
            const MatrixXcd* op =
                (site_ops != nullptr) ? &(*site_ops)[p.site_index(x, y)] : nullptr;
            const DenseTensor b = peps_b_tensor(p, x, y, op);  // (u, l, d, r)
            const DenseTensor& s = boundary.site(x);           // (L, R, u)
            DenseTensor merged = DenseTensor::contract(s, b, {{2, 0}});
            // axes: (L, R, l, d, r) -> ((L,l), (R,r), d)
            merged = merged.transpose({0, 2, 1, 4, 3});
            sites.push_back(merged.reshape(
                {merged.dim(0) * merged.dim(1), merged.dim(2) * merged.dim(3), merged.dim(4)}));
        }
        const int phys = static_cast<int>(sites.front().dim(2));
        boundary = MpsState(Boundary::open, phys, std::move(sites));
        report.row_discarded_weight.push_back(compress_boundary(boundary, chi));
    }

    // Close with the last row.
    MatrixXcd prod = MatrixXcd::Identity(1, 1);
    for (int x = 0; x < lx; ++x) {
        const MatrixXcd* op =
            (site_ops != nullptr) ? &(*site_ops)[p.site_index(x, ly - 1)] : nullptr;
        const DenseTensor b = peps_b_tensor(p, x, ly - 1, op);  // (u, l, 1, r)
        const DenseTensor& s = boundary.site(x);                // (L, R, u)
        DenseTensor merged = DenseTensor::contract(s, b, {{2, 0}});
        // axes: (L, R, l, 1, r) -> ((L,l) x (R,r))
        merged = merged.transpose({0, 2, 3, 1, 4});
        const MatrixXcd m = merged.reshape({merged.dim(0) * merged.dim(1),
                                            merged.dim(3) * merged.dim(4)})
                                .as_matrix(1);
        prod = prod * m;
    }
    report.value = prod(0, 0);
    return report;
}

MatrixXcd rage_peps_reduced_density(const PepsState& backbone, const AdjacencyPhases& phases,
                                    const LocalRotations& rotations, std::pair<int, int> support,
                                    int chi) {
    const int n = backbone.n_sites();
    const int q = backbone.local_dim();
    const int a = support.first;
    const int b = support.second;
    if (a < 0 || b < 0 || a >= n || b >= n || a >= b) {
        throw std::invalid_argument("support must be two distinct ascending sites");
    }
    if (phases.n_sites() != n || phases.local_dim() != q) {
        throw std::invalid_argument("phase layer mismatch");
    }

    const std::size_t dim = static_cast<std::size_t>(q) * q;
    MatrixXcd rho = MatrixXcd::Zero(dim, dim);
    for (int ta = 0; ta < q; ++ta)
        for (int tb = 0; tb < q; ++tb)
            for (int tpa = 0; tpa < q; ++tpa)
                for (int tpb = 0; tpb < q; ++tpb) {
                    // rho[(ta,tb), (tpa,tpb)] = <psi| (|t'><t|)^(S) |psi> on the
                    // phase-dressed B-grid; rotations follow afterwards.
                    std::vector<MatrixXcd> ops(n, MatrixXcd::Identity(q, q));
                    MatrixXcd oa = MatrixXcd::Zero(q, q);
                    oa(tpa, ta) = 1.0;
                    MatrixXcd ob = MatrixXcd::Zero(q, q);
                    ob(tpb, tb) = 1.0;
                    ops[a] = oa;
                    ops[b] = ob;
                    for (int c = 0; c < n; ++c) {
                        if (c == a || c == b) {
                            continue;
                        }
                        Eigen::VectorXd theta = phases.site_phases(a, c, ta) -
                                                phases.site_phases(a, c, tpa) +
                                                phases.site_phases(b, c, tb) -
                                                phases.site_phases(b, c, tpb);
                        MatrixXcd v = MatrixXcd::Zero(q, q);
                        for (int s = 0; s < q; ++s) {
                            v(s, s) = std::exp(Complex(0.0, theta(s)));
                        }
                        ops[c] = v;
                    }
                    const double pref =
                        phases.entry(a, b, ta, tb) - phases.entry(a, b, tpa, tpb);
                    const Complex val =
                        std::exp(Complex(0.0, pref)) *
                        peps_boundary_contract(backbone, chi, &ops).value;
                    rho(static_cast<Eigen::Index>(ta * q + tb),
                        static_cast<Eigen::Index>(tpa * q + tpb)) = val;
                }

    if (q == 2 && !rotations.is_identity()) {
        MatrixXcd v(4, 4);
        const Eigen::Matrix2cd va = rotations.matrix(a);
        const Eigen::Matrix2cd vb = rotations.matrix(b);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                v.block(i * 2, j * 2, 2, 2) = va(i, j) * vb;
        rho = v * rho * v.adjoint();
    }
    rho = (rho + rho.adjoint()) * 0.5;
    const Complex tr = rho.trace();
    if (std::abs(tr) <= 0.0) {
        throw std::runtime_error("reduced density has zero trace");
    }
    return rho / tr.real();
}

}  // namespace rage
