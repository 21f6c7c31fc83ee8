#include "rage/mps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rage/linalg.hpp"

namespace rage {

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

MpsState::MpsState(Boundary boundary, int local_dim, std::vector<DenseTensor> sites)
    : boundary_(boundary), local_dim_(local_dim), sites_(std::move(sites)) {
    check_consistent();
}

void MpsState::check_consistent() const {
    if (sites_.empty()) {
        throw std::invalid_argument("MPS needs at least one site");
    }
    if (local_dim_ < 2) {
        throw std::invalid_argument("local dimension must be >= 2");
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (sites_[i].rank() != 3) {
            throw std::invalid_argument("MPS site tensors must be rank 3 (left, right, phys)");
        }
        if (static_cast<int>(sites_[i].dim(2)) != local_dim_) {
            throw std::invalid_argument("site physical dimension mismatch");
        }
        const std::size_t next = (i + 1) % sites_.size();
        if (sites_[i].dim(1) != sites_[next].dim(0)) {
            throw std::invalid_argument("adjacent bond dimensions disagree");
        }
    }
    if (boundary_ == Boundary::open && sites_.front().dim(0) != 1) {
        throw std::invalid_argument("open MPS requires wrap bond of dimension 1");
    }
}

MpsState MpsState::product_state(Boundary boundary, const std::vector<VectorXcd>& local_states) {
    if (local_states.empty()) {
        throw std::invalid_argument("product state needs at least one site");
    }
    const int q = static_cast<int>(local_states.front().size());
    std::vector<DenseTensor> sites;
    for (const auto& v : local_states) {
        if (static_cast<int>(v.size()) != q) {
            throw std::invalid_argument("product state local dimensions differ");
        }
        DenseTensor t({1, 1, static_cast<std::size_t>(q)});
        for (int s = 0; s < q; ++s) {
            t.at({0, 0, static_cast<std::size_t>(s)}) = v(s);
        }
        sites.push_back(std::move(t));
    }
    return MpsState(boundary, q, std::move(sites));
}

MpsState MpsState::basis_zero(Boundary boundary, int n_sites, int local_dim) {
    VectorXcd v = VectorXcd::Zero(local_dim);
    v(0) = 1.0;
    return product_state(boundary, std::vector<VectorXcd>(n_sites, v));
}

MpsState MpsState::random(Boundary boundary, int n_sites, int bond_dim, int local_dim, Rng& rng,
                          bool normalized) {
    if (n_sites < 1 || bond_dim < 1) {
        throw std::invalid_argument("invalid MPS size");
    }
    std::vector<DenseTensor> sites;
    const std::size_t d = static_cast<std::size_t>(bond_dim);
    const std::size_t q = static_cast<std::size_t>(local_dim);
    for (int i = 0; i < n_sites; ++i) {
        std::size_t dl = d;
        std::size_t dr = d;
        if (boundary == Boundary::open) {
            if (i == 0) dl = 1;
            if (i == n_sites - 1) dr = 1;
        }
        sites.push_back(DenseTensor::random({dl, dr, q}, rng));
    }
    MpsState m(boundary, local_dim, std::move(sites));
    if (normalized) {
        const double n2 = mps_norm_squared(m);
        if (n2 > 0.0) {
            const double scale = std::pow(n2, -0.5 / n_sites);
            for (int i = 0; i < n_sites; ++i) {
                m.set_site(i, m.site(i).scaled(scale));
            }
        }
    }
    return m;
}

void MpsState::set_site(int i, DenseTensor t) {
    if (t.rank() != 3) {
        throw std::invalid_argument("MPS site tensors must be rank 3");
    }
    sites_[i] = std::move(t);
}

MatrixXcd MpsState::site_matrix(int i, int s) const {
    const DenseTensor& t = sites_[i];
    const std::size_t dl = t.dim(0);
    const std::size_t dr = t.dim(1);
    MatrixXcd m(dl, dr);
    for (std::size_t k = 0; k < dl; ++k) {
        for (std::size_t l = 0; l < dr; ++l) {
            m(k, l) = t.at({k, l, static_cast<std::size_t>(s)});
        }
    }
    return m;
}

MatrixXcd MpsState::transfer_with_op(int i, const MatrixXcd& op) const {
    const std::size_t dl = sites_[i].dim(0);
    const std::size_t dr = sites_[i].dim(1);
    MatrixXcd out = MatrixXcd::Zero(dl * dl, dr * dr);
    std::vector<MatrixXcd> slices(local_dim_);
    for (int s = 0; s < local_dim_; ++s) {
        slices[s] = site_matrix(i, s);
    }
    for (int s = 0; s < local_dim_; ++s) {
        for (int r = 0; r < local_dim_; ++r) {
            const Complex w = op(r, s);
            if (w == Complex(0.0, 0.0)) {
                continue;
            }
            out += w * kron(slices[s], slices[r].conjugate());
        }
    }
    return out;
}

MatrixXcd MpsState::transfer_identity(int i) const {
    const std::size_t dl = sites_[i].dim(0);
    const std::size_t dr = sites_[i].dim(1);
    MatrixXcd out = MatrixXcd::Zero(dl * dl, dr * dr);
    for (int s = 0; s < local_dim_; ++s) {
        const MatrixXcd a = site_matrix(i, s);
        out += kron(a, a.conjugate());
    }
    return out;
}

MatrixXcd MpsState::transfer_resolved(int i, int s_ket, int s_bra) const {
    return kron(site_matrix(i, s_ket), site_matrix(i, s_bra).conjugate());
}

double mps_norm_squared(const MpsState& m) {
    MatrixXcd prod = m.transfer_identity(0);
    for (int i = 1; i < m.n_sites(); ++i) {
        prod = prod * m.transfer_identity(i);
    }
    return prod.trace().real();
}

Complex mps_product_value(const MpsState& m, const ProductOperator& op) {
    const MatrixXcd id = MatrixXcd::Identity(m.local_dim(), m.local_dim());
    MatrixXcd prod;
    for (int i = 0; i < m.n_sites(); ++i) {
        auto it = op.site_ops.find(i);
        const MatrixXcd f = (it == op.site_ops.end()) ? m.transfer_identity(i)
                                                      : m.transfer_with_op(i, it->second);
        prod = (i == 0) ? f : MatrixXcd(prod * f);
    }
    return op.coefficient * prod.trace();
}

MatrixXcd mps_reduced_density(const MpsState& m, const std::vector<int>& support) {
    const int n = m.n_sites();
    const int q = m.local_dim();
    if (support.empty()) {
        throw std::invalid_argument("support must be non-empty");
    }
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || support[i] >= n) {
            throw std::invalid_argument("support site out of range");
        }
        if (i + 1 < support.size() && support[i] >= support[i + 1]) {
            throw std::invalid_argument("support must be strictly ascending");
        }
    }

    // Identity transfer products to the left/right of each support site.
    std::vector<MatrixXcd> transfer(n);
    for (int i = 0; i < n; ++i) {
        transfer[i] = m.transfer_identity(i);
    }

    std::size_t dim = 1;
    for (std::size_t i = 0; i < support.size(); ++i) {
        dim *= static_cast<std::size_t>(q);
    }
    MatrixXcd rho = MatrixXcd::Zero(dim, dim);

    std::vector<int> s_digits(support.size(), 0);
    std::vector<int> r_digits(support.size(), 0);
    for (std::size_t srow = 0; srow < dim; ++srow) {
        std::size_t tmp = srow;
        for (std::size_t i = support.size(); i-- > 0;) {
            s_digits[i] = static_cast<int>(tmp % q);
            tmp /= q;
        }
        for (std::size_t rcol = 0; rcol < dim; ++rcol) {
            tmp = rcol;
            for (std::size_t i = support.size(); i-- > 0;) {
                r_digits[i] = static_cast<int>(tmp % q);
                tmp /= q;
            }
            MatrixXcd prod;
            std::size_t pos = 0;
            for (int i = 0; i < n; ++i) {
                MatrixXcd f;
                if (pos < support.size() && support[pos] == i) {
                    f = m.transfer_resolved(i, s_digits[pos], r_digits[pos]);
                    ++pos;
                } else {
                    f = transfer[i];
                }
                prod = (i == 0) ? f : MatrixXcd(prod * f);
            }
            rho(srow, rcol) = prod.trace();
        }
    }
    const Complex tr = rho.trace();
    if (std::abs(tr) <= 0.0) {
        throw std::runtime_error("reduced density has zero trace");
    }
    return rho / tr;
}

double mps_expectation(const MpsState& m, const HamiltonianSum& h) {
    if (h.n_sites != m.n_sites()) {
        throw std::invalid_argument("Hamiltonian site count mismatch");
    }
    const double n2 = mps_norm_squared(m);
    if (n2 <= 0.0) {
        throw std::runtime_error("state has zero norm");
    }
    Complex acc(0.0, 0.0);
    for (const auto& term : h.terms) {
        acc += mps_product_value(m, ProductOperator::from_pauli(term));
    }
    return acc.real() / n2;
}

namespace {

// Flat index of a site tensor entry (left k, right l, phys s), row-major.
std::size_t site_flat(std::size_t dr, std::size_t q, std::size_t k, std::size_t l,
                      std::size_t s) {
    return (k * dr + l) * q + s;
}

void accumulate_effective(MatrixXcd& target, const MatrixXcd& env, const MatrixXcd& op,
                          Complex coeff, std::size_t dl, std::size_t dr, std::size_t q) {
    // target[(k',l',r),(k,l,s)] += coeff * op(r,s) * env[(l,l'),(k,k')]
    for (std::size_t s = 0; s < q; ++s) {
        for (std::size_t r = 0; r < q; ++r) {
            const Complex w = coeff * op(r, s);
            if (w == Complex(0.0, 0.0)) {
                continue;
            }
            for (std::size_t k = 0; k < dl; ++k) {
                for (std::size_t kp = 0; kp < dl; ++kp) {
                    for (std::size_t l = 0; l < dr; ++l) {
                        for (std::size_t lp = 0; lp < dr; ++lp) {
                            target(site_flat(dr, q, kp, lp, r), site_flat(dr, q, k, l, s)) +=
                                w * env(l * dr + lp, k * dl + kp);
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

EffectivePair mps_effective_pair_products(const MpsState& m, int site,
                                          const std::vector<ProductOperator>& products) {
    const int n = m.n_sites();
    if (site < 0 || site >= n) {
        throw std::invalid_argument("site out of range");
    }
    const std::size_t dl = static_cast<std::size_t>(m.left_dim(site));
    const std::size_t dr = static_cast<std::size_t>(m.right_dim(site));
    const std::size_t q = static_cast<std::size_t>(m.local_dim());
    const std::size_t dim = dl * dr * q;
    const MatrixXcd id_op = MatrixXcd::Identity(m.local_dim(), m.local_dim());

    EffectivePair out;
    out.h = MatrixXcd::Zero(dim, dim);
    out.metric = MatrixXcd::Zero(dim, dim);

    // Environment = product over the other sites, cyclically from site+1.
    auto environment = [&](const ProductOperator* op) {
        MatrixXcd prod = MatrixXcd::Identity(dr * dr, dr * dr);
        for (int step = 1; step < n; ++step) {
            const int i = (site + step) % n;
            MatrixXcd f;
            if (op != nullptr) {
                auto it = op->site_ops.find(i);
                f = (it == op->site_ops.end()) ? m.transfer_identity(i)
                                               : m.transfer_with_op(i, it->second);
            } else {
                f = m.transfer_identity(i);
            }
            prod = prod * f;
        }
        return prod;
    };

    const MatrixXcd metric_env = environment(nullptr);
    accumulate_effective(out.metric, metric_env, id_op, Complex(1.0, 0.0), dl, dr, q);

    for (const auto& op : products) {
        const MatrixXcd env = environment(&op);
        auto it = op.site_ops.find(site);
        const MatrixXcd& local = (it == op.site_ops.end()) ? id_op : it->second;
        accumulate_effective(out.h, env, local, op.coefficient, dl, dr, q);
    }
    return out;
}

EffectivePair mps_effective_pair(const MpsState& m, int site, const HamiltonianSum& h) {
    std::vector<ProductOperator> products;
    products.reserve(h.terms.size());
    for (const auto& t : h.terms) {
        products.push_back(ProductOperator::from_pauli(t));
    }
    return mps_effective_pair_products(m, site, products);
}

namespace {

DenseTensor tensor_from_flat(const VectorXcd& x, std::size_t dl, std::size_t dr, std::size_t q) {
    DenseTensor t({dl, dr, q});
    for (std::size_t i = 0; i < static_cast<std::size_t>(x.size()); ++i) {
        t[i] = x(static_cast<Eigen::Index>(i));
    }
    return t;
}

// Shift the canonical center one site to the right via QR on `site`.
void shift_center_right(MpsState& m, int site) {
    const DenseTensor& t = m.site(site);
    const std::size_t dl = t.dim(0);
    const std::size_t dr = t.dim(1);
    const std::size_t q = t.dim(2);
    const DenseTensor perm = t.transpose({0, 2, 1});  // (dl, q, dr)
    const QrPair qr = qr_reduce(perm.as_matrix(2));
    const std::size_t rnew = static_cast<std::size_t>(qr.q.cols());
    DenseTensor qt = DenseTensor::from_matrix(qr.q, {dl, q}, {rnew}).transpose({0, 2, 1});
    m.set_site(site, std::move(qt));

    const DenseTensor& nxt = m.site(site + 1);
    const std::size_t nl = nxt.dim(0);
    const std::size_t nr = nxt.dim(1);
    DenseTensor updated({rnew, nr, q});
    for (std::size_t k = 0; k < rnew; ++k) {
        for (std::size_t l = 0; l < nr; ++l) {
            for (std::size_t s = 0; s < q; ++s) {
                Complex acc(0.0, 0.0);
                for (std::size_t j = 0; j < nl; ++j) {
                    acc += qr.r(k, j) * nxt.at({j, l, s});
                }
                updated.at({k, l, s}) = acc;
            }
        }
    }
    m.set_site(site + 1, std::move(updated));
}

// Shift the canonical center one site to the left via QR on `site`.
void shift_center_left(MpsState& m, int site) {
    const DenseTensor& t = m.site(site);
    const std::size_t dl = t.dim(0);
    const std::size_t dr = t.dim(1);
    const std::size_t q = t.dim(2);
    const MatrixXcd mview = t.as_matrix(1);  // dl x (dr*q)
    const QrPair qr = qr_reduce(mview.adjoint());
    const std::size_t rnew = static_cast<std::size_t>(qr.q.cols());
    const MatrixXcd qdag = qr.q.adjoint();  // rnew x (dr*q), orthonormal rows
    DenseTensor qt = DenseTensor::from_matrix(qdag, {rnew}, {dr, q});
    m.set_site(site, std::move(qt));

    const MatrixXcd rdag = qr.r.adjoint();  // dl x rnew
    const DenseTensor& prev = m.site(site - 1);
    const std::size_t pl = prev.dim(0);
    DenseTensor updated({pl, rnew, q});
    for (std::size_t k = 0; k < pl; ++k) {
        for (std::size_t l = 0; l < rnew; ++l) {
            for (std::size_t s = 0; s < q; ++s) {
                Complex acc(0.0, 0.0);
                for (std::size_t j = 0; j < dl; ++j) {
                    acc += prev.at({k, j, s}) * rdag(j, l);
                }
                updated.at({k, l, s}) = acc;
            }
        }
    }
    m.set_site(site - 1, std::move(updated));
}

double products_energy(const MpsState& m, const std::vector<ProductOperator>& products) {
    Complex num(0.0, 0.0);
    for (const auto& op : products) {
        num += mps_product_value(m, op);
    }
    const double n2 = mps_norm_squared(m);
    return num.real() / n2;
}

MatrixXcd term_transfer(const MpsState& m, const ProductOperator& op, int i) {
    auto it = op.site_ops.find(i);
    return (it == op.site_ops.end()) ? m.transfer_identity(i) : m.transfer_with_op(i, it->second);
}

// suffix[t][i] = F_{i+1} ... F_{N-1} for term t; sites past the last
// non-identity op share the metric suffix.
void build_suffix_lists(const MpsState& m, const std::vector<ProductOperator>& products,
                        std::vector<std::vector<MatrixXcd>>& suffix,
                        std::vector<MatrixXcd>& metric_suffix) {
    const int n = m.n_sites();
    const std::size_t wrap = m.site(0).dim(0);
    metric_suffix.assign(n, MatrixXcd());
    metric_suffix[n - 1] = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
    for (int i = n - 2; i >= 0; --i) {
        metric_suffix[i] = m.transfer_identity(i + 1) * metric_suffix[i + 1];
    }
    suffix.assign(products.size(), std::vector<MatrixXcd>(n));
    for (std::size_t t = 0; t < products.size(); ++t) {
        const auto& op = products[t];
        const int last = op.site_ops.empty() ? -1 : op.site_ops.rbegin()->first;
        suffix[t][n - 1] = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
        for (int i = n - 2; i >= 0; --i) {
            if (i + 1 > last) {
                suffix[t][i] = metric_suffix[i];
            } else {
                suffix[t][i] = term_transfer(m, op, i + 1) * suffix[t][i + 1];
            }
        }
    }
}

// prefix[t][i] = F_0 ... F_{i-1} for term t.
void build_prefix_lists(const MpsState& m, const std::vector<ProductOperator>& products,
                        std::vector<std::vector<MatrixXcd>>& prefix,
                        std::vector<MatrixXcd>& metric_prefix) {
    const int n = m.n_sites();
    const std::size_t wrap = m.site(0).dim(0);
    metric_prefix.assign(n, MatrixXcd());
    metric_prefix[0] = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
    for (int i = 1; i < n; ++i) {
        metric_prefix[i] = metric_prefix[i - 1] * m.transfer_identity(i - 1);
    }
    prefix.assign(products.size(), std::vector<MatrixXcd>(n));
    for (std::size_t t = 0; t < products.size(); ++t) {
        const auto& op = products[t];
        const int first = op.site_ops.empty() ? n : op.site_ops.begin()->first;
        prefix[t][0] = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
        for (int i = 1; i < n; ++i) {
            if (i - 1 < first) {
                prefix[t][i] = metric_prefix[i];
            } else {
                prefix[t][i] = prefix[t][i - 1] * term_transfer(m, op, i - 1);
            }
        }
    }
}

}  // namespace

std::pair<MpsState, SweepTrace> mps_sweep_minimize_products(
    const MpsState& input, const std::vector<ProductOperator>& products,
    const SweepOptions& opts) {
    if (opts.max_sweeps < 1) {
        throw std::invalid_argument("max_sweeps must be >= 1");
    }
    MpsState m = input;
    const int n = m.n_sites();
    const bool canonical = (m.boundary() == Boundary::open) && n > 1;
    if (canonical) {
        m = mps_canonicalize_open(m, 0);
    }

    SweepTrace trace;
    trace.energies.push_back(products_energy(m, products));
    const MatrixXcd id_op = MatrixXcd::Identity(m.local_dim(), m.local_dim());

    // env for the current site is suffix * prefix: the suffix columns meet the
    // prefix rows through the wrap bond.
    auto update_site = [&](int site, const std::vector<MatrixXcd>& term_envs,
                           const MatrixXcd& metric_env) {
        const std::size_t dl = static_cast<std::size_t>(m.left_dim(site));
        const std::size_t dr = static_cast<std::size_t>(m.right_dim(site));
        const std::size_t q = static_cast<std::size_t>(m.local_dim());
        const std::size_t dim = dl * dr * q;
        MatrixXcd heff = MatrixXcd::Zero(dim, dim);
        MatrixXcd metric = MatrixXcd::Zero(dim, dim);
        accumulate_effective(metric, metric_env, id_op, Complex(1.0, 0.0), dl, dr, q);
        for (std::size_t t = 0; t < products.size(); ++t) {
            const auto& op = products[t];
            auto it = op.site_ops.find(site);
            const MatrixXcd& local = (it == op.site_ops.end()) ? id_op : it->second;
            accumulate_effective(heff, term_envs[t], local, op.coefficient, dl, dr, q);
        }
        try {
            const GeneralizedEigSolution sol = solve_generalized_eig_min(
                (heff + heff.adjoint()) * 0.5, metric, opts.metric_cutoff);
            m.set_site(site, tensor_from_flat(sol.eigenvector, dl, dr, q));
            trace.energies.push_back(sol.eigenvalue);
        } catch (const std::runtime_error&) {
            ++trace.skipped_updates;
        }
    };

    std::vector<MatrixXcd> term_envs(products.size());
    double sweep_energy = trace.energies.front();
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        // Forward pass: suffixes precomputed, prefixes advance with the sweep.
        {
            std::vector<std::vector<MatrixXcd>> suffix;
            std::vector<MatrixXcd> metric_suffix;
            build_suffix_lists(m, products, suffix, metric_suffix);
            const std::size_t wrap = m.site(0).dim(0);
            std::vector<MatrixXcd> prefix(products.size(),
                                          MatrixXcd::Identity(wrap * wrap, wrap * wrap));
            MatrixXcd metric_prefix = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
            for (int site = 0; site < n; ++site) {
                for (std::size_t t = 0; t < products.size(); ++t) {
                    term_envs[t] = suffix[t][site] * prefix[t];
                }
                update_site(site, term_envs, metric_suffix[site] * metric_prefix);
                if (canonical && site < n - 1) {
                    shift_center_right(m, site);
                }
                if (site < n - 1) {
                    metric_prefix = metric_prefix * m.transfer_identity(site);
                    for (std::size_t t = 0; t < products.size(); ++t) {
                        prefix[t] = prefix[t] * term_transfer(m, products[t], site);
                    }
                }
            }
        }
        // Backward pass: prefixes precomputed, suffixes advance with the sweep.
        {
            std::vector<std::vector<MatrixXcd>> prefix;
            std::vector<MatrixXcd> metric_prefix;
            build_prefix_lists(m, products, prefix, metric_prefix);
            const std::size_t wrap = m.site(0).dim(0);
            std::vector<MatrixXcd> suffix(products.size(),
                                          MatrixXcd::Identity(wrap * wrap, wrap * wrap));
            MatrixXcd metric_suffix = MatrixXcd::Identity(wrap * wrap, wrap * wrap);
            for (int site = n - 1; site >= 0; --site) {
                for (std::size_t t = 0; t < products.size(); ++t) {
                    term_envs[t] = suffix[t] * prefix[t][site];
                }
                update_site(site, term_envs, metric_suffix * metric_prefix[site]);
                if (canonical && site > 0) {
                    shift_center_left(m, site);
                }
                if (site > 0) {
                    metric_suffix = m.transfer_identity(site) * metric_suffix;
                    for (std::size_t t = 0; t < products.size(); ++t) {
                        suffix[t] = term_transfer(m, products[t], site) * suffix[t];
                    }
                }
            }
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
    return {std::move(m), std::move(trace)};
}

std::pair<MpsState, SweepTrace> mps_sweep_minimize(const MpsState& m, const HamiltonianSum& h,
                                                   int max_sweeps, double rel_tol) {
    std::vector<ProductOperator> products;
    products.reserve(h.terms.size());
    for (const auto& t : h.terms) {
        products.push_back(ProductOperator::from_pauli(t));
    }
    SweepOptions opts;
    opts.max_sweeps = max_sweeps;
    opts.rel_tol = rel_tol;
    return mps_sweep_minimize_products(m, products, opts);
}

MpsState mps_canonicalize_open(const MpsState& input, int center) {
    if (input.boundary() != Boundary::open) {
        throw std::invalid_argument("canonicalize requires an open-boundary MPS");
    }
    if (center < 0 || center >= input.n_sites()) {
        throw std::invalid_argument("center out of range");
    }
    MpsState m = input;
    for (int i = 0; i < center; ++i) {
        shift_center_right(m, i);
    }
    for (int i = m.n_sites() - 1; i > center; --i) {
        shift_center_left(m, i);
    }
    return m;
}

}  // namespace rage
