#include "rage/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rage/linalg.hpp"
#include "rage/mps.hpp"
#include "rage/peps.hpp"
#include "rage/rage_state.hpp"
#include "rage/tts.hpp"
#include "rage/wgs.hpp"

#include <complex>

// LAPACK Hermitian solvers; used above the crossover where they clearly beat
// the in-process solver.
extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void zheevx_(const char* jobz, const char* range, const char* uplo, const int* n,
             std::complex<double>* a, const int* lda, const double* vl, const double* vu,
             const int* il, const int* iu, const double* abstol, int* m, double* w,
             std::complex<double>* z, const int* ldz, std::complex<double>* work,
             const int* lwork, double* rwork, int* iwork, int* ifail, int* info);
}

namespace rage {

namespace {

std::size_t int_pow(std::size_t base, int exp) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

}  // namespace

StateVector::StateVector(int num_sites, int local_dim, VectorXcd amplitudes)
    : num_sites_(num_sites), local_dim_(local_dim), amps_(std::move(amplitudes)) {
    if (num_sites_ < 1 || local_dim_ < 2) {
        throw std::invalid_argument("invalid state dimensions");
    }
    const std::size_t dim = int_pow(static_cast<std::size_t>(local_dim_), num_sites_);
    if (dim > kMaxDimension) {
        throw std::invalid_argument("system too large for the dense oracle");
    }
    if (static_cast<std::size_t>(amps_.size()) != dim) {
        throw std::invalid_argument("amplitude count does not match dimensions");
    }
}

StateVector StateVector::zero_state(int num_sites, int local_dim) {
    const std::size_t dim = int_pow(static_cast<std::size_t>(local_dim), num_sites);
    if (dim > kMaxDimension) {
        throw std::invalid_argument("system too large for the dense oracle");
    }
    VectorXcd v = VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    v(0) = 1.0;
    return StateVector(num_sites, local_dim, std::move(v));
}

void StateVector::normalize() {
    const double n = amps_.norm();
    if (n <= 0.0) {
        throw std::runtime_error("cannot normalize a zero state");
    }
    amps_ /= n;
}

int StateVector::digit(std::size_t basis_index, int site) const {
    const std::size_t stride =
        int_pow(static_cast<std::size_t>(local_dim_), num_sites_ - 1 - site);
    return static_cast<int>((basis_index / stride) % static_cast<std::size_t>(local_dim_));
}

std::size_t StateVector::with_digit(std::size_t basis_index, int site, int value) const {
    const std::size_t stride =
        int_pow(static_cast<std::size_t>(local_dim_), num_sites_ - 1 - site);
    const int old = static_cast<int>((basis_index / stride) % static_cast<std::size_t>(local_dim_));
    return basis_index + (static_cast<std::size_t>(value) - static_cast<std::size_t>(old)) * stride;
}

StateVector expand(const MpsState& state) {
    const int n = state.n_sites();
    const int q = state.local_dim();
    const std::size_t dim = int_pow(static_cast<std::size_t>(q), n);
    if (dim > StateVector::kMaxDimension) {
        throw std::invalid_argument("system too large for the dense oracle");
    }
    // Accumulate (wrap, s_0..s_k, bond) and close the wrap bond at the end.
    DenseTensor acc = state.site(0).transpose({0, 2, 1});  // (wrap, q, bond)
    for (int i = 1; i < n; ++i) {
        const DenseTensor next = state.site(i).transpose({0, 2, 1});
        acc = DenseTensor::contract(acc, next, {{acc.rank() - 1, 0}});
    }
    // acc: (wrap, s_0, ..., s_{n-1}, wrap'); trace the wrap pair.
    const std::size_t wrap = acc.dim(0);
    VectorXcd amps = VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    const std::size_t inner = dim;  // product of physical dims
    for (std::size_t w = 0; w < wrap; ++w) {
        for (std::size_t p = 0; p < inner; ++p) {
            amps(static_cast<Eigen::Index>(p)) += acc[(w * inner + p) * wrap + w];
        }
    }
    return StateVector(n, q, std::move(amps));
}

StateVector expand(const TtsState& state) {
    const TreeTopology& topo = state.topology();
    const int n = topo.n_sites;
    const int q = state.local_dim();
    const std::size_t dim = int_pow(static_cast<std::size_t>(q), n);
    if (dim > StateVector::kMaxDimension) {
        throw std::invalid_argument("system too large for the dense oracle");
    }

    // Fold tensors over a DFS; axis labels: edge id for bonds, n_edges+site
    // for physical legs.
    const int phys_offset = static_cast<int>(topo.edges.size());
    std::vector<int> order = tts_sweep_order(topo);
    DenseTensor acc({1}, {Complex(1.0, 0.0)});
    std::vector<int> labels;  // axis labels of acc (skipping the dummy axis 0 initially)
    bool first = true;
    for (int v : order) {
        const DenseTensor& t = state.tensor(v);
        std::vector<int> t_labels;
        for (int e : topo.incident[v]) {
            if (topo.edges[e].dim == 0) {
                t_labels.push_back(phys_offset + topo.leaf_site[topo.other_end(e, v)]);
            } else {
                t_labels.push_back(e);
            }
        }
        if (first) {
            acc = t;
            labels = t_labels;
            first = false;
            continue;
        }
        // Contract all shared bond labels.
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            for (std::size_t j = 0; j < t_labels.size(); ++j) {
                if (labels[i] == t_labels[j]) {
                    pairs.push_back({i, j});
                }
            }
        }
        acc = DenseTensor::contract(acc, t, pairs);
        std::vector<int> new_labels;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            bool used = false;
            for (const auto& [pi, pj] : pairs) {
                if (pi == i) {
                    used = true;
                    break;
                }
            }
            if (!used) {
                new_labels.push_back(labels[i]);
            }
        }
        for (std::size_t j = 0; j < t_labels.size(); ++j) {
            bool used = false;
            for (const auto& [pi, pj] : pairs) {
                if (pj == j) {
                    used = true;
                    break;
                }
            }
            if (!used) {
                new_labels.push_back(t_labels[j]);
            }
        }
        labels = std::move(new_labels);
    }
    // Sort physical axes by site id.
    std::vector<std::size_t> perm(labels.size());
    std::vector<std::pair<int, std::size_t>> keyed;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        keyed.push_back({labels[i], i});
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        perm[i] = keyed[i].second;
    }
    const DenseTensor sorted = acc.transpose(perm);
    VectorXcd amps(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        amps(static_cast<Eigen::Index>(i)) = sorted[i];
    }
    return StateVector(n, q, std::move(amps));
}

StateVector expand(const PepsState& state) {
    return peps_expand(state);
}

StateVector expand(const RageState& state) {
    StateVector base = state.has_mps() ? expand(state.mps()) : expand(state.tts());
    const int n = base.num_sites();
    const int q = base.local_dim();
    VectorXcd& amps = base.amplitudes();
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        double theta = 0.0;
        for (int a = 0; a < n; ++a) {
            const int sa = base.digit(static_cast<std::size_t>(idx), a);
            for (int b = a + 1; b < n; ++b) {
                theta += state.phases.entry(a, b, sa, base.digit(static_cast<std::size_t>(idx), b));
            }
        }
        amps(idx) *= std::exp(Complex(0.0, theta));
    }
    if (q == 2 && !state.rotations.is_identity()) {
        StateVector rotated = base;
        for (int site = 0; site < n; ++site) {
            apply_dense_single_qubit(rotated, site, state.rotations.matrix(site));
        }
        return rotated;
    }
    return base;
}

namespace {

// Applies one Pauli term to a basis index: new index plus the factor.
struct PauliAction {
    std::size_t index;
    Complex factor;
};

PauliAction apply_pauli_to_basis(const PauliString& p, const StateVector& ref,
                                 std::size_t basis_index) {
    PauliAction act{basis_index, p.coefficient};
    for (int site = 0; site < p.n_sites; ++site) {
        const char c = p.letters[site];
        if (c == 'I') {
            continue;
        }
        const int s = ref.digit(act.index, site);
        switch (c) {
            case 'X':
                act.index = ref.with_digit(act.index, site, 1 - s);
                break;
            case 'Y':
                act.index = ref.with_digit(act.index, site, 1 - s);
                act.factor *= (s == 0) ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
                break;
            case 'Z':
                if (s == 1) {
                    act.factor = -act.factor;
                }
                break;
            default:
                break;
        }
    }
    return act;
}

}  // namespace

Complex exact_matrix_element(const StateVector& bra, const HamiltonianSum& op,
                             const StateVector& ket) {
    if (bra.num_sites() != ket.num_sites() || op.n_sites != ket.num_sites()) {
        throw std::invalid_argument("site count mismatch");
    }
    if (ket.local_dim() != 2) {
        throw std::invalid_argument("Pauli sums act on qubits");
    }
    Complex acc(0.0, 0.0);
    const VectorXcd& a = bra.amplitudes();
    const VectorXcd& k = ket.amplitudes();
    for (const auto& term : op.terms) {
        for (Eigen::Index j = 0; j < k.size(); ++j) {
            if (k(j) == Complex(0.0, 0.0)) {
                continue;
            }
            const PauliAction act = apply_pauli_to_basis(term, ket, static_cast<std::size_t>(j));
            acc += std::conj(a(static_cast<Eigen::Index>(act.index))) * act.factor * k(j);
        }
    }
    return acc;
}

double exact_expectation(const StateVector& state, const HamiltonianSum& op) {
    const double n2 = state.norm_squared();
    if (n2 <= 0.0) {
        throw std::invalid_argument("zero-norm state");
    }
    const Complex val = exact_matrix_element(state, op, state) / n2;
    if (std::abs(val.imag()) > 1e-8) {
        throw std::runtime_error("operator expectation has a large imaginary part");
    }
    return val.real();
}

MatrixXcd dense_hamiltonian(const HamiltonianSum& h) {
    if (h.n_sites < 1) {
        throw std::invalid_argument("empty Hamiltonian");
    }
    const std::size_t dim = int_pow(2, h.n_sites);
    if (dim > StateVector::kMaxDimension) {
        throw std::invalid_argument("system too large for the dense oracle");
    }
    const StateVector ref = StateVector::zero_state(h.n_sites, 2);
    MatrixXcd m = MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& term : h.terms) {
        for (std::size_t col = 0; col < dim; ++col) {
            const PauliAction act = apply_pauli_to_basis(term, ref, col);
            m(static_cast<Eigen::Index>(act.index), static_cast<Eigen::Index>(col)) += act.factor;
        }
    }
    return m;
}

namespace {

void hermitian_eigs(const MatrixXcd& h, VectorXd& evals, MatrixXcd& evecs) {
    const int n = static_cast<int>(h.rows());
    if (n < 256) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(h);
        evals = eig.eigenvalues();
        evecs = eig.eigenvectors();
        return;
    }
    MatrixXcd a = h;  // column-major, overwritten with eigenvectors
    evals.resize(n);
    int lwork = -1, lrwork = -1, liwork = -1, info = 0;
    std::complex<double> work_query;
    double rwork_query;
    int iwork_query;
    zheevd_("V", "L", &n, a.data(), &n, evals.data(), &work_query, &lwork, &rwork_query, &lrwork,
            &iwork_query, &liwork, &info);
    lwork = static_cast<int>(work_query.real());
    lrwork = static_cast<int>(rwork_query);
    liwork = iwork_query;
    std::vector<std::complex<double>> work(static_cast<std::size_t>(lwork));
    std::vector<double> rwork(static_cast<std::size_t>(lrwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    zheevd_("V", "L", &n, a.data(), &n, evals.data(), work.data(), &lwork, rwork.data(), &lrwork,
            iwork.data(), &liwork, &info);
    if (info != 0) {
        throw std::runtime_error("dense diagonalization failed");
    }
    evecs = std::move(a);
}

}  // namespace

namespace {

// Lowest two eigenpairs of a large dense Hermitian matrix; avoids the full
// back-transformation that dominates zheevd at these sizes.
void lowest_two_eigs(const MatrixXcd& h, VectorXd& evals, MatrixXcd& evecs) {
    const int n = static_cast<int>(h.rows());
    MatrixXcd a = h;
    const int iu = std::min(2, n);
    const int il = 1;
    const double vl = 0.0, vu = 0.0;
    const double abstol = 0.0;  // default tolerance
    int m = 0, info = 0;
    evals.resize(n);
    evecs.resize(n, iu);
    int lwork = -1;
    std::complex<double> work_query;
    std::vector<double> rwork(static_cast<std::size_t>(7 * n));
    std::vector<int> iwork(static_cast<std::size_t>(5 * n));
    std::vector<int> ifail(static_cast<std::size_t>(n));
    zheevx_("V", "I", "L", &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m, evals.data(),
            evecs.data(), &n, &work_query, &lwork, rwork.data(), iwork.data(), ifail.data(),
            &info);
    lwork = static_cast<int>(work_query.real());
    std::vector<std::complex<double>> work(static_cast<std::size_t>(lwork));
    zheevx_("V", "I", "L", &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m, evals.data(),
            evecs.data(), &n, work.data(), &lwork, rwork.data(), iwork.data(), ifail.data(),
            &info);
    if (info != 0 || m < iu) {
        throw std::runtime_error("dense diagonalization failed");
    }
    evals.conservativeResize(iu);
}

}  // namespace

GroundStateResult exact_ground_state(const HamiltonianSum& h) {
    if (h.n_sites > 14) {
        throw std::invalid_argument("dense diagonalization capped at 14 sites");
    }
    const MatrixXcd m = dense_hamiltonian(h);
    VectorXd evals;
    MatrixXcd evecs;
    double range = 0.0;
    if (m.rows() <= 1024) {
        hermitian_eigs((m + m.adjoint()) * 0.5, evals, evecs);
        range = evals(evals.size() - 1) - evals(0);
    } else {
        // Above the crossover only the lowest pair is computed; the spectral
        // range for the degeneracy scale is bounded by twice the coefficient
        // 1-norm.
        lowest_two_eigs((m + m.adjoint()) * 0.5, evals, evecs);
        double coeff_norm = 0.0;
        for (const auto& term : h.terms) {
            coeff_norm += std::abs(term.coefficient);
        }
        range = 2.0 * coeff_norm;
    }

    VectorXcd ground = evecs.col(0);
    fix_global_phase(ground);
    const double e0 = evals(0);
    const double e1 = (evals.size() > 1) ? evals(1) : e0;
    const bool degenerate = (evals.size() > 1) && (e1 - e0) < 1e-10 * std::max(range, 1.0);
    return {e0, e1, StateVector(h.n_sites, 2, std::move(ground)), degenerate};
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.amplitudes().size() != b.amplitudes().size()) {
        throw std::invalid_argument("dimension mismatch");
    }
    const double na = a.norm_squared();
    const double nb = b.norm_squared();
    if (na <= 0.0 || nb <= 0.0) {
        throw std::invalid_argument("zero-norm state");
    }
    const Complex overlap = a.amplitudes().dot(b.amplitudes());
    return std::norm(overlap) / (na * nb);
}

std::vector<double> schmidt_spectrum(const StateVector& state, const std::vector<int>& left_sites) {
    const int n = state.num_sites();
    const int q = state.local_dim();
    if (left_sites.empty() || static_cast<int>(left_sites.size()) >= n) {
        throw std::invalid_argument("left set must be a nonempty proper subset");
    }
    std::vector<bool> is_left(n, false);
    for (int s : left_sites) {
        if (s < 0 || s >= n || is_left[s]) {
            throw std::invalid_argument("invalid left set");
        }
        is_left[s] = true;
    }
    const std::size_t dim_left = int_pow(static_cast<std::size_t>(q),
                                         static_cast<int>(left_sites.size()));
    const std::size_t dim_right = int_pow(static_cast<std::size_t>(q),
                                          n - static_cast<int>(left_sites.size()));
    MatrixXcd m(static_cast<Eigen::Index>(dim_left), static_cast<Eigen::Index>(dim_right));
    const VectorXcd& amps = state.amplitudes();
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        std::size_t li = 0, ri = 0;
        for (int site = 0; site < n; ++site) {
            const int d = state.digit(static_cast<std::size_t>(idx), site);
            if (is_left[site]) {
                li = li * q + static_cast<std::size_t>(d);
            } else {
                ri = ri * q + static_cast<std::size_t>(d);
            }
        }
        m(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ri)) = amps(idx);
    }
    Eigen::BDCSVD<MatrixXcd> svd(m);
    const VectorXd s = svd.singularValues();
    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.push_back(s(i) * s(i));
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

MatrixXcd partial_trace(const StateVector& state, const std::vector<int>& sites) {
    const int n = state.num_sites();
    const int q = state.local_dim();
    if (sites.empty()) {
        throw std::invalid_argument("empty site set");
    }
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 0 || sites[i] >= n || seen[sites[i]]) {
            throw std::invalid_argument("invalid site set");
        }
        if (i + 1 < sites.size() && sites[i] >= sites[i + 1]) {
            throw std::invalid_argument("sites must be ascending");
        }
        seen[sites[i]] = true;
    }
    const std::size_t dim = int_pow(static_cast<std::size_t>(q),
                                    static_cast<int>(sites.size()));
    MatrixXcd rho = MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                    static_cast<Eigen::Index>(dim));
    const VectorXcd& amps = state.amplitudes();
    std::vector<std::size_t> keys(static_cast<std::size_t>(amps.size()));
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        std::size_t key = 0;
        for (int s : sites) {
            key = key * q + static_cast<std::size_t>(state.digit(static_cast<std::size_t>(idx), s));
        }
        keys[static_cast<std::size_t>(idx)] = key;
    }
    // Group indices by the configuration of the traced-out sites.
    std::vector<std::size_t> rest_key(static_cast<std::size_t>(amps.size()));
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        std::size_t key = 0;
        for (int site = 0; site < n; ++site) {
            if (!seen[site]) {
                key = key * q +
                      static_cast<std::size_t>(state.digit(static_cast<std::size_t>(idx), site));
            }
        }
        rest_key[static_cast<std::size_t>(idx)] = key;
    }
    const std::size_t rest_dim = static_cast<std::size_t>(amps.size()) / dim;
    std::vector<std::vector<Complex>> grouped(rest_dim, std::vector<Complex>(dim, Complex(0, 0)));
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        grouped[rest_key[static_cast<std::size_t>(idx)]][keys[static_cast<std::size_t>(idx)]] =
            amps(idx);
    }
    for (std::size_t rest = 0; rest < rest_dim; ++rest) {
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b < dim; ++b) {
                rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    grouped[rest][a] * std::conj(grouped[rest][b]);
            }
        }
    }
    const double n2 = state.norm_squared();
    if (n2 <= 0.0) {
        throw std::invalid_argument("zero-norm state");
    }
    return rho / n2;
}

Complex product_expectation(const StateVector& state, const ProductOperator& op) {
    const int n = state.num_sites();
    const int q = state.local_dim();
    VectorXcd applied = state.amplitudes();
    for (const auto& [site, o] : op.site_ops) {
        if (site < 0 || site >= n) {
            throw std::invalid_argument("operator site out of range");
        }
        VectorXcd next = VectorXcd::Zero(applied.size());
        for (Eigen::Index idx = 0; idx < applied.size(); ++idx) {
            if (applied(idx) == Complex(0.0, 0.0)) {
                continue;
            }
            const int s = state.digit(static_cast<std::size_t>(idx), site);
            for (int t = 0; t < q; ++t) {
                const Complex w = o(t, s);
                if (w == Complex(0.0, 0.0)) {
                    continue;
                }
                next(static_cast<Eigen::Index>(
                    state.with_digit(static_cast<std::size_t>(idx), site, t))) +=
                    w * applied(idx);
            }
        }
        applied = std::move(next);
    }
    return op.coefficient * state.amplitudes().dot(applied);
}

void apply_dense_single_qubit(StateVector& state, int site, const Eigen::Matrix2cd& u) {
    if (state.local_dim() != 2) {
        throw std::invalid_argument("qubit gate on a non-qubit register");
    }
    VectorXcd& amps = state.amplitudes();
    const std::size_t stride = int_pow(2, state.num_sites() - 1 - site);
    for (std::size_t base = 0; base < static_cast<std::size_t>(amps.size()); ++base) {
        if ((base / stride) % 2 != 0) {
            continue;
        }
        const std::size_t i0 = base;
        const std::size_t i1 = base + stride;
        const Complex a0 = amps(static_cast<Eigen::Index>(i0));
        const Complex a1 = amps(static_cast<Eigen::Index>(i1));
        amps(static_cast<Eigen::Index>(i0)) = u(0, 0) * a0 + u(0, 1) * a1;
        amps(static_cast<Eigen::Index>(i1)) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void apply_dense_controlled_phase(StateVector& state, int a, int b, double angle) {
    if (state.local_dim() != 2) {
        throw std::invalid_argument("qubit gate on a non-qubit register");
    }
    const Complex phase = std::exp(Complex(0.0, angle));
    VectorXcd& amps = state.amplitudes();
    for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
        if (state.digit(static_cast<std::size_t>(idx), a) == 1 &&
            state.digit(static_cast<std::size_t>(idx), b) == 1) {
            amps(idx) *= phase;
        }
    }
}

}  // namespace rage
