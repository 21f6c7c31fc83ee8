#include "rage/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rage/linalg.hpp"

namespace rage {

Gate Gate::single(int site, const Eigen::Matrix2cd& u) {
    Gate g;
    g.kind = Kind::single_qubit;
    g.site_a = site;
    g.matrix = u;
    g.check_unitary();
    return g;
}

Gate Gate::phase(int site, double angle) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    u(1, 1) = std::exp(Complex(0.0, angle));
    Gate g = single(site, u);
    g.angle = angle;
    return g;
}

Gate Gate::controlled(int a, int b, double angle) {
    if (a == b) {
        throw std::invalid_argument("controlled phase needs distinct sites");
    }
    Gate g;
    g.kind = Kind::controlled_phase;
    g.site_a = a;
    g.site_b = b;
    g.angle = angle;
    return g;
}

bool Gate::is_diagonal(double tol) const {
    if (kind != Kind::single_qubit) {
        return true;  // controlled phases are diagonal
    }
    return std::abs(matrix(0, 1)) < tol && std::abs(matrix(1, 0)) < tol;
}

void Gate::check_unitary(double tol) const {
    if (kind != Kind::single_qubit) {
        return;
    }
    const Eigen::Matrix2cd should_be_id = matrix.adjoint() * matrix;
    if ((should_be_id - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("single-qubit gate must be unitary");
    }
}

RageState apply_controlled_phase(const RageState& r, const Gate& g) {
    if (g.kind != Gate::Kind::controlled_phase) {
        throw std::invalid_argument("gate is not a controlled phase");
    }
    RageState out = r;
    out.phases.add_phase(g.site_a, g.site_b, g.angle);
    return out;
}

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

// Mixed bra/ket chain <psi(A, phiA)| D * G^(g) |psi(Y, phiY)> where D is a
// product of diagonal single-qubit ops and the adjacency matrices agree off
// the acted row g. Transfer matrices carry ket (Y) first, bra (conj A)
// second.
struct MixedChain {
    const MpsState* bra;  // A
    const MpsState* ket;  // Y
    const AdjacencyPhases* phi_bra;
    const AdjacencyPhases* phi_ket;
    int gate_site;
    Eigen::Matrix2cd gate;
    std::map<int, Eigen::Vector2cd> bra_diag;  // applied on the bra side
};

Eigen::Vector2cd diag_at(const MixedChain& c, int site) {
    auto it = c.bra_diag.find(site);
    if (it != c.bra_diag.end()) {
        return it->second;
    }
    return Eigen::Vector2cd(1.0, 1.0);
}

MatrixXcd mixed_transfer(const MixedChain& c, int site, int u, int v) {
    const MpsState& a = *c.bra;
    const MpsState& y = *c.ket;
    const Eigen::Vector2cd d = diag_at(c, site);
    if (site == c.gate_site) {
        return d(u) * kron(y.site_matrix(site, v), a.site_matrix(site, u).conjugate());
    }
    const double phi_y = c.phi_ket->phase(c.gate_site, site);
    const double phi_a = c.phi_bra->phase(c.gate_site, site);
    MatrixXcd out;
    for (int i = 0; i < 2; ++i) {
        Complex w = d(i);
        if (i == 1) {
            w *= std::exp(Complex(0.0, v * phi_y - u * phi_a));
        }
        const MatrixXcd piece =
            w * kron(y.site_matrix(site, i), a.site_matrix(site, i).conjugate());
        out = (i == 0) ? piece : MatrixXcd(out + piece);
    }
    return out;
}

Complex mixed_chain_value(const MixedChain& c) {
    const int n = c.ket->n_sites();
    Complex total(0.0, 0.0);
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const Complex coef = c.gate(u, v);
            if (coef == Complex(0.0, 0.0)) {
                continue;
            }
            MatrixXcd prod;
            for (int i = 0; i < n; ++i) {
                const MatrixXcd m = mixed_transfer(c, i, u, v);
                prod = (i == 0) ? m : MatrixXcd(prod * m);
            }
            total += coef * prod.trace();
        }
    }
    return total;
}

// Gradient of the chain value with respect to conj(A) entries at one site,
// flattened as (left, right, phys).
VectorXcd mixed_chain_gradient(const MixedChain& c, int site) {
    const MpsState& a = *c.bra;
    const MpsState& y = *c.ket;
    const int n = c.ket->n_sites();
    const std::size_t dla = static_cast<std::size_t>(a.left_dim(site));
    const std::size_t dra = static_cast<std::size_t>(a.right_dim(site));
    const std::size_t dly = static_cast<std::size_t>(y.left_dim(site));
    const std::size_t dry = static_cast<std::size_t>(y.right_dim(site));
    VectorXcd w = VectorXcd::Zero(static_cast<Eigen::Index>(dla * dra * 2));
    const Eigen::Vector2cd d = diag_at(c, site);

    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const Complex coef = c.gate(u, v);
            if (coef == Complex(0.0, 0.0)) {
                continue;
            }
            // Environment: product over the other sites, cyclically.
            MatrixXcd env = MatrixXcd::Identity(dry * dra, dry * dra);
            for (int step = 1; step < n; ++step) {
                env = env * mixed_transfer(c, (site + step) % n, u, v);
            }
            // Per phys slice coefficient at this site.
            for (int s = 0; s < 2; ++s) {
                Complex cs = d(s);
                if (site == c.gate_site) {
                    if (s != u) {
                        continue;
                    }
                    cs = d(u);
                } else if (s == 1) {
                    cs *= std::exp(Complex(0.0,
                                           v * c.phi_ket->phase(c.gate_site, site) -
                                               u * c.phi_bra->phase(c.gate_site, site)));
                }
                const int ket_slice = (site == c.gate_site) ? v : s;
                const MatrixXcd ys = y.site_matrix(site, ket_slice);
                for (std::size_t k = 0; k < dla; ++k) {
                    for (std::size_t l = 0; l < dra; ++l) {
                        Complex acc(0.0, 0.0);
                        for (std::size_t yk = 0; yk < dly; ++yk) {
                            for (std::size_t yl = 0; yl < dry; ++yl) {
                                acc += ys(yk, yl) * env(yl * dra + l, yk * dla + k);
                            }
                        }
                        w(static_cast<Eigen::Index>((k * dra + l) * 2 + s)) += coef * cs * acc;
                    }
                }
            }
        }
    }
    return w;
}

DenseTensor tensor_from_flat(const VectorXcd& x, std::size_t dl, std::size_t dr, std::size_t q) {
    DenseTensor t({dl, dr, q});
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = x(static_cast<Eigen::Index>(i));
    }
    return t;
}

// Metric of the bra MPS at one site (norm quadratic form).
MatrixXcd bra_metric(const MpsState& a, int site) {
    return mps_effective_pair_products(a, site, {}).metric;
}

struct FitResult {
    MpsState state;
    double quotient;
};

// Per-site quotient maximization of |<A|target>|^2 / (<A|A> n_T).
FitResult variational_fit(const MpsState& a0, const MpsState& y, const AdjacencyPhases& phi_a,
                          const AdjacencyPhases& phi_y, int gate_site,
                          const Eigen::Matrix2cd& gate, int sweeps, double cutoff,
                          double target_norm2) {
    MpsState a = a0;
    double quotient = 0.0;
    const int n = a.n_sites();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int site = 0; site < n; ++site) {
            MixedChain chain{&a, &y, &phi_a, &phi_y, gate_site, gate, {}};
            const VectorXcd w = mixed_chain_gradient(chain, site);
            const MatrixXcd metric = bra_metric(a, site);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(metric);
            const VectorXd evals = eig.eigenvalues();
            const double emax = evals.maxCoeff();
            if (!(emax > 0.0)) {
                continue;
            }
            VectorXcd x = VectorXcd::Zero(w.size());
            double gain = 0.0;
            for (Eigen::Index i = 0; i < evals.size(); ++i) {
                if (evals(i) > cutoff * emax) {
                    const Complex comp = eig.eigenvectors().col(i).dot(w);
                    x += eig.eigenvectors().col(i) * (comp / evals(i));
                    gain += std::norm(comp) / evals(i);
                }
            }
            if (gain <= 0.0) {
                continue;
            }
            x /= std::sqrt(gain);  // new state has unit norm
            fix_global_phase(x);
            a.set_site(site, tensor_from_flat(x, static_cast<std::size_t>(a.left_dim(site)),
                                              static_cast<std::size_t>(a.right_dim(site)), 2));
            quotient = gain / target_norm2;
        }
    }
    return {std::move(a), quotient};
}

MpsState widen_bonds(const MpsState& m, int target_bond) {
    const int n = m.n_sites();
    Rng noise(0x5eedULL);
    std::vector<DenseTensor> sites;
    double maxabs = 0.0;
    for (int i = 0; i < n; ++i) {
        for (const auto& v : m.site(i).data()) {
            maxabs = std::max(maxabs, std::abs(v));
        }
    }
    const double eps = 1e-3 * (maxabs > 0.0 ? maxabs : 1.0);
    for (int i = 0; i < n; ++i) {
        const DenseTensor& t = m.site(i);
        std::size_t dl = t.dim(0);
        std::size_t dr = t.dim(1);
        std::size_t new_dl = (m.boundary() == Boundary::open && i == 0)
                                 ? dl
                                 : std::max<std::size_t>(dl, static_cast<std::size_t>(target_bond));
        std::size_t new_dr = (m.boundary() == Boundary::open && i == n - 1)
                                 ? dr
                                 : std::max<std::size_t>(dr, static_cast<std::size_t>(target_bond));
        DenseTensor widened({new_dl, new_dr, t.dim(2)});
        for (std::size_t k = 0; k < new_dl; ++k) {
            for (std::size_t l = 0; l < new_dr; ++l) {
                for (std::size_t s = 0; s < t.dim(2); ++s) {
                    if (k < dl && l < dr) {
                        widened.at({k, l, s}) = t.at({k, l, s});
                    } else {
                        widened.at({k, l, s}) = eps * noise.uniform_complex();
                    }
                }
            }
        }
        sites.push_back(std::move(widened));
    }
    return MpsState(m.boundary(), m.local_dim(), std::move(sites));
}

MpsState absorb_single_qubit(const MpsState& m, int site, const Eigen::Matrix2cd& u) {
    const DenseTensor& t = m.site(site);
    DenseTensor out(t.shape());
    const std::size_t dl = t.dim(0), dr = t.dim(1);
    for (std::size_t k = 0; k < dl; ++k) {
        for (std::size_t l = 0; l < dr; ++l) {
            for (int s = 0; s < 2; ++s) {
                Complex acc(0.0, 0.0);
                for (int x = 0; x < 2; ++x) {
                    acc += u(s, x) * t.at({k, l, static_cast<std::size_t>(x)});
                }
                out.at({k, l, static_cast<std::size_t>(s)}) = acc;
            }
        }
    }
    MpsState next = m;
    next.set_site(site, std::move(out));
    return next;
}

}  // namespace

SingleQubitUpdateResult fit_backbone_toward(const RageState& r, const RageState& target,
                                            int gate_site, const Eigen::Matrix2cd& gate,
                                            int sweeps, double metric_cutoff) {
    if (!r.has_mps() || !target.has_mps() || r.local_dim() != 2) {
        throw std::invalid_argument("backbone fit requires qubit MPS backbones");
    }
    const double n_t = mps_norm_squared(target.mps());
    FitResult fit = variational_fit(r.mps(), target.mps(), r.phases, target.phases, gate_site,
                                    gate, sweeps, metric_cutoff, n_t);
    RageState out = r;
    out.mps() = std::move(fit.state);
    return {std::move(out), fit.quotient};
}

SingleQubitUpdateResult apply_single_qubit_variational(const RageState& r, const Gate& g,
                                                       const SingleQubitUpdateOptions& opts) {
    if (g.kind != Gate::Kind::single_qubit) {
        throw std::invalid_argument("gate is not single-qubit");
    }
    if (!r.has_mps() || r.local_dim() != 2) {
        throw std::invalid_argument("variational gate update requires a qubit MPS backbone");
    }
    if (!r.rotations.is_identity()) {
        throw std::invalid_argument("circuit updates assume identity local rotations");
    }
    const int site = g.site_a;

    if (g.is_diagonal()) {
        // Diagonal gates commute with the phase layer and absorb exactly.
        RageState out = r;
        out.mps() = absorb_single_qubit(r.mps(), site, g.matrix);
        return {std::move(out), 1.0};
    }

    const MpsState& y = r.mps();
    const double n_t = mps_norm_squared(y);  // gate is unitary
    MpsState a0 = (opts.target_bond_dim > 0) ? widen_bonds(y, opts.target_bond_dim) : y;
    FitResult fit = variational_fit(a0, y, r.phases, r.phases, site, g.matrix, opts.sweeps,
                                    opts.metric_cutoff, n_t);

    RageState out = r;
    out.mps() = std::move(fit.state);
    double bound = fit.quotient;

    if (opts.update_adjacency_row) {
        for (int k = 0; k < r.n_sites(); ++k) {
            if (k == site) {
                continue;
            }
            RowUpdateResult row = update_adjacency_row(out, site, k, r, g.matrix);
            if (row.accepted) {
                out = std::move(row.state);
                bound = row.quotient_after;
            }
        }
    }
    return {std::move(out), bound};
}

RowUpdateResult update_adjacency_row(const RageState& r, int acted_site, int target_site,
                                     const RageState& target, const Eigen::Matrix2cd& gate) {
    if (!r.has_mps() || !target.has_mps() || r.local_dim() != 2) {
        throw std::invalid_argument("row update requires qubit MPS backbones");
    }
    if (acted_site == target_site) {
        throw std::invalid_argument("acted and target site must differ");
    }
    const MpsState& a = r.mps();
    const MpsState& y = target.mps();
    const double n_a = mps_norm_squared(a);
    const double n_y = mps_norm_squared(y);

    MixedChain plain{&a, &y, &r.phases, &target.phases, acted_site, gate, {}};
    const Complex c1 = mixed_chain_value(plain);

    MixedChain dressed = plain;
    dressed.bra_diag[acted_site] = Eigen::Vector2cd(1.0, -1.0);
    dressed.bra_diag[target_site] = Eigen::Vector2cd(1.0, -1.0);
    const Complex c2 = mixed_chain_value(dressed);
    const Complex c3 = Complex(0.0, -1.0) * c2;  // numerator a*c1 + b*c3

    Eigen::Matrix2d quad;
    quad(0, 0) = std::norm(c1);
    quad(1, 1) = std::norm(c3);
    quad(0, 1) = quad(1, 0) = (std::conj(c1) * c3).real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(quad);

    RowUpdateResult out{r, std::norm(c1) / (n_a * n_y), 0.0, 0.0, false};
    const double lmax = eig.eigenvalues()(1);
    out.quotient_after = lmax / (n_a * n_y);
    if (lmax <= std::norm(c1) * (1.0 + 1e-12)) {
        out.quotient_after = out.quotient_before;
        return out;
    }
    Eigen::Vector2d ab = eig.eigenvectors().col(1);
    if (ab(0) < 0.0) {
        ab = -ab;
    }
    const double t = std::atan2(ab(1), ab(0));

    // exp(i t ZZ) = CP(4t) together with diag(e^{it/2}, e^{-3it/2}) on both
    // sites; all three factors are exactly representable.
    RageState next = r;
    next.phases.add_phase(acted_site, target_site, 4.0 * t);
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Identity();
    d(0, 0) = std::exp(Complex(0.0, 0.5 * t));
    d(1, 1) = std::exp(Complex(0.0, -1.5 * t));
    next.mps() = absorb_single_qubit(next.mps(), acted_site, d);
    next.mps() = absorb_single_qubit(next.mps(), target_site, d);
    out.state = std::move(next);
    out.delta_phase = 4.0 * t;
    out.accepted = true;
    return out;
}

std::vector<Gate> incremental_gate_schedule(const Gate& g, int n_steps) {
    if (g.kind != Gate::Kind::single_qubit) {
        throw std::invalid_argument("incremental schedule needs a single-qubit gate");
    }
    if (n_steps < 1) {
        throw std::invalid_argument("n_steps must be >= 1");
    }
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> eig(g.matrix);
    const Eigen::Vector2cd vals = eig.eigenvalues();
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
        // Principal branch: angles in (-pi, pi], with -1 mapped to +pi.
        const double angle = std::atan2(vals(i).imag(), vals(i).real());
        d(i, i) = std::exp(Complex(0.0, angle / n_steps));
    }
    const Eigen::Matrix2cd v = eig.eigenvectors();
    const Eigen::Matrix2cd frac = v * d * v.inverse();
    std::vector<Gate> out;
    for (int i = 0; i < n_steps; ++i) {
        Gate step = g;
        step.matrix = frac;
        step.check_unitary(1e-9);
        out.push_back(step);
    }
    return out;
}

Circuit random_circuit(int n_sites, int n_blocks, std::uint64_t seed) {
    if (n_sites < 2) {
        throw std::invalid_argument("random circuits need at least 2 sites");
    }
    if (n_blocks < 1) {
        throw std::invalid_argument("n_blocks must be >= 1");
    }
    Circuit c;
    c.n_sites = n_sites;
    c.seed = seed;
    c.n_blocks = n_blocks;
    Rng rng(seed);
    for (int b = 0; b < n_blocks; ++b) {
        const int site = rng.uniform_int(n_sites);
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        c.gates.push_back(Gate::phase(site, angle));
        const int pa = rng.uniform_int(n_sites);
        int pb = rng.uniform_int(n_sites - 1);
        if (pb >= pa) {
            ++pb;
        }
        const double pangle = rng.uniform(0.0, 2.0 * M_PI);
        c.gates.push_back(Gate::controlled(pa, pb, pangle));
    }
    return c;
}

Circuit qft_circuit(int n_sites) {
    if (n_sites < 1) {
        throw std::invalid_argument("need at least one site");
    }
    Circuit c;
    c.n_sites = n_sites;
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    for (int i = 0; i < n_sites; ++i) {
        c.gates.push_back(Gate::single(i, h));
        for (int j = i + 1; j < n_sites; ++j) {
            c.gates.push_back(Gate::controlled(i, j, M_PI / std::pow(2.0, j - i)));
        }
    }
    return c;
}

Circuit trotter_circuit(const HamiltonianSum& h, double dt, int n_steps) {
    if (n_steps < 1) {
        throw std::invalid_argument("n_steps must be >= 1");
    }
    Circuit c;
    c.n_sites = h.n_sites;
    for (int step = 0; step < n_steps; ++step) {
        for (const auto& term : h.terms) {
            const std::vector<int> supp = term.support();
            const double coeff = term.coefficient.real();
            if (std::abs(term.coefficient.imag()) > 1e-14) {
                throw std::invalid_argument("Trotter terms must carry real coefficients");
            }
            if (supp.empty()) {
                continue;  // global phase
            }
            if (supp.size() == 1) {
                const char letter = term.letters[supp[0]];
                const double theta = -coeff * dt;
                Eigen::Matrix2cd u;
                if (letter == 'X') {
                    u << std::cos(theta), Complex(0, 1) * std::sin(theta),
                        Complex(0, 1) * std::sin(theta), std::cos(theta);
                } else if (letter == 'Z') {
                    u = Eigen::Matrix2cd::Zero();
                    u(0, 0) = std::exp(Complex(0.0, theta));
                    u(1, 1) = std::exp(Complex(0.0, -theta));
                } else {
                    throw std::invalid_argument("unsupported single-site Trotter term");
                }
                c.gates.push_back(Gate::single(supp[0], u));
                continue;
            }
            if (supp.size() == 2 && term.letters[supp[0]] == 'Z' && term.letters[supp[1]] == 'Z') {
                // exp(i theta ZZ) = CP(4 theta) * D (x) D.
                const double theta = -coeff * dt;
                Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
                d(0, 0) = std::exp(Complex(0.0, 0.5 * theta));
                d(1, 1) = std::exp(Complex(0.0, -1.5 * theta));
                c.gates.push_back(Gate::single(supp[0], d));
                c.gates.push_back(Gate::single(supp[1], d));
                c.gates.push_back(Gate::controlled(supp[0], supp[1], 4.0 * theta));
                continue;
            }
            throw std::invalid_argument("unsupported Trotter term structure");
        }
    }
    return c;
}

void apply_circuit_dense(StateVector& state, const Circuit& c) {
    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::single_qubit) {
            apply_dense_single_qubit(state, g.site_a, g.matrix);
        } else {
            apply_dense_controlled_phase(state, g.site_a, g.site_b, g.angle);
        }
    }
}

FidelityTraces simulate_with_fidelity(const Circuit& c, const RageState& initial,
                                      const SimulateOptions& opts) {
    if (!initial.has_mps() || initial.local_dim() != 2) {
        throw std::invalid_argument("fidelity simulation requires a qubit MPS backbone");
    }
    if (opts.run_mps && !initial.phases.is_zero()) {
        throw std::invalid_argument("the bare-MPS method needs a phase-free initial state");
    }
    StateVector exact = expand(initial);

    RageState rage_state = initial;
    MpsState mps_state = initial.mps();
    FidelityTraces traces;

    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::single_qubit) {
            apply_dense_single_qubit(exact, g.site_a, g.matrix);
        } else {
            apply_dense_controlled_phase(exact, g.site_a, g.site_b, g.angle);
        }

        if (opts.run_rage) {
            if (g.kind == Gate::Kind::controlled_phase) {
                rage_state = apply_controlled_phase(rage_state, g);
            } else if (g.is_diagonal()) {
                rage_state.mps() = absorb_single_qubit(rage_state.mps(), g.site_a, g.matrix);
            } else {
                SingleQubitUpdateOptions uopts;
                uopts.sweeps = opts.mps_sweeps;
                uopts.metric_cutoff = opts.metric_cutoff;
                rage_state = apply_single_qubit_variational(rage_state, g, uopts).state;
            }
            traces.rage.push_back(fidelity(expand(rage_state), exact));
        }
        if (opts.run_mps) {
            if (g.kind == Gate::Kind::single_qubit) {
                mps_state = absorb_single_qubit(mps_state, g.site_a, g.matrix);
            } else {
                // Best fixed-D MPS for CP |psi>: the target is the current MPS
                // carrying a single pair phase.
                AdjacencyPhases target_phi(mps_state.n_sites(), 2);
                target_phi.set_phase(g.site_a, g.site_b, g.angle);
                const AdjacencyPhases zero(mps_state.n_sites(), 2);
                const double n_t = mps_norm_squared(mps_state);
                FitResult fit = variational_fit(mps_state, mps_state, zero, target_phi, g.site_a,
                                                Eigen::Matrix2cd::Identity(), opts.mps_sweeps,
                                                opts.metric_cutoff, n_t);
                mps_state = std::move(fit.state);
            }
            traces.mps.push_back(fidelity(expand(mps_state), exact));
        }
    }
    return traces;
}

}  // namespace rage
