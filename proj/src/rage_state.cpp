#include "rage/rage_state.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rage/linalg.hpp"

namespace rage {

namespace {

int backbone_sites(const std::variant<MpsState, TtsState>& b) {
    return std::visit([](const auto& s) { return s.n_sites(); }, b);
}

int backbone_dim(const std::variant<MpsState, TtsState>& b) {
    return std::visit([](const auto& s) { return s.local_dim(); }, b);
}

}  // namespace

RageState::RageState(MpsState b, AdjacencyPhases p, LocalRotations v)
    : backbone(std::move(b)), phases(std::move(p)), rotations(std::move(v)) {
    if (phases.n_sites() != n_sites() || rotations.n_sites() != n_sites()) {
        throw std::invalid_argument("backbone, phases and rotations site counts differ");
    }
    if (phases.local_dim() != local_dim()) {
        throw std::invalid_argument("phase layer local dimension mismatch");
    }
    if (local_dim() != 2 && !rotations.is_identity()) {
        throw std::invalid_argument("non-identity rotations require qubits");
    }
}

RageState::RageState(TtsState b, AdjacencyPhases p, LocalRotations v)
    : backbone(std::move(b)), phases(std::move(p)), rotations(std::move(v)) {
    if (phases.n_sites() != n_sites() || rotations.n_sites() != n_sites()) {
        throw std::invalid_argument("backbone, phases and rotations site counts differ");
    }
    if (phases.local_dim() != local_dim()) {
        throw std::invalid_argument("phase layer local dimension mismatch");
    }
    if (local_dim() != 2 && !rotations.is_identity()) {
        throw std::invalid_argument("non-identity rotations require qubits");
    }
}

int RageState::n_sites() const { return backbone_sites(backbone); }
int RageState::local_dim() const { return backbone_dim(backbone); }

std::vector<MatrixXcd> rotation_matrices(const LocalRotations& rotations, int local_dim) {
    std::vector<MatrixXcd> out;
    out.reserve(rotations.n_sites());
    for (int i = 0; i < rotations.n_sites(); ++i) {
        if (local_dim == 2) {
            out.push_back(rotations.matrix(i));
        } else {
            out.push_back(MatrixXcd::Identity(local_dim, local_dim));
        }
    }
    return out;
}

std::vector<ProductOperator> dress_through_layer(const ProductOperator& op,
                                                 const AdjacencyPhases& phases,
                                                 const std::vector<MatrixXcd>* rotations,
                                                 int branch_limit) {
    const int n = phases.n_sites();
    const int q = phases.local_dim();

    // Rotate the per-site operators: O -> V^dag O V.
    std::map<int, MatrixXcd> ops;
    for (const auto& [site, o] : op.site_ops) {
        if (rotations != nullptr) {
            const MatrixXcd& v = (*rotations)[site];
            ops[site] = v.adjoint() * o * v;
        } else {
            ops[site] = o;
        }
    }

    // Branch sites: any off-diagonal entry survives the rotation.
    std::vector<int> branch_sites;
    std::vector<std::vector<std::pair<int, int>>> transitions;  // (bra t, ket s)
    for (const auto& [site, o] : ops) {
        bool diag = true;
        for (int t = 0; t < q && diag; ++t) {
            for (int s = 0; s < q; ++s) {
                if (t != s && std::abs(o(t, s)) > 1e-15) {
                    diag = false;
                    break;
                }
            }
        }
        if (!diag) {
            branch_sites.push_back(site);
            std::vector<std::pair<int, int>> tr;
            for (int t = 0; t < q; ++t) {
                for (int s = 0; s < q; ++s) {
                    if (std::abs(o(t, s)) > 1e-15) {
                        tr.emplace_back(t, s);
                    }
                }
            }
            transitions.push_back(std::move(tr));
        }
    }

    double count = 1.0;
    for (const auto& tr : transitions) {
        count *= static_cast<double>(tr.size());
    }
    if (count > static_cast<double>(branch_limit)) {
        throw std::runtime_error("operator support too entangled with the phase layer");
    }

    std::vector<ProductOperator> out;
    std::vector<std::size_t> choice(branch_sites.size(), 0);
    const std::size_t n_branches = static_cast<std::size_t>(count);
    for (std::size_t br = 0; br < n_branches; ++br) {
        std::size_t tmp = br;
        for (std::size_t i = branch_sites.size(); i-- > 0;) {
            choice[i] = tmp % transitions[i].size();
            tmp /= transitions[i].size();
        }

        ProductOperator term(op.coefficient);
        Complex coeff(1.0, 0.0);
        // Phase between branching pairs: exp(i [Theta(ket) - Theta(bra)]).
        for (std::size_t i = 0; i < branch_sites.size(); ++i) {
            const auto [t_i, s_i] = transitions[i][choice[i]];
            coeff *= ops.at(branch_sites[i])(t_i, s_i);
            for (std::size_t j = i + 1; j < branch_sites.size(); ++j) {
                const auto [t_j, s_j] = transitions[j][choice[j]];
                const double theta = phases.entry(branch_sites[i], branch_sites[j], s_i, s_j) -
                                     phases.entry(branch_sites[i], branch_sites[j], t_i, t_j);
                coeff *= std::exp(Complex(0.0, theta));
            }
            MatrixXcd hop = MatrixXcd::Zero(q, q);
            hop(t_i, s_i) = 1.0;
            term.site_ops[branch_sites[i]] = hop;
        }
        term.coefficient *= coeff;

        // Diagonal dressing on every other site coupled to a branch site.
        for (int c = 0; c < n; ++c) {
            if (std::find(branch_sites.begin(), branch_sites.end(), c) != branch_sites.end()) {
                continue;
            }
            Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
            for (std::size_t i = 0; i < branch_sites.size(); ++i) {
                const auto [t_i, s_i] = transitions[i][choice[i]];
                theta += phases.site_phases(branch_sites[i], c, s_i) -
                         phases.site_phases(branch_sites[i], c, t_i);
            }
            const bool dressed = theta.cwiseAbs().maxCoeff() > 0.0;
            auto it = ops.find(c);
            if (!dressed && it == ops.end()) {
                continue;
            }
            MatrixXcd d = (it != ops.end()) ? it->second : MatrixXcd::Identity(q, q);
            if (dressed) {
                MatrixXcd phase_op = MatrixXcd::Zero(q, q);
                for (int s = 0; s < q; ++s) {
                    phase_op(s, s) = std::exp(Complex(0.0, theta(s)));
                }
                d = phase_op * d;
            }
            term.site_ops[c] = d;
        }
        out.push_back(std::move(term));
    }
    return out;
}

double rage_norm_squared(const RageState& r) {
    // Phases and rotations are unitary and cancel in the norm.
    if (r.has_mps()) {
        return mps_norm_squared(r.mps());
    }
    return tts_norm_squared(r.tts());
}

namespace {

Complex backbone_product_value(const RageState& r, const ProductOperator& op) {
    if (r.has_mps()) {
        return mps_product_value(r.mps(), op);
    }
    return tts_product_value(r.tts(), op);
}

}  // namespace

Complex rage_product_value(const RageState& r, const ProductOperator& op) {
    const std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
    Complex acc(0.0, 0.0);
    for (const auto& term : dress_through_layer(op, r.phases, &rot)) {
        acc += backbone_product_value(r, term);
    }
    return acc;
}

namespace {

MatrixXcd reduced_density_impl(const RageState& r, const std::vector<int>& support) {
    const int n = r.n_sites();
    const int q = r.local_dim();
    if (support.empty() || static_cast<int>(support.size()) > 4) {
        throw std::invalid_argument("support size must be between 1 and 4");
    }
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || support[i] >= n) {
            throw std::invalid_argument("support site out of range");
        }
        if (i + 1 < support.size() && support[i] >= support[i + 1]) {
            throw std::invalid_argument("support must be strictly ascending");
        }
    }

    std::size_t dim = 1;
    for (std::size_t i = 0; i < support.size(); ++i) {
        dim *= static_cast<std::size_t>(q);
    }
    MatrixXcd rho = MatrixXcd::Zero(dim, dim);
    std::vector<int> s_digits(support.size()), r_digits(support.size());
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
            // <s|rho|r> = <psi| (|r><s|)^(S) |psi> on the phase-dressed
            // backbone; rotations are applied afterwards.
            ProductOperator op;
            for (std::size_t i = 0; i < support.size(); ++i) {
                MatrixXcd hop = MatrixXcd::Zero(q, q);
                hop(r_digits[i], s_digits[i]) = 1.0;
                op.site_ops[support[i]] = hop;
            }
            const auto dressed = dress_through_layer(op, r.phases, nullptr);
            Complex val(0.0, 0.0);
            for (const auto& term : dressed) {
                val += backbone_product_value(r, term);
            }
            rho(srow, rcol) = val;
        }
    }

    // Apply the local rotations on the support: rho -> V rho V^dag.
    if (q == 2 && !r.rotations.is_identity()) {
        MatrixXcd v = MatrixXcd::Identity(1, 1);
        for (int site : support) {
            const MatrixXcd vi = r.rotations.matrix(site);
            MatrixXcd next(v.rows() * 2, v.cols() * 2);
            for (Eigen::Index i = 0; i < v.rows(); ++i) {
                for (Eigen::Index j = 0; j < v.cols(); ++j) {
                    next.block(i * 2, j * 2, 2, 2) = v(i, j) * vi;
                }
            }
            v = std::move(next);
        }
        rho = v * rho * v.adjoint();
    }

    const Complex tr = rho.trace();
    if (std::abs(tr) <= 0.0) {
        throw std::runtime_error("reduced density has zero trace");
    }
    return rho / tr;
}

}  // namespace

MatrixXcd rage_reduced_density(const RageState& r, const std::vector<int>& support) {
    return reduced_density_impl(r, support);
}

MatrixXcd rage_reduced_density_mps(const RageState& r, const std::vector<int>& support) {
    if (!r.has_mps()) {
        throw std::invalid_argument("state does not carry an MPS backbone");
    }
    return reduced_density_impl(r, support);
}

MatrixXcd rage_reduced_density_tts(const RageState& r, const std::vector<int>& support) {
    if (r.has_mps()) {
        throw std::invalid_argument("state does not carry a TTS backbone");
    }
    return reduced_density_impl(r, support);
}

namespace {

MatrixXcd term_matrix_on_support(const PauliString& p, const std::vector<int>& support) {
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (int site : support) {
        const Eigen::Matrix2cd o = p.site_matrix(site);
        MatrixXcd next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                next.block(i * 2, j * 2, 2, 2) = m(i, j) * o;
            }
        }
        m = std::move(next);
    }
    return m;
}

}  // namespace

double rage_expectation(const RageState& r, const HamiltonianSum& h) {
    if (h.n_sites != r.n_sites()) {
        throw std::invalid_argument("Hamiltonian site count mismatch");
    }
    const std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
    std::map<std::vector<int>, MatrixXcd> density_cache;
    double energy = 0.0;
    double norm2 = -1.0;
    for (const auto& term : h.terms) {
        const std::vector<int> supp = term.support();
        if (supp.empty()) {
            energy += term.coefficient.real();
            continue;
        }
        if (supp.size() <= 4 && r.local_dim() == 2) {
            auto it = density_cache.find(supp);
            if (it == density_cache.end()) {
                it = density_cache.emplace(supp, rage_reduced_density(r, supp)).first;
            }
            const MatrixXcd op = term_matrix_on_support(term, supp);
            energy += (term.coefficient * (op * it->second).trace()).real();
        } else {
            if (norm2 < 0.0) {
                norm2 = rage_norm_squared(r);
            }
            Complex val(0.0, 0.0);
            for (const auto& dressed :
                 dress_through_layer(ProductOperator::from_pauli(term), r.phases, &rot)) {
                val += backbone_product_value(r, dressed);
            }
            energy += val.real() / norm2;
        }
    }
    return energy;
}

std::vector<ProductOperator> rage_dressed_terms(const RageState& r, const HamiltonianSum& h) {
    const std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
    std::vector<ProductOperator> out;
    for (const auto& term : h.terms) {
        for (auto& dressed :
             dress_through_layer(ProductOperator::from_pauli(term), r.phases, &rot)) {
            out.push_back(std::move(dressed));
        }
    }
    return out;
}

UpdateResult rage_optimize_tensor(const RageState& r, int site_or_vertex, const HamiltonianSum& h,
                                  double metric_cutoff) {
    const std::vector<ProductOperator> products = rage_dressed_terms(r, h);
    RageState next = r;
    if (r.has_mps()) {
        const EffectivePair pair = mps_effective_pair_products(r.mps(), site_or_vertex, products);
        try {
            const GeneralizedEigSolution sol = solve_generalized_eig_min(
                (pair.h + pair.h.adjoint()) * 0.5, pair.metric, metric_cutoff);
            DenseTensor t({static_cast<std::size_t>(r.mps().left_dim(site_or_vertex)),
                           static_cast<std::size_t>(r.mps().right_dim(site_or_vertex)),
                           static_cast<std::size_t>(r.local_dim())});
            for (std::size_t i = 0; i < t.size(); ++i) {
                t[i] = sol.eigenvector(static_cast<Eigen::Index>(i));
            }
            next.mps().set_site(site_or_vertex, std::move(t));
            return {std::move(next), sol.eigenvalue, false};
        } catch (const std::runtime_error&) {
            return {std::move(next), rage_expectation(r, h), true};
        }
    }
    const EffectivePair pair = tts_effective_pair_products(r.tts(), site_or_vertex, products);
    try {
        const GeneralizedEigSolution sol = solve_generalized_eig_min(
            (pair.h + pair.h.adjoint()) * 0.5, pair.metric, metric_cutoff);
        DenseTensor t(r.tts().expected_shape(site_or_vertex));
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = sol.eigenvector(static_cast<Eigen::Index>(i));
        }
        next.tts().set_tensor(site_or_vertex, std::move(t));
        return {std::move(next), sol.eigenvalue, false};
    } catch (const std::runtime_error&) {
        return {std::move(next), rage_expectation(r, h), true};
    }
}

namespace {

// Energy numerator as a function of the (possibly non-unit) rotation probe
// at `site`: terms not touching the site pick up |x|^2 through V^dag V.
double rotation_numerator(const RageState& r, int site, const HamiltonianSum& h,
                          const Eigen::Vector4d& x, double rest_value) {
    std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
    rot[site] = LocalRotations::matrix_from(x);
    Complex acc(0.0, 0.0);
    for (const auto& term : h.terms) {
        if (term.letters[site] == 'I') {
            continue;
        }
        for (const auto& dressed :
             dress_through_layer(ProductOperator::from_pauli(term), r.phases, &rot)) {
            acc += backbone_product_value(r, dressed);
        }
    }
    return acc.real() + x.squaredNorm() * rest_value;
}

}  // namespace

UpdateResult rage_optimize_rotation(const RageState& r, int site, const HamiltonianSum& h) {
    if (r.local_dim() != 2) {
        throw std::invalid_argument("rotation optimization requires qubits");
    }
    const double norm2 = rage_norm_squared(r);

    // Terms that do not touch the site contribute a fixed numerator value.
    double rest = 0.0;
    {
        const std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
        Complex acc(0.0, 0.0);
        for (const auto& term : h.terms) {
            if (term.letters[site] != 'I') {
                continue;
            }
            for (const auto& dressed :
                 dress_through_layer(ProductOperator::from_pauli(term), r.phases, &rot)) {
                acc += backbone_product_value(r, dressed);
            }
        }
        rest = acc.real();
    }

    // Polarization probes reconstruct the real symmetric numerator form.
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    double diag[4];
    for (int i = 0; i < 4; ++i) {
        diag[i] = rotation_numerator(r, site, h, Eigen::Vector4d::Unit(i), rest);
        m(i, i) = diag[i];
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const double nij = rotation_numerator(
                r, site, h, Eigen::Vector4d::Unit(i) + Eigen::Vector4d::Unit(j), rest);
            m(i, j) = m(j, i) = 0.5 * (nij - diag[i] - diag[j]);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
    Eigen::Vector4d x = eig.eigenvectors().col(0);
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (std::abs(x(i)) > std::abs(x(best))) {
            best = i;
        }
    }
    if (x(best) < 0.0) {
        x = -x;
    }
    RageState next = r;
    next.rotations.set_parameters(site, x);
    return {std::move(next), eig.eigenvalues()(0) / norm2, false};
}

namespace {

double energy_with_pair_phase(const RageState& r, int a, int b, double phi,
                              const HamiltonianSum& dependent_terms, double static_part,
                              double norm2) {
    RageState probe = r;
    probe.phases.set_phase(a, b, phi);
    const std::vector<MatrixXcd> rot = rotation_matrices(probe.rotations, probe.local_dim());
    Complex acc(0.0, 0.0);
    for (const auto& term : dependent_terms.terms) {
        for (const auto& dressed :
             dress_through_layer(ProductOperator::from_pauli(term), probe.phases, &rot)) {
            acc += backbone_product_value(probe, dressed);
        }
    }
    return acc.real() / norm2 + static_part;
}

// Splits H into terms whose branch sites meet {a, b} (phi-dependent) and the
// rest; only the former need re-evaluation while probing.
std::pair<HamiltonianSum, double> split_phase_dependence(const RageState& r, int a, int b,
                                                         const HamiltonianSum& h, double norm2) {
    const std::vector<MatrixXcd> rot = rotation_matrices(r.rotations, r.local_dim());
    const int q = r.local_dim();
    HamiltonianSum dependent(h.n_sites);
    Complex static_acc(0.0, 0.0);
    for (const auto& term : h.terms) {
        bool depends = false;
        for (int site : {a, b}) {
            if (term.letters[site] == 'I') {
                continue;
            }
            const MatrixXcd o =
                rot[site].adjoint() * term.site_matrix(site).cast<Complex>() * rot[site];
            for (int t = 0; t < q && !depends; ++t) {
                for (int s = 0; s < q; ++s) {
                    if (t != s && std::abs(o(t, s)) > 1e-15) {
                        depends = true;
                        break;
                    }
                }
            }
        }
        if (depends) {
            dependent.terms.push_back(term);
        } else {
            for (const auto& dressed :
                 dress_through_layer(ProductOperator::from_pauli(term), r.phases, &rot)) {
                static_acc += backbone_product_value(r, dressed);
            }
        }
    }
    return {std::move(dependent), static_acc.real() / norm2};
}

}  // namespace

PhaseOptimizationCoefficients rage_phase_coefficients(const RageState& r, int site_a, int site_b,
                                                      const HamiltonianSum& h) {
    if (r.local_dim() != 2) {
        throw std::invalid_argument("phase coefficients require qubits");
    }
    const double norm2 = rage_norm_squared(r);
    const auto [dependent, static_part] = split_phase_dependence(r, site_a, site_b, h, norm2);

    const double e0 = energy_with_pair_phase(r, site_a, site_b, 0.0, dependent, static_part, norm2);
    const double e_half =
        energy_with_pair_phase(r, site_a, site_b, M_PI / 2.0, dependent, static_part, norm2);
    const double e_pi = energy_with_pair_phase(r, site_a, site_b, M_PI, dependent, static_part, norm2);

    PhaseOptimizationCoefficients c;
    c.a = 0.5 * (e0 + e_pi);
    c.b = 0.5 * (e0 - e_pi);
    c.gamma = e_half - c.a;

    // Fourth-probe validation: the dependence must be exactly trigonometric.
    const double probe = 1.0;
    const double predicted = c.a + c.b * std::cos(probe) + c.gamma * std::sin(probe);
    const double actual =
        energy_with_pair_phase(r, site_a, site_b, probe, dependent, static_part, norm2);
    const double scale = std::max({1.0, std::abs(c.a), std::abs(c.b), std::abs(c.gamma)});
    if (std::abs(predicted - actual) > 1e-9 * scale) {
        throw std::runtime_error("phase coefficient reconstruction failed validation");
    }
    return c;
}

double phase_minimizer(const PhaseOptimizationCoefficients& c) {
    const double radius = std::hypot(c.b, c.gamma);
    if (radius < 1e-15) {
        return 0.0;
    }
    double phi = std::atan2(c.gamma, c.b) + M_PI;
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) {
        phi += 2.0 * M_PI;
    }
    return phi;
}

UpdateResult rage_optimize_phase(const RageState& r, int site_a, int site_b,
                                 const HamiltonianSum& h) {
    const PhaseOptimizationCoefficients c = rage_phase_coefficients(r, site_a, site_b, h);
    const double radius = std::hypot(c.b, c.gamma);
    RageState next = r;
    if (radius < 1e-15) {
        return {std::move(next), rage_expectation(r, h), false};
    }
    const double current = r.phases.phase(site_a, site_b);
    const double current_energy = c.a + c.b * std::cos(current) + c.gamma * std::sin(current);
    const double phi = phase_minimizer(c);
    const double new_energy = c.a + c.b * std::cos(phi) + c.gamma * std::sin(phi);
    if (new_energy <= current_energy) {
        next.phases.set_phase(site_a, site_b, phi);
        return {std::move(next), new_energy, false};
    }
    return {std::move(next), current_energy, false};
}

namespace {

struct FlatParams {
    std::vector<std::pair<int, int>> phase_pairs;
    int n_rotation_sites = 0;
};

Eigen::VectorXd pack_params(const RageState& r, const FlatParams& layout, bool phases,
                            bool rotations) {
    std::vector<double> vals;
    if (phases) {
        for (const auto& [a, b] : layout.phase_pairs) {
            vals.push_back(r.phases.phase(a, b));
        }
    }
    if (rotations) {
        for (int i = 0; i < layout.n_rotation_sites; ++i) {
            const Eigen::Vector4d x = r.rotations.parameters(i);
            for (int k = 0; k < 4; ++k) {
                vals.push_back(x(k));
            }
        }
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = vals[i];
    }
    return out;
}

RageState unpack_params(const RageState& base, const FlatParams& layout, bool phases,
                        bool rotations, const Eigen::VectorXd& v) {
    RageState out = base;
    Eigen::Index pos = 0;
    if (phases) {
        for (const auto& [a, b] : layout.phase_pairs) {
            out.phases.set_phase(a, b, v(pos++));
        }
    }
    if (rotations) {
        for (int i = 0; i < layout.n_rotation_sites; ++i) {
            Eigen::Vector4d x;
            for (int k = 0; k < 4; ++k) {
                x(k) = v(pos++);
            }
            const double n = x.norm();
            if (n < 1e-12) {
                x = Eigen::Vector4d(1, 0, 0, 0);
            } else {
                x /= n;
            }
            out.rotations.set_parameters(i, x);
        }
    }
    return out;
}

// One finite-difference gradient pass with backtracking; returns the state
// with the lowest energy found.
std::pair<RageState, double> gradient_refinement_pass(const RageState& r, const HamiltonianSum& h,
                                                      bool phases, bool rotations,
                                                      double current_energy) {
    FlatParams layout;
    if (phases) {
        const int n = r.n_sites();
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                layout.phase_pairs.emplace_back(a, b);
            }
        }
    }
    if (rotations) {
        layout.n_rotation_sites = r.n_sites();
    }
    const Eigen::VectorXd p0 = pack_params(r, layout, phases, rotations);
    if (p0.size() == 0) {
        return {r, current_energy};
    }
    const double step = 1e-6;
    Eigen::VectorXd grad(p0.size());
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
        Eigen::VectorXd p = p0;
        p(i) += step;
        const double e = rage_expectation(unpack_params(r, layout, phases, rotations, p), h);
        grad(i) = (e - current_energy) / step;
    }
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 < 1e-20) {
        return {r, current_energy};
    }
    double t = 1.0;
    for (int iter = 0; iter < 30; ++iter) {
        const Eigen::VectorXd p = p0 - t * grad;
        RageState cand = unpack_params(r, layout, phases, rotations, p);
        const double e = rage_expectation(cand, h);
        if (e < current_energy - 1e-4 * t * gnorm2) {
            return {std::move(cand), e};
        }
        t *= 0.5;
    }
    return {r, current_energy};
}

}  // namespace

AlternatingResult rage_alternating_minimize(const RageState& r, const HamiltonianSum& h,
                                            const AlternatingSchedule& schedule, double rel_tol,
                                            int max_rounds) {
    const auto t_start = std::chrono::steady_clock::now();
    AlternatingResult result{r, {}, 0, false, false, 0.0};
    double energy = rage_expectation(result.state, h);
    result.energy_trace.push_back(energy);

    const int n = result.state.n_sites();
    bool gradient_used = false;
    int flat_rounds = 0;
    for (int round = 0; round < max_rounds; ++round) {
        const double round_start = energy;
        if (schedule.tensors) {
            const std::vector<ProductOperator> products =
                rage_dressed_terms(result.state, h);
            SweepOptions opts;
            opts.max_sweeps = 1;
            opts.rel_tol = 0.0;
            if (result.state.has_mps()) {
                auto [m, trace] = mps_sweep_minimize_products(result.state.mps(), products, opts);
                result.state.mps() = std::move(m);
                for (std::size_t i = 1; i < trace.energies.size(); ++i) {
                    result.energy_trace.push_back(trace.energies[i]);
                }
            } else {
                auto [t, trace] = tts_sweep_minimize_products(result.state.tts(), products, opts);
                result.state.tts() = std::move(t);
                for (std::size_t i = 1; i < trace.energies.size(); ++i) {
                    result.energy_trace.push_back(trace.energies[i]);
                }
            }
            if (!result.energy_trace.empty()) {
                energy = result.energy_trace.back();
            }
        }
        if (schedule.rotations && result.state.local_dim() == 2) {
            for (int site = 0; site < n; ++site) {
                UpdateResult u = rage_optimize_rotation(result.state, site, h);
                result.state = std::move(u.state);
                energy = u.energy;
                result.energy_trace.push_back(energy);
            }
        }
        if (schedule.phases && result.state.local_dim() == 2) {
            for (int a = 0; a < n; ++a) {
                for (int b = a + 1; b < n; ++b) {
                    UpdateResult u = rage_optimize_phase(result.state, a, b, h);
                    result.state = std::move(u.state);
                    energy = u.energy;
                    result.energy_trace.push_back(energy);
                }
            }
        }
        result.rounds = round + 1;

        const double scale = std::max(1.0, std::abs(energy));
        if (std::abs(energy - round_start) < rel_tol * scale) {
            ++flat_rounds;
        } else {
            flat_rounds = 0;
        }
        if (flat_rounds >= 5) {
            result.stall_detected = true;
        }
        if (flat_rounds >= 1) {
            if (!gradient_used && schedule.gradient_refinement &&
                (schedule.phases || schedule.rotations) && result.state.local_dim() == 2) {
                gradient_used = true;
                auto [refined, e] = gradient_refinement_pass(
                    result.state, h, schedule.phases, schedule.rotations, energy);
                if (e < energy - rel_tol * scale) {
                    result.state = std::move(refined);
                    energy = e;
                    result.energy_trace.push_back(energy);
                    flat_rounds = 0;
                    continue;
                }
            }
            result.converged = true;
            break;
        }
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

MatrixXcd PhaseConjugatedOperator::dense() const {
    const std::size_t dim = std::size_t(1) << n_sites;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (const auto& term : branches) {
        MatrixXcd m = MatrixXcd::Identity(1, 1);
        for (int site = 0; site < n_sites; ++site) {
            MatrixXcd o = MatrixXcd::Identity(2, 2);
            auto it = term.site_ops.find(site);
            if (it != term.site_ops.end()) {
                o = it->second;
            }
            MatrixXcd next(m.rows() * 2, m.cols() * 2);
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    next.block(i * 2, j * 2, 2, 2) = m(i, j) * o;
                }
            }
            m = std::move(next);
        }
        out += term.coefficient * m;
    }
    return out;
}

PhaseConjugatedOperator pauli_conjugate_through_phases(const PauliString& p,
                                                       const AdjacencyPhases& phases,
                                                       const LocalRotations& rotations) {
    if (phases.local_dim() != 2) {
        throw std::invalid_argument("phase conjugation is implemented for qubits");
    }
    if (static_cast<int>(p.support().size()) > 2) {
        throw std::invalid_argument("Pauli support must be at most 2");
    }
    const std::vector<MatrixXcd> rot = rotation_matrices(rotations, 2);
    PhaseConjugatedOperator out;
    out.n_sites = p.n_sites;
    out.branches = dress_through_layer(ProductOperator::from_pauli(p), phases, &rot);
    return out;
}

namespace {

// Per-letter image under conjugation by one Clifford gate: U^dag P U.
PauliString gate_image(int n, const CliffordGate& g, int site, char letter) {
    std::string id(n, 'I');
    auto make = [&](const std::string& letters, double sign) {
        return PauliString(n, letters, Complex(sign, 0.0));
    };
    std::string s = id;
    switch (g.kind) {
        case CliffordGate::Kind::H:
            if (site == g.a) {
                if (letter == 'X') {
                    s[site] = 'Z';
                    return make(s, 1);
                }
                if (letter == 'Z') {
                    s[site] = 'X';
                    return make(s, 1);
                }
                if (letter == 'Y') {
                    s[site] = 'Y';
                    return make(s, -1);
                }
            }
            break;
        case CliffordGate::Kind::S:
            if (site == g.a) {
                if (letter == 'X') {
                    s[site] = 'Y';
                    return make(s, -1);
                }
                if (letter == 'Y') {
                    s[site] = 'X';
                    return make(s, 1);
                }
            }
            break;
        case CliffordGate::Kind::CZ:
            if (site == g.a || site == g.b) {
                const int other = (site == g.a) ? g.b : g.a;
                if (letter == 'X' || letter == 'Y') {
                    s[site] = letter;
                    s[other] = 'Z';
                    return make(s, 1);
                }
            }
            break;
        case CliffordGate::Kind::CNOT:
            if (site == g.a) {  // control
                if (letter == 'X' || letter == 'Y') {
                    s[site] = letter;
                    s[g.b] = 'X';
                    return make(s, 1);
                }
            } else if (site == g.b) {  // target
                if (letter == 'Y' || letter == 'Z') {
                    s[site] = letter;
                    s[g.a] = 'Z';
                    return make(s, 1);
                }
            }
            break;
    }
    s[site] = letter;
    return make(s, 1);
}

PauliString conjugate_one_gate(const PauliString& p, const CliffordGate& g) {
    PauliString result(p.n_sites, std::string(p.n_sites, 'I'), p.coefficient);
    for (int site = 0; site < p.n_sites; ++site) {
        if (p.letters[site] == 'I') {
            continue;
        }
        result = result.multiply(gate_image(p.n_sites, g, site, p.letters[site]));
    }
    return result;
}

Eigen::Matrix2cd gate_h() {
    Eigen::Matrix2cd m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Eigen::Matrix2cd gate_s() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

}  // namespace

MatrixXcd CliffordCircuit::dense() const {
    const std::size_t dim = std::size_t(1) << n_qubits;
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    for (const auto& g : gates) {
        MatrixXcd step = MatrixXcd::Identity(dim, dim);
        if (g.kind == CliffordGate::Kind::H || g.kind == CliffordGate::Kind::S) {
            const Eigen::Matrix2cd m = (g.kind == CliffordGate::Kind::H) ? gate_h() : gate_s();
            step = MatrixXcd::Zero(dim, dim);
            const std::size_t stride = std::size_t(1) << (n_qubits - 1 - g.a);
            for (std::size_t col = 0; col < dim; ++col) {
                const int bit = static_cast<int>((col / stride) % 2);
                for (int row_bit = 0; row_bit < 2; ++row_bit) {
                    const std::size_t row = (col - bit * stride) + row_bit * stride;
                    step(row, col) += m(row_bit, bit);
                }
            }
        } else {
            for (std::size_t col = 0; col < dim; ++col) {
                const std::size_t sa = std::size_t(1) << (n_qubits - 1 - g.a);
                const std::size_t sb = std::size_t(1) << (n_qubits - 1 - g.b);
                const int ba = static_cast<int>((col / sa) % 2);
                const int bb = static_cast<int>((col / sb) % 2);
                step(col, col) = 0.0;
                if (g.kind == CliffordGate::Kind::CZ) {
                    step(col, col) = (ba == 1 && bb == 1) ? -1.0 : 1.0;
                } else {  // CNOT: flip b when a is set
                    const std::size_t row = (ba == 1) ? (col ^ sb) : col;
                    step(row, col) = 1.0;
                }
            }
        }
        u = step * u;
    }
    return u;
}

PauliString pauli_conjugate_through_clifford(const PauliString& p, const CliffordCircuit& c) {
    if (p.n_sites != c.n_qubits) {
        throw std::invalid_argument("qubit count mismatch");
    }
    PauliString result = p;
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        result = conjugate_one_gate(result, *it);
    }
    return result;
}

}  // namespace rage
