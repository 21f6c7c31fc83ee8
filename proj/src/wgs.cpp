#include "rage/wgs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rage {

namespace {

double wrap_angle(double phi) {
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) {
        phi += 2.0 * M_PI;
    }
    return phi;
}

}  // namespace

AdjacencyPhases::AdjacencyPhases(int n_sites, int local_dim) : n_(n_sites), q_(local_dim) {
    if (n_sites < 1 || local_dim < 2) {
        throw std::invalid_argument("invalid adjacency phase dimensions");
    }
    pair_.assign(static_cast<std::size_t>(n_) * (n_ - 1) / 2, Eigen::MatrixXd::Zero(q_, q_));
}

std::size_t AdjacencyPhases::pair_index(int a, int b) const {
    if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_) {
        throw std::invalid_argument("invalid site pair");
    }
    if (a > b) {
        std::swap(a, b);
    }
    return static_cast<std::size_t>(a) * n_ - static_cast<std::size_t>(a) * (a + 1) / 2 +
           static_cast<std::size_t>(b - a - 1);
}

double AdjacencyPhases::phase(int a, int b) const {
    if (q_ != 2) {
        throw std::logic_error("scalar phase access requires qubits");
    }
    return pair_[pair_index(a, b)](1, 1);
}

void AdjacencyPhases::set_phase(int a, int b, double value) {
    if (q_ != 2) {
        throw std::logic_error("scalar phase access requires qubits");
    }
    pair_[pair_index(a, b)](1, 1) = wrap_angle(value);
}

void AdjacencyPhases::add_phase(int a, int b, double value) {
    set_phase(a, b, phase(a, b) + value);
}

double AdjacencyPhases::entry(int a, int b, int s, int t) const {
    if (a > b) {
        std::swap(a, b);
        std::swap(s, t);
    }
    return pair_[pair_index(a, b)](s, t);
}

void AdjacencyPhases::set_pair_matrix(int a, int b, const Eigen::MatrixXd& phi) {
    if (phi.rows() != q_ || phi.cols() != q_) {
        throw std::invalid_argument("pair matrix has wrong dimensions");
    }
    if (!phi.isApprox(phi.transpose(), 1e-12)) {
        throw std::invalid_argument("pair matrix must be symmetric");
    }
    for (int s = 0; s < q_; ++s) {
        if (std::abs(phi(0, s)) > 1e-12 || std::abs(phi(s, 0)) > 1e-12) {
            throw std::invalid_argument("pair matrix must vanish on the first row/column");
        }
    }
    if (a > b) {
        std::swap(a, b);
    }
    pair_[pair_index(a, b)] = phi;
}

Eigen::MatrixXd AdjacencyPhases::pair_matrix(int a, int b) const {
    if (a > b) {
        return pair_[pair_index(b, a)].transpose();
    }
    return pair_[pair_index(a, b)];
}

Eigen::VectorXd AdjacencyPhases::site_phases(int a, int c, int s_a) const {
    Eigen::VectorXd out(q_);
    for (int t = 0; t < q_; ++t) {
        out(t) = entry(a, c, s_a, t);
    }
    return out;
}

bool AdjacencyPhases::is_zero() const {
    for (const auto& m : pair_) {
        if (m.cwiseAbs().maxCoeff() > 0.0) {
            return false;
        }
    }
    return true;
}

std::vector<std::pair<int, int>> AdjacencyPhases::nonzero_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a) {
        for (int b = a + 1; b < n_; ++b) {
            if (pair_[pair_index(a, b)].cwiseAbs().maxCoeff() > 0.0) {
                out.emplace_back(a, b);
            }
        }
    }
    return out;
}

LocalRotations::LocalRotations(int n_sites) {
    if (n_sites < 1) {
        throw std::invalid_argument("need at least one site");
    }
    x_.assign(n_sites, Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
}

void LocalRotations::set_parameters(int site, const Eigen::Vector4d& x) {
    const double n = x.norm();
    if (std::abs(n - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation parameters must have unit norm");
    }
    x_[site] = x / n;
}

Eigen::Matrix2cd LocalRotations::matrix_from(const Eigen::Vector4d& x) {
    Eigen::Matrix2cd v;
    v(0, 0) = Complex(x(0), x(3));
    v(0, 1) = Complex(-x(2), x(1));
    v(1, 0) = Complex(x(2), x(1));
    v(1, 1) = Complex(x(0), -x(3));
    return v;
}

Eigen::Matrix2cd LocalRotations::matrix(int site) const {
    return matrix_from(x_[site]);
}

bool LocalRotations::is_identity(double tol) const {
    for (const auto& x : x_) {
        if (std::abs(x(0) - 1.0) > tol || std::abs(x(1)) > tol || std::abs(x(2)) > tol ||
            std::abs(x(3)) > tol) {
            return false;
        }
    }
    return true;
}

void StabilizerGroup::add(const std::string& letters, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("stabilizer sign must be +-1");
    }
    generators.emplace_back(n_qubits, letters, Complex(sign, 0.0));
}

bool StabilizerGroup::generators_commute() const {
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            if (!generators[i].commutes_with(generators[j])) {
                return false;
            }
        }
    }
    return true;
}

namespace {

struct SymplecticRow {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
};

SymplecticRow to_symplectic(const PauliString& p) {
    SymplecticRow row;
    for (int i = 0; i < p.n_sites; ++i) {
        const char c = p.letters[i];
        if (c == 'X' || c == 'Y') {
            row.x |= (std::uint64_t(1) << i);
        }
        if (c == 'Z' || c == 'Y') {
            row.z |= (std::uint64_t(1) << i);
        }
    }
    return row;
}

int gf2_rank(std::vector<std::uint64_t> rows) {
    int rank = 0;
    for (int bit = 0; bit < 64; ++bit) {
        const std::uint64_t mask = std::uint64_t(1) << bit;
        std::size_t pivot = rows.size();
        for (std::size_t i = rank; i < rows.size(); ++i) {
            if (rows[i] & mask) {
                pivot = i;
                break;
            }
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != static_cast<std::size_t>(rank) && (rows[i] & mask)) {
                rows[i] ^= rows[rank];
            }
        }
        ++rank;
    }
    return rank;
}

std::uint64_t packed(const SymplecticRow& r, int n) {
    return r.x | (r.z << n);
}

}  // namespace

int StabilizerGroup::symplectic_rank() const {
    std::vector<std::uint64_t> rows;
    for (const auto& g : generators) {
        rows.push_back(packed(to_symplectic(g), n_qubits));
    }
    return gf2_rank(std::move(rows));
}

AdjacencyPhases graph_state_phases(int n_sites,
                                   const std::vector<std::pair<int, int>>& edges) {
    AdjacencyPhases phases(n_sites, 2);
    for (const auto& [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("self-loops are not allowed");
        }
        phases.set_phase(a, b, M_PI);
    }
    return phases;
}

std::vector<PauliString> stabilizer_operators(int n_sites,
                                              const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::string> letters(n_sites, std::string(n_sites, 'I'));
    for (int a = 0; a < n_sites; ++a) {
        letters[a][a] = 'X';
    }
    for (const auto& [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("self-loops are not allowed");
        }
        letters[a][b] = 'Z';
        letters[b][a] = 'Z';
    }
    std::vector<PauliString> out;
    out.reserve(n_sites);
    for (int a = 0; a < n_sites; ++a) {
        out.emplace_back(n_sites, letters[a]);
    }
    return out;
}

namespace {

// Conjugation of a single letter by H, S-dagger and Z, with sign tracking.
struct LetterMap {
    char letter;
    int sign;
};

LetterMap conj_h(char c) {
    switch (c) {
        case 'X':
            return {'Z', 1};
        case 'Z':
            return {'X', 1};
        case 'Y':
            return {'Y', -1};
        default:
            return {'I', 1};
    }
}

// g -> S^dagger g S: X -> -Y, Y -> X, Z -> Z.
LetterMap conj_sdg(char c) {
    switch (c) {
        case 'X':
            return {'Y', -1};
        case 'Y':
            return {'X', 1};
        case 'Z':
            return {'Z', 1};
        default:
            return {'I', 1};
    }
}

LetterMap conj_z(char c) {
    switch (c) {
        case 'X':
            return {'X', -1};
        case 'Y':
            return {'Y', -1};
        default:
            return {c, 1};
    }
}

void apply_local(std::vector<PauliString>& rows, int qubit, LetterMap (*map)(char)) {
    for (auto& row : rows) {
        const LetterMap m = map(row.letters[qubit]);
        row.letters[qubit] = m.letter;
        row.coefficient *= static_cast<double>(m.sign);
    }
}

int row_sign(const PauliString& p) {
    const Complex c = p.coefficient;
    if (std::abs(c - Complex(1, 0)) < 1e-9) return 1;
    if (std::abs(c + Complex(1, 0)) < 1e-9) return -1;
    throw std::runtime_error("stabilizer row acquired a non-real phase");
}

const Eigen::Matrix2cd kGateH = [] {
    Eigen::Matrix2cd m;
    m << 1, 1, 1, -1;
    return Eigen::Matrix2cd(m / std::sqrt(2.0));
}();
const Eigen::Matrix2cd kGateS = [] {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, Complex(0, 1);
    return m;
}();
const Eigen::Matrix2cd kGateZ = [] {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}();

}  // namespace

GraphForm stabilizer_to_graph(const StabilizerGroup& s) {
    const int n = s.n_qubits;
    if (static_cast<int>(s.generators.size()) != n) {
        throw std::invalid_argument("graph reduction needs exactly n generators");
    }
    if (!s.generators_commute()) {
        throw std::invalid_argument("generators must commute");
    }
    if (s.symplectic_rank() != n) {
        throw std::invalid_argument(
            "rank-deficient stabilizer group: complete the generator set first");
    }

    std::vector<PauliString> rows = s.generators;
    // Accumulated conjugation U per qubit (applied as g -> U g U^dagger),
    // recorded as a word over {H, S-dagger, Z} in application order.
    std::vector<std::vector<char>> moves(n);

    auto apply_move = [&](int qubit, char which) {
        switch (which) {
            case 'H':
                apply_local(rows, qubit, conj_h);
                break;
            case 'D':  // S-dagger
                apply_local(rows, qubit, conj_sdg);
                break;
            case 'Z':
                apply_local(rows, qubit, conj_z);
                break;
            default:
                throw std::logic_error("unknown move");
        }
        moves[qubit].push_back(which);
    };

    auto has_x = [&](const PauliString& p, int qubit) {
        return p.letters[qubit] == 'X' || p.letters[qubit] == 'Y';
    };

    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i) {
            if (has_x(rows[i], col)) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) {
            for (int i = col; i < n; ++i) {
                if (rows[i].letters[col] == 'Z') {
                    pivot = i;
                    break;
                }
            }
            if (pivot < 0) {
                throw std::runtime_error("graph reduction stalled: no support on a qubit column");
            }
            apply_move(col, 'H');
        }
        std::swap(rows[col], rows[pivot]);
        for (int i = 0; i < n; ++i) {
            if (i != col && has_x(rows[i], col)) {
                rows[i] = rows[i].multiply(rows[col]);
            }
        }
    }

    // Clear Y on the diagonal, then fix signs.
    for (int j = 0; j < n; ++j) {
        if (rows[j].letters[j] == 'Y') {
            apply_move(j, 'D');
        }
        if (rows[j].letters[j] != 'X') {
            throw std::runtime_error("graph reduction failed to isolate X on the diagonal");
        }
    }
    for (int j = 0; j < n; ++j) {
        if (row_sign(rows[j]) == -1) {
            apply_move(j, 'Z');
        }
    }

    // Check the graph form and read off the adjacency.
    GraphForm out;
    for (int j = 0; j < n; ++j) {
        if (row_sign(rows[j]) != 1) {
            throw std::runtime_error("graph reduction left a negative sign");
        }
        for (int k = 0; k < n; ++k) {
            const char c = rows[j].letters[k];
            if (k == j) {
                continue;
            }
            if (c == 'X' || c == 'Y') {
                throw std::runtime_error("graph reduction left off-diagonal X support");
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const bool zjk = rows[j].letters[k] == 'Z';
            const bool zkj = rows[k].letters[j] == 'Z';
            if (zjk != zkj) {
                throw std::runtime_error("graph adjacency is not symmetric");
            }
            if (zjk) {
                out.edges.emplace_back(j, k);
            }
        }
    }

    // Corrections are U^dagger per qubit; with U = m_k ... m_1 the word for
    // U^dagger reads m_1^dagger ... m_k^dagger, and S = Z * S-dagger.
    out.correction_tags.assign(n, "");
    out.corrections.assign(n, Eigen::Matrix2cd::Identity());
    for (int j = 0; j < n; ++j) {
        std::string tag;
        Eigen::Matrix2cd c = Eigen::Matrix2cd::Identity();
        for (char m : moves[j]) {
            // Appended in original order: U^dagger = m_1^dag m_2^dag ...
            switch (m) {
                case 'H':
                    tag += "H";
                    c = c * kGateH;
                    break;
                case 'D':
                    tag += "S";
                    c = c * kGateS;
                    break;
                case 'Z':
                    tag += "Z";
                    c = c * kGateZ;
                    break;
                default:
                    break;
            }
        }
        out.correction_tags[j] = tag.empty() ? "I" : tag;
        out.corrections[j] = c;
    }
    return out;
}

StabilizerGroup complete_stabilizer_group(const StabilizerGroup& s) {
    const int n = s.n_qubits;
    if (!s.generators_commute()) {
        throw std::invalid_argument("generators must commute");
    }

    // Keep an independent subset, verifying that dropped rows are +1
    // products of the kept ones. xor-basis keyed by the highest set bit.
    std::map<int, std::pair<std::uint64_t, PauliString>> xor_basis;
    auto try_insert = [&](const PauliString& row) {
        std::uint64_t v = packed(to_symplectic(row), n);
        PauliString prod = row;
        for (int bit = 2 * n - 1; bit >= 0 && v != 0; --bit) {
            if (!((v >> bit) & 1)) {
                continue;
            }
            auto it = xor_basis.find(bit);
            if (it == xor_basis.end()) {
                xor_basis.emplace(bit, std::make_pair(v, prod));
                return true;
            }
            v ^= it->second.first;
            prod = prod.multiply(it->second.second);
        }
        // Dependent: prod must now be the identity with +1 sign.
        if (row_sign(prod) != 1) {
            throw std::invalid_argument("inconsistent stabilizer set (generates -identity)");
        }
        return false;
    };

    StabilizerGroup out;
    out.n_qubits = n;
    for (const auto& g : s.generators) {
        if (row_sign(g) != 1 && row_sign(g) != -1) {
            throw std::invalid_argument("generators must carry signs +-1");
        }
        PauliString copy = g;
        if (try_insert(copy)) {
            out.generators.push_back(copy);
        }
    }

    // Null space of the commutation constraints.
    std::vector<std::uint64_t> constraints;
    for (const auto& g : out.generators) {
        const SymplecticRow r = to_symplectic(g);
        constraints.push_back(r.z | (r.x << n));  // swapped halves: symplectic form
    }
    std::vector<std::uint64_t> null_basis;
    {
        const int dims = 2 * n;
        std::vector<std::uint64_t> rows = constraints;
        std::vector<int> pivot_col;
        std::size_t rank = 0;
        for (int bit = 0; bit < dims; ++bit) {
            const std::uint64_t mask = std::uint64_t(1) << bit;
            std::size_t pivot = rows.size();
            for (std::size_t i = rank; i < rows.size(); ++i) {
                if (rows[i] & mask) {
                    pivot = i;
                    break;
                }
            }
            if (pivot == rows.size()) {
                continue;
            }
            std::swap(rows[rank], rows[pivot]);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i != rank && (rows[i] & mask)) {
                    rows[i] ^= rows[rank];
                }
            }
            pivot_col.push_back(bit);
            ++rank;
        }
        std::vector<bool> is_pivot(dims, false);
        for (int c : pivot_col) {
            is_pivot[c] = true;
        }
        for (int free = 0; free < dims; ++free) {
            if (is_pivot[free]) {
                continue;
            }
            std::uint64_t v = std::uint64_t(1) << free;
            for (std::size_t i = 0; i < rank; ++i) {
                if (rows[i] & (std::uint64_t(1) << free)) {
                    v |= std::uint64_t(1) << pivot_col[i];
                }
            }
            null_basis.push_back(v);
        }
    }

    auto to_pauli = [&](std::uint64_t v) {
        std::string letters(n, 'I');
        for (int i = 0; i < n; ++i) {
            const bool x = v & (std::uint64_t(1) << i);
            const bool z = v & (std::uint64_t(1) << (n + i));
            letters[i] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
        }
        return PauliString(n, letters);
    };

    std::vector<PauliString> pool;
    for (std::uint64_t v : null_basis) {
        pool.push_back(to_pauli(v));
    }
    bool extended_pool = false;
    while (static_cast<int>(out.generators.size()) < n) {
        bool added = false;
        for (const auto& cand : pool) {
            bool commutes = true;
            for (const auto& g : out.generators) {
                if (!cand.commutes_with(g)) {
                    commutes = false;
                    break;
                }
            }
            if (!commutes) {
                continue;
            }
            PauliString copy(n, cand.letters);  // fresh +1 sign
            if (try_insert(copy)) {
                out.generators.push_back(copy);
                added = true;
                break;
            }
        }
        if (!added) {
            if (extended_pool) {
                throw std::runtime_error("failed to complete the stabilizer group");
            }
            // Products of anticommuting pool pairs can still commute with
            // everything picked so far.
            std::vector<PauliString> extra;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                for (std::size_t j = i + 1; j < pool.size(); ++j) {
                    PauliString p = pool[i].multiply(pool[j]);
                    p.coefficient = Complex(1.0, 0.0);
                    extra.push_back(std::move(p));
                }
            }
            pool.insert(pool.end(), extra.begin(), extra.end());
            extended_pool = true;
        }
    }
    return out;
}

}  // namespace rage
