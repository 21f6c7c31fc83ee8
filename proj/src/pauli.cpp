#include "rage/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace rage {

namespace {

bool valid_letter(char c) {
    return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
}

// Single-site product table: letter_product[a][b] gives (letter, phase) with
// sigma_a * sigma_b = phase * sigma_letter, phase in {1, i, -1, -i}.
struct LetterProduct {
    char letter;
    Complex phase;
};

LetterProduct letter_product(char a, char b) {
    static const Complex one(1, 0), pi(0, 1), mi(0, -1);
    if (a == 'I') return {b, one};
    if (b == 'I') return {a, one};
    if (a == b) return {'I', one};
    if (a == 'X' && b == 'Y') return {'Z', pi};
    if (a == 'Y' && b == 'X') return {'Z', mi};
    if (a == 'Y' && b == 'Z') return {'X', pi};
    if (a == 'Z' && b == 'Y') return {'X', mi};
    if (a == 'Z' && b == 'X') return {'Y', pi};
    if (a == 'X' && b == 'Z') return {'Y', mi};
    throw std::invalid_argument("invalid Pauli letter");
}

}  // namespace

PauliString::PauliString(int n, std::string l, Complex c)
    : n_sites(n), letters(std::move(l)), coefficient(c) {
    if (static_cast<int>(letters.size()) != n_sites) {
        throw std::invalid_argument("Pauli letter count must equal n_sites");
    }
    for (char ch : letters) {
        if (!valid_letter(ch)) {
            throw std::invalid_argument("Pauli letters must be one of I, X, Y, Z");
        }
    }
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw std::invalid_argument("Pauli coefficient must be finite");
    }
}

std::vector<int> PauliString::support() const {
    std::vector<int> out;
    for (int i = 0; i < n_sites; ++i) {
        if (letters[i] != 'I') {
            out.push_back(i);
        }
    }
    return out;
}

bool PauliString::is_diagonal() const {
    for (char c : letters) {
        if (c == 'X' || c == 'Y') {
            return false;
        }
    }
    return true;
}

Eigen::Matrix2cd PauliString::letter_matrix(char letter) {
    Eigen::Matrix2cd m;
    switch (letter) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            throw std::invalid_argument("invalid Pauli letter");
    }
    return m;
}

PauliString PauliString::multiply(const PauliString& other) const {
    if (n_sites != other.n_sites) {
        throw std::invalid_argument("Pauli site counts differ");
    }
    std::string letters_out(n_sites, 'I');
    Complex phase(1, 0);
    for (int i = 0; i < n_sites; ++i) {
        const auto p = letter_product(letters[i], other.letters[i]);
        letters_out[i] = p.letter;
        phase *= p.phase;
    }
    return PauliString(n_sites, std::move(letters_out), coefficient * other.coefficient * phase);
}

bool PauliString::commutes_with(const PauliString& other) const {
    int anti = 0;
    for (int i = 0; i < n_sites; ++i) {
        const char a = letters[i];
        const char b = other.letters[i];
        if (a != 'I' && b != 'I' && a != b) {
            ++anti;
        }
    }
    return anti % 2 == 0;
}

void HamiltonianSum::add(const std::string& letters, Complex coefficient) {
    terms.emplace_back(n_sites, letters, coefficient);
}

bool HamiltonianSum::is_hermitian(double tol) const {
    for (const auto& t : terms) {
        if (std::abs(t.coefficient.imag()) > tol) {
            return false;
        }
    }
    return true;
}

int HamiltonianSum::max_support() const {
    int best = 0;
    for (const auto& t : terms) {
        best = std::max(best, static_cast<int>(t.support().size()));
    }
    return best;
}

ProductOperator ProductOperator::from_pauli(const PauliString& p) {
    ProductOperator out(p.coefficient);
    for (int s : p.support()) {
        out.site_ops[s] = p.site_matrix(s);
    }
    return out;
}

ProductOperator ProductOperator::with_op(int site, const MatrixXcd& op) const {
    ProductOperator out = *this;
    auto it = out.site_ops.find(site);
    if (it == out.site_ops.end()) {
        out.site_ops[site] = op;
    } else {
        it->second = op * it->second;
    }
    return out;
}

}  // namespace rage
