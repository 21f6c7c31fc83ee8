#include "rage/dense_tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rage/rng.hpp"

namespace rage {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& shape) {
    if (shape.empty()) {
        throw std::invalid_argument("tensor shape must be non-empty");
    }
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) {
            throw std::invalid_argument("tensor dimensions must be >= 1");
        }
        n *= d;
    }
    return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_product(shape_), Complex(0.0, 0.0)) {
    init_strides();
}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<Complex> entries)
    : shape_(std::move(shape)), data_(std::move(entries)) {
    if (data_.size() != checked_product(shape_)) {
        throw std::invalid_argument("entry count does not match shape");
    }
    init_strides();
}

void DenseTensor::init_strides() {
    strides_.assign(shape_.size(), 1);
    for (std::size_t i = shape_.size(); i-- > 1;) {
        strides_[i - 1] = strides_[i] * shape_[i];
    }
}

DenseTensor DenseTensor::scalar(Complex value) {
    return DenseTensor({1}, {value});
}

DenseTensor DenseTensor::identity(std::size_t n) {
    DenseTensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        t.data_[i * n + i] = 1.0;
    }
    return t;
}

DenseTensor DenseTensor::random(std::vector<std::size_t> shape, Rng& rng) {
    DenseTensor t(std::move(shape));
    for (auto& v : t.data_) {
        v = rng.uniform_complex();
    }
    return t;
}

std::size_t DenseTensor::flat_index(const std::vector<std::size_t>& index) const {
    if (index.size() != shape_.size()) {
        throw std::invalid_argument("index rank mismatch");
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= shape_[i]) {
            throw std::out_of_range("tensor index out of range");
        }
        flat += index[i] * strides_[i];
    }
    return flat;
}

Complex& DenseTensor::at(const std::vector<std::size_t>& index) {
    return data_[flat_index(index)];
}

const Complex& DenseTensor::at(const std::vector<std::size_t>& index) const {
    return data_[flat_index(index)];
}

DenseTensor DenseTensor::conjugate() const {
    DenseTensor out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out.data_[i] = std::conj(data_[i]);
    }
    return out;
}

DenseTensor DenseTensor::transpose(const std::vector<std::size_t>& perm) const {
    if (perm.size() != shape_.size()) {
        throw std::invalid_argument("permutation rank mismatch");
    }
    std::vector<std::size_t> new_shape(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        new_shape[i] = shape_[perm[i]];
    }
    DenseTensor out(new_shape);
    std::vector<std::size_t> idx(shape_.size(), 0);
    for (std::size_t flat = 0; flat < data_.size(); ++flat) {
        std::size_t out_flat = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            out_flat += idx[perm[i]] * out.strides_[i];
        }
        out.data_[out_flat] = data_[flat];
        for (std::size_t i = shape_.size(); i-- > 0;) {
            if (++idx[i] < shape_[i]) {
                break;
            }
            idx[i] = 0;
        }
    }
    return out;
}

DenseTensor DenseTensor::reshape(std::vector<std::size_t> new_shape) const {
    if (checked_product(new_shape) != data_.size()) {
        throw std::invalid_argument("reshape size mismatch");
    }
    return DenseTensor(std::move(new_shape), data_);
}

DenseTensor DenseTensor::scaled(Complex factor) const {
    DenseTensor out = *this;
    for (auto& v : out.data_) {
        v *= factor;
    }
    return out;
}

MatrixXcd DenseTensor::as_matrix(std::size_t split) const {
    if (split > shape_.size()) {
        throw std::invalid_argument("matrix split out of range");
    }
    std::size_t rows = 1;
    std::size_t cols = 1;
    for (std::size_t i = 0; i < split; ++i) {
        rows *= shape_[i];
    }
    for (std::size_t i = split; i < shape_.size(); ++i) {
        cols *= shape_[i];
    }
    MatrixXcd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data_[r * cols + c];
        }
    }
    return m;
}

DenseTensor DenseTensor::from_matrix(const MatrixXcd& m, std::vector<std::size_t> row_shape,
                                     std::vector<std::size_t> col_shape) {
    std::vector<std::size_t> shape = row_shape;
    shape.insert(shape.end(), col_shape.begin(), col_shape.end());
    DenseTensor out(std::move(shape));
    const std::size_t rows = static_cast<std::size_t>(m.rows());
    const std::size_t cols = static_cast<std::size_t>(m.cols());
    if (rows * cols != out.size()) {
        throw std::invalid_argument("matrix size does not match shapes");
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            out.data_[r * cols + c] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

double DenseTensor::norm() const {
    double s = 0.0;
    for (const auto& v : data_) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

DenseTensor DenseTensor::contract(const DenseTensor& a, const DenseTensor& b,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<bool> a_used(a.rank(), false);
    std::vector<bool> b_used(b.rank(), false);
    for (const auto& [ia, ib] : pairs) {
        if (ia >= a.rank() || ib >= b.rank()) {
            throw std::invalid_argument("contraction index out of range");
        }
        if (a_used[ia] || b_used[ib]) {
            throw std::invalid_argument("duplicate index in contraction pairs");
        }
        if (a.dim(ia) != b.dim(ib)) {
            throw std::invalid_argument("contracted dimensions do not match");
        }
        a_used[ia] = true;
        b_used[ib] = true;
    }

    // Permute a to (free..., contracted...) and b to (contracted..., free...),
    // multiply as matrices, and reassemble the free indices.
    std::vector<std::size_t> a_perm;
    std::vector<std::size_t> a_free_shape;
    for (std::size_t i = 0; i < a.rank(); ++i) {
        if (!a_used[i]) {
            a_perm.push_back(i);
            a_free_shape.push_back(a.dim(i));
        }
    }
    std::vector<std::size_t> b_perm;
    for (const auto& [ia, ib] : pairs) {
        a_perm.push_back(ia);
        b_perm.push_back(ib);
    }
    std::vector<std::size_t> b_free_shape;
    for (std::size_t i = 0; i < b.rank(); ++i) {
        if (!b_used[i]) {
            b_perm.push_back(i);
            b_free_shape.push_back(b.dim(i));
        }
    }

    const DenseTensor at = a.transpose(a_perm);
    const DenseTensor bt = b.transpose(b_perm);
    const MatrixXcd am = at.as_matrix(a.rank() - pairs.size());
    const MatrixXcd bm = bt.as_matrix(pairs.size());
    const MatrixXcd rm = am * bm;

    std::vector<std::size_t> out_shape = a_free_shape;
    out_shape.insert(out_shape.end(), b_free_shape.begin(), b_free_shape.end());
    if (out_shape.empty()) {
        return DenseTensor::scalar(rm(0, 0));
    }
    return from_matrix(rm, a_free_shape, b_free_shape);
}

}  // namespace rage
