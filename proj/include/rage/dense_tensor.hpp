#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rage {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Dense complex tensor with row-major storage; the contraction substrate
/// for every network in the library. Shapes are immutable after
/// construction except through the explicit reshape/transpose views.
class DenseTensor {
public:
    explicit DenseTensor(std::vector<std::size_t> shape);
    DenseTensor(std::vector<std::size_t> shape, std::vector<Complex> entries);

    static DenseTensor scalar(Complex value);
    static DenseTensor identity(std::size_t n);
    /// Entries with real/imag parts uniform on [-1, 1].
    static DenseTensor random(std::vector<std::size_t> shape, class Rng& rng);

    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_[axis]; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    const std::vector<Complex>& data() const { return data_; }
    std::vector<Complex>& data() { return data_; }

    Complex& at(const std::vector<std::size_t>& index);
    const Complex& at(const std::vector<std::size_t>& index) const;
    Complex& operator[](std::size_t flat) { return data_[flat]; }
    const Complex& operator[](std::size_t flat) const { return data_[flat]; }

    std::size_t flat_index(const std::vector<std::size_t>& index) const;

    DenseTensor conjugate() const;
    DenseTensor transpose(const std::vector<std::size_t>& perm) const;
    DenseTensor reshape(std::vector<std::size_t> new_shape) const;
    DenseTensor scaled(Complex factor) const;

    /// View as a matrix splitting the axes at `split`: rows run over the
    /// first `split` axes, columns over the rest.
    MatrixXcd as_matrix(std::size_t split) const;
    static DenseTensor from_matrix(const MatrixXcd& m, std::vector<std::size_t> row_shape,
                                   std::vector<std::size_t> col_shape);

    double norm() const;

    /// Sum over the paired indices (index-of-a, index-of-b). The result
    /// carries the unpaired indices of a followed by those of b.
    static DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<Complex> data_;

    void init_strides();
};

}  // namespace rage
