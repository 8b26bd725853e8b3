#ifndef TLP_MATRIX_HPP_
#define TLP_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "tlp/rng.hpp"

namespace tlp {

// Dense real matrix, row-major, double precision. The universal numeric
// carrier for adjacency matrices, layer parameters and activations.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::size_t rows, std::size_t cols,
                            std::initializer_list<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    // Bit-exact equality; used by determinism and round-trip tests.
    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Same data, new shape; row-major order preserved.
Matrix reshape_rowwise(const Matrix& m, std::size_t rows, std::size_t cols);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double k);

void add_in_place(Matrix& a, const Matrix& b);
// a += k * b
void axpy(Matrix& a, double k, const Matrix& b);

double sum(const Matrix& m);
double frobenius_norm_sq(const Matrix& m);

// Every entry drawn independently from U[0, 1).
Matrix uniform_noise(Rng& rng, std::size_t rows, std::size_t cols);

}  // namespace tlp

#endif  // TLP_MATRIX_HPP_
