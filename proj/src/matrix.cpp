#include "tlp/matrix.hpp"

#include <string>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols,
                         std::initializer_list<double> values) {
    if (values.size() != rows * cols) {
        throw ShapeError("from_rows: initializer has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(rows * cols));
    }
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (double v : values) {
        m.data()[k++] = v;
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out_row = out.data() + i * out.cols();
        const double* a_row = a.data() + i * a.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a_row[k];
            if (aik == 0.0) {
                continue;
            }
            const double* b_row = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(j, i) = m(i, j);
        }
    }
    return out;
}

Matrix reshape_rowwise(const Matrix& m, std::size_t rows, std::size_t cols) {
    if (m.size() != rows * cols) {
        throw ShapeError("reshape_rowwise: cannot reshape " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " to " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    Matrix out(rows, cols);
    std::copy(m.values().begin(), m.values().end(), out.values().begin());
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    add_in_place(out, b);
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix out = a;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.data()[k] -= b.data()[k];
    }
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.data()[k] *= b.data()[k];
    }
    return out;
}

Matrix scale(const Matrix& m, double k) {
    Matrix out = m;
    for (double& v : out.values()) {
        v *= k;
    }
    return out;
}

void add_in_place(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add_in_place");
    for (std::size_t k = 0; k < a.size(); ++k) {
        a.data()[k] += b.data()[k];
    }
}

void axpy(Matrix& a, double k, const Matrix& b) {
    require_same_shape(a, b, "axpy");
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data()[i] += k * b.data()[i];
    }
}

double sum(const Matrix& m) {
    double total = 0.0;
    for (double v : m.values()) {
        total += v;
    }
    return total;
}

double frobenius_norm_sq(const Matrix& m) {
    double total = 0.0;
    for (double v : m.values()) {
        total += v * v;
    }
    return total;
}

Matrix uniform_noise(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix out(rows, cols);
    for (double& v : out.values()) {
        v = rng.next_double();
    }
    return out;
}

}  // namespace tlp
