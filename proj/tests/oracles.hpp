// Test-only reference implementations, kept independent of the library code
// paths they audit: plain scalar loops for the metrics and central finite
// differences for the gradients.
#ifndef TLP_TESTS_ORACLES_HPP_
#define TLP_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "tlp/matrix.hpp"
#include "tlp/rng.hpp"

namespace oracles {

inline double mse_loop(const tlp::Matrix& truth, const tlp::Matrix& pred) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const long double d = truth(i, j) - pred(i, j);
            total += d * d;
        }
    }
    return static_cast<double>(total / static_cast<long double>(truth.rows() * truth.cols()));
}

inline double kl_loop(const tlp::Matrix& truth, const tlp::Matrix& pred) {
    long double truth_sum = 0.0L;
    long double pred_sum = 0.0L;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            truth_sum += truth(i, j);
            pred_sum += pred(i, j);
        }
    }
    long double kl = 0.0L;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const long double p = truth(i, j) / truth_sum;
            const long double q = pred(i, j) / pred_sum;
            if (p > 0.0L && q > 0.0L) {
                kl += p * std::log(static_cast<double>(p / q));
            }
        }
    }
    return static_cast<double>(kl);
}

inline double mismatch_loop(const tlp::Matrix& truth, const tlp::Matrix& pred) {
    std::size_t bad = 0;
    const std::size_t n = truth.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const bool truth_zero = truth(i, j) == 0.0;
            const bool pred_zero = pred(i, j) == 0.0;
            if (truth_zero != pred_zero) {
                ++bad;
            }
        }
    }
    return static_cast<double>(bad) / static_cast<double>(n * (n - 1));
}

inline double frobenius_loop(const tlp::Matrix& m) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            total += static_cast<long double>(m(i, j)) * m(i, j);
        }
    }
    return static_cast<double>(total);
}

// Central finite differences of a scalar loss over one parameter block.
inline tlp::Matrix numeric_gradient(tlp::Matrix& param, const std::function<double()>& loss,
                                    double h = 1e-5) {
    tlp::Matrix grad(param.rows(), param.cols());
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double original = param.data()[k];
        param.data()[k] = original + h;
        const double up = loss();
        param.data()[k] = original - h;
        const double down = loss();
        param.data()[k] = original;
        grad.data()[k] = (up - down) / (2.0 * h);
    }
    return grad;
}

// Relative agreement with an absolute floor for near-zero gradients.
inline bool gradients_agree(const tlp::Matrix& analytic, const tlp::Matrix& numeric,
                            double rel_tol = 1e-4, double abs_floor = 1e-7,
                            double* worst = nullptr) {
    bool ok = true;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        const double a = analytic.data()[k];
        const double n = numeric.data()[k];
        const double err = std::abs(a - n);
        const double scale = std::max(std::abs(a), std::abs(n));
        const double allowed = std::max(abs_floor, rel_tol * scale);
        if (worst != nullptr && scale > 0.0) {
            *worst = std::max(*worst, err / std::max(scale, abs_floor));
        }
        if (err > allowed) {
            ok = false;
        }
    }
    return ok;
}

inline tlp::Matrix random_matrix(tlp::Rng& rng, std::size_t rows, std::size_t cols, double lo,
                                 double hi) {
    tlp::Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = rng.next_uniform(lo, hi);
    }
    return m;
}

// Random symmetric zero-diagonal matrix with roughly the given zero fraction
// among the off-diagonal entries.
inline tlp::Matrix random_snapshot(tlp::Rng& rng, std::size_t n, double zero_prob, double hi) {
    tlp::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v =
                rng.next_double() < zero_prob ? 0.0 : rng.next_uniform(0.0, hi);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

}  // namespace oracles

#endif  // TLP_TESTS_ORACLES_HPP_
