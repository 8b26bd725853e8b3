#ifndef TLP_METRICS_HPP_
#define TLP_METRICS_HPP_

#include <iosfwd>
#include <span>
#include <vector>

#include "tlp/matrix.hpp"

namespace tlp {

// Mean squared entry difference: ||truth - pred||_F^2 / N^2.
double mse(const Matrix& truth, const Matrix& pred);

// KL divergence between the sum-normalized matrices, natural log. Entry pairs
// where either side is zero contribute nothing. Throws ValidationError when a
// matrix is all zero (the normalization is undefined); callers exclude such
// slices from the aggregate.
double edgewise_kl(const Matrix& truth, const Matrix& pred);

// Fraction of off-diagonal entries whose zero/nonzero status disagrees,
// denominator N*(N-1).
double mismatch_rate(const Matrix& truth, const Matrix& pred);

struct SliceMetrics {
    std::size_t slice = 0;  // 1-based time slice the prediction targets
    double mse = 0.0;
    double kl = 0.0;
    bool kl_valid = true;
    double mismatch = 0.0;
};

struct MetricsReport {
    std::vector<SliceMetrics> per_slice;
    double avg_mse = 0.0;
    double avg_kl = 0.0;  // over slices with a defined KL; NaN when none
    double avg_mismatch = 0.0;
    std::size_t kl_valid_count = 0;
};

MetricsReport aggregate(std::span<const SliceMetrics> slices);

// CSV layout: header `slice,mse,kl,mismatch`, one row per slice, final row
// `average,...`. Undefined KL prints as "nan". Numbers use 17 significant
// digits so identical runs produce byte-identical files.
void write_metrics_csv(const MetricsReport& report, std::ostream& out);

}  // namespace tlp

#endif  // TLP_METRICS_HPP_
