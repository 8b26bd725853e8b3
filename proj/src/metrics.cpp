#include "tlp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

void require_same_square(const Matrix& truth, const Matrix& pred, const char* metric) {
    if (!truth.same_shape(pred)) {
        throw ShapeError(std::string(metric) + ": shapes differ");
    }
    if (truth.rows() != truth.cols()) {
        throw ShapeError(std::string(metric) + ": snapshots must be square");
    }
}

std::string csv_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double mse(const Matrix& truth, const Matrix& pred) {
    require_same_square(truth, pred, "mse");
    double total = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = truth.data()[k] - pred.data()[k];
        total += d * d;
    }
    return total / static_cast<double>(truth.size());
}

double edgewise_kl(const Matrix& truth, const Matrix& pred) {
    require_same_square(truth, pred, "edgewise_kl");
    const double truth_sum = sum(truth);
    const double pred_sum = sum(pred);
    if (truth_sum <= 0.0 || pred_sum <= 0.0) {
        throw ValidationError("edgewise_kl: all-zero matrix, normalization undefined");
    }
    double kl = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double p = truth.data()[k] / truth_sum;
        const double q = pred.data()[k] / pred_sum;
        if (p > 0.0 && q > 0.0) {
            kl += p * std::log(p / q);
        }
    }
    return kl;
}

double mismatch_rate(const Matrix& truth, const Matrix& pred) {
    require_same_square(truth, pred, "mismatch_rate");
    const std::size_t n = truth.rows();
    if (n < 2) {
        return 0.0;  // no off-diagonal entries
    }
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            if ((truth(i, j) == 0.0) != (pred(i, j) == 0.0)) {
                ++mismatched;
            }
        }
    }
    return static_cast<double>(mismatched) / static_cast<double>(n * (n - 1));
}

MetricsReport aggregate(std::span<const SliceMetrics> slices) {
    if (slices.empty()) {
        throw ValidationError("aggregate: no slices to average");
    }
    MetricsReport report;
    report.per_slice.assign(slices.begin(), slices.end());
    double kl_sum = 0.0;
    for (const SliceMetrics& s : slices) {
        report.avg_mse += s.mse;
        report.avg_mismatch += s.mismatch;
        if (s.kl_valid) {
            kl_sum += s.kl;
            ++report.kl_valid_count;
        }
    }
    const auto count = static_cast<double>(slices.size());
    report.avg_mse /= count;
    report.avg_mismatch /= count;
    report.avg_kl = report.kl_valid_count > 0
                        ? kl_sum / static_cast<double>(report.kl_valid_count)
                        : std::numeric_limits<double>::quiet_NaN();
    return report;
}

void write_metrics_csv(const MetricsReport& report, std::ostream& out) {
    out << "slice,mse,kl,mismatch\n";
    for (const SliceMetrics& s : report.per_slice) {
        const double kl = s.kl_valid ? s.kl : std::numeric_limits<double>::quiet_NaN();
        out << s.slice << ',' << csv_number(s.mse) << ',' << csv_number(kl) << ','
            << csv_number(s.mismatch) << '\n';
    }
    out << "average," << csv_number(report.avg_mse) << ',' << csv_number(report.avg_kl) << ','
        << csv_number(report.avg_mismatch) << '\n';
}

}  // namespace tlp
