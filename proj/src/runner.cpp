#include "tlp/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "tlp/checkpoint.hpp"
#include "tlp/errors.hpp"

namespace tlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t default_or(std::size_t requested, std::size_t fallback) {
    return requested != 0 ? requested : fallback;
}

// Lazily normalized view over the sequence; every materialized read is
// reported so tests can audit protocol causality.
class SnapshotAccess {
public:
    SnapshotAccess(const SnapshotSequence& seq, ExperimentObserver* observer)
        : seq_(seq), observer_(observer), normalized_(seq.size()) {}

    // slice is 1-based
    const Matrix& normalized(std::size_t slice) {
        notify(slice);
        auto& entry = normalized_[slice - 1];
        if (!entry.has_value()) {
            entry = scale(seq_.snapshot(slice - 1), 1.0 / seq_.max_weight());
        }
        return *entry;
    }

    const Matrix& raw(std::size_t slice) {
        notify(slice);
        return seq_.snapshot(slice - 1);
    }

    std::vector<Matrix> normalized_window(std::size_t first, std::size_t last) {
        std::vector<Matrix> window;
        window.reserve(last - first + 1);
        for (std::size_t t = first; t <= last; ++t) {
            window.push_back(normalized(t));
        }
        return window;
    }

private:
    void notify(std::size_t slice) {
        if (observer_ != nullptr) {
            observer_->on_snapshot_access(slice);
        }
    }

    const SnapshotSequence& seq_;
    ExperimentObserver* observer_;
    std::vector<std::optional<Matrix>> normalized_;
};

void write_matrix_plain(const Matrix& m, std::ostream& out) {
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << (j == 0 ? "" : " ") << buf;
        }
        out << '\n';
    }
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::GcnGan ? "gcn-gan" : "lstm-baseline";
}

ExperimentResult run_experiment(const SnapshotSequence& seq, const ExperimentConfig& config,
                                ExperimentObserver* observer) {
    config.train.validate();
    const std::size_t n = seq.n_nodes();
    const std::size_t t_count = seq.size();
    const auto l = static_cast<std::size_t>(config.train.window);
    if (t_count < l + 2) {
        throw ValidationError("sequence too short: the protocol needs at least l+2 = " +
                              std::to_string(l + 2) + " snapshots, got " +
                              std::to_string(t_count));
    }
    if (t_count == l + 2) {
        throw ValidationError("no slices to evaluate: T = l+2 leaves nothing to predict");
    }

    const std::size_t lstm_hidden = default_or(config.lstm_hidden, n);
    const std::size_t critic_hidden =
        default_or(config.critic_hidden, std::min<std::size_t>(8 * n, 1024));
    const std::size_t baseline_hidden =
        default_or(config.baseline_hidden, std::min<std::size_t>(4 * n, 512));
    const Activation candidate_act =
        config.candidate_tanh ? Activation::Tanh : Activation::Sigmoid;

    const Rng root(config.train.seed);
    Rng init_rng = root.split(config.model == ModelKind::GcnGan ? 1 : 2);
    Rng noise_rng = root.split(3);

    ExperimentResult result;
    result.model = config.model;

    std::optional<GanModel> gan;
    std::optional<BaselineModel> baseline;
    auto build_model = [&](Rng& rng) {
        if (config.model == ModelKind::GcnGan) {
            gan = make_gan_model(rng, n, lstm_hidden, critic_hidden, config.train, candidate_act);
        } else {
            baseline = make_baseline_model(rng, n, baseline_hidden, config.train, candidate_act);
        }
    };
    build_model(init_rng);

    SnapshotAccess access(seq, observer);
    const double max_weight = seq.max_weight();
    std::vector<SliceMetrics> slices;

    for (std::size_t tau = l + 2; tau <= t_count - 1; ++tau) {
        if (config.cold_start && tau != l + 2) {
            Rng fresh = init_rng.split(tau);
            build_model(fresh);
        }

        const auto history = access.normalized_window(tau - l - 1, tau - 1);
        const Matrix& target = access.normalized(tau);

        const auto train_start = Clock::now();
        TrainTrace trace;
        if (config.model == ModelKind::GcnGan) {
            trace = train_for_slice(history, target, config.train, *gan, noise_rng);
            // pretrain/adversarial split is approximated by iteration share
            const double elapsed = seconds_since(train_start);
            const double total_iters = config.train.pretrain_iters + config.train.train_iters;
            const double share = total_iters > 0
                                     ? config.train.pretrain_iters / total_iters
                                     : 0.0;
            result.pretrain_seconds += elapsed * share;
            result.adversarial_seconds += elapsed * (1.0 - share);
        } else {
            trace.pretrain_loss =
                baseline_train_for_slice(history, target, config.train, *baseline);
            result.pretrain_seconds += seconds_since(train_start);
        }
        result.trained_slices.push_back(tau);
        result.traces.push_back(std::move(trace));

        const auto window = access.normalized_window(tau - l, tau);
        const auto predict_start = Clock::now();
        Matrix prediction;
        if (config.model == ModelKind::GcnGan) {
            prediction = predict(window, gan->generator, noise_rng, max_weight,
                                 config.train.threshold);
        } else {
            prediction = baseline_predict(window, baseline->params, max_weight,
                                          config.refine_baseline, config.train.threshold);
        }
        result.predict_seconds += seconds_since(predict_start);
        if (observer != nullptr) {
            observer->on_prediction(tau + 1);
        }

        const Matrix& truth = access.raw(tau + 1);
        SliceMetrics metrics;
        metrics.slice = tau + 1;
        metrics.mse = mse(truth, prediction);
        metrics.mismatch = mismatch_rate(truth, prediction);
        try {
            metrics.kl = edgewise_kl(truth, prediction);
        } catch (const ValidationError&) {
            metrics.kl = 0.0;
            metrics.kl_valid = false;
        }
        slices.push_back(metrics);

        if (config.keep_predictions) {
            result.predictions.push_back({tau + 1, std::move(prediction)});
        }
    }

    result.report = aggregate(slices);

    if (!config.save_model_path.empty()) {
        if (config.model == ModelKind::GcnGan) {
            save_gan_checkpoint(config.save_model_path, gan->generator, gan->discriminator);
        } else {
            save_baseline_checkpoint(config.save_model_path, baseline->params);
        }
    }
    return result;
}

void write_heatmap_csv(const Matrix& m, std::ostream& out) {
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double v = m(i, j) == 0.0 ? -200.0 : m(i, j);
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << (j == 0 ? "" : ",") << buf;
        }
        out << '\n';
    }
}

void export_heatmap_csv(const Matrix& truth, const Matrix& pred_gan,
                        const Matrix& pred_baseline, const std::string& dir) {
    if (!truth.same_shape(pred_gan) || !truth.same_shape(pred_baseline)) {
        throw ShapeError("export_heatmap_csv: matrix shapes differ");
    }
    std::filesystem::create_directories(dir);
    const std::pair<const char*, const Matrix*> files[] = {
        {"truth.csv", &truth}, {"gcn_gan.csv", &pred_gan}, {"lstm_baseline.csv", &pred_baseline}};
    for (const auto& [name, matrix] : files) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot open '" + path.string() + "' for writing");
        }
        write_heatmap_csv(*matrix, out);
        if (!out) {
            throw IoError("failed writing '" + path.string() + "'");
        }
    }
}

void write_losses_csv(const ExperimentResult& result, std::ostream& out) {
    char buf[32];
    auto emit = [&](std::size_t slice, const char* phase, const std::vector<double>& losses) {
        for (std::size_t i = 0; i < losses.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", losses[i]);
            out << slice << ',' << phase << ',' << (i + 1) << ',' << buf << '\n';
        }
    };
    out << "slice,phase,iteration,loss\n";
    for (std::size_t k = 0; k < result.traces.size(); ++k) {
        const std::size_t slice = result.trained_slices[k];
        const TrainTrace& trace = result.traces[k];
        if (result.model == ModelKind::GcnGan) {
            emit(slice, "pretrain", trace.pretrain_loss);
            emit(slice, "critic", trace.critic_loss);
            emit(slice, "generator", trace.generator_loss);
        } else {
            emit(slice, "train", trace.pretrain_loss);
        }
    }
}

void write_predictions(const ExperimentResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const SlicePrediction& p : result.predictions) {
        const auto path =
            std::filesystem::path(dir) / ("pred_slice_" + std::to_string(p.slice) + ".txt");
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot open '" + path.string() + "' for writing");
        }
        write_matrix_plain(p.prediction, out);
        if (!out) {
            throw IoError("failed writing '" + path.string() + "'");
        }
    }
}

}  // namespace tlp
