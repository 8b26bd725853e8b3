#include "tlp.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "tlp/data.hpp"
#include "tlp/errors.hpp"
#include "tlp/matrix.hpp"
#include "tlp/metrics.hpp"
#include "tlp/runner.hpp"

struct tlp_sequence {
    tlp::SnapshotSequence seq;
};

struct tlp_result {
    tlp::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) {
    g_last_error = message;
}

// Runs the body and folds any exception into a status code.
template <typename Fn>
tlp_status guarded(Fn&& body) {
    try {
        return body();
    } catch (const tlp::ShapeError& e) {
        set_error(e.what());
        return TLP_ERR_SHAPE;
    } catch (const tlp::ParseError& e) {
        set_error(e.what());
        return TLP_ERR_PARSE;
    } catch (const tlp::IoError& e) {
        set_error(e.what());
        return TLP_ERR_IO;
    } catch (const tlp::ValidationError& e) {
        set_error(e.what());
        return TLP_ERR_INVALID_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return TLP_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return TLP_ERR_INTERNAL;
    }
}

tlp_status require(bool ok, const char* message) {
    if (!ok) {
        set_error(message);
        return TLP_ERR_INVALID_ARGUMENT;
    }
    return TLP_OK;
}

// Output paths coming from the CLI may point into directories that do not
// exist yet.
void ensure_parent_dir(const char* path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
}

tlp_status write_file(const char* path, const char* what,
                      void (*writer)(const tlp_result*, std::ostream&), const tlp_result* r) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) {
        set_error(std::string("cannot open '") + path + "' for writing");
        return TLP_ERR_IO;
    }
    writer(r, out);
    if (!out) {
        set_error(std::string("failed writing ") + what + " to '" + path + "'");
        return TLP_ERR_IO;
    }
    return TLP_OK;
}

}  // namespace

extern "C" {

const char* tlp_status_name(tlp_status status) {
    switch (status) {
        case TLP_OK:
            return "ok";
        case TLP_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case TLP_ERR_SHAPE:
            return "shape mismatch";
        case TLP_ERR_PARSE:
            return "parse error";
        case TLP_ERR_IO:
            return "i/o error";
        case TLP_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* tlp_last_error(void) {
    return g_last_error.c_str();
}

tlp_status tlp_sequence_load(const char* path, tlp_sequence** out) {
    if (tlp_status s = require(path != nullptr && out != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        *out = new tlp_sequence{tlp::load_sequence(path)};
        return TLP_OK;
    });
}

tlp_status tlp_sequence_save(const tlp_sequence* seq, const char* path) {
    if (tlp_status s = require(seq != nullptr && path != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        ensure_parent_dir(path);
        tlp::save_sequence(seq->seq, path);
        return TLP_OK;
    });
}

tlp_status tlp_sequence_from_distances(const char* path, double delta, tlp_sequence** out) {
    if (tlp_status s = require(path != nullptr && out != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto distances = tlp::load_distances(path);
        *out = new tlp_sequence{tlp::sequence_from_distances(distances, delta)};
        return TLP_OK;
    });
}

void tlp_synthetic_spec_defaults(tlp_synthetic_spec* spec) {
    if (spec == nullptr) {
        return;
    }
    const tlp::SyntheticSpec defaults;
    spec->n_nodes = static_cast<int>(defaults.n_nodes);
    spec->n_slices = static_cast<int>(defaults.n_slices);
    spec->target_sparsity = defaults.target_sparsity;
    spec->max_weight = defaults.max_weight;
    spec->drift_rate = defaults.drift_rate;
    spec->seed = defaults.seed;
}

tlp_status tlp_sequence_synthetic(const tlp_synthetic_spec* spec, tlp_sequence** out) {
    if (tlp_status s = require(spec != nullptr && out != nullptr, "null argument")) {
        return s;
    }
    if (tlp_status s = require(spec->n_nodes > 0 && spec->n_slices > 0,
                               "node and slice counts must be positive")) {
        return s;
    }
    return guarded([&] {
        tlp::SyntheticSpec cpp_spec;
        cpp_spec.n_nodes = static_cast<std::size_t>(spec->n_nodes);
        cpp_spec.n_slices = static_cast<std::size_t>(spec->n_slices);
        cpp_spec.target_sparsity = spec->target_sparsity;
        cpp_spec.max_weight = spec->max_weight;
        cpp_spec.drift_rate = spec->drift_rate;
        cpp_spec.seed = spec->seed;
        *out = new tlp_sequence{tlp::generate_synthetic(cpp_spec)};
        return TLP_OK;
    });
}

void tlp_sequence_free(tlp_sequence* seq) {
    delete seq;
}

int tlp_sequence_nodes(const tlp_sequence* seq) {
    return seq != nullptr ? static_cast<int>(seq->seq.n_nodes()) : 0;
}

int tlp_sequence_slices(const tlp_sequence* seq) {
    return seq != nullptr ? static_cast<int>(seq->seq.size()) : 0;
}

double tlp_sequence_max_weight(const tlp_sequence* seq) {
    return seq != nullptr ? seq->seq.max_weight() : 0.0;
}

double tlp_sequence_sparsity(const tlp_sequence* seq) {
    return seq != nullptr ? tlp::sparsity(seq->seq) : 0.0;
}

tlp_status tlp_sequence_histogram(const tlp_sequence* seq, int n_bins,
                                  unsigned long long* counts) {
    if (tlp_status s = require(seq != nullptr && counts != nullptr, "null argument")) {
        return s;
    }
    if (tlp_status s = require(n_bins > 0, "histogram needs at least one bin")) {
        return s;
    }
    return guarded([&] {
        const auto hist = tlp::weight_histogram(seq->seq, static_cast<std::size_t>(n_bins));
        for (std::size_t k = 0; k < hist.counts.size(); ++k) {
            counts[k] = hist.counts[k];
        }
        return TLP_OK;
    });
}

tlp_status tlp_sequence_snapshot(const tlp_sequence* seq, int slice, double* out) {
    if (tlp_status s = require(seq != nullptr && out != nullptr, "null argument")) {
        return s;
    }
    if (slice < 1 || static_cast<std::size_t>(slice) > seq->seq.size()) {
        set_error("slice " + std::to_string(slice) + " out of range 1.." +
                  std::to_string(seq->seq.size()));
        return TLP_ERR_INVALID_ARGUMENT;
    }
    const tlp::Matrix& m = seq->seq.snapshot(static_cast<std::size_t>(slice - 1));
    std::memcpy(out, m.data(), m.size() * sizeof(double));
    return TLP_OK;
}

void tlp_experiment_config_defaults(tlp_experiment_config* config) {
    if (config == nullptr) {
        return;
    }
    const tlp::TrainConfig train;
    config->model = TLP_MODEL_GCN_GAN;
    config->window = train.window;
    config->pretrain_iters = train.pretrain_iters;
    config->train_iters = train.train_iters;
    config->pretrain_lr = train.pretrain_lr;
    config->d_lr = train.d_lr;
    config->g_lr = train.g_lr;
    config->clip = train.clip;
    config->l2 = train.l2;
    config->threshold = train.threshold;
    config->lstm_hidden = 0;
    config->critic_hidden = 0;
    config->baseline_hidden = 0;
    config->seed = train.seed;
    config->cold_start = 0;
    config->refine_baseline = 0;
    config->printed_critic_sign = 0;
    config->candidate_tanh = 0;
    config->keep_predictions = 0;
    config->save_model_path = nullptr;
}

tlp_status tlp_run_experiment(const tlp_sequence* seq, const tlp_experiment_config* config,
                              tlp_result** out) {
    if (tlp_status s = require(seq != nullptr && config != nullptr && out != nullptr,
                               "null argument")) {
        return s;
    }
    return guarded([&] {
        tlp::ExperimentConfig cpp_config;
        cpp_config.model = config->model == TLP_MODEL_LSTM_BASELINE
                               ? tlp::ModelKind::LstmBaseline
                               : tlp::ModelKind::GcnGan;
        cpp_config.train.window = config->window;
        cpp_config.train.pretrain_iters = config->pretrain_iters;
        cpp_config.train.train_iters = config->train_iters;
        cpp_config.train.pretrain_lr = config->pretrain_lr;
        cpp_config.train.d_lr = config->d_lr;
        cpp_config.train.g_lr = config->g_lr;
        cpp_config.train.clip = config->clip;
        cpp_config.train.l2 = config->l2;
        cpp_config.train.threshold = config->threshold;
        cpp_config.train.seed = config->seed;
        cpp_config.train.printed_critic_sign = config->printed_critic_sign != 0;
        cpp_config.lstm_hidden = config->lstm_hidden > 0
                                     ? static_cast<std::size_t>(config->lstm_hidden)
                                     : 0;
        cpp_config.critic_hidden = config->critic_hidden > 0
                                       ? static_cast<std::size_t>(config->critic_hidden)
                                       : 0;
        cpp_config.baseline_hidden = config->baseline_hidden > 0
                                         ? static_cast<std::size_t>(config->baseline_hidden)
                                         : 0;
        cpp_config.cold_start = config->cold_start != 0;
        cpp_config.refine_baseline = config->refine_baseline != 0;
        cpp_config.candidate_tanh = config->candidate_tanh != 0;
        cpp_config.keep_predictions = config->keep_predictions != 0;
        if (config->save_model_path != nullptr) {
            ensure_parent_dir(config->save_model_path);
            cpp_config.save_model_path = config->save_model_path;
        }
        *out = new tlp_result{tlp::run_experiment(seq->seq, cpp_config)};
        return TLP_OK;
    });
}

void tlp_result_free(tlp_result* result) {
    delete result;
}

int tlp_result_scored_slices(const tlp_result* result) {
    return result != nullptr ? static_cast<int>(result->result.report.per_slice.size()) : 0;
}

tlp_status tlp_result_slice_metrics(const tlp_result* result, int index, int* slice,
                                    double* mse, double* kl, int* kl_valid, double* mismatch) {
    if (tlp_status s = require(result != nullptr, "null argument")) {
        return s;
    }
    const auto& rows = result->result.report.per_slice;
    if (index < 0 || static_cast<std::size_t>(index) >= rows.size()) {
        set_error("row index out of range");
        return TLP_ERR_INVALID_ARGUMENT;
    }
    const tlp::SliceMetrics& row = rows[static_cast<std::size_t>(index)];
    if (slice != nullptr) {
        *slice = static_cast<int>(row.slice);
    }
    if (mse != nullptr) {
        *mse = row.mse;
    }
    if (kl != nullptr) {
        *kl = row.kl;
    }
    if (kl_valid != nullptr) {
        *kl_valid = row.kl_valid ? 1 : 0;
    }
    if (mismatch != nullptr) {
        *mismatch = row.mismatch;
    }
    return TLP_OK;
}

tlp_status tlp_result_averages(const tlp_result* result, double* mse, double* kl,
                               double* mismatch) {
    if (tlp_status s = require(result != nullptr, "null argument")) {
        return s;
    }
    if (mse != nullptr) {
        *mse = result->result.report.avg_mse;
    }
    if (kl != nullptr) {
        *kl = result->result.report.avg_kl;
    }
    if (mismatch != nullptr) {
        *mismatch = result->result.report.avg_mismatch;
    }
    return TLP_OK;
}

tlp_status tlp_result_timings(const tlp_result* result, double* pretrain_seconds,
                              double* adversarial_seconds, double* predict_seconds) {
    if (tlp_status s = require(result != nullptr, "null argument")) {
        return s;
    }
    if (pretrain_seconds != nullptr) {
        *pretrain_seconds = result->result.pretrain_seconds;
    }
    if (adversarial_seconds != nullptr) {
        *adversarial_seconds = result->result.adversarial_seconds;
    }
    if (predict_seconds != nullptr) {
        *predict_seconds = result->result.predict_seconds;
    }
    return TLP_OK;
}

tlp_status tlp_result_prediction(const tlp_result* result, int slice, double* out) {
    if (tlp_status s = require(result != nullptr && out != nullptr, "null argument")) {
        return s;
    }
    for (const tlp::SlicePrediction& p : result->result.predictions) {
        if (p.slice == static_cast<std::size_t>(slice)) {
            std::memcpy(out, p.prediction.data(), p.prediction.size() * sizeof(double));
            return TLP_OK;
        }
    }
    set_error("no kept prediction for slice " + std::to_string(slice) +
              " (was keep_predictions set?)");
    return TLP_ERR_INVALID_ARGUMENT;
}

tlp_status tlp_result_write_metrics_csv(const tlp_result* result, const char* path) {
    if (tlp_status s = require(result != nullptr && path != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        return write_file(path, "metrics csv",
                          [](const tlp_result* r, std::ostream& out) {
                              tlp::write_metrics_csv(r->result.report, out);
                          },
                          result);
    });
}

tlp_status tlp_result_write_losses_csv(const tlp_result* result, const char* path) {
    if (tlp_status s = require(result != nullptr && path != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        return write_file(path, "loss csv",
                          [](const tlp_result* r, std::ostream& out) {
                              tlp::write_losses_csv(r->result, out);
                          },
                          result);
    });
}

tlp_status tlp_result_write_predictions(const tlp_result* result, const char* dir) {
    if (tlp_status s = require(result != nullptr && dir != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        tlp::write_predictions(result->result, dir);
        return TLP_OK;
    });
}

tlp_status tlp_heatmap_write_csv(const double* values, int n, const char* path) {
    if (tlp_status s = require(values != nullptr && path != nullptr, "null argument")) {
        return s;
    }
    if (tlp_status s = require(n > 0, "matrix side must be positive")) {
        return s;
    }
    return guarded([&] {
        tlp::Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        std::memcpy(m.data(), values, m.size() * sizeof(double));
        ensure_parent_dir(path);
        std::ofstream out(path);
        if (!out) {
            set_error(std::string("cannot open '") + path + "' for writing");
            return TLP_ERR_IO;
        }
        tlp::write_heatmap_csv(m, out);
        if (!out) {
            set_error(std::string("failed writing '") + path + "'");
            return TLP_ERR_IO;
        }
        return TLP_OK;
    });
}

}  // extern "C"
