#ifndef TLP_RUNNER_HPP_
#define TLP_RUNNER_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "tlp/baseline.hpp"
#include "tlp/data.hpp"
#include "tlp/metrics.hpp"
#include "tlp/model.hpp"

namespace tlp {

enum class ModelKind { GcnGan, LstmBaseline };

const char* model_kind_name(ModelKind kind);

struct ExperimentConfig {
    ModelKind model = ModelKind::GcnGan;
    TrainConfig train;
    // Layer sizes; 0 picks the default scaled from N (lstm: N, critic: 8N
    // capped at 1024, baseline: 4N capped at 512).
    std::size_t lstm_hidden = 0;
    std::size_t critic_hidden = 0;
    std::size_t baseline_hidden = 0;
    bool cold_start = false;       // reinitialize parameters at every slice
    bool refine_baseline = false;  // apply refinement to baseline output too
    bool candidate_tanh = false;   // conventional LSTM candidate activation
    bool keep_predictions = false;
    std::string save_model_path;   // checkpoint written after the last slice
};

struct SlicePrediction {
    std::size_t slice = 0;  // 1-based predicted time slice
    Matrix prediction;      // denormalized (and refined, for the gan model)
};

struct ExperimentResult {
    ModelKind model = ModelKind::GcnGan;
    MetricsReport report;
    std::vector<std::size_t> trained_slices;  // 1-based training target per trace
    std::vector<TrainTrace> traces;           // baseline runs fill pretrain_loss only
    double pretrain_seconds = 0.0;
    double adversarial_seconds = 0.0;
    double predict_seconds = 0.0;
    std::vector<SlicePrediction> predictions;
};

// Test hook: snapshot reads and prediction events in program order, letting a
// test assert that no ground-truth slice is touched before the prediction
// targeting it exists.
class ExperimentObserver {
public:
    virtual ~ExperimentObserver() = default;
    virtual void on_snapshot_access(std::size_t slice) { (void)slice; }
    virtual void on_prediction(std::size_t slice) { (void)slice; }
};

// Sliding-window protocol over 1-based slices: for each tau in [l+2, T-1],
// train on snapshots tau-l-1..tau-1 with ground truth tau (parameters warm
// across slices), predict slice tau+1 from snapshots tau-l..tau, and score it
// against the truth. T-l-2 predictions in total; T < l+2 and T == l+2 are
// errors.
ExperimentResult run_experiment(const SnapshotSequence& seq, const ExperimentConfig& config,
                                ExperimentObserver* observer = nullptr);

// Heat-map export: zero entries become -200 so renderers can separate "no
// edge" from "small weight".
void write_heatmap_csv(const Matrix& m, std::ostream& out);
void export_heatmap_csv(const Matrix& truth, const Matrix& pred_gan,
                        const Matrix& pred_baseline, const std::string& dir);

void write_losses_csv(const ExperimentResult& result, std::ostream& out);

// One plain-text matrix file per kept prediction: <dir>/pred_slice_<t>.txt.
void write_predictions(const ExperimentResult& result, const std::string& dir);

}  // namespace tlp

#endif  // TLP_RUNNER_HPP_
