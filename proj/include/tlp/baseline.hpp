#ifndef TLP_BASELINE_HPP_
#define TLP_BASELINE_HPP_

#include <span>
#include <vector>

#include "tlp/matrix.hpp"
#include "tlp/model.hpp"
#include "tlp/nn.hpp"
#include "tlp/rng.hpp"

namespace tlp {

// Plain LSTM comparator: the same recurrent core and sigmoid output layer as
// the generator but no graph convolution, no noise input and no adversary.
// Trained on squared reconstruction error alone.
struct LstmBaselineParams {
    LstmParams lstm;     // input N^2, hidden m_h
    DenseParams output;  // m_h x N^2, sigmoid

    std::size_t n_nodes() const;

    std::vector<Matrix*> blocks();
    std::vector<const Matrix*> blocks() const;
};

LstmBaselineParams make_lstm_baseline(Rng& rng, std::size_t n_nodes, std::size_t hidden,
                                      Activation candidate_act = Activation::Sigmoid);

struct BaselineCache {
    LstmSequenceCache lstm;
    DenseCache out;
    Matrix output;
};

Matrix baseline_forward(std::span<const Matrix> window, const LstmBaselineParams& params,
                        BaselineCache* cache = nullptr);

struct BaselineModel {
    LstmBaselineParams params;
    RmsPropState opt;
};

BaselineModel make_baseline_model(Rng& rng, std::size_t n_nodes, std::size_t hidden,
                                  const TrainConfig& config,
                                  Activation candidate_act = Activation::Sigmoid);

// RMSProp on ||target - forward(history)||_F^2 for pretrain_iters+train_iters
// steps (budget matched with the adversarial model) at the pretrain rate.
// Returns the loss trace.
std::vector<double> baseline_train_for_slice(std::span<const Matrix> history,
                                             const Matrix& target, const TrainConfig& config,
                                             BaselineModel& model);

// Renormalized raw prediction. Refinement is deliberately not applied unless
// asked for: the raw output never contains exact zeros, which is precisely
// what the mismatch-rate comparison probes.
Matrix baseline_predict(std::span<const Matrix> window, const LstmBaselineParams& params,
                        double max_weight, bool refine_output, double threshold);

}  // namespace tlp

#endif  // TLP_BASELINE_HPP_
