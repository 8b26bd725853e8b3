#include "tlp/baseline.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "tlp/errors.hpp"

namespace tlp {

std::size_t LstmBaselineParams::n_nodes() const {
    return static_cast<std::size_t>(std::lround(std::sqrt(
        static_cast<double>(lstm.input_size()))));
}

std::vector<Matrix*> LstmBaselineParams::blocks() {
    return {&lstm.input.input_weight,  &lstm.input.recurrent_weight,  &lstm.input.bias,
            &lstm.forget.input_weight, &lstm.forget.recurrent_weight, &lstm.forget.bias,
            &lstm.output.input_weight, &lstm.output.recurrent_weight, &lstm.output.bias,
            &lstm.candidate.input_weight, &lstm.candidate.recurrent_weight, &lstm.candidate.bias,
            &output.weight, &output.bias};
}

std::vector<const Matrix*> LstmBaselineParams::blocks() const {
    auto mutable_blocks = const_cast<LstmBaselineParams*>(this)->blocks();
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

LstmBaselineParams make_lstm_baseline(Rng& rng, std::size_t n_nodes, std::size_t hidden,
                                      Activation candidate_act) {
    LstmBaselineParams params;
    params.lstm = make_lstm(rng, n_nodes * n_nodes, hidden, candidate_act);
    params.output = make_dense(rng, hidden, n_nodes * n_nodes);
    return params;
}

Matrix baseline_forward(std::span<const Matrix> window, const LstmBaselineParams& params,
                        BaselineCache* cache) {
    if (window.empty()) {
        throw ValidationError("baseline_forward: empty window");
    }
    const std::size_t n = params.n_nodes();
    std::vector<Matrix> inputs;
    inputs.reserve(window.size());
    for (const Matrix& snapshot : window) {
        if (snapshot.rows() != n || snapshot.cols() != n) {
            throw ShapeError("baseline_forward: expected " + std::to_string(n) + "x" +
                             std::to_string(n) + " snapshot, got " +
                             std::to_string(snapshot.rows()) + "x" +
                             std::to_string(snapshot.cols()));
        }
        inputs.push_back(reshape_rowwise(snapshot, 1, n * n));
    }
    LstmState last = lstm_forward(inputs, params.lstm, cache != nullptr ? &cache->lstm : nullptr);
    Matrix out_vec = dense_forward(last.hidden, params.output, Activation::Sigmoid,
                                   cache != nullptr ? &cache->out : nullptr);
    Matrix out = reshape_rowwise(out_vec, n, n);
    if (cache != nullptr) {
        cache->output = out;
    }
    return out;
}

BaselineModel make_baseline_model(Rng& rng, std::size_t n_nodes, std::size_t hidden,
                                  const TrainConfig& config, Activation candidate_act) {
    BaselineModel model;
    model.params = make_lstm_baseline(rng, n_nodes, hidden, candidate_act);
    auto blocks = std::as_const(model.params).blocks();
    model.opt = make_rmsprop_state(blocks, config.rmsprop);
    return model;
}

std::vector<double> baseline_train_for_slice(std::span<const Matrix> history,
                                             const Matrix& target, const TrainConfig& config,
                                             BaselineModel& model) {
    config.validate();
    if (history.size() != static_cast<std::size_t>(config.window) + 1) {
        throw ShapeError("baseline_train_for_slice: history must hold window+1 snapshots, got " +
                         std::to_string(history.size()));
    }
    const int iters = config.pretrain_iters + config.train_iters;
    std::vector<double> trace;
    trace.reserve(iters);

    auto param_blocks = model.params.blocks();
    LstmGrads lstm_grads = make_lstm_grads(model.params.lstm);
    DenseGrads out_grads{Matrix(model.params.output.weight.rows(),
                                model.params.output.weight.cols()),
                         Matrix(1, model.params.output.bias.cols())};
    const std::size_t n = model.params.n_nodes();

    for (int iter = 0; iter < iters; ++iter) {
        BaselineCache cache;
        Matrix out = baseline_forward(history, model.params, &cache);
        if (!out.same_shape(target)) {
            throw ShapeError("baseline_train_for_slice: target shape mismatch");
        }
        Matrix diff = sub(out, target);
        trace.push_back(frobenius_norm_sq(diff));

        std::vector<Matrix*> grad_blocks = {
            &lstm_grads.input.input_weight,  &lstm_grads.input.recurrent_weight,
            &lstm_grads.input.bias,          &lstm_grads.forget.input_weight,
            &lstm_grads.forget.recurrent_weight, &lstm_grads.forget.bias,
            &lstm_grads.output.input_weight, &lstm_grads.output.recurrent_weight,
            &lstm_grads.output.bias,         &lstm_grads.candidate.input_weight,
            &lstm_grads.candidate.recurrent_weight, &lstm_grads.candidate.bias,
            &out_grads.weight,               &out_grads.bias};
        for (Matrix* block : grad_blocks) {
            for (double& v : block->values()) {
                v = 0.0;
            }
        }

        Matrix d_out_vec = reshape_rowwise(scale(diff, 2.0), 1, n * n);
        Matrix d_hidden = dense_backward(d_out_vec, cache.out, model.params.output,
                                         Activation::Sigmoid, out_grads);
        lstm_backward_through_time(d_hidden, cache.lstm, model.params.lstm, lstm_grads);

        rmsprop_update(param_blocks, {grad_blocks.data(), grad_blocks.size()}, model.opt,
                       config.pretrain_lr);
    }
    return trace;
}

Matrix baseline_predict(std::span<const Matrix> window, const LstmBaselineParams& params,
                        double max_weight, bool refine_output, double threshold) {
    if (max_weight <= 0.0) {
        throw ValidationError("baseline_predict: max_weight must be positive");
    }
    Matrix raw = baseline_forward(window, params);
    if (refine_output) {
        raw = refine(raw, threshold);
    }
    return scale(raw, max_weight);
}

}  // namespace tlp
