#include "tlp/nn.hpp"

#include <cmath>
#include <string>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

// Derivative of the activation expressed through its own output value.
double activation_deriv(double out, Activation act) {
    switch (act) {
        case Activation::Sigmoid:
            return out * (1.0 - out);
        case Activation::Tanh:
            return 1.0 - out * out;
        case Activation::Linear:
            return 1.0;
    }
    return 1.0;
}

Matrix backprop_through_activation(const Matrix& d_output, const Matrix& output, Activation act) {
    if (act == Activation::Linear) {
        return d_output;
    }
    Matrix d_pre = d_output;
    for (std::size_t k = 0; k < d_pre.size(); ++k) {
        d_pre.data()[k] *= activation_deriv(output.data()[k], act);
    }
    return d_pre;
}

// a = x W_x + h W_h + b for one LSTM gate.
Matrix gate_preactivation(const Matrix& x, const Matrix& h, const LstmGateParams& gate) {
    Matrix a = matmul(x, gate.input_weight);
    add_in_place(a, matmul(h, gate.recurrent_weight));
    add_in_place(a, gate.bias);
    return a;
}

void require_gate_shapes(const LstmGateParams& gate, std::size_t m_i, std::size_t m_h,
                         const char* name) {
    if (gate.input_weight.rows() != m_i || gate.input_weight.cols() != m_h ||
        gate.recurrent_weight.rows() != m_h || gate.recurrent_weight.cols() != m_h ||
        gate.bias.rows() != 1 || gate.bias.cols() != m_h) {
        throw ShapeError(std::string("lstm: inconsistent parameter shapes in ") + name + " gate");
    }
}

}  // namespace

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix apply_activation(const Matrix& m, Activation act) {
    if (act == Activation::Linear) {
        return m;
    }
    Matrix out = m;
    for (double& v : out.values()) {
        v = act == Activation::Sigmoid ? sigmoid(v) : std::tanh(v);
    }
    return out;
}

Matrix xavier_init(Rng& rng, std::size_t rows, std::size_t cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix out(rows, cols);
    for (double& v : out.values()) {
        v = rng.next_uniform(-bound, bound);
    }
    return out;
}

Matrix gcn_filter(const Matrix& a_norm) {
    if (a_norm.rows() != a_norm.cols()) {
        throw ShapeError("gcn_filter: adjacency matrix must be square, got " +
                         std::to_string(a_norm.rows()) + "x" + std::to_string(a_norm.cols()));
    }
    const std::size_t n = a_norm.rows();
    // A_hat = A + I; D_hat_ii = sum_j A_hat_ij >= 1, so the rsqrt is defined.
    std::vector<double> d_rsqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            row_sum += a_norm(i, j);
        }
        d_rsqrt[i] = 1.0 / std::sqrt(row_sum);
    }
    Matrix filter(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a_hat = a_norm(i, j) + (i == j ? 1.0 : 0.0);
            filter(i, j) = d_rsqrt[i] * a_hat * d_rsqrt[j];
        }
    }
    return filter;
}

Matrix gcn_forward(const Matrix& z, const Matrix& a_norm, const GcnLayerParams& params,
                   Activation act, GcnCache* cache) {
    return gcn_forward_filtered(z, gcn_filter(a_norm), params, act, cache);
}

Matrix gcn_forward_filtered(const Matrix& z, const Matrix& filter, const GcnLayerParams& params,
                            Activation act, GcnCache* cache) {
    if (filter.cols() != z.rows()) {
        throw ShapeError("gcn_forward: filter is " + std::to_string(filter.rows()) + "x" +
                         std::to_string(filter.cols()) + " but feature input has " +
                         std::to_string(z.rows()) + " rows");
    }
    Matrix filtered = matmul(filter, z);
    Matrix out = apply_activation(matmul(filtered, params.weight), act);
    if (cache != nullptr) {
        cache->filter = filter;
        cache->filtered_input = std::move(filtered);
        cache->output = out;
    }
    return out;
}

Matrix gcn_backward(const Matrix& d_output, const GcnCache& cache, const GcnLayerParams& params,
                    Activation act, GcnGrads& grads) {
    if (cache.output.empty()) {
        throw UsageError("gcn_backward: no cached forward pass");
    }
    Matrix d_pre = backprop_through_activation(d_output, cache.output, act);
    add_in_place(grads.weight, matmul(transpose(cache.filtered_input), d_pre));
    // dZ = F^T dPre W^T; the filter is symmetric for symmetric snapshots but
    // the transpose is kept for generality.
    return matmul(transpose(cache.filter), matmul(d_pre, transpose(params.weight)));
}

LstmParams make_lstm(Rng& rng, std::size_t input_size, std::size_t hidden_size,
                     Activation candidate_act) {
    auto make_gate = [&] {
        return LstmGateParams{xavier_init(rng, input_size, hidden_size),
                              xavier_init(rng, hidden_size, hidden_size),
                              Matrix(1, hidden_size)};
    };
    LstmParams params{make_gate(), make_gate(), make_gate(), make_gate(), candidate_act};
    return params;
}

LstmState lstm_zero_state(std::size_t hidden_size) {
    return LstmState{Matrix(1, hidden_size), Matrix(1, hidden_size)};
}

LstmState lstm_step(const Matrix& x, const LstmState& prev, const LstmParams& params,
                    LstmStepCache* cache) {
    const std::size_t m_i = params.input_size();
    const std::size_t m_h = params.hidden_size();
    require_gate_shapes(params.input, m_i, m_h, "input");
    require_gate_shapes(params.forget, m_i, m_h, "forget");
    require_gate_shapes(params.output, m_i, m_h, "output");
    require_gate_shapes(params.candidate, m_i, m_h, "candidate");
    if (x.rows() != 1 || x.cols() != m_i) {
        throw ShapeError("lstm_step: input must be 1x" + std::to_string(m_i) + ", got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    if (prev.hidden.cols() != m_h || prev.cell.cols() != m_h) {
        throw ShapeError("lstm_step: state width does not match hidden size");
    }

    Matrix gate_i = apply_activation(gate_preactivation(x, prev.hidden, params.input),
                                     Activation::Sigmoid);
    Matrix gate_f = apply_activation(gate_preactivation(x, prev.hidden, params.forget),
                                     Activation::Sigmoid);
    Matrix gate_o = apply_activation(gate_preactivation(x, prev.hidden, params.output),
                                     Activation::Sigmoid);
    Matrix cand = apply_activation(gate_preactivation(x, prev.hidden, params.candidate),
                                   params.candidate_act);

    Matrix cell = add(hadamard(gate_f, prev.cell), hadamard(gate_i, cand));
    Matrix tanh_cell = apply_activation(cell, Activation::Tanh);
    LstmState next{hadamard(gate_o, tanh_cell), cell};

    if (cache != nullptr) {
        cache->x = x;
        cache->h_prev = prev.hidden;
        cache->s_prev = prev.cell;
        cache->gate_i = std::move(gate_i);
        cache->gate_f = std::move(gate_f);
        cache->gate_o = std::move(gate_o);
        cache->cand = std::move(cand);
        cache->cell = next.cell;
        cache->tanh_cell = std::move(tanh_cell);
    }
    return next;
}

LstmState lstm_forward(std::span<const Matrix> inputs, const LstmParams& params,
                       LstmSequenceCache* cache) {
    if (inputs.empty()) {
        throw ValidationError("lstm_forward: empty input sequence");
    }
    if (cache != nullptr) {
        cache->steps.clear();
        cache->steps.reserve(inputs.size());
    }
    LstmState state = lstm_zero_state(params.hidden_size());
    for (const Matrix& x : inputs) {
        if (cache != nullptr) {
            cache->steps.emplace_back();
            state = lstm_step(x, state, params, &cache->steps.back());
        } else {
            state = lstm_step(x, state, params, nullptr);
        }
    }
    return state;
}

LstmGrads make_lstm_grads(const LstmParams& params) {
    auto zero_gate = [&] {
        return LstmGateParams{Matrix(params.input_size(), params.hidden_size()),
                              Matrix(params.hidden_size(), params.hidden_size()),
                              Matrix(1, params.hidden_size())};
    };
    return LstmGrads{zero_gate(), zero_gate(), zero_gate(), zero_gate()};
}

std::vector<Matrix> lstm_backward_through_time(const Matrix& d_h_last,
                                               const LstmSequenceCache& cache,
                                               const LstmParams& params, LstmGrads& grads) {
    if (cache.steps.empty()) {
        throw UsageError("lstm_backward_through_time: no cached forward pass");
    }
    const std::size_t m_h = params.hidden_size();
    const std::size_t steps = cache.steps.size();
    std::vector<Matrix> d_inputs(steps);

    Matrix d_h = d_h_last;       // dL/dh_t flowing backwards
    Matrix d_s(1, m_h);          // dL/ds_t carried from step t+1
    for (std::size_t t = steps; t-- > 0;) {
        const LstmStepCache& step = cache.steps[t];

        // h = o . tanh(s)
        Matrix d_o = hadamard(d_h, step.tanh_cell);
        for (std::size_t k = 0; k < m_h; ++k) {
            const double th = step.tanh_cell.data()[k];
            d_s.data()[k] += d_h.data()[k] * step.gate_o.data()[k] * (1.0 - th * th);
        }

        // s = f . s_prev + i . cand
        Matrix d_i = hadamard(d_s, step.cand);
        Matrix d_cand = hadamard(d_s, step.gate_i);
        Matrix d_f = hadamard(d_s, step.s_prev);
        Matrix d_s_prev = hadamard(d_s, step.gate_f);

        // Through the gate nonlinearities to the preactivations.
        Matrix da_i = backprop_through_activation(d_i, step.gate_i, Activation::Sigmoid);
        Matrix da_f = backprop_through_activation(d_f, step.gate_f, Activation::Sigmoid);
        Matrix da_o = backprop_through_activation(d_o, step.gate_o, Activation::Sigmoid);
        Matrix da_c = backprop_through_activation(d_cand, step.cand, params.candidate_act);

        const Matrix x_t = transpose(step.x);
        const Matrix h_prev_t = transpose(step.h_prev);
        auto accumulate_gate = [&](const Matrix& da, const LstmGateParams& gate,
                                   LstmGateParams& gate_grads, Matrix& d_x, Matrix& d_h_prev) {
            add_in_place(gate_grads.input_weight, matmul(x_t, da));
            add_in_place(gate_grads.recurrent_weight, matmul(h_prev_t, da));
            add_in_place(gate_grads.bias, da);
            add_in_place(d_x, matmul(da, transpose(gate.input_weight)));
            add_in_place(d_h_prev, matmul(da, transpose(gate.recurrent_weight)));
        };

        Matrix d_x(1, params.input_size());
        Matrix d_h_prev(1, m_h);
        accumulate_gate(da_i, params.input, grads.input, d_x, d_h_prev);
        accumulate_gate(da_f, params.forget, grads.forget, d_x, d_h_prev);
        accumulate_gate(da_o, params.output, grads.output, d_x, d_h_prev);
        accumulate_gate(da_c, params.candidate, grads.candidate, d_x, d_h_prev);

        d_inputs[t] = std::move(d_x);
        d_h = std::move(d_h_prev);
        d_s = std::move(d_s_prev);
    }
    return d_inputs;
}

DenseParams make_dense(Rng& rng, std::size_t in, std::size_t out) {
    return DenseParams{xavier_init(rng, in, out), Matrix(1, out)};
}

Matrix dense_forward(const Matrix& x, const DenseParams& params, Activation act,
                     DenseCache* cache) {
    if (x.cols() != params.weight.rows()) {
        throw ShapeError("dense_forward: input width " + std::to_string(x.cols()) +
                         " does not match weight rows " + std::to_string(params.weight.rows()));
    }
    Matrix pre = matmul(x, params.weight);
    add_in_place(pre, params.bias);
    Matrix out = apply_activation(pre, act);
    if (cache != nullptr) {
        cache->input = x;
        cache->output = out;
    }
    return out;
}

Matrix dense_backward(const Matrix& d_output, const DenseCache& cache, const DenseParams& params,
                      Activation act, DenseGrads& grads) {
    if (cache.output.empty()) {
        throw UsageError("dense_backward: no cached forward pass");
    }
    Matrix d_pre = backprop_through_activation(d_output, cache.output, act);
    add_in_place(grads.weight, matmul(transpose(cache.input), d_pre));
    add_in_place(grads.bias, d_pre);
    return matmul(d_pre, transpose(params.weight));
}

RmsPropState make_rmsprop_state(std::span<const Matrix* const> params, RmsPropConfig config) {
    RmsPropState state;
    state.config = config;
    state.acc.reserve(params.size());
    for (const Matrix* p : params) {
        state.acc.emplace_back(p->rows(), p->cols());
    }
    return state;
}

void rmsprop_update(Matrix& param, const Matrix& grad, Matrix& acc, const RmsPropConfig& config,
                    double lr) {
    if (!param.same_shape(grad) || !param.same_shape(acc)) {
        throw ShapeError("rmsprop_update: parameter, gradient and accumulator shapes differ");
    }
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double g = grad.data()[k];
        double& a = acc.data()[k];
        a = config.decay * a + (1.0 - config.decay) * g * g;
        param.data()[k] -= lr * g / (std::sqrt(a) + config.epsilon);
    }
}

void rmsprop_update(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
                    RmsPropState& state, double lr) {
    if (params.size() != grads.size() || params.size() != state.acc.size()) {
        throw ShapeError("rmsprop_update: block counts differ");
    }
    for (std::size_t b = 0; b < params.size(); ++b) {
        rmsprop_update(*params[b], *grads[b], state.acc[b], state.config, lr);
    }
}

void clip_params(std::span<Matrix* const> params, double c) {
    if (c <= 0.0) {
        throw ValidationError("clip_params: bound must be positive");
    }
    for (Matrix* block : params) {
        for (double& v : block->values()) {
            v = v < -c ? -c : (v > c ? c : v);
        }
    }
}

}  // namespace tlp
