#ifndef TLP_NN_HPP_
#define TLP_NN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "tlp/matrix.hpp"
#include "tlp/rng.hpp"

namespace tlp {

enum class Activation { Sigmoid, Tanh, Linear };

double sigmoid(double x);
Matrix apply_activation(const Matrix& m, Activation act);

// Entries drawn uniformly from [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
Matrix xavier_init(Rng& rng, std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------------------
// Graph convolution: X = act(D^{-1/2} (A + I) D^{-1/2} Z W)
// ---------------------------------------------------------------------------

struct GcnLayerParams {
    Matrix weight;  // M_in x M_out
};

// Renormalized convolution filter for one snapshot. A must be square with
// entries in [0,1]; the +I diagonal keeps every row sum positive.
Matrix gcn_filter(const Matrix& a_norm);

struct GcnCache {
    Matrix filter;          // N x N
    Matrix filtered_input;  // filter * z, N x M_in
    Matrix output;          // N x M_out, post-activation
};

Matrix gcn_forward(const Matrix& z, const Matrix& a_norm, const GcnLayerParams& params,
                   Activation act = Activation::Sigmoid, GcnCache* cache = nullptr);

// Forward with a precomputed filter; the filter only depends on the snapshot,
// so training loops reuse it across iterations.
Matrix gcn_forward_filtered(const Matrix& z, const Matrix& filter, const GcnLayerParams& params,
                            Activation act = Activation::Sigmoid, GcnCache* cache = nullptr);

struct GcnGrads {
    Matrix weight;
};

// Accumulates the weight gradient into grads and returns dL/dZ.
Matrix gcn_backward(const Matrix& d_output, const GcnCache& cache, const GcnLayerParams& params,
                    Activation act, GcnGrads& grads);

// ---------------------------------------------------------------------------
// LSTM cell (row-vector convention: x is 1 x m_i, h and s are 1 x m_h)
//   i = sig(x Wx_i + h Wh_i + b_i)      f, o analogous
//   cand = g(x Wx_s + h Wh_s + b_s)     g is sigmoid by default, tanh optional
//   s' = f . s + i . cand
//   h' = o . tanh(s')
// ---------------------------------------------------------------------------

struct LstmGateParams {
    Matrix input_weight;      // m_i x m_h
    Matrix recurrent_weight;  // m_h x m_h
    Matrix bias;              // 1 x m_h
};

struct LstmParams {
    LstmGateParams input;
    LstmGateParams forget;
    LstmGateParams output;
    LstmGateParams candidate;
    Activation candidate_act = Activation::Sigmoid;

    std::size_t input_size() const { return input.input_weight.rows(); }
    std::size_t hidden_size() const { return input.input_weight.cols(); }
};

LstmParams make_lstm(Rng& rng, std::size_t input_size, std::size_t hidden_size,
                     Activation candidate_act = Activation::Sigmoid);

struct LstmState {
    Matrix hidden;  // 1 x m_h
    Matrix cell;    // 1 x m_h
};

LstmState lstm_zero_state(std::size_t hidden_size);

struct LstmStepCache {
    Matrix x;
    Matrix h_prev;
    Matrix s_prev;
    Matrix gate_i;
    Matrix gate_f;
    Matrix gate_o;
    Matrix cand;
    Matrix cell;
    Matrix tanh_cell;
};

LstmState lstm_step(const Matrix& x, const LstmState& prev, const LstmParams& params,
                    LstmStepCache* cache = nullptr);

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;
};

LstmState lstm_forward(std::span<const Matrix> inputs, const LstmParams& params,
                       LstmSequenceCache* cache = nullptr);

struct LstmGrads {
    LstmGateParams input;
    LstmGateParams forget;
    LstmGateParams output;
    LstmGateParams candidate;
};

LstmGrads make_lstm_grads(const LstmParams& params);

// Backprop through the whole unrolled sequence from the loss gradient on the
// final hidden state. Accumulates parameter gradients and returns dL/dx per
// step. Throws UsageError when the cache holds no forward pass.
std::vector<Matrix> lstm_backward_through_time(const Matrix& d_h_last,
                                               const LstmSequenceCache& cache,
                                               const LstmParams& params, LstmGrads& grads);

// ---------------------------------------------------------------------------
// Dense layer: y = act(x W + b)
// ---------------------------------------------------------------------------

struct DenseParams {
    Matrix weight;  // in x out
    Matrix bias;    // 1 x out
};

DenseParams make_dense(Rng& rng, std::size_t in, std::size_t out);

struct DenseCache {
    Matrix input;
    Matrix output;
};

Matrix dense_forward(const Matrix& x, const DenseParams& params, Activation act,
                     DenseCache* cache = nullptr);

struct DenseGrads {
    Matrix weight;
    Matrix bias;
};

Matrix dense_backward(const Matrix& d_output, const DenseCache& cache, const DenseParams& params,
                      Activation act, DenseGrads& grads);

// ---------------------------------------------------------------------------
// RMSProp with elementwise accumulator: acc = rho*acc + (1-rho)*g^2,
// p -= lr * g / (sqrt(acc) + eps)
// ---------------------------------------------------------------------------

struct RmsPropConfig {
    double decay = 0.9;
    double epsilon = 1e-8;
};

struct RmsPropState {
    RmsPropConfig config;
    std::vector<Matrix> acc;  // mirrors the parameter block shapes
};

RmsPropState make_rmsprop_state(std::span<const Matrix* const> params, RmsPropConfig config = {});

void rmsprop_update(Matrix& param, const Matrix& grad, Matrix& acc, const RmsPropConfig& config,
                    double lr);

void rmsprop_update(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
                    RmsPropState& state, double lr);

// Clamp every entry of every block to [-c, c].
void clip_params(std::span<Matrix* const> params, double c);

}  // namespace tlp

#endif  // TLP_NN_HPP_
