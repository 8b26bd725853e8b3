#ifndef TLP_MODEL_HPP_
#define TLP_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tlp/matrix.hpp"
#include "tlp/nn.hpp"
#include "tlp/rng.hpp"

namespace tlp {

// ---------------------------------------------------------------------------
// Generator: shared GCN unit over each window snapshot, LSTM across the
// window, dense sigmoid output reshaped back to N x N.
// ---------------------------------------------------------------------------

struct GeneratorParams {
    GcnLayerParams gcn;  // N x N, shared across all window positions
    LstmParams lstm;     // input N^2, hidden m_h
    DenseParams output;  // m_h x N^2, sigmoid

    std::size_t n_nodes() const { return gcn.weight.rows(); }

    std::vector<Matrix*> blocks();
    std::vector<const Matrix*> blocks() const;
};

GeneratorParams make_generator(Rng& rng, std::size_t n_nodes, std::size_t lstm_hidden,
                               Activation candidate_act = Activation::Sigmoid);

struct GeneratorGrads {
    GcnGrads gcn;
    LstmGrads lstm;
    DenseGrads output;

    std::vector<Matrix*> blocks();
    std::vector<const Matrix*> blocks() const;
};

GeneratorGrads make_generator_grads(const GeneratorParams& params);

struct GeneratorCache {
    std::vector<GcnCache> gcn_steps;
    LstmSequenceCache lstm;
    DenseCache out;
    Matrix output;  // N x N
};

Matrix generator_forward(const Matrix& z, std::span<const Matrix> window,
                         const GeneratorParams& params, GeneratorCache* cache = nullptr);

// Variant taking precomputed per-snapshot convolution filters (see
// gcn_filter); a training loop over a fixed window computes them once.
Matrix generator_forward_filtered(const Matrix& z, std::span<const Matrix> filters,
                                  const GeneratorParams& params, GeneratorCache* cache = nullptr);

void generator_backward(const Matrix& d_output, const GeneratorCache& cache,
                        const GeneratorParams& params, GeneratorGrads& grads);

// ---------------------------------------------------------------------------
// Critic: reshaped snapshot -> sigmoid hidden layer -> linear scalar.
// ---------------------------------------------------------------------------

struct DiscriminatorParams {
    DenseParams hidden;  // N^2 x m_h^D, sigmoid
    DenseParams output;  // m_h^D x 1, linear

    std::vector<Matrix*> blocks();
    std::vector<const Matrix*> blocks() const;
};

DiscriminatorParams make_discriminator(Rng& rng, std::size_t n_nodes, std::size_t hidden_units);

struct DiscriminatorGrads {
    DenseGrads hidden;
    DenseGrads output;

    std::vector<Matrix*> blocks();
    std::vector<const Matrix*> blocks() const;
};

DiscriminatorGrads make_discriminator_grads(const DiscriminatorParams& params);

struct DiscriminatorCache {
    DenseCache hidden;
    DenseCache out;
    std::size_t input_rows = 0;
    std::size_t input_cols = 0;
};

double discriminator_forward(const Matrix& a, const DiscriminatorParams& params,
                             DiscriminatorCache* cache = nullptr);

// Backprop d_score through the critic; accumulates parameter gradients and
// returns dL/dA for chaining into the generator.
Matrix discriminator_backward(double d_score, const DiscriminatorCache& cache,
                              const DiscriminatorParams& params, DiscriminatorGrads& grads);

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

// ||target - G(z, window)||_F^2 + (l2/2)*||params||_2^2
double pretrain_loss(const GeneratorParams& params, const Matrix& z,
                     std::span<const Matrix> window, const Matrix& target, double l2);

double pretrain_loss_and_grad(const GeneratorParams& params, const Matrix& z,
                              std::span<const Matrix> filters, const Matrix& target, double l2,
                              GeneratorGrads& grads);

// Critic objective. The Wasserstein critic descends D(fake) - D(real);
// printed_sign flips to D(real) - D(fake) for fidelity experiments.
double critic_loss(const DiscriminatorParams& params, const Matrix& real_snapshot,
                   const Matrix& fake_snapshot, bool printed_sign = false);

double critic_loss_and_grad(const DiscriminatorParams& params, const Matrix& real_snapshot,
                            const Matrix& fake_snapshot, bool printed_sign,
                            DiscriminatorGrads& grads);

// Generator adversarial objective: -D(fake).
double generator_adv_loss(const DiscriminatorParams& params, const Matrix& fake_snapshot);

double generator_adv_loss_and_grad(const GeneratorParams& gen_params,
                                   const DiscriminatorParams& disc_params, const Matrix& z,
                                   std::span<const Matrix> filters, GeneratorGrads& grads);

// ---------------------------------------------------------------------------
// Prediction refinement: symmetrize, zero the diagonal, then zero entries
// below the threshold, in that order.
// ---------------------------------------------------------------------------

Matrix refine(const Matrix& a, double threshold);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
    int window = 10;            // l: window covers l+1 snapshots
    double pretrain_lr = 0.005; // alpha_0
    double d_lr = 0.001;        // alpha_D
    double g_lr = 0.001;        // alpha_G
    int pretrain_iters = 150;   // n_0
    int train_iters = 120;      // n
    double clip = 0.01;         // c
    double l2 = 0.0;            // lambda
    double threshold = 0.01;    // epsilon, normalized domain
    std::uint64_t seed = 1;
    RmsPropConfig rmsprop;
    bool printed_critic_sign = false;

    void validate() const;
};

// Generator + critic with their optimizer accumulators; exclusively owned by
// one training run.
struct GanModel {
    GeneratorParams generator;
    DiscriminatorParams discriminator;
    RmsPropState generator_opt;
    RmsPropState discriminator_opt;
};

GanModel make_gan_model(Rng& rng, std::size_t n_nodes, std::size_t lstm_hidden,
                        std::size_t critic_hidden, const TrainConfig& config,
                        Activation candidate_act = Activation::Sigmoid);

struct TrainTrace {
    std::vector<double> pretrain_loss;
    std::vector<double> critic_loss;
    std::vector<double> generator_loss;
};

// One sliding-window training round: pretrain_iters reconstruction steps on
// the generator, then train_iters alternating critic/generator adversarial
// steps with critic clipping. history holds the l+1 normalized snapshots
// preceding the normalized target.
TrainTrace train_for_slice(std::span<const Matrix> history, const Matrix& target,
                           const TrainConfig& config, GanModel& model, Rng& rng);

// Generator forward on the window with fresh noise, renormalized by
// max_weight, refined with the threshold scaled to the weight range.
Matrix predict(std::span<const Matrix> window, const GeneratorParams& params, Rng& rng,
               double max_weight, double threshold);

}  // namespace tlp

#endif  // TLP_MODEL_HPP_
