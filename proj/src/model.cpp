#include "tlp/model.hpp"

#include <string>
#include <utility>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

std::vector<Matrix> window_filters(std::span<const Matrix> window) {
    std::vector<Matrix> filters;
    filters.reserve(window.size());
    for (const Matrix& snapshot : window) {
        filters.push_back(gcn_filter(snapshot));
    }
    return filters;
}

void require_snapshot_shape(const Matrix& a, std::size_t n, const char* who) {
    if (a.rows() != n || a.cols() != n) {
        throw ShapeError(std::string(who) + ": expected " + std::to_string(n) + "x" +
                         std::to_string(n) + " snapshot, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    }
}

}  // namespace

std::vector<Matrix*> GeneratorParams::blocks() {
    return {&gcn.weight,
            &lstm.input.input_weight,  &lstm.input.recurrent_weight,  &lstm.input.bias,
            &lstm.forget.input_weight, &lstm.forget.recurrent_weight, &lstm.forget.bias,
            &lstm.output.input_weight, &lstm.output.recurrent_weight, &lstm.output.bias,
            &lstm.candidate.input_weight, &lstm.candidate.recurrent_weight, &lstm.candidate.bias,
            &output.weight, &output.bias};
}

std::vector<const Matrix*> GeneratorParams::blocks() const {
    auto mutable_blocks = const_cast<GeneratorParams*>(this)->blocks();
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

GeneratorParams make_generator(Rng& rng, std::size_t n_nodes, std::size_t lstm_hidden,
                               Activation candidate_act) {
    GeneratorParams params;
    params.gcn.weight = xavier_init(rng, n_nodes, n_nodes);
    params.lstm = make_lstm(rng, n_nodes * n_nodes, lstm_hidden, candidate_act);
    params.output = make_dense(rng, lstm_hidden, n_nodes * n_nodes);
    return params;
}

std::vector<Matrix*> GeneratorGrads::blocks() {
    return {&gcn.weight,
            &lstm.input.input_weight,  &lstm.input.recurrent_weight,  &lstm.input.bias,
            &lstm.forget.input_weight, &lstm.forget.recurrent_weight, &lstm.forget.bias,
            &lstm.output.input_weight, &lstm.output.recurrent_weight, &lstm.output.bias,
            &lstm.candidate.input_weight, &lstm.candidate.recurrent_weight, &lstm.candidate.bias,
            &output.weight, &output.bias};
}

std::vector<const Matrix*> GeneratorGrads::blocks() const {
    auto mutable_blocks = const_cast<GeneratorGrads*>(this)->blocks();
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

GeneratorGrads make_generator_grads(const GeneratorParams& params) {
    GeneratorGrads grads;
    grads.gcn.weight = Matrix(params.gcn.weight.rows(), params.gcn.weight.cols());
    grads.lstm = make_lstm_grads(params.lstm);
    grads.output.weight = Matrix(params.output.weight.rows(), params.output.weight.cols());
    grads.output.bias = Matrix(1, params.output.bias.cols());
    return grads;
}

Matrix generator_forward(const Matrix& z, std::span<const Matrix> window,
                         const GeneratorParams& params, GeneratorCache* cache) {
    const auto filters = window_filters(window);
    return generator_forward_filtered(z, filters, params, cache);
}

Matrix generator_forward_filtered(const Matrix& z, std::span<const Matrix> filters,
                                  const GeneratorParams& params, GeneratorCache* cache) {
    if (filters.empty()) {
        throw ValidationError("generator_forward: empty window");
    }
    const std::size_t n = params.n_nodes();
    require_snapshot_shape(z, n, "generator_forward noise");

    if (cache != nullptr) {
        cache->gcn_steps.assign(filters.size(), GcnCache{});
    }
    std::vector<Matrix> lstm_inputs;
    lstm_inputs.reserve(filters.size());
    for (std::size_t t = 0; t < filters.size(); ++t) {
        require_snapshot_shape(filters[t], n, "generator_forward window");
        GcnCache* step_cache = cache != nullptr ? &cache->gcn_steps[t] : nullptr;
        Matrix features = gcn_forward_filtered(z, filters[t], params.gcn, Activation::Sigmoid,
                                               step_cache);
        lstm_inputs.push_back(reshape_rowwise(features, 1, n * n));
    }

    LstmState last = lstm_forward(lstm_inputs, params.lstm,
                                  cache != nullptr ? &cache->lstm : nullptr);
    Matrix out_vec = dense_forward(last.hidden, params.output, Activation::Sigmoid,
                                   cache != nullptr ? &cache->out : nullptr);
    Matrix out = reshape_rowwise(out_vec, n, n);
    if (cache != nullptr) {
        cache->output = out;
    }
    return out;
}

void generator_backward(const Matrix& d_output, const GeneratorCache& cache,
                        const GeneratorParams& params, GeneratorGrads& grads) {
    if (cache.gcn_steps.empty()) {
        throw UsageError("generator_backward: no cached forward pass");
    }
    const std::size_t n = params.n_nodes();
    Matrix d_out_vec = reshape_rowwise(d_output, 1, n * n);
    Matrix d_hidden = dense_backward(d_out_vec, cache.out, params.output, Activation::Sigmoid,
                                     grads.output);
    std::vector<Matrix> d_inputs =
        lstm_backward_through_time(d_hidden, cache.lstm, params.lstm, grads.lstm);
    for (std::size_t t = 0; t < d_inputs.size(); ++t) {
        Matrix d_features = reshape_rowwise(d_inputs[t], n, n);
        gcn_backward(d_features, cache.gcn_steps[t], params.gcn, Activation::Sigmoid, grads.gcn);
    }
}

std::vector<Matrix*> DiscriminatorParams::blocks() {
    return {&hidden.weight, &hidden.bias, &output.weight, &output.bias};
}

std::vector<const Matrix*> DiscriminatorParams::blocks() const {
    auto mutable_blocks = const_cast<DiscriminatorParams*>(this)->blocks();
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

DiscriminatorParams make_discriminator(Rng& rng, std::size_t n_nodes, std::size_t hidden_units) {
    DiscriminatorParams params;
    params.hidden = make_dense(rng, n_nodes * n_nodes, hidden_units);
    params.output = make_dense(rng, hidden_units, 1);
    return params;
}

std::vector<Matrix*> DiscriminatorGrads::blocks() {
    return {&hidden.weight, &hidden.bias, &output.weight, &output.bias};
}

std::vector<const Matrix*> DiscriminatorGrads::blocks() const {
    auto mutable_blocks = const_cast<DiscriminatorGrads*>(this)->blocks();
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

DiscriminatorGrads make_discriminator_grads(const DiscriminatorParams& params) {
    DiscriminatorGrads grads;
    grads.hidden.weight = Matrix(params.hidden.weight.rows(), params.hidden.weight.cols());
    grads.hidden.bias = Matrix(1, params.hidden.bias.cols());
    grads.output.weight = Matrix(params.output.weight.rows(), params.output.weight.cols());
    grads.output.bias = Matrix(1, params.output.bias.cols());
    return grads;
}

double discriminator_forward(const Matrix& a, const DiscriminatorParams& params,
                             DiscriminatorCache* cache) {
    if (a.size() != params.hidden.weight.rows()) {
        throw ShapeError("discriminator_forward: snapshot has " + std::to_string(a.size()) +
                         " entries, expected " + std::to_string(params.hidden.weight.rows()));
    }
    Matrix flat = reshape_rowwise(a, 1, a.size());
    Matrix h = dense_forward(flat, params.hidden, Activation::Sigmoid,
                             cache != nullptr ? &cache->hidden : nullptr);
    Matrix score = dense_forward(h, params.output, Activation::Linear,
                                 cache != nullptr ? &cache->out : nullptr);
    if (cache != nullptr) {
        cache->input_rows = a.rows();
        cache->input_cols = a.cols();
    }
    return score(0, 0);
}

Matrix discriminator_backward(double d_score, const DiscriminatorCache& cache,
                              const DiscriminatorParams& params, DiscriminatorGrads& grads) {
    if (cache.hidden.output.empty()) {
        throw UsageError("discriminator_backward: no cached forward pass");
    }
    Matrix d_out(1, 1);
    d_out(0, 0) = d_score;
    Matrix d_hidden = dense_backward(d_out, cache.out, params.output, Activation::Linear,
                                     grads.output);
    Matrix d_flat = dense_backward(d_hidden, cache.hidden, params.hidden, Activation::Sigmoid,
                                   grads.hidden);
    return reshape_rowwise(d_flat, cache.input_rows, cache.input_cols);
}

double pretrain_loss(const GeneratorParams& params, const Matrix& z,
                     std::span<const Matrix> window, const Matrix& target, double l2) {
    Matrix out = generator_forward(z, window, params);
    if (!out.same_shape(target)) {
        throw ShapeError("pretrain_loss: target shape does not match generator output");
    }
    double loss = frobenius_norm_sq(sub(out, target));
    if (l2 != 0.0) {
        double reg = 0.0;
        for (const Matrix* block : params.blocks()) {
            reg += frobenius_norm_sq(*block);
        }
        loss += 0.5 * l2 * reg;
    }
    return loss;
}

double pretrain_loss_and_grad(const GeneratorParams& params, const Matrix& z,
                              std::span<const Matrix> filters, const Matrix& target, double l2,
                              GeneratorGrads& grads) {
    GeneratorCache cache;
    Matrix out = generator_forward_filtered(z, filters, params, &cache);
    if (!out.same_shape(target)) {
        throw ShapeError("pretrain_loss: target shape does not match generator output");
    }
    Matrix diff = sub(out, target);
    double loss = frobenius_norm_sq(diff);
    generator_backward(scale(diff, 2.0), cache, params, grads);
    if (l2 != 0.0) {
        double reg = 0.0;
        auto grad_blocks = grads.blocks();
        auto param_blocks = params.blocks();
        for (std::size_t b = 0; b < param_blocks.size(); ++b) {
            reg += frobenius_norm_sq(*param_blocks[b]);
            axpy(*grad_blocks[b], l2, *param_blocks[b]);
        }
        loss += 0.5 * l2 * reg;
    }
    return loss;
}

double critic_loss(const DiscriminatorParams& params, const Matrix& real_snapshot,
                   const Matrix& fake_snapshot, bool printed_sign) {
    const double d_real = discriminator_forward(real_snapshot, params);
    const double d_fake = discriminator_forward(fake_snapshot, params);
    return printed_sign ? d_real - d_fake : d_fake - d_real;
}

double critic_loss_and_grad(const DiscriminatorParams& params, const Matrix& real_snapshot,
                            const Matrix& fake_snapshot, bool printed_sign,
                            DiscriminatorGrads& grads) {
    DiscriminatorCache real_cache;
    DiscriminatorCache fake_cache;
    const double d_real = discriminator_forward(real_snapshot, params, &real_cache);
    const double d_fake = discriminator_forward(fake_snapshot, params, &fake_cache);
    const double fake_sign = printed_sign ? -1.0 : 1.0;
    discriminator_backward(fake_sign, fake_cache, params, grads);
    discriminator_backward(-fake_sign, real_cache, params, grads);
    return fake_sign * (d_fake - d_real);
}

double generator_adv_loss(const DiscriminatorParams& params, const Matrix& fake_snapshot) {
    return -discriminator_forward(fake_snapshot, params);
}

double generator_adv_loss_and_grad(const GeneratorParams& gen_params,
                                   const DiscriminatorParams& disc_params, const Matrix& z,
                                   std::span<const Matrix> filters, GeneratorGrads& grads) {
    GeneratorCache gen_cache;
    Matrix fake = generator_forward_filtered(z, filters, gen_params, &gen_cache);
    DiscriminatorCache disc_cache;
    const double score = discriminator_forward(fake, disc_params, &disc_cache);
    DiscriminatorGrads disc_grads = make_discriminator_grads(disc_params);  // discarded
    Matrix d_fake = discriminator_backward(-1.0, disc_cache, disc_params, disc_grads);
    generator_backward(d_fake, gen_cache, gen_params, grads);
    return -score;
}

Matrix refine(const Matrix& a, double threshold) {
    if (a.rows() != a.cols()) {
        throw ShapeError("refine: matrix must be square, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    }
    const std::size_t n = a.rows();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double v = 0.5 * (a(i, j) + a(j, i));
            out(i, j) = v < threshold ? 0.0 : v;
        }
    }
    return out;
}

void TrainConfig::validate() const {
    if (window < 1) {
        throw ValidationError("config: window must be at least 1");
    }
    if (pretrain_lr <= 0.0 || d_lr <= 0.0 || g_lr <= 0.0) {
        throw ValidationError("config: learning rates must be positive");
    }
    if (pretrain_iters < 0 || train_iters < 0) {
        throw ValidationError("config: iteration counts must be non-negative");
    }
    if (clip <= 0.0) {
        throw ValidationError("config: clip bound must be positive");
    }
    if (l2 < 0.0) {
        throw ValidationError("config: l2 weight must be non-negative");
    }
    if (threshold < 0.0) {
        throw ValidationError("config: refinement threshold must be non-negative");
    }
    if (rmsprop.decay < 0.0 || rmsprop.decay >= 1.0 || rmsprop.epsilon <= 0.0) {
        throw ValidationError("config: invalid RMSProp settings");
    }
}

GanModel make_gan_model(Rng& rng, std::size_t n_nodes, std::size_t lstm_hidden,
                        std::size_t critic_hidden, const TrainConfig& config,
                        Activation candidate_act) {
    GanModel model;
    model.generator = make_generator(rng, n_nodes, lstm_hidden, candidate_act);
    model.discriminator = make_discriminator(rng, n_nodes, critic_hidden);
    auto gen_blocks = std::as_const(model.generator).blocks();
    auto disc_blocks = std::as_const(model.discriminator).blocks();
    model.generator_opt = make_rmsprop_state(gen_blocks, config.rmsprop);
    model.discriminator_opt = make_rmsprop_state(disc_blocks, config.rmsprop);
    return model;
}

TrainTrace train_for_slice(std::span<const Matrix> history, const Matrix& target,
                           const TrainConfig& config, GanModel& model, Rng& rng) {
    config.validate();
    if (history.size() != static_cast<std::size_t>(config.window) + 1) {
        throw ShapeError("train_for_slice: history must hold window+1 snapshots, got " +
                         std::to_string(history.size()));
    }
    const std::size_t n = model.generator.n_nodes();
    require_snapshot_shape(target, n, "train_for_slice target");

    const auto filters = window_filters(history);
    auto gen_blocks = model.generator.blocks();
    auto disc_blocks = model.discriminator.blocks();

    TrainTrace trace;
    trace.pretrain_loss.reserve(config.pretrain_iters);
    trace.critic_loss.reserve(config.train_iters);
    trace.generator_loss.reserve(config.train_iters);

    GeneratorGrads gen_grads = make_generator_grads(model.generator);
    DiscriminatorGrads disc_grads = make_discriminator_grads(model.discriminator);
    auto gen_grad_blocks = gen_grads.blocks();
    auto disc_grad_blocks = disc_grads.blocks();
    auto zero_all = [](std::vector<Matrix*>& blocks) {
        for (Matrix* block : blocks) {
            for (double& v : block->values()) {
                v = 0.0;
            }
        }
    };

    for (int iter = 0; iter < config.pretrain_iters; ++iter) {
        Matrix z = uniform_noise(rng, n, n);
        zero_all(gen_grad_blocks);
        const double loss = pretrain_loss_and_grad(model.generator, z, filters, target,
                                                   config.l2, gen_grads);
        rmsprop_update(gen_blocks, {gen_grad_blocks.data(), gen_grad_blocks.size()},
                       model.generator_opt, config.pretrain_lr);
        trace.pretrain_loss.push_back(loss);
    }

    for (int iter = 0; iter < config.train_iters; ++iter) {
        // Critic step on fresh noise, generator fixed.
        Matrix z = uniform_noise(rng, n, n);
        Matrix fake = generator_forward_filtered(z, filters, model.generator);
        zero_all(disc_grad_blocks);
        const double d_loss = critic_loss_and_grad(model.discriminator, target, fake,
                                                   config.printed_critic_sign, disc_grads);
        rmsprop_update(disc_blocks, {disc_grad_blocks.data(), disc_grad_blocks.size()},
                       model.discriminator_opt, config.d_lr);
        clip_params(disc_blocks, config.clip);
        trace.critic_loss.push_back(d_loss);

        // Generator step on fresh noise, critic fixed.
        z = uniform_noise(rng, n, n);
        zero_all(gen_grad_blocks);
        const double g_loss = generator_adv_loss_and_grad(model.generator, model.discriminator,
                                                          z, filters, gen_grads);
        rmsprop_update(gen_blocks, {gen_grad_blocks.data(), gen_grad_blocks.size()},
                       model.generator_opt, config.g_lr);
        trace.generator_loss.push_back(g_loss);
    }
    return trace;
}

Matrix predict(std::span<const Matrix> window, const GeneratorParams& params, Rng& rng,
               double max_weight, double threshold) {
    if (max_weight <= 0.0) {
        throw ValidationError("predict: max_weight must be positive");
    }
    Matrix z = uniform_noise(rng, params.n_nodes(), params.n_nodes());
    Matrix raw = generator_forward(z, window, params);
    // Threshold in the normalized domain, then recover the weight range.
    return scale(refine(raw, threshold), max_weight);
}

}  // namespace tlp
