// Finite-difference audit of every hand-derived backward pass.
#include <functional>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tlp/errors.hpp"
#include "tlp/matrix.hpp"
#include "tlp/model.hpp"
#include "tlp/nn.hpp"

using tlp::Matrix;

namespace {

// Scalar probe loss: sum of the output weighted by fixed coefficients, whose
// gradient with respect to the output is exactly the coefficient matrix.
double weighted_sum(const Matrix& out, const Matrix& coeffs) {
    return tlp::sum(hadamard(out, coeffs));
}

void check_block(const Matrix& analytic, Matrix& param, const std::function<double()>& loss,
                 const char* label) {
    Matrix numeric = oracles::numeric_gradient(param, loss);
    double worst = 0.0;
    const bool ok = oracles::gradients_agree(analytic, numeric, 1e-4, 1e-7, &worst);
    INFO(label << ": worst relative error " << worst);
    CHECK(ok);
}

}  // namespace

TEST_CASE("dense gradients match finite differences") {
    tlp::Rng rng(101);
    tlp::DenseParams params = make_dense(rng, 5, 3);
    Matrix x = oracles::random_matrix(rng, 1, 5, -1.0, 1.0);
    Matrix coeffs = oracles::random_matrix(rng, 1, 3, -1.0, 1.0);

    for (tlp::Activation act : {tlp::Activation::Sigmoid, tlp::Activation::Linear}) {
        tlp::DenseCache cache;
        dense_forward(x, params, act, &cache);
        tlp::DenseGrads grads{Matrix(5, 3), Matrix(1, 3)};
        Matrix d_input = dense_backward(coeffs, cache, params, act, grads);

        auto loss = [&] { return weighted_sum(dense_forward(x, params, act), coeffs); };
        check_block(grads.weight, params.weight, loss, "dense weight");
        check_block(grads.bias, params.bias, loss, "dense bias");
        check_block(d_input, x, loss, "dense input");
    }
}

TEST_CASE("gcn gradients match finite differences") {
    tlp::Rng rng(103);
    tlp::GcnLayerParams params{xavier_init(rng, 4, 4)};
    Matrix a_norm = oracles::random_snapshot(rng, 4, 0.4, 1.0);
    Matrix z = uniform_noise(rng, 4, 4);
    Matrix coeffs = oracles::random_matrix(rng, 4, 4, -1.0, 1.0);

    tlp::GcnCache cache;
    gcn_forward(z, a_norm, params, tlp::Activation::Sigmoid, &cache);
    tlp::GcnGrads grads{Matrix(4, 4)};
    Matrix d_z = gcn_backward(coeffs, cache, params, tlp::Activation::Sigmoid, grads);

    auto loss = [&] { return weighted_sum(gcn_forward(z, a_norm, params), coeffs); };
    check_block(grads.weight, params.weight, loss, "gcn weight");
    check_block(d_z, z, loss, "gcn noise input");
}

TEST_CASE("lstm BPTT gradients match finite differences on all 12 blocks") {
    tlp::Rng rng(107);
    const std::size_t m_i = 4;
    const std::size_t m_h = 3;
    for (tlp::Activation cand : {tlp::Activation::Sigmoid, tlp::Activation::Tanh}) {
        tlp::LstmParams params = make_lstm(rng, m_i, m_h, cand);
        std::vector<Matrix> inputs;
        for (int t = 0; t < 5; ++t) {
            inputs.push_back(oracles::random_matrix(rng, 1, m_i, -1.0, 1.0));
        }
        Matrix coeffs = oracles::random_matrix(rng, 1, m_h, -1.0, 1.0);

        tlp::LstmSequenceCache cache;
        lstm_forward(inputs, params, &cache);
        tlp::LstmGrads grads = make_lstm_grads(params);
        std::vector<Matrix> d_inputs =
            lstm_backward_through_time(coeffs, cache, params, grads);

        auto loss = [&] {
            return weighted_sum(lstm_forward(inputs, params).hidden, coeffs);
        };
        const std::pair<const Matrix*, Matrix*> blocks[] = {
            {&grads.input.input_weight, &params.input.input_weight},
            {&grads.input.recurrent_weight, &params.input.recurrent_weight},
            {&grads.input.bias, &params.input.bias},
            {&grads.forget.input_weight, &params.forget.input_weight},
            {&grads.forget.recurrent_weight, &params.forget.recurrent_weight},
            {&grads.forget.bias, &params.forget.bias},
            {&grads.output.input_weight, &params.output.input_weight},
            {&grads.output.recurrent_weight, &params.output.recurrent_weight},
            {&grads.output.bias, &params.output.bias},
            {&grads.candidate.input_weight, &params.candidate.input_weight},
            {&grads.candidate.recurrent_weight, &params.candidate.recurrent_weight},
            {&grads.candidate.bias, &params.candidate.bias},
        };
        for (const auto& [analytic, param] : blocks) {
            check_block(*analytic, *param, loss, "lstm block");
        }
        for (std::size_t t = 0; t < inputs.size(); ++t) {
            check_block(d_inputs[t], inputs[t], loss, "lstm input");
        }
    }
}

TEST_CASE("pretrain loss gradients match finite differences through the composed generator") {
    tlp::Rng rng(109);
    const std::size_t n = 4;
    tlp::GeneratorParams params = make_generator(rng, n, 3);
    std::vector<Matrix> window;
    for (int t = 0; t < 3; ++t) {
        window.push_back(oracles::random_snapshot(rng, n, 0.4, 1.0));
    }
    std::vector<Matrix> filters;
    for (const Matrix& snapshot : window) {
        filters.push_back(tlp::gcn_filter(snapshot));
    }
    Matrix z = uniform_noise(rng, n, n);
    Matrix target = oracles::random_snapshot(rng, n, 0.4, 1.0);
    const double l2 = 0.01;

    tlp::GeneratorGrads grads = make_generator_grads(params);
    pretrain_loss_and_grad(params, z, filters, target, l2, grads);

    auto loss = [&] { return pretrain_loss(params, z, window, target, l2); };
    auto grad_blocks = grads.blocks();
    auto param_blocks = params.blocks();
    for (std::size_t b = 0; b < param_blocks.size(); ++b) {
        check_block(*grad_blocks[b], *param_blocks[b], loss, "generator block");
    }
}

TEST_CASE("critic loss gradients match finite differences") {
    tlp::Rng rng(113);
    const std::size_t n = 4;
    tlp::DiscriminatorParams params = make_discriminator(rng, n, 5);
    Matrix real = oracles::random_snapshot(rng, n, 0.4, 1.0);
    Matrix fake = oracles::random_snapshot(rng, n, 0.4, 1.0);

    for (bool printed_sign : {false, true}) {
        tlp::DiscriminatorGrads grads = make_discriminator_grads(params);
        critic_loss_and_grad(params, real, fake, printed_sign, grads);
        auto loss = [&] { return critic_loss(params, real, fake, printed_sign); };
        auto grad_blocks = grads.blocks();
        auto param_blocks = params.blocks();
        for (std::size_t b = 0; b < param_blocks.size(); ++b) {
            check_block(*grad_blocks[b], *param_blocks[b], loss, "critic block");
        }
    }
}

TEST_CASE("generator adversarial gradients match finite differences through G and D") {
    tlp::Rng rng(127);
    const std::size_t n = 4;
    tlp::GeneratorParams gen = make_generator(rng, n, 3);
    tlp::DiscriminatorParams disc = make_discriminator(rng, n, 5);
    std::vector<Matrix> window;
    for (int t = 0; t < 3; ++t) {
        window.push_back(oracles::random_snapshot(rng, n, 0.4, 1.0));
    }
    std::vector<Matrix> filters;
    for (const Matrix& snapshot : window) {
        filters.push_back(tlp::gcn_filter(snapshot));
    }
    Matrix z = uniform_noise(rng, n, n);

    tlp::GeneratorGrads grads = make_generator_grads(gen);
    generator_adv_loss_and_grad(gen, disc, z, filters, grads);

    auto loss = [&] {
        return generator_adv_loss(disc, generator_forward(z, window, gen));
    };
    auto grad_blocks = grads.blocks();
    auto param_blocks = gen.blocks();
    for (std::size_t b = 0; b < param_blocks.size(); ++b) {
        check_block(*grad_blocks[b], *param_blocks[b], loss, "adversarial generator block");
    }
}

TEST_CASE("discriminator input gradient matches finite differences") {
    tlp::Rng rng(131);
    const std::size_t n = 4;
    tlp::DiscriminatorParams params = make_discriminator(rng, n, 5);
    Matrix a = oracles::random_snapshot(rng, n, 0.4, 1.0);

    tlp::DiscriminatorCache cache;
    discriminator_forward(a, params, &cache);
    tlp::DiscriminatorGrads grads = make_discriminator_grads(params);
    Matrix d_a = discriminator_backward(1.0, cache, params, grads);

    auto loss = [&] { return discriminator_forward(a, params); };
    check_block(d_a, a, loss, "critic input");
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
    tlp::Rng rng(137);
    tlp::GeneratorParams params = make_generator(rng, 3, 2);
    std::vector<Matrix> window{oracles::random_snapshot(rng, 3, 0.3, 1.0)};
    Matrix z = uniform_noise(rng, 3, 3);

    tlp::GeneratorCache cache;
    generator_forward(z, window, params, &cache);
    tlp::GeneratorGrads grads = make_generator_grads(params);
    generator_backward(Matrix(3, 3), cache, params, grads);
    for (const Matrix* block : std::as_const(grads).blocks()) {
        for (double v : block->values()) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("doubling the upstream gradient doubles every parameter gradient") {
    tlp::Rng rng(139);
    tlp::GeneratorParams params = make_generator(rng, 3, 2);
    std::vector<Matrix> window{oracles::random_snapshot(rng, 3, 0.3, 1.0),
                               oracles::random_snapshot(rng, 3, 0.3, 1.0)};
    Matrix z = uniform_noise(rng, 3, 3);
    Matrix d_out = oracles::random_matrix(rng, 3, 3, -1.0, 1.0);

    tlp::GeneratorCache cache;
    generator_forward(z, window, params, &cache);
    tlp::GeneratorGrads once = make_generator_grads(params);
    tlp::GeneratorGrads twice = make_generator_grads(params);
    generator_backward(d_out, cache, params, once);
    generator_backward(scale(d_out, 2.0), cache, params, twice);

    auto once_blocks = once.blocks();
    auto twice_blocks = twice.blocks();
    for (std::size_t b = 0; b < once_blocks.size(); ++b) {
        for (std::size_t k = 0; k < once_blocks[b]->size(); ++k) {
            CHECK(twice_blocks[b]->data()[k] ==
                  doctest::Approx(2.0 * once_blocks[b]->data()[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("backward without a cached forward pass is a usage error") {
    tlp::Rng rng(149);
    tlp::LstmParams lstm = make_lstm(rng, 2, 2);
    tlp::LstmGrads lstm_grads = make_lstm_grads(lstm);
    tlp::LstmSequenceCache empty;
    CHECK_THROWS_AS(lstm_backward_through_time(Matrix(1, 2), empty, lstm, lstm_grads),
                    tlp::UsageError);

    tlp::DenseParams dense = make_dense(rng, 2, 2);
    tlp::DenseGrads dense_grads{Matrix(2, 2), Matrix(1, 2)};
    tlp::DenseCache no_forward;
    CHECK_THROWS_AS(dense_backward(Matrix(1, 2), no_forward, dense, tlp::Activation::Linear,
                                   dense_grads),
                    tlp::UsageError);
}
