// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Heavy criteria run the full sliding-window protocol on seeded synthetic
// networks, so the binary is self-contained and deterministic.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tlp/checkpoint.hpp"
#include "tlp/data.hpp"
#include "tlp/errors.hpp"
#include "tlp/matrix.hpp"
#include "tlp/metrics.hpp"
#include "tlp/model.hpp"
#include "tlp/runner.hpp"

using tlp::Matrix;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int number, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %s (%s)\n", ok ? "PASS" : "FAIL", number, name, detail.c_str());
    if (!ok) {
        ++g_failures;
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

tlp::SnapshotSequence acceptance_synthetic(std::uint64_t seed) {
    tlp::SyntheticSpec spec;
    spec.n_nodes = 16;
    spec.n_slices = 40;
    spec.target_sparsity = 0.7;
    spec.max_weight = 10.0;
    spec.drift_rate = 0.1;
    spec.seed = seed;
    return generate_synthetic(spec);
}

// Shared experiment settings for the directional criteria; iteration counts
// chosen so the five-seed sweep stays well under the five-minute bound.
tlp::ExperimentConfig acceptance_config(std::uint64_t seed, tlp::ModelKind model) {
    tlp::ExperimentConfig config;
    config.model = model;
    config.train.window = 10;
    config.train.pretrain_iters = 100;
    config.train.train_iters = 60;
    config.train.pretrain_lr = 0.005;
    config.train.d_lr = 0.001;
    config.train.g_lr = 0.001;
    config.train.clip = 0.01;
    config.train.l2 = 0.0;
    config.train.threshold = 0.01;
    config.train.seed = seed;
    return config;
}

double median5(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[2];
}

// --------------------------------------------------------------------------
// 1. Gradient audit on the 6-node, 4-hidden-unit generator, 8-unit critic.
// --------------------------------------------------------------------------
void criterion_gradient_audit() {
    const auto start = Clock::now();
    tlp::Rng rng(1001);
    const std::size_t n = 6;
    tlp::GeneratorParams gen = make_generator(rng, n, 4);
    tlp::DiscriminatorParams disc = make_discriminator(rng, n, 8);

    std::vector<Matrix> window;
    for (int t = 0; t < 4; ++t) {
        window.push_back(oracles::random_snapshot(rng, n, 0.5, 1.0));
    }
    std::vector<Matrix> filters;
    for (const Matrix& snapshot : window) {
        filters.push_back(tlp::gcn_filter(snapshot));
    }
    Matrix z = uniform_noise(rng, n, n);
    Matrix target = oracles::random_snapshot(rng, n, 0.5, 1.0);
    Matrix fake = generator_forward_filtered(z, filters, gen);
    const double l2 = 1e-3;

    bool ok = true;
    double worst = 0.0;
    std::size_t checked = 0;

    auto audit = [&](std::vector<const Matrix*> analytic, std::vector<Matrix*> params,
                     const std::function<double()>& loss) {
        for (std::size_t b = 0; b < params.size(); ++b) {
            Matrix numeric = oracles::numeric_gradient(*params[b], loss, 1e-5);
            ok = oracles::gradients_agree(*analytic[b], numeric, 1e-4, 1e-7, &worst) && ok;
            checked += numeric.size();
        }
    };

    // reconstruction loss over theta_G
    tlp::GeneratorGrads gen_grads = make_generator_grads(gen);
    pretrain_loss_and_grad(gen, z, filters, target, l2, gen_grads);
    audit(std::as_const(gen_grads).blocks(), gen.blocks(),
          [&] { return pretrain_loss(gen, z, window, target, l2); });

    // critic loss (corrected sign) over theta_D
    tlp::DiscriminatorGrads disc_grads = make_discriminator_grads(disc);
    critic_loss_and_grad(disc, target, fake, false, disc_grads);
    audit(std::as_const(disc_grads).blocks(), disc.blocks(),
          [&] { return critic_loss(disc, target, fake, false); });

    // adversarial generator loss over theta_G, through the critic
    tlp::GeneratorGrads adv_grads = make_generator_grads(gen);
    generator_adv_loss_and_grad(gen, disc, z, filters, adv_grads);
    audit(std::as_const(adv_grads).blocks(), gen.blocks(),
          [&] { return generator_adv_loss(disc, generator_forward(z, window, gen)); });

    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 10.0;
    report(1, "gradient audit: reconstruction, critic and adversarial losses", ok,
           format("%zu entries, worst rel err %.2e, %.2fs < 10s", checked, worst, elapsed));
}

// --------------------------------------------------------------------------
// 2. Metric oracle equivalence on 100 random 10x10 pairs.
// --------------------------------------------------------------------------
void criterion_metric_oracles() {
    tlp::Rng rng(1002);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Matrix truth = oracles::random_snapshot(rng, 10, 0.4, 5.0);
        Matrix pred = oracles::random_snapshot(rng, 10, 0.4, 5.0);

        const double mse_diff = std::abs(tlp::mse(truth, pred) - oracles::mse_loop(truth, pred));
        const double kl_diff =
            std::abs(tlp::edgewise_kl(truth, pred) - oracles::kl_loop(truth, pred));
        const double mm_diff =
            std::abs(tlp::mismatch_rate(truth, pred) - oracles::mismatch_loop(truth, pred));
        worst = std::max({worst, mse_diff, kl_diff, mm_diff});
        ok = ok && mse_diff <= 1e-12 && kl_diff <= 1e-12 && mm_diff == 0.0;
    }

    Matrix x = oracles::random_snapshot(rng, 10, 0.4, 5.0);
    for (double k : {0.5, 2.0, 10.0}) {
        ok = ok && std::abs(tlp::edgewise_kl(x, scale(x, k))) <= 1e-12;
    }
    report(2, "metric oracle equivalence and KL scale invariance", ok,
           format("100 pairs, worst abs diff %.2e <= 1e-12", worst));
}

// --------------------------------------------------------------------------
// 3. Refinement invariants on 1000 random matrices.
// --------------------------------------------------------------------------
void criterion_refinement() {
    tlp::Rng rng(1003);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + trial % 9;
        Matrix a = oracles::random_matrix(rng, n, n, -0.3, 1.3);
        const double eps = rng.next_uniform(0.0, 0.4);
        Matrix refined = refine(a, eps);
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (refined(i, i) != 0.0) {
                ok = false;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (refined(i, j) != refined(j, i)) {
                    ok = false;
                }
                if (refined(i, j) != 0.0 && refined(i, j) < eps) {
                    ok = false;
                }
            }
        }
        if (!(refine(refined, eps) == refined)) {
            ok = false;
        }
    }
    report(3, "refinement: symmetric, zero-diagonal, thresholded, idempotent", ok,
           "1000 random matrices, exact checks");
}

// --------------------------------------------------------------------------
// 4. Critic clipping bound after every update in a 500-iteration run.
// --------------------------------------------------------------------------
void criterion_clipping() {
    tlp::TrainConfig config;
    config.window = 3;
    config.pretrain_iters = 0;
    config.train_iters = 1;  // one critic update per call, checked after each
    config.clip = 0.01;

    tlp::Rng init(1004);
    tlp::GanModel model = make_gan_model(init, 8, 6, 16, config);
    tlp::Rng data_rng(1005);
    std::vector<Matrix> history;
    for (int t = 0; t < 4; ++t) {
        history.push_back(oracles::random_snapshot(data_rng, 8, 0.5, 1.0));
    }
    Matrix target = oracles::random_snapshot(data_rng, 8, 0.5, 1.0);
    tlp::Rng noise(1006);

    bool ok = true;
    double max_entry = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        train_for_slice(history, target, config, model, noise);
        for (const Matrix* block : std::as_const(model.discriminator).blocks()) {
            for (double v : block->values()) {
                max_entry = std::max(max_entry, std::abs(v));
            }
        }
        ok = ok && max_entry <= config.clip;
    }
    report(4, "critic entries stay inside [-c, c] after all 500 updates", ok,
           format("c = 0.01, max |entry| = %.6f", max_entry));
}

// --------------------------------------------------------------------------
// 5. Pre-training descent over 200 iterations, 5 of 5 seeds.
// --------------------------------------------------------------------------
void criterion_descent() {
    const auto start = Clock::now();
    bool ok = true;
    std::string ratios;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        tlp::SnapshotSequence seq = acceptance_synthetic(seed);
        auto normalized = normalize(seq);

        tlp::TrainConfig config;
        config.window = 10;
        config.pretrain_iters = 200;
        config.train_iters = 0;
        config.pretrain_lr = 0.005;
        config.seed = seed;

        tlp::Rng init(seed);
        tlp::GanModel model = make_gan_model(init, 16, 16, 128, config);
        std::vector<Matrix> history(normalized.begin(), normalized.begin() + 11);
        tlp::Rng noise(seed + 100);
        tlp::TrainTrace trace =
            train_for_slice(history, normalized[11], config, model, noise);
        const bool descended = trace.pretrain_loss.back() < trace.pretrain_loss.front();
        ok = ok && descended;
        ratios += format("%.1e ", trace.pretrain_loss.back() / trace.pretrain_loss.front());
    }
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 60.0;
    report(5, "pre-training loss descends over 200 iterations for 5/5 seeds", ok,
           format("final/initial: %s- %.1fs < 60s", ratios.c_str(), elapsed));
}

// --------------------------------------------------------------------------
// 6 + 7. Directional reproduction: mismatch separation and MSE parity over
// five seeds of the sparse synthetic benchmark.
// --------------------------------------------------------------------------
void criteria_directional() {
    const auto start = Clock::now();
    std::vector<double> gan_mismatch;
    std::vector<double> gan_mse;
    std::vector<double> baseline_mismatch;
    std::vector<double> baseline_mse;

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        tlp::SnapshotSequence seq = acceptance_synthetic(seed);

        tlp::ExperimentResult gan =
            run_experiment(seq, acceptance_config(seed, tlp::ModelKind::GcnGan));
        gan_mismatch.push_back(gan.report.avg_mismatch);
        gan_mse.push_back(gan.report.avg_mse);

        tlp::ExperimentResult baseline =
            run_experiment(seq, acceptance_config(seed, tlp::ModelKind::LstmBaseline));
        baseline_mismatch.push_back(baseline.report.avg_mismatch);
        baseline_mse.push_back(baseline.report.avg_mse);
    }
    const double elapsed = seconds_since(start);

    const double gan_mm = median5(gan_mismatch);
    const double base_mm = median5(baseline_mismatch);
    const bool mismatch_ok =
        gan_mm < base_mm && base_mm > 0.5 && gan_mm < 0.2 && elapsed < 300.0;
    report(6, "refined model beats the raw LSTM baseline on mismatch rate", mismatch_ok,
           format("median mismatch %.4f vs %.4f, %.0fs < 300s", gan_mm, base_mm, elapsed));

    const double gan_err = median5(gan_mse);
    const double base_err = median5(baseline_mse);
    report(7, "MSE stays within 1.5x of the baseline", gan_err <= 1.5 * base_err,
           format("median mse %.4f vs %.4f", gan_err, base_err));
}

// --------------------------------------------------------------------------
// 8. Protocol arithmetic and causality on T=40, l=10.
// --------------------------------------------------------------------------
class CausalityLog : public tlp::ExperimentObserver {
public:
    void on_snapshot_access(std::size_t slice) override {
        if (first_read.count(slice) == 0) {
            first_read[slice] = ++tick;
        }
    }
    void on_prediction(std::size_t slice) override { predicted[slice] = ++tick; }

    std::size_t tick = 0;
    std::map<std::size_t, std::size_t> first_read;
    std::map<std::size_t, std::size_t> predicted;
};

void criterion_protocol() {
    tlp::SnapshotSequence seq = acceptance_synthetic(42);
    tlp::ExperimentConfig config = acceptance_config(42, tlp::ModelKind::GcnGan);
    config.train.pretrain_iters = 2;
    config.train.train_iters = 1;
    config.lstm_hidden = 4;
    config.critic_hidden = 8;

    CausalityLog log;
    tlp::ExperimentResult result = run_experiment(seq, config, &log);

    bool ok = result.report.per_slice.size() == 28;
    for (std::size_t slice = 13; slice <= 40; ++slice) {
        const bool causal = log.predicted.count(slice) == 1 &&
                            log.first_read.count(slice) == 1 &&
                            log.predicted[slice] < log.first_read[slice];
        ok = ok && causal;
    }
    report(8, "T=40, l=10 scores exactly 28 predictions, all causally valid", ok,
           format("%zu predictions scored", result.report.per_slice.size()));
}

// --------------------------------------------------------------------------
// 9. Seeded determinism: byte-identical metric CSVs.
// --------------------------------------------------------------------------
void criterion_determinism() {
    tlp::SnapshotSequence seq = acceptance_synthetic(7);
    tlp::ExperimentConfig config = acceptance_config(7, tlp::ModelKind::GcnGan);
    config.train.pretrain_iters = 10;
    config.train.train_iters = 8;
    config.lstm_hidden = 6;
    config.critic_hidden = 12;

    auto run_to_csv = [&] {
        tlp::ExperimentResult result = run_experiment(seq, config);
        std::ostringstream out;
        tlp::write_metrics_csv(result.report, out);
        return out.str();
    };
    const std::string first = run_to_csv();
    const std::string second = run_to_csv();
    report(9, "two identical seeded runs produce byte-identical metric CSVs",
           first == second && !first.empty(), format("%zu bytes compared", first.size()));
}

// --------------------------------------------------------------------------
// 10. Distance preprocessing fixture with boundary cases, delta = 250.
// --------------------------------------------------------------------------
void criterion_preprocess_fixture() {
    const auto path = std::filesystem::temp_directory_path() / "tlp_acceptance_dist.txt";
    {
        std::ofstream out(path);
        out << "TLPDIST 1 4 1\n"
            << "SNAPSHOT 1\n"
            << "0 100 250 300\n"
            << "100 0 0 249.5\n"
            << "250 0 0 50\n"
            << "300 249.5 50 0\n";
    }
    bool ok = false;
    std::string detail = "load failed";
    try {
        const auto distances = tlp::load_distances(path.string());
        tlp::SnapshotSequence seq = sequence_from_distances(distances, 250.0);
        const Matrix expected = Matrix::from_rows(
            4, 4,
            {0.0, 150.0, 0.0, 0.0,
             150.0, 0.0, 250.0, 0.5,
             0.0, 250.0, 0.0, 200.0,
             0.0, 0.5, 200.0, 0.0});
        ok = seq.snapshot(0) == expected && seq.max_weight() == 250.0;
        detail = ok ? "weights 150 / 250 / 0.5 / 200 and cutoffs exact"
                    : "weights differ from the hand computation";
    } catch (const std::exception& e) {
        detail = e.what();
    }
    std::filesystem::remove(path);
    report(10, "distance preprocessing reproduces the hand-computed fixture", ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite: temporal link prediction pipeline\n");
    const auto start = Clock::now();
    criterion_gradient_audit();
    criterion_metric_oracles();
    criterion_refinement();
    criterion_clipping();
    criterion_descent();
    criteria_directional();
    criterion_protocol();
    criterion_determinism();
    criterion_preprocess_fixture();
    std::printf("%d criterion(s) failed, total %.1fs\n", g_failures,
                seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
