// Batch CLI for the temporal link prediction library. Talks to the shared
// library strictly through the C API in tlp.h.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tlp.h"

namespace {

struct RunFlags {
    std::string model = "gcn-gan";
    tlp_experiment_config config{};
    std::string save_model;
    bool cold_start = false;
    bool refine_baseline = false;
    bool printed_critic_sign = false;
    bool candidate_tanh = false;
    bool dump_predictions = false;
};

void add_train_flags(CLI::App* cmd, RunFlags& flags) {
    tlp_experiment_config_defaults(&flags.config);
    cmd->add_option("--window,-l", flags.config.window, "History window l (l+1 snapshots)")
        ->capture_default_str();
    cmd->add_option("--pretrain-iters", flags.config.pretrain_iters,
                    "Reconstruction iterations per slice")
        ->capture_default_str();
    cmd->add_option("--train-iters", flags.config.train_iters,
                    "Adversarial iterations per slice")
        ->capture_default_str();
    cmd->add_option("--pretrain-lr", flags.config.pretrain_lr, "Pre-training learning rate")
        ->capture_default_str();
    cmd->add_option("--d-lr", flags.config.d_lr, "Critic learning rate")->capture_default_str();
    cmd->add_option("--g-lr", flags.config.g_lr, "Generator learning rate")
        ->capture_default_str();
    cmd->add_option("--clip", flags.config.clip, "Critic weight clipping bound")
        ->capture_default_str();
    cmd->add_option("--l2", flags.config.l2, "Pre-training L2 regularization weight")
        ->capture_default_str();
    cmd->add_option("--threshold", flags.config.threshold,
                    "Refinement threshold (normalized weights)")
        ->capture_default_str();
    cmd->add_option("--lstm-hidden", flags.config.lstm_hidden, "LSTM hidden units (0 = N)")
        ->capture_default_str();
    cmd->add_option("--critic-hidden", flags.config.critic_hidden,
                    "Critic hidden units (0 = min(8N,1024))")
        ->capture_default_str();
    cmd->add_option("--baseline-hidden", flags.config.baseline_hidden,
                    "Baseline hidden units (0 = min(4N,512))")
        ->capture_default_str();
    cmd->add_option("--seed", flags.config.seed, "Seed for all randomness")
        ->capture_default_str();
    cmd->add_flag("--cold-start", flags.cold_start, "Reinitialize parameters at every slice");
    cmd->add_flag("--refine-baseline", flags.refine_baseline,
                  "Apply refinement to baseline predictions");
    cmd->add_flag("--printed-critic-sign", flags.printed_critic_sign,
                  "Critic descends D(real)-D(fake) instead of the corrected sign");
    cmd->add_flag("--candidate-tanh", flags.candidate_tanh,
                  "Use tanh for the LSTM candidate activation");
    cmd->add_option("--save-model", flags.save_model, "Write a parameter checkpoint here");
}

void finalize_config(RunFlags& flags) {
    flags.config.model =
        flags.model == "lstm-baseline" ? TLP_MODEL_LSTM_BASELINE : TLP_MODEL_GCN_GAN;
    flags.config.cold_start = flags.cold_start ? 1 : 0;
    flags.config.refine_baseline = flags.refine_baseline ? 1 : 0;
    flags.config.printed_critic_sign = flags.printed_critic_sign ? 1 : 0;
    flags.config.candidate_tanh = flags.candidate_tanh ? 1 : 0;
    flags.config.keep_predictions = flags.dump_predictions ? 1 : 0;
    flags.config.save_model_path = flags.save_model.empty() ? nullptr : flags.save_model.c_str();
}

[[noreturn]] void die(tlp_status status) {
    std::fprintf(stderr, "error: %s: %s\n", tlp_status_name(status), tlp_last_error());
    std::exit(static_cast<int>(status));
}

void check(tlp_status status) {
    if (status != TLP_OK) {
        die(status);
    }
}

tlp_sequence* load_input(const std::string& path) {
    tlp_sequence* seq = nullptr;
    check(tlp_sequence_load(path.c_str(), &seq));
    return seq;
}

void print_summary(const char* label, tlp_result* result) {
    double mse = 0.0;
    double kl = 0.0;
    double mismatch = 0.0;
    check(tlp_result_averages(result, &mse, &kl, &mismatch));
    double pre = 0.0;
    double adv = 0.0;
    double pred = 0.0;
    check(tlp_result_timings(result, &pre, &adv, &pred));
    std::printf("%-14s slices=%d  mse=%.6g  kl=%.6g  mismatch=%.6g\n", label,
                tlp_result_scored_slices(result), mse, kl, mismatch);
    std::printf("%-14s time: pretrain %.2fs, adversarial %.2fs, predict %.2fs\n", "",
                pre, adv, pred);
}

int cmd_preprocess(const std::string& input, const std::string& output, double delta) {
    tlp_sequence* seq = nullptr;
    check(tlp_sequence_from_distances(input.c_str(), delta, &seq));
    check(tlp_sequence_save(seq, output.c_str()));
    std::printf("wrote %s: %d nodes, %d slices, max weight %g\n", output.c_str(),
                tlp_sequence_nodes(seq), tlp_sequence_slices(seq),
                tlp_sequence_max_weight(seq));
    tlp_sequence_free(seq);
    return 0;
}

int cmd_stats(const std::string& input, int bins) {
    tlp_sequence* seq = load_input(input);
    const double max_weight = tlp_sequence_max_weight(seq);
    std::printf("nodes:      %d\n", tlp_sequence_nodes(seq));
    std::printf("slices:     %d\n", tlp_sequence_slices(seq));
    std::printf("max weight: %g\n", max_weight);
    std::printf("sparsity:   %.4f\n", tlp_sequence_sparsity(seq));
    std::vector<unsigned long long> counts(static_cast<std::size_t>(bins));
    check(tlp_sequence_histogram(seq, bins, counts.data()));
    std::printf("weight histogram (%d bins over (0, %g]):\n", bins, max_weight);
    const double width = max_weight / bins;
    for (int k = 0; k < bins; ++k) {
        std::printf("  (%10.4g, %10.4g]: %llu\n", k * width, (k + 1) * width, counts[k]);
    }
    tlp_sequence_free(seq);
    return 0;
}

int cmd_synth(const tlp_synthetic_spec& spec, const std::string& output) {
    tlp_sequence* seq = nullptr;
    check(tlp_sequence_synthetic(&spec, &seq));
    check(tlp_sequence_save(seq, output.c_str()));
    std::printf("wrote %s: %d nodes, %d slices, sparsity %.4f\n", output.c_str(),
                tlp_sequence_nodes(seq), tlp_sequence_slices(seq),
                tlp_sequence_sparsity(seq));
    tlp_sequence_free(seq);
    return 0;
}

int cmd_run(const std::string& input, const std::string& outdir, RunFlags& flags) {
    finalize_config(flags);
    tlp_sequence* seq = load_input(input);
    tlp_result* result = nullptr;
    check(tlp_run_experiment(seq, &flags.config, &result));
    const std::string metrics_path = outdir + "/metrics.csv";
    const std::string losses_path = outdir + "/losses.csv";
    check(tlp_result_write_metrics_csv(result, metrics_path.c_str()));
    check(tlp_result_write_losses_csv(result, losses_path.c_str()));
    if (flags.dump_predictions) {
        check(tlp_result_write_predictions(result, outdir.c_str()));
    }
    print_summary(flags.model.c_str(), result);
    std::printf("metrics: %s\n", metrics_path.c_str());
    tlp_result_free(result);
    tlp_sequence_free(seq);
    return 0;
}

int cmd_compare(const std::string& input, const std::string& outdir, RunFlags& flags) {
    tlp_sequence* seq = load_input(input);
    std::printf("%-14s %12s %12s %12s\n", "model", "mse", "kl", "mismatch");
    for (const char* model : {"gcn-gan", "lstm-baseline"}) {
        flags.model = model;
        finalize_config(flags);
        tlp_result* result = nullptr;
        check(tlp_run_experiment(seq, &flags.config, &result));
        double mse = 0.0;
        double kl = 0.0;
        double mismatch = 0.0;
        check(tlp_result_averages(result, &mse, &kl, &mismatch));
        std::printf("%-14s %12.6g %12.6g %12.6g\n", model, mse, kl, mismatch);
        const std::string path = outdir + "/" + model + "_metrics.csv";
        check(tlp_result_write_metrics_csv(result, path.c_str()));
        tlp_result_free(result);
    }
    tlp_sequence_free(seq);
    return 0;
}

int cmd_export_case(const std::string& input, const std::string& outdir, int slice,
                    RunFlags& flags) {
    flags.dump_predictions = true;  // predictions must be retained
    tlp_sequence* seq = load_input(input);
    const int n = tlp_sequence_nodes(seq);
    std::vector<double> truth(static_cast<std::size_t>(n) * n);
    check(tlp_sequence_snapshot(seq, slice, truth.data()));
    check(tlp_heatmap_write_csv(truth.data(), n, (outdir + "/truth.csv").c_str()));

    const std::pair<const char*, const char*> models[] = {
        {"gcn-gan", "/gcn_gan.csv"}, {"lstm-baseline", "/lstm_baseline.csv"}};
    for (const auto& [model, file] : models) {
        flags.model = model;
        finalize_config(flags);
        tlp_result* result = nullptr;
        check(tlp_run_experiment(seq, &flags.config, &result));
        std::vector<double> pred(static_cast<std::size_t>(n) * n);
        check(tlp_result_prediction(result, slice, pred.data()));
        check(tlp_heatmap_write_csv(pred.data(), n, (outdir + file).c_str()));
        tlp_result_free(result);
    }
    std::printf("wrote heatmap CSVs for slice %d to %s\n", slice, outdir.c_str());
    tlp_sequence_free(seq);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal link prediction for weighted dynamic networks"};
    app.require_subcommand(1);

    // preprocess
    std::string pre_input;
    std::string pre_output;
    double delta = 0.0;
    unsigned long long unused_seed = 0;
    auto* preprocess = app.add_subcommand(
        "preprocess", "Convert a distance file into a weighted sequence file");
    preprocess->add_option("--input,-i", pre_input, "TLPDIST distance file")->required();
    preprocess->add_option("--output,-o", pre_output, "Sequence file to write")->required();
    preprocess->add_option("--delta", delta, "Distance cutoff; weight = delta - distance")
        ->required();
    preprocess->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

    // stats
    std::string stats_input;
    int bins = 20;
    auto* stats = app.add_subcommand("stats", "Print sparsity and weight histogram");
    stats->add_option("--input,-i", stats_input, "Sequence file")->required();
    stats->add_option("--bins", bins, "Histogram bin count")->capture_default_str();
    stats->add_option("--seed", unused_seed, "Accepted for uniformity; unused");

    // synth
    tlp_synthetic_spec spec{};
    tlp_synthetic_spec_defaults(&spec);
    std::string synth_output;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dynamic network");
    synth->add_option("--output,-o", synth_output, "Sequence file to write")->required();
    synth->add_option("--nodes", spec.n_nodes, "Node count")->capture_default_str();
    synth->add_option("--slices", spec.n_slices, "Time slice count")->capture_default_str();
    synth->add_option("--sparsity", spec.target_sparsity, "Target zero fraction")
        ->capture_default_str();
    synth->add_option("--max-weight", spec.max_weight, "Maximum edge weight")
        ->capture_default_str();
    synth->add_option("--drift", spec.drift_rate, "Per-slice weight drift bound")
        ->capture_default_str();
    synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();

    // run
    RunFlags run_flags;
    std::string run_input;
    std::string run_outdir = ".";
    auto* run = app.add_subcommand("run", "Train and evaluate one model over the sequence");
    run->add_option("--input,-i", run_input, "Sequence file")->required();
    run->add_option("--outdir,-o", run_outdir, "Output directory")->capture_default_str();
    run->add_option("--model", run_flags.model, "gcn-gan or lstm-baseline")
        ->check(CLI::IsMember({"gcn-gan", "lstm-baseline"}))
        ->capture_default_str();
    run->add_flag("--dump-predictions", run_flags.dump_predictions,
                  "Write every prediction to the output directory");
    add_train_flags(run, run_flags);

    // compare
    RunFlags cmp_flags;
    std::string cmp_input;
    std::string cmp_outdir = ".";
    auto* compare = app.add_subcommand("compare",
                                       "Run both models and print a side-by-side table");
    compare->add_option("--input,-i", cmp_input, "Sequence file")->required();
    compare->add_option("--outdir,-o", cmp_outdir, "Output directory")->capture_default_str();
    add_train_flags(compare, cmp_flags);

    // export-case
    RunFlags case_flags;
    std::string case_input;
    std::string case_outdir = ".";
    int case_slice = 0;
    auto* export_case = app.add_subcommand(
        "export-case", "Export truth and both predictions for one slice as heatmap CSVs");
    export_case->add_option("--input,-i", case_input, "Sequence file")->required();
    export_case->add_option("--outdir,-o", case_outdir, "Output directory")
        ->capture_default_str();
    export_case->add_option("--slice", case_slice, "Predicted slice to export (1-based)")
        ->required();
    add_train_flags(export_case, case_flags);

    CLI11_PARSE(app, argc, argv);

    if (preprocess->parsed()) {
        return cmd_preprocess(pre_input, pre_output, delta);
    }
    if (stats->parsed()) {
        return cmd_stats(stats_input, bins);
    }
    if (synth->parsed()) {
        return cmd_synth(spec, synth_output);
    }
    if (run->parsed()) {
        return cmd_run(run_input, run_outdir, run_flags);
    }
    if (compare->parsed()) {
        return cmd_compare(cmp_input, cmp_outdir, cmp_flags);
    }
    if (export_case->parsed()) {
        return cmd_export_case(case_input, case_outdir, case_slice, case_flags);
    }
    return 1;
}
