/* C API for the temporal link prediction library.
 *
 * All functions return TLP_OK (0) on success or a nonzero status code;
 * tlp_last_error() returns a thread-local detail message for the most recent
 * failure on the calling thread. Objects created by the library are released
 * with the matching *_free function. Time slices are 1-based, matching the
 * sequence file format.
 */
#ifndef TLP_H_
#define TLP_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tlp_status {
    TLP_OK = 0,
    TLP_ERR_INVALID_ARGUMENT = 1, /* null pointers, bad values, config violations */
    TLP_ERR_SHAPE = 2,            /* dimension mismatch */
    TLP_ERR_PARSE = 3,            /* malformed input file */
    TLP_ERR_IO = 4,               /* file system failure */
    TLP_ERR_INTERNAL = 5
} tlp_status;

const char* tlp_status_name(tlp_status status);
const char* tlp_last_error(void);

/* ------------------------------------------------------------------ */
/* Snapshot sequences                                                  */
/* ------------------------------------------------------------------ */

typedef struct tlp_sequence tlp_sequence;

tlp_status tlp_sequence_load(const char* path, tlp_sequence** out);
tlp_status tlp_sequence_save(const tlp_sequence* seq, const char* path);

/* Reads a TLPDIST file and converts distances to weights: entries closer
 * than delta get weight delta - distance, everything else 0. */
tlp_status tlp_sequence_from_distances(const char* path, double delta, tlp_sequence** out);

typedef struct tlp_synthetic_spec {
    int n_nodes;
    int n_slices;
    double target_sparsity; /* zero fraction per snapshot, in [0,1] */
    double max_weight;
    double drift_rate; /* per-slice weight drift bound, in [0,1] */
    unsigned long long seed;
} tlp_synthetic_spec;

void tlp_synthetic_spec_defaults(tlp_synthetic_spec* spec);
tlp_status tlp_sequence_synthetic(const tlp_synthetic_spec* spec, tlp_sequence** out);

void tlp_sequence_free(tlp_sequence* seq);

int tlp_sequence_nodes(const tlp_sequence* seq);
int tlp_sequence_slices(const tlp_sequence* seq);
double tlp_sequence_max_weight(const tlp_sequence* seq);
double tlp_sequence_sparsity(const tlp_sequence* seq);

/* counts must hold n_bins entries; bin k covers weights in
 * (k*max_weight/n_bins, (k+1)*max_weight/n_bins], zeros are not counted. */
tlp_status tlp_sequence_histogram(const tlp_sequence* seq, int n_bins,
                                  unsigned long long* counts);

/* Copies snapshot `slice` (1-based) into out, row-major, N*N doubles. */
tlp_status tlp_sequence_snapshot(const tlp_sequence* seq, int slice, double* out);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */
/* ------------------------------------------------------------------ */

typedef enum tlp_model_kind {
    TLP_MODEL_GCN_GAN = 0,
    TLP_MODEL_LSTM_BASELINE = 1
} tlp_model_kind;

typedef struct tlp_experiment_config {
    tlp_model_kind model;
    int window;         /* l: training windows hold l+1 snapshots */
    int pretrain_iters; /* reconstruction steps per slice */
    int train_iters;    /* adversarial steps per slice */
    double pretrain_lr;
    double d_lr;
    double g_lr;
    double clip;      /* critic weight bound */
    double l2;        /* pre-training regularization weight */
    double threshold; /* refinement threshold, normalized domain */
    int lstm_hidden;     /* 0 = N */
    int critic_hidden;   /* 0 = min(8N, 1024) */
    int baseline_hidden; /* 0 = min(4N, 512) */
    unsigned long long seed;
    int cold_start;          /* retrain from scratch at every slice */
    int refine_baseline;     /* apply refinement to baseline output */
    int printed_critic_sign; /* critic descends D(real)-D(fake) instead */
    int candidate_tanh;      /* conventional LSTM candidate activation */
    int keep_predictions;    /* retain per-slice predictions in the result */
    const char* save_model_path; /* optional checkpoint path, may be NULL */
} tlp_experiment_config;

void tlp_experiment_config_defaults(tlp_experiment_config* config);

typedef struct tlp_result tlp_result;

tlp_status tlp_run_experiment(const tlp_sequence* seq, const tlp_experiment_config* config,
                              tlp_result** out);
void tlp_result_free(tlp_result* result);

int tlp_result_scored_slices(const tlp_result* result);

/* Per-slice row `index` in [0, scored_slices). kl_valid is 0 when the KL was
 * undefined for that slice (all-zero matrix) and excluded from the average. */
tlp_status tlp_result_slice_metrics(const tlp_result* result, int index, int* slice,
                                    double* mse, double* kl, int* kl_valid, double* mismatch);
tlp_status tlp_result_averages(const tlp_result* result, double* mse, double* kl,
                               double* mismatch);
tlp_status tlp_result_timings(const tlp_result* result, double* pretrain_seconds,
                              double* adversarial_seconds, double* predict_seconds);

/* Copies the kept prediction for 1-based slice into out (N*N doubles);
 * requires keep_predictions. */
tlp_status tlp_result_prediction(const tlp_result* result, int slice, double* out);

tlp_status tlp_result_write_metrics_csv(const tlp_result* result, const char* path);
tlp_status tlp_result_write_losses_csv(const tlp_result* result, const char* path);
tlp_status tlp_result_write_predictions(const tlp_result* result, const char* dir);

/* Writes an N x N matrix as CSV with zero entries replaced by -200. */
tlp_status tlp_heatmap_write_csv(const double* values, int n, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TLP_H_ */
