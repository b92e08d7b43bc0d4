/* ppmf: patient similarity classification over 2-hour framed ICU time series.
 *
 * Plain C interface. Every fallible call returns a ppmf_status; on failure the
 * message is available from ppmf_last_error() on the same thread until the
 * next failing call. Handles are opaque and must be released with their
 * matching _free function (which accepts NULL).
 */
#ifndef PPMF_PPMF_H
#define PPMF_PPMF_H

#include <stddef.h>

#if defined(PPMF_BUILDING_LIBRARY)
#define PPMF_API __attribute__((visibility("default")))
#else
#define PPMF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppmf_status {
    PPMF_OK = 0,
    PPMF_MALFORMED_ROW = 1,
    PPMF_UNKNOWN_VARIABLE = 2,
    PPMF_OUT_OF_WINDOW = 3,
    PPMF_DUPLICATE_PATIENT = 4,
    PPMF_INVALID_LABEL = 5,
    PPMF_MISSING_OUTCOME = 6,
    PPMF_MISSING_EVENTS = 7,
    PPMF_BAD_CONFIG = 8,
    PPMF_EMPTY_COHORT = 9,
    PPMF_DIMENSION_MISMATCH = 10,
    PPMF_K_TOO_LARGE = 11,
    PPMF_SINGLE_CLASS_COHORT = 12,
    PPMF_NEGATIVE_WEIGHT = 13,
    PPMF_TOO_FEW_PER_CLASS = 14,
    PPMF_TOO_FEW_PAIRS = 15,
    PPMF_DEGENERATE_MATRIX = 16,
    PPMF_BAD_SPEC = 17,
    PPMF_INVALID_ARGUMENT = 18,
    PPMF_IO_ERROR = 100,
    PPMF_INTERNAL_ERROR = 101
} ppmf_status;

PPMF_API const char* ppmf_version(void);
PPMF_API const char* ppmf_status_name(ppmf_status status);
/* Message of the last failure on this thread; "" if none. */
PPMF_API const char* ppmf_last_error(void);

/* Canonical variable roster: 36 dynamic variables, then Age, Gender, Height,
 * Weight. */
PPMF_API size_t ppmf_variable_count(void);
PPMF_API const char* ppmf_variable_name(size_t index);

/* ---- configuration (key=value, see README for keys) ---- */

typedef struct ppmf_config ppmf_config;

PPMF_API ppmf_status ppmf_config_new(ppmf_config** out);
PPMF_API void ppmf_config_free(ppmf_config* config);
PPMF_API ppmf_status ppmf_config_set(ppmf_config* config, const char* key, const char* value);
PPMF_API ppmf_status ppmf_config_load(ppmf_config* config, const char* path);
PPMF_API ppmf_status ppmf_config_save(const ppmf_config* config, const char* path);
/* Runtime parallelism cap; 0 selects the number of available cores. */
PPMF_API ppmf_status ppmf_config_set_workers(ppmf_config* config, size_t workers);

/* ---- cohorts ---- */

typedef struct ppmf_cohort ppmf_cohort;

PPMF_API ppmf_status ppmf_cohort_load(const char* events_path, const char* outcomes_path, ppmf_cohort** out);
/* The files named by the config's events/outcomes keys, or the synthetic
 * cohort its synth.* keys and seed describe when those are empty. */
PPMF_API ppmf_status ppmf_cohort_from_config(const ppmf_config* config, ppmf_cohort** out);
PPMF_API void ppmf_cohort_free(ppmf_cohort* cohort);
PPMF_API size_t ppmf_cohort_size(const ppmf_cohort* cohort);
PPMF_API size_t ppmf_cohort_positives(const ppmf_cohort* cohort);
/* Rows dropped on load because they carried the -1 placeholder. */
PPMF_API size_t ppmf_cohort_dropped_rows(const ppmf_cohort* cohort);
/* Fraction of (patient, dynamic variable, bucket) cells without data under
 * the config's window/horizon. */
PPMF_API ppmf_status ppmf_cohort_sparsity(const ppmf_cohort* cohort, const ppmf_config* config, double* out);
PPMF_API ppmf_status ppmf_cohort_save(const ppmf_cohort* cohort, const char* events_path, const char* outcomes_path);

/* ---- weights ---- */

typedef struct ppmf_weights ppmf_weights;

PPMF_API ppmf_status ppmf_weights_uniform(double value, ppmf_weights** out);
PPMF_API ppmf_status ppmf_weights_load(const char* path, ppmf_weights** out);
PPMF_API void ppmf_weights_free(ppmf_weights* weights);
PPMF_API ppmf_status ppmf_weights_save(const ppmf_weights* weights, const char* path);
PPMF_API ppmf_status ppmf_weights_get(const ppmf_weights* weights, size_t index, double* out);
PPMF_API ppmf_status ppmf_weights_set(ppmf_weights* weights, size_t index, double value);

/* ---- pipeline steps (file in, file out) ---- */

/* Writes the generated events and outcomes plus a JSON manifest of the
 * planted ground truth (manifest_path may be NULL). */
PPMF_API ppmf_status ppmf_synth(const ppmf_config* config, const char* events_path, const char* outcomes_path,
                                const char* manifest_path);

/* Buckets, imputes and scales a cohort into a framed file and its mask file.
 * Scaling statistics are read from stats_in when given, otherwise fitted on
 * this cohort; they are written to stats_out when given. sparsity_out may be
 * NULL. */
PPMF_API ppmf_status ppmf_frame(const ppmf_config* config, const ppmf_cohort* cohort, const char* values_path,
                                const char* mask_path, const char* stats_in, const char* stats_out,
                                double* sparsity_out);

/* Weights for a framed cohort under the config's weighting (gd, none,
 * manual, chi2, infogain, gini) and feature set. trace_path (gd only) may be
 * NULL. */
PPMF_API ppmf_status ppmf_train(const ppmf_config* config, const char* framed_path, const char* weights_path,
                                const char* trace_path);

/* `patient_id,score,label` rows for every patient of query_path against the
 * training patients of train_path. With query_path NULL the training patients
 * are scored leave-one-out. */
PPMF_API ppmf_status ppmf_predict(const ppmf_config* config, const char* train_path, const char* query_path,
                                  const ppmf_weights* weights, const char* out_path);

/* The three calls below write fold_metrics.csv, report.json and report.txt
 * into out_dir (created if missing). */

/* Cross-validates the single method described by the config on the
 * validation half of the config's cohort. */
PPMF_API ppmf_status ppmf_evaluate(const ppmf_config* config, const char* out_dir);
/* Compares methods from one or more fold-metrics files. */
PPMF_API ppmf_status ppmf_compare(const char* const* fold_metrics_paths, size_t n_paths, double alpha,
                                  const char* out_dir);
/* Runs preset "exp1", "exp2" or "exp3". */
PPMF_API ppmf_status ppmf_experiment(const ppmf_config* config, const char* preset, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
