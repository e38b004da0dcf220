/*
 * C API for the infokm library: quadratic, robust and information
 * k-means engines, generalization-bound evaluation, synthetic data,
 * and the property-suite harness.
 *
 * All handles are opaque; every fallible call returns an ikm_status and
 * the last error message is available through ikm_error_message().
 * Strings returned through char** outputs are owned by the caller and
 * must be released with ikm_string_free().
 */
#ifndef INFOKM_H
#define INFOKM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ikm_status {
  IKM_OK = 0,
  IKM_ERR_INVALID = 1, /* precondition violation; message names the constraint */
  IKM_ERR_IO = 2,      /* file missing/unreadable/malformed */
  IKM_ERR_INTERNAL = 3
} ikm_status;

/* Message for the most recent failure on this thread. */
const char* ikm_error_message(void);

void ikm_string_free(char* s);

/* ---------------------------------------------------------------- points */

typedef struct ikm_points ikm_points;

ikm_status ikm_points_create(const double* row_major, int64_t n, int64_t d,
                             ikm_points** out);
ikm_status ikm_points_load_csv(const char* path, ikm_points** out);
ikm_status ikm_points_save_csv(const ikm_points* pts, const char* path);
/* Verifies max_i ||x_i|| <= bound and certifies it on the handle. */
ikm_status ikm_points_claim_bound(ikm_points* pts, double bound);
int64_t ikm_points_n(const ikm_points* pts);
int64_t ikm_points_d(const ikm_points* pts);
double ikm_points_bound(const ikm_points* pts);
void ikm_points_free(ikm_points* pts);

/* ------------------------------------------------------------ histograms */

typedef struct ikm_histograms ikm_histograms;

/* Dense rows of nonnegative weights, normalized against nu (uniform when
 * nu_path is NULL). */
ikm_status ikm_histograms_load_csv(const char* path, const char* nu_path,
                                   ikm_histograms** out);
/* Sparse `row,col,weight` triplets with 0-based indices. */
ikm_status ikm_histograms_load_sparse_csv(const char* path, const char* nu_path,
                                          ikm_histograms** out);
ikm_status ikm_histograms_create(const double* weights_row_major, int64_t count,
                                 int64_t support, const double* nu_or_null,
                                 ikm_histograms** out);
ikm_status ikm_histograms_save_csv(const ikm_histograms* h, const char* path);
int64_t ikm_histograms_count(const ikm_histograms* h);
int64_t ikm_histograms_support(const ikm_histograms* h);
void ikm_histograms_free(ikm_histograms* h);

/* ------------------------------------------------------------- clustering */

typedef enum ikm_init_method {
  IKM_INIT_DSQ = 0,
  IKM_INIT_RANDOM_POINTS = 1
} ikm_init_method;

typedef enum ikm_empty_policy {
  IKM_EMPTY_FARTHEST_RESEED = 0,
  IKM_EMPTY_KEEP_PREVIOUS = 1
} ikm_empty_policy;

typedef struct ikm_lloyd_config {
  int32_t k;
  int32_t max_iters;
  double rel_tol;
  double abs_tol;
  uint64_t seed;
  int32_t init;         /* ikm_init_method */
  int32_t empty_policy; /* ikm_empty_policy */
  int32_t threads;      /* 0 = library default */
} ikm_lloyd_config;

void ikm_lloyd_config_init(ikm_lloyd_config* cfg);

typedef struct ikm_run ikm_run;

ikm_status ikm_cluster_quadratic(const ikm_points* pts,
                                 const ikm_lloyd_config* cfg, ikm_run** out);
ikm_status ikm_cluster_robust(const ikm_points* pts,
                              const ikm_lloyd_config* cfg, double sigma,
                              ikm_run** out);
ikm_status ikm_cluster_info(const ikm_histograms* data,
                            const ikm_lloyd_config* cfg, ikm_run** out);
ikm_status ikm_cluster_info_gaussian(const ikm_points* pts,
                                     const ikm_lloyd_config* cfg, double sigma,
                                     ikm_run** out);

int32_t ikm_run_converged(const ikm_run* run);
int32_t ikm_run_iterations(const ikm_run* run);
double ikm_run_criterion(const ikm_run* run);
int64_t ikm_run_size(const ikm_run* run); /* number of labeled data */
/* labels are written 1-based, one per datum. */
ikm_status ikm_run_labels(const ikm_run* run, int32_t* out);
ikm_status ikm_run_save_labels_csv(const ikm_run* run, const char* path);
ikm_status ikm_run_save_centers_csv(const ikm_run* run, const char* path);
ikm_status ikm_run_report_json(const ikm_run* run, char** out);
void ikm_run_free(ikm_run* run);

/* ----------------------------------------------------------------- bounds */

typedef enum ikm_bound_mode {
  IKM_MODE_UNIFORM = 0,
  IKM_MODE_EXCESS = 1,
  IKM_MODE_EXPECTATION = 2
} ikm_bound_mode;

/* Each evaluator fills an itemized JSON report (optional) and the total
 * (optional). */
ikm_status ikm_bound_linear(int64_t n, int32_t k, double theta_norm,
                            double w_norm, double a, double b, double delta,
                            int32_t mode, double epsilon, double* total,
                            char** json);
ikm_status ikm_bound_quadratic(int64_t n, int32_t k, double B, double delta,
                               int32_t mode, double* total, char** json);
ikm_status ikm_bound_quadratic_unsimplified(int64_t n, int32_t k, double B,
                                            double delta, int32_t mode,
                                            double* total, char** json);
ikm_status ikm_bound_robust(int64_t n, int32_t k, double sigma, double delta,
                            int32_t mode, double* total, char** json);
ikm_status ikm_bound_info(int64_t n, int32_t k, double B, double C,
                          double delta, int32_t mode, double* total,
                          char** json);

/* ----------------------------------------------------------------- suites */

/* Comma-separated canonical suite names in `validate all` order. */
ikm_status ikm_suite_list(char** names_csv);
/* Runs one suite (or "all"); *jsonl gets one JSON object per case and
 * *failures the number of failing cases. */
ikm_status ikm_suite_run(const char* name, uint64_t seed, char** jsonl,
                         int32_t* failures);

/* -------------------------------------------------------------- synthesis */

typedef enum ikm_generator {
  IKM_GEN_UNIFORM_BALL = 0,
  IKM_GEN_GAUSSIAN_MIXTURE = 1,
  IKM_GEN_DIRICHLET = 2,
  IKM_GEN_BAG_OF_WORDS = 3
} ikm_generator;

typedef struct ikm_synth_spec {
  int32_t generator; /* ikm_generator */
  int64_t n;
  uint64_t seed;
  double B;
  int32_t d;
  int32_t components;
  double mixture_std; /* 0 = default 0.05 B */
  int32_t m;
  double alpha;
  int32_t topics;
  int32_t doc_length;
} ikm_synth_spec;

void ikm_synth_spec_init(ikm_synth_spec* spec);
ikm_status ikm_synth_points(const ikm_synth_spec* spec, ikm_points** out);
ikm_status ikm_synth_histograms(const ikm_synth_spec* spec,
                                ikm_histograms** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* INFOKM_H */
