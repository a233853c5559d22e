/* C interface to the qpol library: quantized stationary policies for MDPs on
 * continuous state/action spaces, Monte Carlo cost estimation, and the
 * closed-form approximation-loss bounds.
 *
 * All functions return a qpol_status (QPOL_OK on success); the most recent
 * error message for the calling thread is available via qpol_last_error().
 * Objects are opaque handles released with the matching *_free function.
 */
#ifndef QPOL_H
#define QPOL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpol_status {
  QPOL_OK = 0,
  QPOL_ERR_RUNTIME = 1,  /* experiment machinery failure */
  QPOL_ERR_CONFIG = 2,   /* config parse/validation failure (CLI exit code 2) */
  QPOL_ERR_ARGUMENT = 3  /* bad call arguments (null handles, domain errors) */
} qpol_status;

const char* qpol_version(void);

/* Message describing the last failure on this thread; empty when none. */
const char* qpol_last_error(void);

/* ------------------------------------------------------------------ */
/* Experiment configs                                                  */

typedef struct qpol_config qpol_config;

qpol_status qpol_config_load(const char* path, qpol_config** out);
qpol_status qpol_config_loads(const char* text, qpol_config** out);
void qpol_config_free(qpol_config* cfg);

qpol_status qpol_config_set_seed(qpol_config* cfg, uint64_t seed);
qpol_status qpol_config_set_threads(qpol_config* cfg, int n_threads);
qpol_status qpol_config_set_dump_rollouts(qpol_config* cfg, int enable);
qpol_status qpol_config_set_format(qpol_config* cfg, const char* format);
qpol_status qpol_config_set_out_dir(qpol_config* cfg, const char* dir);

/* "csv" or "json" */
const char* qpol_config_format(const qpol_config* cfg);
const char* qpol_config_out_dir(const qpol_config* cfg);
int qpol_config_dump_rollouts(const qpol_config* cfg);

/* Action-space geometry of the configured system, for codebook printing. */
int qpol_config_action_dim(const qpol_config* cfg);
/* lo/hi must hold qpol_config_action_dim(cfg) entries. */
qpol_status qpol_config_action_box(const qpol_config* cfg, double* lo, double* hi);
/* First entry of the configured codebook schedule. */
long qpol_config_first_k(const qpol_config* cfg);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */

typedef struct qpol_report qpol_report;

/* experiment: "convergence", "bounds", "ergodicity", "tvcheck" or "slb". */
qpol_status qpol_run(const qpol_config* cfg, const char* experiment,
                     qpol_report** out);
void qpol_report_free(qpol_report* report);

int qpol_report_passed(const qpol_report* report); /* 1 = all rows pass */
const char* qpol_report_csv(const qpol_report* report);
const char* qpol_report_json(const qpol_report* report);
const char* qpol_report_summary(const qpol_report* report);
/* NULL unless the config enabled dump_rollouts. */
const char* qpol_report_rollout_csv(const qpol_report* report);

/* ------------------------------------------------------------------ */
/* Codebooks (uniform nets on action boxes)                            */

typedef struct qpol_codebook qpol_codebook;

qpol_status qpol_codebook_build(const double* lo, const double* hi, int dim,
                                long k, qpol_codebook** out);
void qpol_codebook_free(qpol_codebook* cb);

long qpol_codebook_size(const qpol_codebook* cb);
double qpol_codebook_rate_bits(const qpol_codebook* cb);
double qpol_codebook_covering_radius(const qpol_codebook* cb);
/* Copies size*dim coordinates (level-major) into buf; returns QPOL_ERR_ARGUMENT
 * when buf_len is too small. */
qpol_status qpol_codebook_levels(const qpol_codebook* cb, double* buf, long buf_len);
/* One level per line, comma-separated coordinates. */
const char* qpol_codebook_text(const qpol_codebook* cb);
/* Index of the level nearest to `action` (ties: smallest index). */
qpol_status qpol_codebook_nearest(const qpol_codebook* cb, const double* action,
                                  int dim, long* index);

/* ------------------------------------------------------------------ */
/* Closed-form bounds                                                  */

typedef struct qpol_constants {
  double alpha;
  double beta;
  double K1;
  double K2;
  double M;
  double C;     /* read when has_ergodicity != 0 */
  double kappa; /* read when has_ergodicity != 0 */
  int d;
  int has_ergodicity;
} qpol_constants;

qpol_status qpol_discounted_gap_bound(const qpol_constants* c, long k,
                                      double* value, double* K_out);
/* n < 0 minimizes the bound over n; *n_used reports the n applied. */
qpol_status qpol_average_gap_bound(const qpol_constants* c, long k, long n,
                                   double* value, long* n_used);
qpol_status qpol_ergodicity_constants(double l_drift, double sigma, double* C,
                                      double* kappa, double* epsilon);
qpol_status qpol_gaussian_tv_lipschitz(double lipschitz_f_in_a, double sigma,
                                       double* K2);
/* criterion: "per_stage", "discounted" (needs beta in (0,1)) or "average". */
qpol_status qpol_slb_bound(int d, double entropy_bits, const char* criterion,
                           double beta, long k, double* value, double* L_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QPOL_H */
