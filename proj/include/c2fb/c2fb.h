/* C interface to the c2fb solver library.
 *
 * Every function returns a c2fb_status; on failure a description is
 * available from c2fb_last_error() on the calling thread. Handles are opaque
 * and owned by the caller, who releases them with the matching *_free. */
#ifndef C2FB_C2FB_H
#define C2FB_C2FB_H

#include <stddef.h>
#include <stdint.h>

#if defined(C2FB_BUILDING_LIBRARY)
#define C2FB_API __attribute__((visibility("default")))
#else
#define C2FB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum c2fb_status {
  C2FB_OK = 0,
  C2FB_ERR_INVALID_ARGUMENT = 1,
  C2FB_ERR_DIMENSION = 2,
  C2FB_ERR_IO = 3,
  C2FB_ERR_PARSE = 4,
  C2FB_ERR_NUMERICAL = 5,
  C2FB_ERR_UNSUPPORTED = 6,
  C2FB_ERR_INTERNAL = 99
} c2fb_status;

C2FB_API const char* c2fb_version(void);
C2FB_API const char* c2fb_status_string(c2fb_status s);
/* Message of the last failing call on this thread ("" if none). */
C2FB_API const char* c2fb_last_error(void);

/* ---- linear operators ---------------------------------------------------- */

typedef struct c2fb_operator c2fb_operator;

C2FB_API c2fb_status c2fb_operator_identity(size_t rows, size_t cols, double scale, c2fb_operator** out);
/* Kernel is krows x kcols, row-major, origin at ((krows-1)/2, (kcols-1)/2). */
C2FB_API c2fb_status c2fb_operator_convolution(size_t rows, size_t cols, const double* kernel, size_t krows,
                                               size_t kcols, c2fb_operator** out);
C2FB_API c2fb_status c2fb_operator_motion_blur(size_t rows, size_t cols, int length, double angle_deg,
                                               c2fb_operator** out);
C2FB_API c2fb_status c2fb_operator_dwt(size_t rows, size_t cols, int levels, c2fb_operator** out);
/* outer o inner. Neither argument is consumed. */
C2FB_API c2fb_status c2fb_operator_compose(const c2fb_operator* outer, const c2fb_operator* inner,
                                           c2fb_operator** out);
C2FB_API void c2fb_operator_free(c2fb_operator* op);

C2FB_API c2fb_status c2fb_operator_shape(const c2fb_operator* op, size_t* in_rows, size_t* in_cols,
                                         size_t* out_rows, size_t* out_cols);
C2FB_API c2fb_status c2fb_operator_apply(const c2fb_operator* op, const double* x, size_t n, double* out,
                                         size_t m);
C2FB_API c2fb_status c2fb_operator_adjoint(const c2fb_operator* op, const double* y, size_t m, double* out,
                                           size_t n);
/* Safety-scaled power-iteration estimate of ||op||^2. */
C2FB_API c2fb_status c2fb_operator_norm_sq(const c2fb_operator* op, double tol, int max_iters, double* value,
                                           int* converged);

/* ---- penalties ------------------------------------------------------------ */

typedef enum c2fb_phi { C2FB_PHI_IDENTITY = 0, C2FB_PHI_LOGSUM = 1, C2FB_PHI_POWER = 2 } c2fb_phi;
typedef enum c2fb_psi { C2FB_PSI_ABS = 0, C2FB_PSI_SQ = 1 } c2fb_psi;

typedef struct c2fb_penalty c2fb_penalty;

/* epsilon and rho are ignored where the phi kind has no such parameter. */
C2FB_API c2fb_status c2fb_penalty_create(c2fb_phi phi, double theta, double epsilon, double rho, c2fb_psi psi,
                                         const c2fb_operator* analysis, c2fb_penalty** out);
C2FB_API void c2fb_penalty_free(c2fb_penalty* pen);
C2FB_API c2fb_status c2fb_penalty_eval(const c2fb_penalty* pen, const double* x, size_t n, double* value);
C2FB_API c2fb_status c2fb_penalty_weights(const c2fb_penalty* pen, const double* x_k, size_t n, double* lambda,
                                          size_t p);
C2FB_API c2fb_status c2fb_penalty_majorant(const c2fb_penalty* pen, const double* x, const double* x_k, size_t n,
                                           double* value);

/* ---- scalar proximity operators ------------------------------------------ */

typedef enum c2fb_prox_kind {
  C2FB_PROX_WEIGHTED_L1 = 0,
  C2FB_PROX_WEIGHTED_SQ = 1,
  C2FB_PROX_LOGSUM = 2,
  C2FB_PROX_LRHO = 3
} c2fb_prox_kind;

/* argmin_t penalty(t) + (a/2)(t - x)^2 coordinate-wise. `weight` is lambda
 * for the weighted kinds and theta otherwise; `param` is eps (logsum) or rho
 * (lrho). */
C2FB_API c2fb_status c2fb_prox(c2fb_prox_kind kind, const double* x, const double* a, size_t n, double weight,
                               double param, double* out);

/* ---- smooth term ---------------------------------------------------------- */

typedef enum c2fb_metric_policy { C2FB_METRIC_SCALAR = 0, C2FB_METRIC_DIAG = 1 } c2fb_metric_policy;

typedef struct c2fb_smooth c2fb_smooth;

/* h(x) = 1/2 ||Hx - y||^2; y has the output size of H. */
C2FB_API c2fb_status c2fb_smooth_create(const c2fb_operator* H, const double* y, size_t m, c2fb_smooth** out);
C2FB_API void c2fb_smooth_free(c2fb_smooth* s);
C2FB_API c2fb_status c2fb_smooth_value(const c2fb_smooth* s, const double* x, size_t n, double* value);
C2FB_API c2fb_status c2fb_smooth_gradient(const c2fb_smooth* s, const double* x, size_t n, double* grad);
C2FB_API c2fb_status c2fb_smooth_lipschitz(const c2fb_smooth* s, double* mu);
C2FB_API c2fb_status c2fb_smooth_metric(const c2fb_smooth* s, c2fb_metric_policy policy, double* diag, size_t n);

/* ---- solver --------------------------------------------------------------- */

typedef enum c2fb_algo { C2FB_ALGO_C2FB = 0, C2FB_ALGO_VMFB = 1 } c2fb_algo;

typedef struct c2fb_solver_config {
  c2fb_algo algo;
  int inner_iters;
  int max_outer;
  double gamma;
  double gamma_bar;
  c2fb_metric_policy metric;
  double stop_x_tol;
  double stop_f_tol;
  int monitor_inexact;
} c2fb_solver_config;

C2FB_API void c2fb_solver_config_init(c2fb_solver_config* cfg);

typedef struct c2fb_result c2fb_result;

typedef struct c2fb_result_summary {
  int outer_iters;
  size_t total_inner;
  int converged;
  int invariants_hold;
  double f_initial;
  double f_final;
  size_t newton_iterations;
  size_t bisection_fallbacks;
} c2fb_result_summary;

typedef struct c2fb_trace_record {
  int outer;
  size_t total_inner;
  double f;
  double surrogate;
  double chi_norm;
  double step_norm;
  double subgrad_residual;
  int sufficient_decrease_ok;
  int inexact_optimality_ok;
  int inner_descent_ok;
  int descent_ok;
  int sandwich_ok;
} c2fb_trace_record;

/* x0 may be NULL for the default start H^T y. */
C2FB_API c2fb_status c2fb_solve(const c2fb_smooth* s, const c2fb_penalty* pen, const c2fb_solver_config* cfg,
                                const double* x0, size_t n, c2fb_result** out);
C2FB_API void c2fb_result_free(c2fb_result* r);
C2FB_API c2fb_status c2fb_result_summary_get(const c2fb_result* r, c2fb_result_summary* out);
C2FB_API c2fb_status c2fb_result_x(const c2fb_result* r, double* x, size_t n);
C2FB_API size_t c2fb_result_trace_length(const c2fb_result* r);
C2FB_API c2fb_status c2fb_result_trace_record(const c2fb_result* r, size_t index, c2fb_trace_record* out);

/* ---- images --------------------------------------------------------------- */

typedef struct c2fb_image c2fb_image;

C2FB_API c2fb_status c2fb_image_load(const char* path, c2fb_image** out);
C2FB_API void c2fb_image_free(c2fb_image* img);
C2FB_API size_t c2fb_image_rows(const c2fb_image* img);
C2FB_API size_t c2fb_image_cols(const c2fb_image* img);
/* Row-major pixel values in [0, 255]; valid until the image is freed. */
C2FB_API const double* c2fb_image_data(const c2fb_image* img);
C2FB_API c2fb_status c2fb_image_save(const char* path, const double* pixels, size_t rows, size_t cols);

/* ---- experiments ---------------------------------------------------------- */

typedef enum c2fb_penalty_kind {
  C2FB_PENALTY_LOGSUM = 0,
  C2FB_PENALTY_LRHO = 1,
  C2FB_PENALTY_CAUCHY = 2,
  C2FB_PENALTY_L1 = 3
} c2fb_penalty_kind;

typedef struct c2fb_experiment_config {
  const char* image_path;
  size_t size;
  int blur_length;
  double blur_angle_deg;
  int wavelet_levels;
  double isnr_db;
  uint64_t noise_seed;
  c2fb_penalty_kind penalty;
  double theta;
  double epsilon;
  double rho;
  int run_c2fb;
  int run_vmfb;
  const int* inner_iters;
  size_t n_inner;
  double gamma;
  c2fb_metric_policy metric;
  int max_outer;
  int realizations;
  const char* output_dir; /* NULL or "" writes nothing */
  int write_traces;
  int write_images;
  int record_timing;
} c2fb_experiment_config;

C2FB_API void c2fb_experiment_config_init(c2fb_experiment_config* cfg);

typedef struct c2fb_experiment c2fb_experiment;

typedef struct c2fb_experiment_row {
  int realization;
  c2fb_algo algo;
  int inner;
  int outer_iters;
  size_t total_inner;
  double f_final;
  double snr_db;
  double C;
  double wall_ms;
  int converged;
  int invariants_hold;
} c2fb_experiment_row;

typedef struct c2fb_aggregate_row {
  c2fb_algo algo;
  int inner;
  size_t count;
  double mean_total_inner, std_total_inner;
  double mean_f, std_f;
  double mean_snr, std_snr;
  double mean_C, std_C;
} c2fb_aggregate_row;

C2FB_API c2fb_status c2fb_experiment_run(const c2fb_experiment_config* cfg, c2fb_experiment** out);
C2FB_API void c2fb_experiment_free(c2fb_experiment* e);
C2FB_API size_t c2fb_experiment_row_count(const c2fb_experiment* e);
C2FB_API c2fb_status c2fb_experiment_row_get(const c2fb_experiment* e, size_t index, c2fb_experiment_row* out);
C2FB_API size_t c2fb_experiment_aggregate_count(const c2fb_experiment* e);
C2FB_API c2fb_status c2fb_experiment_aggregate_get(const c2fb_experiment* e, size_t index,
                                                   c2fb_aggregate_row* out);
C2FB_API c2fb_status c2fb_experiment_status(const c2fb_experiment* e, int* all_converged, int* invariants_hold,
                                            double* observation_snr_db);

/* ---- validation ----------------------------------------------------------- */

typedef struct c2fb_oracle_report {
  int trials;
  int failures;
  double max_abs_error;
  double max_objective_excess;
} c2fb_oracle_report;

C2FB_API c2fb_status c2fb_prox_oracle(c2fb_prox_kind kind, int trials, uint64_t seed, c2fb_oracle_report* out);

typedef void (*c2fb_selftest_callback)(const char* name, int passed, const char* detail, void* user);

/* Runs the invariant suite; *all_passed is set even when checks fail. */
C2FB_API c2fb_status c2fb_selftest(c2fb_selftest_callback cb, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
