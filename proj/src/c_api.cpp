#include "c2fb/c2fb.h"

#include <cmath>
#include <new>
#include <string>

#include "c2fb/bench.hpp"
#include "c2fb/pgm.hpp"

struct c2fb_operator {
  c2fb::LinearOperator op;
};
struct c2fb_penalty {
  c2fb::CompositePenalty pen;
};
struct c2fb_smooth {
  c2fb::SmoothTerm term;
};
struct c2fb_result {
  c2fb::SolveResult res;
};
struct c2fb_image {
  c2fb::Vector pixels;
};
struct c2fb_experiment {
  c2fb::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

c2fb_status to_status(c2fb::ErrorCode c) {
  switch (c) {
    case c2fb::ErrorCode::invalid_argument: return C2FB_ERR_INVALID_ARGUMENT;
    case c2fb::ErrorCode::dimension: return C2FB_ERR_DIMENSION;
    case c2fb::ErrorCode::io: return C2FB_ERR_IO;
    case c2fb::ErrorCode::parse: return C2FB_ERR_PARSE;
    case c2fb::ErrorCode::numerical: return C2FB_ERR_NUMERICAL;
    case c2fb::ErrorCode::unsupported: return C2FB_ERR_UNSUPPORTED;
  }
  return C2FB_ERR_INTERNAL;
}

template <class F>
c2fb_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return C2FB_OK;
  } catch (const c2fb::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return C2FB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return C2FB_ERR_INTERNAL;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw c2fb::Error(c2fb::ErrorCode::invalid_argument, msg);
}

c2fb::Vector wrap(const double* p, std::size_t n, c2fb::Shape shape, const char* what) {
  require(p != nullptr || n == 0, "null data pointer");
  c2fb::require_same_size(shape.size(), n, what);
  return c2fb::Vector(shape, std::vector<double>(p, p + n));
}

void copy_out(const c2fb::Vector& v, double* out, std::size_t n, const char* what) {
  require(out != nullptr || n == 0, "null output pointer");
  c2fb::require_same_size(v.size(), n, what);
  std::copy(v.values().begin(), v.values().end(), out);
}

c2fb::MetricPolicy policy_of(c2fb_metric_policy p) {
  return p == C2FB_METRIC_SCALAR ? c2fb::MetricPolicy::scalar : c2fb::MetricPolicy::diagonal_majorant;
}

c2fb_metric_policy policy_to_c(c2fb::MetricPolicy p) {
  return p == c2fb::MetricPolicy::scalar ? C2FB_METRIC_SCALAR : C2FB_METRIC_DIAG;
}

c2fb_algo algo_to_c(c2fb::Algorithm a) { return a == c2fb::Algorithm::c2fb ? C2FB_ALGO_C2FB : C2FB_ALGO_VMFB; }

c2fb::SolverConfig solver_config_of(const c2fb_solver_config& c) {
  c2fb::SolverConfig s;
  require(c.algo == C2FB_ALGO_C2FB || c.algo == C2FB_ALGO_VMFB, "unknown algorithm");
  s.algo = c.algo == C2FB_ALGO_C2FB ? c2fb::Algorithm::c2fb : c2fb::Algorithm::vmfb;
  s.inner_iters = c.inner_iters;
  s.max_outer = c.max_outer;
  s.gamma = c.gamma;
  s.gamma_bar = c.gamma_bar;
  s.metric_policy = policy_of(c.metric);
  s.stop_x_tol = c.stop_x_tol;
  s.stop_f_tol = c.stop_f_tol;
  s.monitor_inexact = c.monitor_inexact != 0;
  return s;
}

}  // namespace

extern "C" {

const char* c2fb_version(void) { return "0.1.0"; }

const char* c2fb_status_string(c2fb_status s) {
  switch (s) {
    case C2FB_OK: return "ok";
    case C2FB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case C2FB_ERR_DIMENSION: return "dimension mismatch";
    case C2FB_ERR_IO: return "i/o error";
    case C2FB_ERR_PARSE: return "parse error";
    case C2FB_ERR_NUMERICAL: return "numerical failure";
    case C2FB_ERR_UNSUPPORTED: return "unsupported configuration";
    case C2FB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* c2fb_last_error(void) { return g_last_error.c_str(); }

// ---- operators -------------------------------------------------------------

c2fb_status c2fb_operator_identity(size_t rows, size_t cols, double scale, c2fb_operator** out) {
  return guard([&] {
    require(out, "null output handle");
    *out = new c2fb_operator{c2fb::LinearOperator::identity(c2fb::Shape{rows, cols}, scale)};
  });
}

c2fb_status c2fb_operator_convolution(size_t rows, size_t cols, const double* kernel, size_t krows, size_t kcols,
                                      c2fb_operator** out) {
  return guard([&] {
    require(out, "null output handle");
    const c2fb::Vector k = wrap(kernel, krows * kcols, c2fb::Shape{krows, kcols}, "kernel");
    *out = new c2fb_operator{c2fb::LinearOperator::convolution(c2fb::Shape{rows, cols}, k)};
  });
}

c2fb_status c2fb_operator_motion_blur(size_t rows, size_t cols, int length, double angle_deg,
                                      c2fb_operator** out) {
  return guard([&] {
    require(out, "null output handle");
    *out = new c2fb_operator{c2fb::make_motion_blur(length, angle_deg, c2fb::Shape{rows, cols})};
  });
}

c2fb_status c2fb_operator_dwt(size_t rows, size_t cols, int levels, c2fb_operator** out) {
  return guard([&] {
    require(out, "null output handle");
    *out = new c2fb_operator{c2fb::LinearOperator::dwt(c2fb::Shape{rows, cols}, levels)};
  });
}

c2fb_status c2fb_operator_compose(const c2fb_operator* outer, const c2fb_operator* inner, c2fb_operator** out) {
  return guard([&] {
    require(outer && inner && out, "null handle");
    *out = new c2fb_operator{c2fb::LinearOperator::compose(outer->op, inner->op)};
  });
}

void c2fb_operator_free(c2fb_operator* op) { delete op; }

c2fb_status c2fb_operator_shape(const c2fb_operator* op, size_t* in_rows, size_t* in_cols, size_t* out_rows,
                                size_t* out_cols) {
  return guard([&] {
    require(op, "null operator");
    const c2fb::Shape i = op->op.input_shape(), o = op->op.output_shape();
    if (in_rows) *in_rows = i.rows;
    if (in_cols) *in_cols = i.cols;
    if (out_rows) *out_rows = o.rows;
    if (out_cols) *out_cols = o.cols;
  });
}

c2fb_status c2fb_operator_apply(const c2fb_operator* op, const double* x, size_t n, double* out, size_t m) {
  return guard([&] {
    require(op, "null operator");
    copy_out(op->op.apply(wrap(x, n, op->op.input_shape(), "apply input")), out, m, "apply output");
  });
}

c2fb_status c2fb_operator_adjoint(const c2fb_operator* op, const double* y, size_t m, double* out, size_t n) {
  return guard([&] {
    require(op, "null operator");
    copy_out(op->op.adjoint(wrap(y, m, op->op.output_shape(), "adjoint input")), out, n, "adjoint output");
  });
}

c2fb_status c2fb_operator_norm_sq(const c2fb_operator* op, double tol, int max_iters, double* value,
                                  int* converged) {
  return guard([&] {
    require(op && value, "null argument");
    const c2fb::NormEstimate est = c2fb::operator_norm_sq(op->op, tol, max_iters);
    *value = est.value;
    if (converged) *converged = est.converged ? 1 : 0;
  });
}

// ---- penalties ---------------------------------------------------------------

c2fb_status c2fb_penalty_create(c2fb_phi phi, double theta, double epsilon, double rho, c2fb_psi psi,
                                const c2fb_operator* analysis, c2fb_penalty** out) {
  return guard([&] {
    require(analysis && out, "null handle");
    c2fb::Phi p;
    switch (phi) {
      case C2FB_PHI_IDENTITY: p = c2fb::Phi::identity(theta); break;
      case C2FB_PHI_LOGSUM: p = c2fb::Phi::logsum(theta, epsilon); break;
      case C2FB_PHI_POWER: p = c2fb::Phi::power(theta, rho, epsilon); break;
      default: throw c2fb::Error(c2fb::ErrorCode::invalid_argument, "unknown phi kind");
    }
    require(psi == C2FB_PSI_ABS || psi == C2FB_PSI_SQ, "unknown psi kind");
    const c2fb::PsiTag tag = psi == C2FB_PSI_ABS ? c2fb::PsiTag::abs_coeff : c2fb::PsiTag::sq_coeff;
    *out = new c2fb_penalty{c2fb::CompositePenalty(p, tag, analysis->op)};
  });
}

void c2fb_penalty_free(c2fb_penalty* pen) { delete pen; }

c2fb_status c2fb_penalty_eval(const c2fb_penalty* pen, const double* x, size_t n, double* value) {
  return guard([&] {
    require(pen && value, "null argument");
    *value = pen->pen.eval(wrap(x, n, pen->pen.analysis().input_shape(), "penalty input"));
  });
}

c2fb_status c2fb_penalty_weights(const c2fb_penalty* pen, const double* x_k, size_t n, double* lambda, size_t p) {
  return guard([&] {
    require(pen && lambda, "null argument");
    const c2fb::WeightVector w = pen->pen.weights(wrap(x_k, n, pen->pen.analysis().input_shape(), "anchor"));
    c2fb::require_same_size(w.lambda.size(), p, "weights output");
    std::copy(w.lambda.begin(), w.lambda.end(), lambda);
  });
}

c2fb_status c2fb_penalty_majorant(const c2fb_penalty* pen, const double* x, const double* x_k, size_t n,
                                  double* value) {
  return guard([&] {
    require(pen && value, "null argument");
    const c2fb::Shape s = pen->pen.analysis().input_shape();
    *value = pen->pen.majorant(wrap(x, n, s, "point"), wrap(x_k, n, s, "anchor"));
  });
}

// ---- prox ------------------------------------------------------------------------

c2fb_status c2fb_prox(c2fb_prox_kind kind, const double* x, const double* a, size_t n, double weight, double param,
                      double* out) {
  return guard([&] {
    require((x && a && out) || n == 0, "null argument");
    const std::span<const double> xs(x, n);
    const c2fb::Metric metric(std::vector<double>(a, a + n));
    const std::span<double> os(out, n);
    switch (kind) {
      case C2FB_PROX_WEIGHTED_L1:
      case C2FB_PROX_WEIGHTED_SQ: {
        require(weight >= 0.0, "weight must be nonnegative");
        const std::vector<double> lam(n, weight);
        if (kind == C2FB_PROX_WEIGHTED_L1) {
          c2fb::prox_weighted_l1(xs, lam, metric, os);
        } else {
          c2fb::prox_weighted_sq(xs, lam, metric, os);
        }
        break;
      }
      case C2FB_PROX_LOGSUM: c2fb::prox_logsum(xs, weight, param, metric, os); break;
      case C2FB_PROX_LRHO: c2fb::prox_lrho(xs, weight, param, metric, os); break;
      default: throw c2fb::Error(c2fb::ErrorCode::invalid_argument, "unknown prox kind");
    }
  });
}

// ---- smooth term -------------------------------------------------------------

c2fb_status c2fb_smooth_create(const c2fb_operator* H, const double* y, size_t m, c2fb_smooth** out) {
  return guard([&] {
    require(H && out, "null handle");
    *out = new c2fb_smooth{c2fb::SmoothTerm(H->op, wrap(y, m, H->op.output_shape(), "observation"))};
  });
}

void c2fb_smooth_free(c2fb_smooth* s) { delete s; }

c2fb_status c2fb_smooth_value(const c2fb_smooth* s, const double* x, size_t n, double* value) {
  return guard([&] {
    require(s && value, "null argument");
    *value = s->term.value(wrap(x, n, s->term.op().input_shape(), "point"));
  });
}

c2fb_status c2fb_smooth_gradient(const c2fb_smooth* s, const double* x, size_t n, double* grad) {
  return guard([&] {
    require(s, "null handle");
    copy_out(s->term.gradient(wrap(x, n, s->term.op().input_shape(), "point")), grad, n, "gradient output");
  });
}

c2fb_status c2fb_smooth_lipschitz(const c2fb_smooth* s, double* mu) {
  return guard([&] {
    require(s && mu, "null argument");
    *mu = s->term.lipschitz();
  });
}

c2fb_status c2fb_smooth_metric(const c2fb_smooth* s, c2fb_metric_policy policy, double* diag, size_t n) {
  return guard([&] {
    require(s && diag, "null argument");
    const c2fb::Metric A = s->term.metric(policy_of(policy));
    c2fb::require_same_size(A.size(), n, "metric output");
    std::copy(A.diag().begin(), A.diag().end(), diag);
  });
}

// ---- solver ------------------------------------------------------------------------

void c2fb_solver_config_init(c2fb_solver_config* cfg) {
  if (!cfg) return;
  const c2fb::SolverConfig d;
  cfg->algo = algo_to_c(d.algo);
  cfg->inner_iters = d.inner_iters;
  cfg->max_outer = d.max_outer;
  cfg->gamma = d.gamma;
  cfg->gamma_bar = d.gamma_bar;
  cfg->metric = policy_to_c(d.metric_policy);
  cfg->stop_x_tol = d.stop_x_tol;
  cfg->stop_f_tol = d.stop_f_tol;
  cfg->monitor_inexact = d.monitor_inexact ? 1 : 0;
}

c2fb_status c2fb_solve(const c2fb_smooth* s, const c2fb_penalty* pen, const c2fb_solver_config* cfg,
                       const double* x0, size_t n, c2fb_result** out) {
  return guard([&] {
    require(s && pen && cfg && out, "null argument");
    const c2fb::SolverConfig sc = solver_config_of(*cfg);
    const c2fb::Vector start = x0 ? wrap(x0, n, s->term.op().input_shape(), "initial point")
                                  : c2fb::default_initialization(s->term);
    *out = new c2fb_result{c2fb::solve(s->term, pen->pen, sc, start)};
  });
}

void c2fb_result_free(c2fb_result* r) { delete r; }

c2fb_status c2fb_result_summary_get(const c2fb_result* r, c2fb_result_summary* out) {
  return guard([&] {
    require(r && out, "null argument");
    const c2fb::SolveResult& res = r->res;
    out->outer_iters = res.outer_iters;
    out->total_inner = res.total_inner;
    out->converged = res.converged ? 1 : 0;
    out->invariants_hold = res.trace.invariants_hold() ? 1 : 0;
    out->f_initial = res.trace.f_initial;
    out->f_final = res.f_final;
    out->newton_iterations = res.trace.prox_stats.newton_iterations;
    out->bisection_fallbacks = res.trace.prox_stats.bisection_fallbacks;
  });
}

c2fb_status c2fb_result_x(const c2fb_result* r, double* x, size_t n) {
  return guard([&] {
    require(r, "null handle");
    copy_out(r->res.x_star, x, n, "solution output");
  });
}

size_t c2fb_result_trace_length(const c2fb_result* r) { return r ? r->res.trace.records.size() : 0; }

c2fb_status c2fb_result_trace_record(const c2fb_result* r, size_t index, c2fb_trace_record* out) {
  return guard([&] {
    require(r && out, "null argument");
    if (index >= r->res.trace.records.size()) {
      throw c2fb::Error(c2fb::ErrorCode::dimension, "trace index out of range");
    }
    const c2fb::OuterRecord& rec = r->res.trace.records[index];
    out->outer = rec.outer;
    out->total_inner = rec.total_inner;
    out->f = rec.f;
    out->surrogate = rec.surrogate;
    out->chi_norm = rec.chi_norm;
    out->step_norm = rec.step_norm;
    out->subgrad_residual = rec.subgrad_residual;
    out->sufficient_decrease_ok = rec.sufficient_decrease_ok;
    out->inexact_optimality_ok = rec.inexact_optimality_ok;
    out->inner_descent_ok = rec.inner_descent_ok;
    out->descent_ok = rec.descent_ok;
    out->sandwich_ok = rec.sandwich_ok;
  });
}

// ---- images -----------------------------------------------------------------------

c2fb_status c2fb_image_load(const char* path, c2fb_image** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new c2fb_image{c2fb::load_pgm(path)};
  });
}

void c2fb_image_free(c2fb_image* img) { delete img; }
size_t c2fb_image_rows(const c2fb_image* img) { return img ? img->pixels.shape().rows : 0; }
size_t c2fb_image_cols(const c2fb_image* img) { return img ? img->pixels.shape().cols : 0; }
const double* c2fb_image_data(const c2fb_image* img) { return img ? img->pixels.data() : nullptr; }

c2fb_status c2fb_image_save(const char* path, const double* pixels, size_t rows, size_t cols) {
  return guard([&] {
    require(path != nullptr, "null path");
    c2fb::save_pgm(path, wrap(pixels, rows * cols, c2fb::Shape{rows, cols}, "image"));
  });
}

// ---- experiments ----------------------------------------------------------------

void c2fb_experiment_config_init(c2fb_experiment_config* cfg) {
  if (!cfg) return;
  static const int kDefaultInner[] = {5, 15};
  const c2fb::ExperimentConfig d;
  cfg->image_path = nullptr;
  cfg->size = d.size;
  cfg->blur_length = d.blur_length;
  cfg->blur_angle_deg = d.blur_angle_deg;
  cfg->wavelet_levels = d.wavelet_levels;
  cfg->isnr_db = d.isnr_db;
  cfg->noise_seed = d.noise_seed;
  cfg->penalty = C2FB_PENALTY_LOGSUM;
  cfg->theta = d.penalty.theta;
  cfg->epsilon = d.penalty.epsilon;
  cfg->rho = d.penalty.rho;
  cfg->run_c2fb = 1;
  cfg->run_vmfb = 1;
  cfg->inner_iters = kDefaultInner;
  cfg->n_inner = 2;
  cfg->gamma = d.gamma;
  cfg->metric = policy_to_c(d.metric_policy);
  cfg->max_outer = d.max_outer;
  cfg->realizations = d.realizations;
  cfg->output_dir = nullptr;
  cfg->write_traces = d.write_traces ? 1 : 0;
  cfg->write_images = d.write_images ? 1 : 0;
  cfg->record_timing = d.record_timing ? 1 : 0;
}

c2fb_status c2fb_experiment_run(const c2fb_experiment_config* cfg, c2fb_experiment** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    require(cfg->image_path != nullptr, "image path is required");
    require(cfg->inner_iters != nullptr || cfg->n_inner == 0, "null inner iteration list");
    c2fb::ExperimentConfig e;
    e.image_path = cfg->image_path;
    e.size = cfg->size;
    e.blur_length = cfg->blur_length;
    e.blur_angle_deg = cfg->blur_angle_deg;
    e.wavelet_levels = cfg->wavelet_levels;
    e.isnr_db = cfg->isnr_db;
    e.noise_seed = cfg->noise_seed;
    switch (cfg->penalty) {
      case C2FB_PENALTY_LOGSUM: e.penalty.kind = c2fb::PenaltyKind::logsum; break;
      case C2FB_PENALTY_LRHO: e.penalty.kind = c2fb::PenaltyKind::lrho; break;
      case C2FB_PENALTY_CAUCHY: e.penalty.kind = c2fb::PenaltyKind::cauchy; break;
      case C2FB_PENALTY_L1: e.penalty.kind = c2fb::PenaltyKind::l1; break;
      default: throw c2fb::Error(c2fb::ErrorCode::invalid_argument, "unknown penalty kind");
    }
    e.penalty.theta = cfg->theta;
    e.penalty.epsilon = cfg->epsilon;
    e.penalty.rho = cfg->rho;
    e.run_c2fb = cfg->run_c2fb != 0;
    e.run_vmfb = cfg->run_vmfb != 0;
    e.inner_iters.assign(cfg->inner_iters, cfg->inner_iters + cfg->n_inner);
    e.gamma = cfg->gamma;
    e.metric_policy = policy_of(cfg->metric);
    e.max_outer = cfg->max_outer;
    e.realizations = cfg->realizations;
    e.output_dir = cfg->output_dir ? cfg->output_dir : "";
    e.write_traces = cfg->write_traces != 0;
    e.write_images = cfg->write_images != 0;
    e.record_timing = cfg->record_timing != 0;
    *out = new c2fb_experiment{c2fb::run_experiment(e)};
  });
}

void c2fb_experiment_free(c2fb_experiment* e) { delete e; }

size_t c2fb_experiment_row_count(const c2fb_experiment* e) { return e ? e->report.rows.size() : 0; }

c2fb_status c2fb_experiment_row_get(const c2fb_experiment* e, size_t index, c2fb_experiment_row* out) {
  return guard([&] {
    require(e && out, "null argument");
    if (index >= e->report.rows.size()) throw c2fb::Error(c2fb::ErrorCode::dimension, "row index out of range");
    const c2fb::ExperimentRow& r = e->report.rows[index];
    out->realization = r.realization;
    out->algo = algo_to_c(r.algo);
    out->inner = r.inner;
    out->outer_iters = r.outer_iters;
    out->total_inner = r.total_inner;
    out->f_final = r.f_final;
    out->snr_db = r.snr_db;
    out->C = r.C;
    out->wall_ms = r.wall_ms;
    out->converged = r.converged;
    out->invariants_hold = r.invariants_hold;
  });
}

size_t c2fb_experiment_aggregate_count(const c2fb_experiment* e) { return e ? e->report.aggregates.size() : 0; }

c2fb_status c2fb_experiment_aggregate_get(const c2fb_experiment* e, size_t index, c2fb_aggregate_row* out) {
  return guard([&] {
    require(e && out, "null argument");
    if (index >= e->report.aggregates.size()) {
      throw c2fb::Error(c2fb::ErrorCode::dimension, "aggregate index out of range");
    }
    const c2fb::AggregateRow& a = e->report.aggregates[index];
    out->algo = algo_to_c(a.algo);
    out->inner = a.inner;
    out->count = a.count;
    out->mean_total_inner = a.mean_total_inner;
    out->std_total_inner = a.std_total_inner;
    out->mean_f = a.mean_f;
    out->std_f = a.std_f;
    out->mean_snr = a.mean_snr;
    out->std_snr = a.std_snr;
    out->mean_C = a.mean_C;
    out->std_C = a.std_C;
  });
}

c2fb_status c2fb_experiment_status(const c2fb_experiment* e, int* all_converged, int* invariants_hold,
                                   double* observation_snr_db) {
  return guard([&] {
    require(e, "null handle");
    if (all_converged) *all_converged = e->report.all_converged ? 1 : 0;
    if (invariants_hold) *invariants_hold = e->report.invariants_hold ? 1 : 0;
    if (observation_snr_db) *observation_snr_db = e->report.observation_snr_mean;
  });
}

// ---- validation ----------------------------------------------------------------------

c2fb_status c2fb_prox_oracle(c2fb_prox_kind kind, int trials, uint64_t seed, c2fb_oracle_report* out) {
  return guard([&] {
    require(out, "null argument");
    c2fb::ProxKind k;
    switch (kind) {
      case C2FB_PROX_WEIGHTED_L1: k = c2fb::ProxKind::weighted_l1; break;
      case C2FB_PROX_WEIGHTED_SQ: k = c2fb::ProxKind::weighted_sq; break;
      case C2FB_PROX_LOGSUM: k = c2fb::ProxKind::logsum; break;
      case C2FB_PROX_LRHO: k = c2fb::ProxKind::lrho; break;
      default: throw c2fb::Error(c2fb::ErrorCode::invalid_argument, "unknown prox kind");
    }
    const c2fb::OracleReport r = c2fb::run_prox_oracle(k, trials, seed);
    out->trials = r.trials;
    out->failures = r.failures;
    out->max_abs_error = r.max_abs_error;
    out->max_objective_excess = r.max_objective_excess;
  });
}

c2fb_status c2fb_selftest(c2fb_selftest_callback cb, void* user, int* all_passed) {
  return guard([&] {
    const bool ok = c2fb::run_selftest([&](const std::string& name, bool passed, const std::string& detail) {
      if (cb) cb(name.c_str(), passed ? 1 : 0, detail.c_str(), user);
    });
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
