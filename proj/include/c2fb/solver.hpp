#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "c2fb/penalty.hpp"
#include "c2fb/prox.hpp"
#include "c2fb/smooth.hpp"
#include "c2fb/types.hpp"

namespace c2fb {

enum class Algorithm { c2fb, vmfb };

const char* to_string(Algorithm a);

struct SolverConfig {
  Algorithm algo = Algorithm::c2fb;
  int inner_iters = 1;             // I, constant over outer iterations
  int max_outer = 20000;           // K_max
  double gamma = 0.99;             // constant step, lower bound = gamma
  double gamma_bar = 0.01;         // gamma <= 1 - gamma_bar
  MetricPolicy metric_policy = MetricPolicy::diagonal_majorant;
  double stop_x_tol = 1e-6;
  double stop_f_tol = 1e-5;
  bool monitor_inexact = true;
  double newton_tol = kNewtonTol;
  int newton_max = kNewtonMaxIters;

  /// Throws Error(invalid_argument) when a bound is violated.
  void validate() const;

  /// alpha = 1 / (2 (1 - gamma_bar)) of the sufficient-decrease condition.
  double alpha() const { return 0.5 / (1.0 - gamma_bar); }
};

struct OuterRecord {
  int outer = 0;                  // k + 1
  std::size_t total_inner = 0;    // cumulative inner steps after this iteration
  double f = 0.0;                 // f(x_{k+1})
  double surrogate = 0.0;         // f_k(x_{k+1}) = h(x_{k+1}) + q(x_{k+1}, x_k)
  double chi_norm = 0.0;          // sqrt(sum_i ||x~_{k,i+1} - x~_{k,i}||^2)
  double step_norm = 0.0;         // ||x_{k+1} - x_k||
  double subgrad_residual = 0.0;  // ||t(x_{k+1})||
  bool sufficient_decrease_ok = true;
  bool inexact_optimality_ok = true;
  bool inner_descent_ok = true;   // h + l_k non-increasing over the inner loop
  bool descent_ok = true;         // f(x_{k+1}) <= f(x_k) - alpha_bar chi^2
  bool sandwich_ok = true;        // f(x_{k+1}) <= f_k(x_{k+1})
};

struct SolverTrace {
  Algorithm algo = Algorithm::c2fb;
  int inner_iters = 1;
  double f_initial = 0.0;
  double alpha_bar = 0.0;         // nu_lower (alpha - 1/2)
  double beta = 0.0;              // gamma_lower^{-1} sqrt(nu_upper)
  bool monitors_evaluated = false;
  ProxStats prox_stats;
  std::vector<OuterRecord> records;

  /// Every recorded invariant and monitor held. Only meaningful when
  /// monitors_evaluated is set.
  bool invariants_hold() const;
};

struct SolveResult {
  Vector x_star;
  SolverTrace trace;
  int outer_iters = 0;
  std::size_t total_inner = 0;
  bool converged = false;
  double f_final = 0.0;
};

/// Called after every inner step (and every VMFB iteration) with the new
/// iterate; `outer` and `inner` are zero-based.
using IterateObserver = std::function<void(int outer, int inner, const Vector& x)>;

/// Default starting point H^T y.
Vector default_initialization(const SmoothTerm& smooth);

/// Full objective f = h + g.
double objective(const SmoothTerm& smooth, const CompositePenalty& pen, const Vector& x);

/// Variable-metric composite forward-backward iteration: weights of the
/// tangent majorant are refreshed at every outer step and kept for
/// cfg.inner_iters forward-backward steps on h + l_k.
SolveResult c2fb_run(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                     const Vector& x0, const IterateObserver& observer = {});

/// Variable-metric forward-backward with the exact proximity operator of g.
/// Supported: identity phi (any psi), logsum + abs, power + abs (the prox of
/// theta |t|^rho, i.e. the eps -> 0 limit).
SolveResult vmfb_run(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                     const Vector& x0, const IterateObserver& observer = {});

/// Dispatches on cfg.algo.
SolveResult solve(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                  const Vector& x0, const IterateObserver& observer = {});

/// l_k(x~_{i+1}) + <step, grad> + alpha ||step||_A^2 <= l_k(x~_i), with a
/// 1e-10 relative slack.
bool check_sufficient_decrease(double l_before, double l_after, std::span<const double> inner_step,
                               std::span<const double> grad_anchor, const Metric& A, double alpha);

/// residual <= beta * step_A_norm + 1e-10.
bool check_inexact_optimality(double residual, double step_A_norm, double beta);

/// Both relative criteria: ||x_prev - x_next|| < x_tol ||x_next|| and
/// |f_prev - f_next| < f_tol |f_next| (absolute when f_next == 0). Exact
/// equality always passes.
bool stopping_test(std::span<const double> x_prev, std::span<const double> x_next, double f_prev,
                   double f_next, const SolverConfig& cfg);

/// ||grad h(x_next) + W^T(lambda_next o r)|| where r_p = [W v]_p / lambda_prev_p
/// recovers the psi-subgradients behind v in the subdifferential of l_k, and
/// lambda_next are the weights at x_next.
double subgradient_residual_trace(const Vector& x_next, const CompositePenalty& pen, const SmoothTerm& smooth,
                                  const Vector& v_from_prox, std::span<const double> lambda_prev);

}  // namespace c2fb
