#include "c2fb/solver.hpp"

#include <cmath>
#include <string>

namespace c2fb {

const char* to_string(Algorithm a) { return a == Algorithm::c2fb ? "c2fb" : "vmfb"; }

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, "solver config: " + msg); };
  if (inner_iters < 1) fail("inner_iters must be >= 1");
  if (max_outer < 1) fail("max_outer must be >= 1");
  if (!(gamma_bar > 0.0 && gamma_bar < 1.0)) fail("gamma_bar must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0 - gamma_bar)) fail("gamma must lie in (0, 1 - gamma_bar]");
  if (!(stop_x_tol >= 0.0) || !(stop_f_tol >= 0.0)) fail("stopping tolerances must be nonnegative");
  if (!(newton_tol > 0.0) || newton_max < 1) fail("newton settings must be positive");
}

bool SolverTrace::invariants_hold() const {
  if (!monitors_evaluated) return true;
  for (const auto& r : records) {
    if (!(r.sufficient_decrease_ok && r.inexact_optimality_ok && r.inner_descent_ok && r.descent_ok &&
          r.sandwich_ok)) {
      return false;
    }
  }
  return true;
}

Vector default_initialization(const SmoothTerm& smooth) { return smooth.op().adjoint(smooth.observation()); }

double objective(const SmoothTerm& smooth, const CompositePenalty& pen, const Vector& x) {
  return smooth.value(x) + pen.eval(x);
}

bool check_sufficient_decrease(double l_before, double l_after, std::span<const double> inner_step,
                               std::span<const double> grad_anchor, const Metric& A, double alpha) {
  const double lin = dot(inner_step, grad_anchor);
  const double quad = alpha * std::pow(A.norm(inner_step), 2);
  const double lhs = l_after + lin + quad;
  const double slack = 1e-10 * std::max({1.0, std::abs(l_before), std::abs(l_after), std::abs(lin)});
  return lhs <= l_before + slack;
}

bool check_inexact_optimality(double residual, double step_A_norm, double beta) {
  return residual <= beta * step_A_norm + 1e-10;
}

bool stopping_test(std::span<const double> x_prev, std::span<const double> x_next, double f_prev, double f_next,
                   const SolverConfig& cfg) {
  const double dx = distance(x_prev, x_next);
  const bool x_ok = dx == 0.0 || dx < cfg.stop_x_tol * norm(x_next);
  const double df = std::abs(f_prev - f_next);
  bool f_ok;
  if (df == 0.0) {
    f_ok = true;
  } else if (f_next == 0.0) {
    f_ok = df < cfg.stop_f_tol;
  } else {
    f_ok = df < cfg.stop_f_tol * std::abs(f_next);
  }
  return x_ok && f_ok;
}

namespace {

// Shared setup: metric, coefficient-domain prox metric and the constants of
// the sufficient-decrease / inexact-optimality conditions.
struct Setup {
  Metric A;
  Metric coef_metric;  // gamma^{-1} A expressed on the W side
  std::vector<double> step_scale;  // gamma / a_n
  double alpha = 0.0;
  double alpha_bar = 0.0;
  double beta = 0.0;
  bool w_identity = false;
};

Setup prepare(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg, const Vector& x0) {
  cfg.validate();
  const LinearOperator& W = pen.analysis();
  require_shape(smooth.op().input_shape(), x0.shape(), "initial point");
  require_shape(smooth.op().input_shape(), W.input_shape(), "penalty analysis operator");
  if (!x0.all_finite()) throw Error(ErrorCode::invalid_argument, "initial point has non-finite entries");
  if (!W.is_orthonormal() || !(W.output_shape() == W.input_shape())) {
    throw Error(ErrorCode::unsupported, "exact prox requires an orthonormal, square analysis operator");
  }

  Setup s;
  s.A = smooth.metric(cfg.metric_policy);
  s.w_identity = W.is_unit_identity();
  if (!s.w_identity && !s.A.is_scalar()) {
    throw Error(ErrorCode::unsupported,
                "a non-scalar metric is only compatible with an identity analysis operator");
  }
  s.coef_metric = s.w_identity ? s.A.scaled(1.0 / cfg.gamma)
                               : Metric::scalar(W.output_shape().size(), s.A[0] / cfg.gamma);
  s.step_scale.resize(s.A.size());
  for (std::size_t n = 0; n < s.A.size(); ++n) s.step_scale[n] = cfg.gamma / s.A[n];
  s.alpha = cfg.alpha();
  s.alpha_bar = s.A.lower() * (s.alpha - 0.5);
  s.beta = std::sqrt(s.A.upper()) / cfg.gamma;
  return s;
}

void require_finite(double f, int outer) {
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::numerical, "objective became non-finite at outer iteration " + std::to_string(outer));
  }
}

}  // namespace

SolveResult c2fb_run(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                     const Vector& x0, const IterateObserver& observer) {
  const Setup s = prepare(smooth, pen, cfg, x0);
  const LinearOperator& W = pen.analysis();
  const std::size_t n = x0.size();
  const std::size_t P = pen.terms();

  Vector x = x0;
  Vector xn(x0.shape());
  std::vector<double> c(P), cn(P), u(P), z(n), grad(n), grad_new(n), step(n), v(n), xk(n), scratch;
  std::vector<double> lambda(P), lambda_next(P), tmp(P), tvec(n);

  W.apply(x.span(), c);
  double h = smooth.value_and_gradient(x.span(), grad, scratch);
  double f = h + pen.eval_coeffs(c);
  require_finite(f, 0);
  pen.weights_from_coeffs(c, lambda);

  SolveResult res;
  res.trace.algo = Algorithm::c2fb;
  res.trace.inner_iters = cfg.inner_iters;
  res.trace.f_initial = f;
  res.trace.alpha_bar = s.alpha_bar;
  res.trace.beta = s.beta;
  res.trace.monitors_evaluated = cfg.monitor_inexact;

  const bool abs_psi = pen.psi() == PsiTag::abs_coeff;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const double offset = pen.majorant_offset(c, lambda);
    double l_cur = pen.weighted_eval(lambda, c);
    std::copy(x.span().begin(), x.span().end(), xk.begin());

    OuterRecord rec;
    rec.outer = k + 1;
    double chi2 = 0.0;
    for (int i = 0; i < cfg.inner_iters; ++i) {
      for (std::size_t j = 0; j < n; ++j) z[j] = x[j] - s.step_scale[j] * grad[j];
      if (s.w_identity) {
        std::copy(z.begin(), z.end(), u.begin());
      } else {
        W.apply(z, u);
      }
      if (abs_psi) {
        prox_weighted_l1(u, lambda, s.coef_metric, cn);
      } else {
        prox_weighted_sq(u, lambda, s.coef_metric, cn);
      }
      if (s.w_identity) {
        std::copy(cn.begin(), cn.end(), xn.span().begin());
      } else {
        W.adjoint(cn, xn.span());
      }

      double d2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        step[j] = xn[j] - x[j];
        d2 += step[j] * step[j];
        v[j] = s.A[j] / cfg.gamma * (x[j] - xn[j]) - grad[j];
      }
      chi2 += d2;
      const double l_new = pen.weighted_eval(lambda, cn);

      if (cfg.monitor_inexact) {
        rec.sufficient_decrease_ok &= check_sufficient_decrease(l_cur, l_new, step, grad, s.A, s.alpha);
        double r2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) r2 += (grad[j] + v[j]) * (grad[j] + v[j]);
        rec.inexact_optimality_ok &= check_inexact_optimality(std::sqrt(r2), s.A.norm(step), s.beta);
      }

      const double h_new = smooth.value_and_gradient(xn.span(), grad_new, scratch);
      if (cfg.monitor_inexact) {
        const double before = h + l_cur;
        rec.inner_descent_ok &=
            h_new + l_new <= before - s.alpha_bar * d2 + 1e-10 * (1.0 + std::abs(before));
      }

      std::swap(x, xn);
      std::swap(c, cn);
      std::swap(grad, grad_new);
      h = h_new;
      l_cur = l_new;
      if (observer) observer(k, i, x);
    }

    const double f_new = h + pen.eval_coeffs(c);
    require_finite(f_new, k + 1);
    rec.f = f_new;
    rec.surrogate = h + l_cur + offset;
    rec.chi_norm = std::sqrt(chi2);
    rec.step_norm = distance(xk, x.span());
    rec.total_inner = static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(cfg.inner_iters);
    if (cfg.monitor_inexact) {
      const double slack = 1e-10 * (1.0 + std::abs(f));
      rec.sandwich_ok = f_new <= rec.surrogate + 1e-10 * (1.0 + std::abs(rec.surrogate));
      rec.descent_ok = f_new <= f - s.alpha_bar * chi2 + slack;
    }

    // Subgradient of f at x_{k+1}: reweight the psi-subgradients recovered
    // from the last prox step with the new weights.
    pen.weights_from_coeffs(c, lambda_next);
    if (s.w_identity) {
      std::copy(v.begin(), v.end(), tmp.begin());
    } else {
      W.apply(v, tmp);
    }
    for (std::size_t p = 0; p < P; ++p) tmp[p] = lambda_next[p] * (tmp[p] / lambda[p]);
    if (s.w_identity) {
      std::copy(tmp.begin(), tmp.end(), tvec.begin());
    } else {
      W.adjoint(tmp, tvec);
    }
    double t2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) t2 += (grad[j] + tvec[j]) * (grad[j] + tvec[j]);
    rec.subgrad_residual = std::sqrt(t2);

    res.trace.records.push_back(rec);
    const bool stop = stopping_test(xk, x.span(), f, f_new, cfg);
    f = f_new;
    std::swap(lambda, lambda_next);
    res.outer_iters = k + 1;
    if (stop) {
      res.converged = true;
      break;
    }
  }

  res.total_inner = static_cast<std::size_t>(res.outer_iters) * static_cast<std::size_t>(cfg.inner_iters);
  res.f_final = f;
  res.x_star = std::move(x);
  return res;
}

SolveResult vmfb_run(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                     const Vector& x0, const IterateObserver& observer) {
  const Phi& phi = pen.phi();
  const bool abs_psi = pen.psi() == PsiTag::abs_coeff;
  if (!(phi.tag == PhiTag::identity || abs_psi)) {
    throw Error(ErrorCode::unsupported, "vmfb: no direct proximity operator for this penalty");
  }
  const Setup s = prepare(smooth, pen, cfg, x0);
  const LinearOperator& W = pen.analysis();
  const std::size_t n = x0.size();
  const std::size_t P = pen.terms();

  Vector x = x0;
  Vector xn(x0.shape());
  std::vector<double> c(P), cn(P), u(P), z(n), grad(n), grad_new(n), scratch;
  const std::vector<double> flat_weights(P, phi.theta);

  W.apply(x.span(), c);
  double h = smooth.value_and_gradient(x.span(), grad, scratch);
  double f = h + pen.eval_coeffs(c);
  require_finite(f, 0);

  SolveResult res;
  res.trace.algo = Algorithm::vmfb;
  res.trace.inner_iters = 1;
  res.trace.f_initial = f;
  res.trace.alpha_bar = s.alpha_bar;
  res.trace.beta = s.beta;
  res.trace.monitors_evaluated = false;

  for (int k = 0; k < cfg.max_outer; ++k) {
    for (std::size_t j = 0; j < n; ++j) z[j] = x[j] - s.step_scale[j] * grad[j];
    if (s.w_identity) {
      std::copy(z.begin(), z.end(), u.begin());
    } else {
      W.apply(z, u);
    }
    switch (phi.tag) {
      case PhiTag::identity:
        if (abs_psi) {
          prox_weighted_l1(u, flat_weights, s.coef_metric, cn);
        } else {
          prox_weighted_sq(u, flat_weights, s.coef_metric, cn);
        }
        break;
      case PhiTag::logsum:
        prox_logsum(u, phi.theta, phi.epsilon, s.coef_metric, cn);
        break;
      case PhiTag::power:
        prox_lrho(u, phi.theta, phi.rho, s.coef_metric, cn, cfg.newton_tol, cfg.newton_max,
                  &res.trace.prox_stats);
        break;
    }
    if (s.w_identity) {
      std::copy(cn.begin(), cn.end(), xn.span().begin());
    } else {
      W.adjoint(cn, xn.span());
    }

    const double h_new = smooth.value_and_gradient(xn.span(), grad_new, scratch);
    const double f_new = h_new + pen.eval_coeffs(cn);
    require_finite(f_new, k + 1);

    // v = gamma^{-1} A (x_k - x_{k+1}) - grad h(x_k) is a subgradient of g at
    // x_{k+1}, so t = grad h(x_{k+1}) + v.
    double d2 = 0.0, t2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = xn[j] - x[j];
      d2 += d * d;
      const double v = -s.A[j] / cfg.gamma * d - grad[j];
      t2 += (grad_new[j] + v) * (grad_new[j] + v);
    }

    OuterRecord rec;
    rec.outer = k + 1;
    rec.total_inner = static_cast<std::size_t>(k + 1);
    rec.f = f_new;
    rec.surrogate = f_new;
    rec.chi_norm = std::sqrt(d2);
    rec.step_norm = rec.chi_norm;
    rec.subgrad_residual = std::sqrt(t2);
    rec.descent_ok = f_new <= f + 1e-10 * (1.0 + std::abs(f));
    res.trace.records.push_back(rec);

    const bool stop = stopping_test(x.span(), xn.span(), f, f_new, cfg);
    std::swap(x, xn);
    std::swap(c, cn);
    std::swap(grad, grad_new);
    h = h_new;
    f = f_new;
    if (observer) observer(k, 0, x);
    res.outer_iters = k + 1;
    if (stop) {
      res.converged = true;
      break;
    }
  }

  res.total_inner = static_cast<std::size_t>(res.outer_iters);
  res.f_final = f;
  res.x_star = std::move(x);
  return res;
}

SolveResult solve(const SmoothTerm& smooth, const CompositePenalty& pen, const SolverConfig& cfg,
                  const Vector& x0, const IterateObserver& observer) {
  return cfg.algo == Algorithm::c2fb ? c2fb_run(smooth, pen, cfg, x0, observer)
                                     : vmfb_run(smooth, pen, cfg, x0, observer);
}

double subgradient_residual_trace(const Vector& x_next, const CompositePenalty& pen, const SmoothTerm& smooth,
                                  const Vector& v_from_prox, std::span<const double> lambda_prev) {
  const LinearOperator& W = pen.analysis();
  require_shape(W.input_shape(), v_from_prox.shape(), "subgradient_residual_trace");
  require_same_size(lambda_prev.size(), pen.terms(), "subgradient_residual_trace");
  const Vector c = W.apply(x_next);
  std::vector<double> lambda_next(pen.terms());
  pen.weights_from_coeffs(c.span(), lambda_next);
  Vector wv = W.apply(v_from_prox);
  for (std::size_t p = 0; p < wv.size(); ++p) wv[p] = lambda_next[p] * (wv[p] / lambda_prev[p]);
  const Vector reweighted = W.adjoint(wv);
  const Vector grad = smooth.gradient(x_next);
  double t2 = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) t2 += (grad[j] + reweighted[j]) * (grad[j] + reweighted[j]);
  return std::sqrt(t2);
}

}  // namespace c2fb
