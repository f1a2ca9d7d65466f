#include "c2fb/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c2fb {

Metric::Metric(std::vector<double> diag) : diag_(std::move(diag)) {
  if (diag_.empty()) return;
  lower_ = *std::min_element(diag_.begin(), diag_.end());
  upper_ = *std::max_element(diag_.begin(), diag_.end());
  if (!(lower_ > 0.0) || !std::isfinite(upper_)) {
    throw Error(ErrorCode::invalid_argument, "metric entries must be positive and finite");
  }
}

Metric Metric::scalar(std::size_t n, double value) { return Metric(std::vector<double>(n, value)); }

bool Metric::is_scalar() const noexcept { return upper_ - lower_ <= 1e-12 * upper_; }

Metric Metric::scaled(double s) const {
  std::vector<double> d = diag_;
  for (double& v : d) v *= s;
  return Metric(std::move(d));
}

double Metric::norm(std::span<const double> v) const {
  require_same_size(v.size(), diag_.size(), "metric norm");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += diag_[i] * v[i] * v[i];
  return std::sqrt(s);
}

namespace prox1d {

double soft_threshold(double x, double lambda, double a) {
  const double mag = std::abs(x) - lambda / a;
  return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

double weighted_sq(double x, double lambda, double a) { return a * x / (a + 2.0 * lambda); }

double logsum(double x, double theta, double epsilon, double a) {
  const double s = std::abs(x);
  if (s == 0.0) return 0.0;
  // Stationarity on t > 0: t^2 - (s - eps) t + (theta/a - eps s) = 0.
  const double b = s - epsilon;
  const double c = theta / a - epsilon * s;
  const double disc = (s + epsilon) * (s + epsilon) - 4.0 * theta / a;
  if (disc < 0.0) return 0.0;
  const double root = std::sqrt(disc);
  const double t = b >= 0.0 ? 0.5 * (b + root) : (b - root != 0.0 ? 2.0 * c / (b - root) : 0.0);
  if (!(t > 0.0)) return 0.0;
  // F(t) - F(0), written to avoid cancellation for small t / eps.
  const double gain = theta * std::log1p(t / epsilon) + 0.5 * a * t * (t - 2.0 * s);
  return gain <= 0.0 ? std::copysign(t, x) : 0.0;
}

double lrho(double x, double theta, double rho, double a, double tol, int max_iters, ProxStats* stats) {
  const double s = std::abs(x);
  if (s == 0.0) return 0.0;
  auto dF = [&](double t) { return theta * rho * std::pow(t, rho - 1.0) + a * (t - s); };
  auto d2F = [&](double t) { return theta * rho * (rho - 1.0) * std::pow(t, rho - 2.0) + a; };

  // dF is decreasing on (0, t_inf) and increasing beyond, so an interior
  // minimizer exists only if dF(t_inf) < 0, and then lies in (t_inf, s).
  const double t_inf = std::pow(theta * rho * (1.0 - rho) / a, 1.0 / (2.0 - rho));
  if (t_inf >= s || dF(t_inf) >= 0.0) return 0.0;

  double lo = t_inf, hi = s;
  double t = s;
  const double scale = a * s;
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    const double f = dF(t);
    if (stats) ++stats->newton_iterations;
    if (std::abs(f) <= tol * scale) {
      converged = true;
      break;
    }
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / d2F(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * t) {
      t = next;
      converged = true;
      break;
    }
    t = next;
  }
  if (!converged) {
    if (stats) ++stats->bisection_fallbacks;
    lo = t_inf;
    hi = s;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (dF(mid) > 0.0) hi = mid; else lo = mid;
    }
    t = 0.5 * (lo + hi);
  }
  const double gain = theta * std::pow(t, rho) + 0.5 * a * t * (t - 2.0 * s);
  return gain <= 0.0 ? std::copysign(t, x) : 0.0;
}

}  // namespace prox1d

namespace {

void check_sizes(std::size_t n, std::size_t metric, std::size_t out, const char* what) {
  require_same_size(n, metric, what);
  require_same_size(n, out, what);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

void prox_weighted_l1(std::span<const double> x, std::span<const double> lambda, const Metric& a,
                      std::span<double> out) {
  check_sizes(x.size(), a.size(), out.size(), "prox_weighted_l1");
  require_same_size(x.size(), lambda.size(), "prox_weighted_l1");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = prox1d::soft_threshold(x[i], lambda[i], a[i]);
}

void prox_weighted_sq(std::span<const double> x, std::span<const double> lambda, const Metric& a,
                      std::span<double> out) {
  check_sizes(x.size(), a.size(), out.size(), "prox_weighted_sq");
  require_same_size(x.size(), lambda.size(), "prox_weighted_sq");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = prox1d::weighted_sq(x[i], lambda[i], a[i]);
}

void prox_logsum(std::span<const double> x, double theta, double epsilon, const Metric& a,
                 std::span<double> out) {
  check_sizes(x.size(), a.size(), out.size(), "prox_logsum");
  check_positive(theta, "prox_logsum theta");
  check_positive(epsilon, "prox_logsum epsilon");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = prox1d::logsum(x[i], theta, epsilon, a[i]);
}

void prox_lrho(std::span<const double> x, double theta, double rho, const Metric& a, std::span<double> out,
               double newton_tol, int newton_max, ProxStats* stats) {
  check_sizes(x.size(), a.size(), out.size(), "prox_lrho");
  check_positive(theta, "prox_lrho theta");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::invalid_argument, "prox_lrho: rho must lie in (0, 1)");
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = prox1d::lrho(x[i], theta, rho, a[i], newton_tol, newton_max, stats);
  }
}

Vector prox_weighted_l1(const Vector& x, const WeightVector& w, const Metric& a) {
  Vector out(x.shape());
  prox_weighted_l1(x.span(), w.lambda, a, out.span());
  return out;
}

Vector prox_weighted_sq(const Vector& x, const WeightVector& w, const Metric& a) {
  Vector out(x.shape());
  prox_weighted_sq(x.span(), w.lambda, a, out.span());
  return out;
}

Vector prox_logsum(const Vector& x, double theta, double epsilon, const Metric& a) {
  Vector out(x.shape());
  prox_logsum(x.span(), theta, epsilon, a, out.span());
  return out;
}

Vector prox_lrho(const Vector& x, double theta, double rho, const Metric& a, double newton_tol, int newton_max,
                 ProxStats* stats) {
  Vector out(x.shape());
  prox_lrho(x.span(), theta, rho, a, out.span(), newton_tol, newton_max, stats);
  return out;
}

SubgradientResidual prox_subgradient_residual(const Vector& x_in, const Vector& x_out, const Metric& a,
                                              const Vector& grad_at_anchor) {
  require_shape(x_in.shape(), x_out.shape(), "prox_subgradient_residual");
  require_shape(x_in.shape(), grad_at_anchor.shape(), "prox_subgradient_residual");
  require_same_size(x_in.size(), a.size(), "prox_subgradient_residual");
  SubgradientResidual r{0.0, Vector(x_in.shape())};
  double s = 0.0;
  for (std::size_t i = 0; i < x_in.size(); ++i) {
    r.v[i] = a[i] * (x_in[i] - x_out[i]) - grad_at_anchor[i];
    const double t = grad_at_anchor[i] + r.v[i];
    s += t * t;
  }
  r.residual = std::sqrt(s);
  return r;
}

}  // namespace c2fb
