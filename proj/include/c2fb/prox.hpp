#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "c2fb/penalty.hpp"
#include "c2fb/types.hpp"

namespace c2fb {

/// Diagonal positive-definite metric A = Diag(a) with recorded bounds
/// lower <= a_n <= upper.
class Metric {
 public:
  Metric() = default;
  explicit Metric(std::vector<double> diag);

  static Metric scalar(std::size_t n, double value);

  const std::vector<double>& diag() const noexcept { return diag_; }
  std::size_t size() const noexcept { return diag_.size(); }
  double operator[](std::size_t i) const { return diag_[i]; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  /// All entries equal up to a relative 1e-12.
  bool is_scalar() const noexcept;

  /// Metric with every entry multiplied by s > 0.
  Metric scaled(double s) const;

  /// ||v||_A = sqrt(sum a_n v_n^2).
  double norm(std::span<const double> v) const;

 private:
  std::vector<double> diag_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

struct ProxStats {
  std::size_t newton_iterations = 0;
  std::size_t bisection_fallbacks = 0;
};

inline constexpr double kNewtonTol = 1e-12;
inline constexpr int kNewtonMaxIters = 100;

// Scalar kernels: each returns argmin_t  penalty(t) + (a/2)(t - x)^2.
namespace prox1d {

double soft_threshold(double x, double lambda, double a);
double weighted_sq(double x, double lambda, double a);
/// penalty(t) = theta * log(|t| + eps). Ties between 0 and the nonzero
/// stationary point resolve to the nonzero point.
double logsum(double x, double theta, double epsilon, double a);
/// penalty(t) = theta * |t|^rho, 0 < rho < 1.
double lrho(double x, double theta, double rho, double a, double tol = kNewtonTol,
            int max_iters = kNewtonMaxIters, ProxStats* stats = nullptr);

}  // namespace prox1d

// Coordinate-wise proximity operators. `a` already includes any 1/gamma
// step scaling. `out` may alias `x`.
void prox_weighted_l1(std::span<const double> x, std::span<const double> lambda, const Metric& a,
                      std::span<double> out);
void prox_weighted_sq(std::span<const double> x, std::span<const double> lambda, const Metric& a,
                      std::span<double> out);
void prox_logsum(std::span<const double> x, double theta, double epsilon, const Metric& a,
                 std::span<double> out);
void prox_lrho(std::span<const double> x, double theta, double rho, const Metric& a, std::span<double> out,
               double newton_tol = kNewtonTol, int newton_max = kNewtonMaxIters, ProxStats* stats = nullptr);

Vector prox_weighted_l1(const Vector& x, const WeightVector& w, const Metric& a);
Vector prox_weighted_sq(const Vector& x, const WeightVector& w, const Metric& a);
Vector prox_logsum(const Vector& x, double theta, double epsilon, const Metric& a);
Vector prox_lrho(const Vector& x, double theta, double rho, const Metric& a, double newton_tol = kNewtonTol,
                 int newton_max = kNewtonMaxIters, ProxStats* stats = nullptr);

struct SubgradientResidual {
  double residual = 0.0;
  Vector v;
};

/// From x_out = prox^{a}_{l}(x_in - a^{-1} grad), the prox optimality identity
/// gives v = a (x_in - x_out) - grad in the subdifferential of l at x_out.
/// Returns v and ||grad + v||.
SubgradientResidual prox_subgradient_residual(const Vector& x_in, const Vector& x_out, const Metric& a,
                                              const Vector& grad_at_anchor);

}  // namespace c2fb
