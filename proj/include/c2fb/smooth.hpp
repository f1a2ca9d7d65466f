#pragma once

#include <span>
#include <vector>

#include "c2fb/linops.hpp"
#include "c2fb/prox.hpp"
#include "c2fb/types.hpp"

namespace c2fb {

enum class MetricPolicy { scalar, diagonal_majorant };

/// h(x) = 1/2 ||Hx - y||^2 with cached Lipschitz bound mu >= ||H||^2.
class SmoothTerm {
 public:
  SmoothTerm(LinearOperator H, Vector y);
  /// Uses a caller-supplied Lipschitz bound instead of power iteration.
  SmoothTerm(LinearOperator H, Vector y, double lipschitz);

  const LinearOperator& op() const noexcept { return H_; }
  const Vector& observation() const noexcept { return y_; }
  double lipschitz() const noexcept { return mu_; }
  bool lipschitz_converged() const noexcept { return mu_converged_; }
  std::size_t dim() const { return H_.input_shape().size(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Returns h(x) and writes grad h(x); allocation-free given scratch of
  /// output size.
  double value_and_gradient(std::span<const double> x, std::span<double> grad,
                            std::vector<double>& scratch) const;

  /// scalar: A = mu I. diagonal_majorant: a_n = sum_m |[H^T H]_{nm}|,
  /// floored at 1e-8 mu.
  Metric metric(MetricPolicy policy) const;

 private:
  LinearOperator H_;
  Vector y_;
  double mu_ = 0.0;
  bool mu_converged_ = true;
};

/// Row sums of |H^T H| for the operator kinds where they are cheap to form.
std::vector<double> gershgorin_row_sums(const LinearOperator& H);

}  // namespace c2fb
