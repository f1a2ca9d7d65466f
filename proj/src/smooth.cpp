#include "c2fb/smooth.hpp"

#include <cmath>

namespace c2fb {

SmoothTerm::SmoothTerm(LinearOperator H, Vector y) : H_(std::move(H)), y_(std::move(y)) {
  require_shape(H_.output_shape(), y_.shape(), "smooth term observation");
  const NormEstimate est = operator_norm_sq(H_);
  mu_ = est.value;
  mu_converged_ = est.converged;
  if (!(mu_ > 0.0)) throw Error(ErrorCode::invalid_argument, "smooth term: H must be nonzero");
}

SmoothTerm::SmoothTerm(LinearOperator H, Vector y, double lipschitz)
    : H_(std::move(H)), y_(std::move(y)), mu_(lipschitz) {
  require_shape(H_.output_shape(), y_.shape(), "smooth term observation");
  if (!(mu_ > 0.0) || !std::isfinite(mu_)) {
    throw Error(ErrorCode::invalid_argument, "smooth term: Lipschitz constant must be positive");
  }
}

double SmoothTerm::value(const Vector& x) const {
  const Vector r = H_.apply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - y_[i];
    s += d * d;
  }
  return 0.5 * s;
}

Vector SmoothTerm::gradient(const Vector& x) const {
  require_shape(H_.input_shape(), x.shape(), "h_grad");
  Vector g(x.shape());
  std::vector<double> scratch;
  value_and_gradient(x.span(), g.span(), scratch);
  return g;
}

double SmoothTerm::value_and_gradient(std::span<const double> x, std::span<double> grad,
                                      std::vector<double>& scratch) const {
  scratch.resize(y_.size());
  H_.apply(x, scratch);
  double s = 0.0;
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    scratch[i] -= y_[i];
    s += scratch[i] * scratch[i];
  }
  H_.adjoint(scratch, grad);
  return 0.5 * s;
}

Metric SmoothTerm::metric(MetricPolicy policy) const {
  const std::size_t n = dim();
  if (policy == MetricPolicy::scalar) return Metric::scalar(n, mu_);
  std::vector<double> a = gershgorin_row_sums(H_);
  const double floor = 1e-8 * mu_;
  for (double& v : a) v = std::max(v, floor);
  return Metric(std::move(a));
}

std::vector<double> gershgorin_row_sums(const LinearOperator& H) {
  const std::size_t n = H.input_shape().size();
  switch (H.kind()) {
    case OperatorKind::identity: {
      const double s = identity_scale(H);
      return std::vector<double>(n, s * s);
    }
    case OperatorKind::convolution: {
      // H^T H is circulant with first row the kernel autocorrelation, so
      // every row sum is sum_m |autocorr(m)|. Offsets wrap on the image grid.
      const Vector& k = convolution_kernel(H);
      const Shape img = H.input_shape();
      const long kr = static_cast<long>(k.shape().rows), kc = static_cast<long>(k.shape().cols);
      const long R = static_cast<long>(img.rows), C = static_cast<long>(img.cols);
      std::vector<double> acf(img.size(), 0.0);
      for (long r1 = 0; r1 < kr; ++r1)
        for (long c1 = 0; c1 < kc; ++c1)
          for (long r2 = 0; r2 < kr; ++r2)
            for (long c2 = 0; c2 < kc; ++c2) {
              const long dr = ((r1 - r2) % R + R) % R;
              const long dc = ((c1 - c2) % C + C) % C;
              acf[static_cast<std::size_t>(dr * C + dc)] += k.at(r1, c1) * k.at(r2, c2);
            }
      double total = 0.0;
      for (double v : acf) total += std::abs(v);
      return std::vector<double>(n, total);
    }
    default:
      throw Error(ErrorCode::unsupported,
                  "diagonal majorant metric is only available for identity and convolution operators");
  }
}

}  // namespace c2fb
