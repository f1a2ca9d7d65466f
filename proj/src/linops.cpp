#include <algorithm>
#include <cmath>
#include <limits>

#include "c2fb/linops.hpp"
#include "detail.hpp"

namespace c2fb {
namespace {

class IdentityOp final : public LinearOperator::Impl {
 public:
  IdentityOp(Shape shape, double scale) : shape_(shape), scale_(scale) {}

  OperatorKind kind() const override { return OperatorKind::identity; }
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  bool orthonormal() const override { return std::abs(scale_) == 1.0; }
  double scale() const { return scale_; }

  void apply(std::span<const double> in, std::span<double> out) const override {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = scale_ * in[i];
  }
  void adjoint(std::span<const double> in, std::span<double> out) const override { apply(in, out); }

 private:
  Shape shape_;
  double scale_;
};

// Circular convolution stored as a list of nonzero taps with offsets relative
// to the kernel origin: out(i, j) = sum_t w_t * in(i - dr_t, j - dc_t).
class ConvolutionOp final : public LinearOperator::Impl {
 public:
  ConvolutionOp(Shape shape, Vector kernel) : shape_(shape), kernel_(std::move(kernel)) {
    const auto& ks = kernel_.shape();
    if (ks.rows == 0 || ks.cols == 0) {
      throw Error(ErrorCode::invalid_argument, "convolution kernel is empty");
    }
    if (ks.rows > shape_.rows || ks.cols > shape_.cols) {
      throw Error(ErrorCode::dimension, "convolution kernel " + to_string(ks) +
                                            " larger than image " + to_string(shape_));
    }
    if (!kernel_.all_finite()) {
      throw Error(ErrorCode::invalid_argument, "convolution kernel has non-finite entries");
    }
    const auto r0 = static_cast<long>((ks.rows - 1) / 2);
    const auto c0 = static_cast<long>((ks.cols - 1) / 2);
    for (std::size_t r = 0; r < ks.rows; ++r) {
      for (std::size_t c = 0; c < ks.cols; ++c) {
        const double w = kernel_.at(r, c);
        if (w != 0.0) taps_.push_back({static_cast<long>(r) - r0, static_cast<long>(c) - c0, w});
      }
    }
  }

  OperatorKind kind() const override { return OperatorKind::convolution; }
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  bool orthonormal() const override { return false; }
  const Vector& kernel() const { return kernel_; }

  void apply(std::span<const double> in, std::span<double> out) const override {
    accumulate(in, out, +1);
  }
  void adjoint(std::span<const double> in, std::span<double> out) const override {
    accumulate(in, out, -1);
  }

 private:
  struct Tap {
    long dr;
    long dc;
    double w;
  };

  static std::size_t wrap(long v, std::size_t n) {
    const long m = static_cast<long>(n);
    long r = v % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
  }

  // sign=+1: out(i,j) += w in(i-dr, j-dc); sign=-1 (adjoint): out(i,j) += w in(i+dr, j+dc).
  void accumulate(std::span<const double> in, std::span<double> out, int sign) const {
    const std::size_t rows = shape_.rows;
    const std::size_t cols = shape_.cols;
    std::fill(out.begin(), out.end(), 0.0);
    for (const Tap& t : taps_) {
      const std::size_t shift_c = wrap(-sign * t.dc, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t src_r = wrap(static_cast<long>(i) - sign * t.dr, rows);
        const double* src = in.data() + src_r * cols;
        double* dst = out.data() + i * cols;
        // src column = (j + shift_c) mod cols, split into two contiguous runs.
        const std::size_t first = cols - shift_c;
        for (std::size_t j = 0; j < first; ++j) dst[j] += t.w * src[j + shift_c];
        for (std::size_t j = first; j < cols; ++j) dst[j] += t.w * src[j - first];
      }
    }
  }

  Shape shape_;
  Vector kernel_;
  std::vector<Tap> taps_;
};

class CompositionOp final : public LinearOperator::Impl {
 public:
  CompositionOp(LinearOperator outer, LinearOperator inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {
    require_shape(outer_.input_shape(), inner_.output_shape(), "compose");
  }

  OperatorKind kind() const override { return OperatorKind::composition; }
  Shape input_shape() const override { return inner_.input_shape(); }
  Shape output_shape() const override { return outer_.output_shape(); }
  bool orthonormal() const override { return outer_.is_orthonormal() && inner_.is_orthonormal(); }

  void apply(std::span<const double> in, std::span<double> out) const override {
    std::vector<double> mid(inner_.output_shape().size());
    inner_.apply(in, mid);
    outer_.apply(mid, out);
  }
  void adjoint(std::span<const double> in, std::span<double> out) const override {
    std::vector<double> mid(outer_.input_shape().size());
    outer_.adjoint(in, mid);
    inner_.adjoint(mid, out);
  }

 private:
  LinearOperator outer_;
  LinearOperator inner_;
};

}  // namespace

LinearOperator::LinearOperator() : LinearOperator(identity(Shape::vector(0))) {}

LinearOperator::LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

LinearOperator LinearOperator::identity(Shape shape, double scale) {
  if (!std::isfinite(scale)) throw Error(ErrorCode::invalid_argument, "identity scale must be finite");
  return LinearOperator(std::make_shared<IdentityOp>(shape, scale));
}

LinearOperator LinearOperator::convolution(Shape shape, const Vector& kernel) {
  return LinearOperator(std::make_shared<ConvolutionOp>(shape, kernel));
}

LinearOperator LinearOperator::dwt(Shape shape, int levels) {
  return LinearOperator(detail::make_dwt_impl(shape, levels));
}

LinearOperator LinearOperator::compose(LinearOperator outer, LinearOperator inner) {
  return LinearOperator(std::make_shared<CompositionOp>(std::move(outer), std::move(inner)));
}

OperatorKind LinearOperator::kind() const { return impl_->kind(); }
Shape LinearOperator::input_shape() const { return impl_->input_shape(); }
Shape LinearOperator::output_shape() const { return impl_->output_shape(); }
bool LinearOperator::is_orthonormal() const { return impl_->orthonormal(); }

bool LinearOperator::is_unit_identity() const {
  return kind() == OperatorKind::identity && identity_scale(*this) == 1.0;
}

Vector LinearOperator::apply(const Vector& x) const {
  require_shape(input_shape(), x.shape(), "apply");
  Vector y(output_shape());
  impl_->apply(x.span(), y.span());
  return y;
}

Vector LinearOperator::adjoint(const Vector& y) const {
  require_shape(output_shape(), y.shape(), "adjoint_apply");
  Vector x(input_shape());
  impl_->adjoint(y.span(), x.span());
  return x;
}

void LinearOperator::apply(std::span<const double> in, std::span<double> out) const {
  require_same_size(in.size(), input_shape().size(), "apply");
  require_same_size(out.size(), output_shape().size(), "apply");
  impl_->apply(in, out);
}

void LinearOperator::adjoint(std::span<const double> in, std::span<double> out) const {
  require_same_size(in.size(), output_shape().size(), "adjoint_apply");
  require_same_size(out.size(), input_shape().size(), "adjoint_apply");
  impl_->adjoint(in, out);
}

double identity_scale(const LinearOperator& op) {
  if (const auto* id = dynamic_cast<const IdentityOp*>(&op.impl())) return id->scale();
  return std::numeric_limits<double>::quiet_NaN();
}

const Vector& convolution_kernel(const LinearOperator& op) {
  if (const auto* conv = dynamic_cast<const ConvolutionOp*>(&op.impl())) return conv->kernel();
  throw Error(ErrorCode::unsupported, "operator is not a convolution");
}

LinearOperator make_motion_blur(int length, double angle_deg, Shape image_shape) {
  return LinearOperator::convolution(image_shape, motion_blur_kernel(length, angle_deg));
}

NormEstimate operator_norm_sq(const LinearOperator& op, double tol, int max_iters) {
  const std::size_t n = op.input_shape().size();
  NormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  // All-ones start with a small deterministic perturbation so that neither
  // the constant mode nor its complement is missed.
  std::vector<double> v(n), av(op.output_shape().size()), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  double vn = norm(v);
  for (double& e : v) e /= vn;

  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    op.apply(v, av);
    op.adjoint(av, w);
    const double next = dot(v, w);  // Rayleigh quotient, ||v|| = 1
    const double wn = norm(w);
    est.iterations = it;
    if (wn == 0.0) {
      lambda = 0.0;
      est.converged = true;
      break;
    }
    const bool done = it > 1 && std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (done) {
      est.converged = true;
      break;
    }
  }
  est.raw = lambda;
  est.value = kNormSafetyFactor * lambda;
  return est;
}

}  // namespace c2fb
