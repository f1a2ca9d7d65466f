#pragma once

#include <array>
#include <memory>
#include <span>

#include "c2fb/types.hpp"

namespace c2fb {

enum class OperatorKind { identity, convolution, dwt, composition };

/// Immutable linear map between two shaped vector spaces, together with its
/// adjoint. Copies share the underlying implementation.
///
/// Boundary conditions are periodic everywhere: convolution is circular and
/// the wavelet transform uses a periodized filter bank, so every operator is
/// an exact finite-dimensional matrix with an exact adjoint.
class LinearOperator {
 public:
  class Impl;

  /// scale * I on `shape`.
  static LinearOperator identity(Shape shape, double scale = 1.0);

  /// Circular convolution of images of `shape` with `kernel`. The kernel
  /// origin sits at index ((krows-1)/2, (kcols-1)/2).
  static LinearOperator convolution(Shape shape, const Vector& kernel);

  /// Orthonormal periodized 2-D Daubechies-8 transform with `levels`
  /// decomposition levels. Extents equal to 1 are left untouched, so a
  /// {1, n} shape gives the 1-D transform.
  static LinearOperator dwt(Shape shape, int levels);

  /// outer ∘ inner.
  static LinearOperator compose(LinearOperator outer, LinearOperator inner);

  LinearOperator();

  OperatorKind kind() const;
  Shape input_shape() const;
  Shape output_shape() const;

  /// True for maps with orthonormal columns and rows (unit identity, DWT and
  /// compositions thereof).
  bool is_orthonormal() const;
  /// True for the unscaled identity.
  bool is_unit_identity() const;

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

  /// Allocation-free variants. `out` must not alias `in`.
  void apply(std::span<const double> in, std::span<double> out) const;
  void adjoint(std::span<const double> in, std::span<double> out) const;

  const Impl& impl() const { return *impl_; }

 private:
  explicit LinearOperator(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

class LinearOperator::Impl {
 public:
  virtual ~Impl() = default;
  virtual OperatorKind kind() const = 0;
  virtual Shape input_shape() const = 0;
  virtual Shape output_shape() const = 0;
  virtual bool orthonormal() const = 0;
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
  virtual void adjoint(std::span<const double> in, std::span<double> out) const = 0;
};

/// Scale factor of an identity operator; NaN for every other kind.
double identity_scale(const LinearOperator& op);

/// Kernel of a convolution operator; throws for other kinds.
const Vector& convolution_kernel(const LinearOperator& op);

// --- blur -----------------------------------------------------------------

/// Normalized motion-blur kernel: a segment of `length` pixels through the
/// kernel center at `angle_deg` counter-clockwise from the horizontal axis.
Vector motion_blur_kernel(int length, double angle_deg);

LinearOperator make_motion_blur(int length, double angle_deg, Shape image_shape);

// --- wavelets -------------------------------------------------------------

/// Daubechies orthonormal low-pass filter with 8 vanishing moments (16 taps),
/// normalized so that the taps sum to sqrt(2).
const std::array<double, 16>& db8_lowpass();

Vector dwt_forward(const Vector& x, int levels);
Vector dwt_inverse(const Vector& coeffs, int levels);

// --- spectral norm --------------------------------------------------------

inline constexpr double kNormSafetyFactor = 1.01;

struct NormEstimate {
  double value = 0.0;     // safety-scaled estimate of ||op||^2
  double raw = 0.0;       // power-iteration eigenvalue of op^T op
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on op^T op from a deterministic start vector.
NormEstimate operator_norm_sq(const LinearOperator& op, double tol = 1e-6, int max_iters = 1000);

}  // namespace c2fb
