#include <algorithm>
#include <cmath>
#include <vector>

#include "c2fb/linops.hpp"
#include "detail.hpp"

namespace c2fb {

const std::array<double, 16>& db8_lowpass() {
  // Daubechies (1992) orthonormal filter, N = 8 vanishing moments.
  static const std::array<double, 16> h = {
      0.05441584224310401,    0.31287159091429995,   0.6756307362972898,
      0.5853546836542067,     -0.015829105256349306, -0.2840155429615469,
      0.0004724845739132828,  0.12874742662047847,   -0.017369301001807547,
      -0.044088253930794755,  0.013981027917398282,  0.008746094047405777,
      -0.004870352993451574,  -0.00039174037337694705, 0.0006754494064505693,
      -0.00011747678412476953};
  return h;
}

namespace {

constexpr std::size_t kTaps = 16;

struct FilterBank {
  std::array<double, kTaps> lo;
  std::array<double, kTaps> hi;

  FilterBank() : lo(db8_lowpass()) {
    // Quadrature mirror: g[n] = (-1)^n h[L-1-n].
    for (std::size_t n = 0; n < kTaps; ++n) {
      hi[n] = ((n % 2 == 0) ? 1.0 : -1.0) * lo[kTaps - 1 - n];
    }
  }
};

const FilterBank& bank() {
  static const FilterBank fb;
  return fb;
}

// One periodized analysis step on a strided line of even length m:
//   a[k] = sum_n lo[n] x[(2k+n) mod m],  d[k] = sum_n hi[n] x[(2k+n) mod m]
// Output layout is [a | d].
void analyze_line(double* base, std::size_t stride, std::size_t m, std::vector<double>& in,
                  std::vector<double>& out) {
  const auto& fb = bank();
  in.resize(m);
  out.resize(m);
  for (std::size_t i = 0; i < m; ++i) in[i] = base[i * stride];
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    std::size_t idx = (2 * k) % m;
    for (std::size_t n = 0; n < kTaps; ++n) {
      const double v = in[idx];
      a += fb.lo[n] * v;
      d += fb.hi[n] * v;
      if (++idx == m) idx = 0;
    }
    out[k] = a;
    out[half + k] = d;
  }
  for (std::size_t i = 0; i < m; ++i) base[i * stride] = out[i];
}

// Transpose of analyze_line; equal to its inverse because the bank is orthonormal.
void synthesize_line(double* base, std::size_t stride, std::size_t m, std::vector<double>& in,
                     std::vector<double>& out) {
  const auto& fb = bank();
  in.resize(m);
  out.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) in[i] = base[i * stride];
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double a = in[k];
    const double d = in[half + k];
    std::size_t idx = (2 * k) % m;
    for (std::size_t n = 0; n < kTaps; ++n) {
      out[idx] += fb.lo[n] * a + fb.hi[n] * d;
      if (++idx == m) idx = 0;
    }
  }
  for (std::size_t i = 0; i < m; ++i) base[i * stride] = out[i];
}

void check_levels(Shape shape, int levels) {
  if (levels < 1) throw Error(ErrorCode::invalid_argument, "dwt levels must be positive");
  const std::size_t block = std::size_t{1} << levels;
  for (std::size_t extent : {shape.rows, shape.cols}) {
    if (extent != 1 && (extent == 0 || extent % block != 0)) {
      throw Error(ErrorCode::dimension, "dwt: shape " + to_string(shape) + " not divisible by 2^" +
                                            std::to_string(levels));
    }
  }
  if (shape.rows == 1 && shape.cols == 1) {
    throw Error(ErrorCode::dimension, "dwt: shape (1x1) has nothing to transform");
  }
}

// Mallat layout: level l acts on the top-left (rows >> l) x (cols >> l) block.
void forward_inplace(std::span<double> x, Shape shape, int levels) {
  std::vector<double> in, out;
  std::size_t r = shape.rows, c = shape.cols;
  for (int l = 0; l < levels; ++l) {
    if (c > 1) {
      for (std::size_t i = 0; i < r; ++i) analyze_line(x.data() + i * shape.cols, 1, c, in, out);
    }
    if (r > 1) {
      for (std::size_t j = 0; j < c; ++j) analyze_line(x.data() + j, shape.cols, r, in, out);
    }
    if (r > 1) r /= 2;
    if (c > 1) c /= 2;
  }
}

void inverse_inplace(std::span<double> x, Shape shape, int levels) {
  std::vector<double> in, out;
  for (int l = levels - 1; l >= 0; --l) {
    const std::size_t r = shape.rows > 1 ? shape.rows >> l : 1;
    const std::size_t c = shape.cols > 1 ? shape.cols >> l : 1;
    if (r > 1) {
      for (std::size_t j = 0; j < c; ++j) synthesize_line(x.data() + j, shape.cols, r, in, out);
    }
    if (c > 1) {
      for (std::size_t i = 0; i < r; ++i) synthesize_line(x.data() + i * shape.cols, 1, c, in, out);
    }
  }
}

class DwtOp final : public LinearOperator::Impl {
 public:
  DwtOp(Shape shape, int levels) : shape_(shape), levels_(levels) { check_levels(shape, levels); }

  OperatorKind kind() const override { return OperatorKind::dwt; }
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  bool orthonormal() const override { return true; }

  void apply(std::span<const double> in, std::span<double> out) const override {
    std::copy(in.begin(), in.end(), out.begin());
    forward_inplace(out, shape_, levels_);
  }
  void adjoint(std::span<const double> in, std::span<double> out) const override {
    std::copy(in.begin(), in.end(), out.begin());
    inverse_inplace(out, shape_, levels_);
  }

 private:
  Shape shape_;
  int levels_;
};

}  // namespace

namespace detail {
std::shared_ptr<const LinearOperator::Impl> make_dwt_impl(Shape shape, int levels) {
  return std::make_shared<DwtOp>(shape, levels);
}
}  // namespace detail

Vector dwt_forward(const Vector& x, int levels) {
  check_levels(x.shape(), levels);
  Vector out = x;
  forward_inplace(out.span(), out.shape(), levels);
  return out;
}

Vector dwt_inverse(const Vector& coeffs, int levels) {
  check_levels(coeffs.shape(), levels);
  Vector out = coeffs;
  inverse_inplace(out.span(), out.shape(), levels);
  return out;
}

}  // namespace c2fb
