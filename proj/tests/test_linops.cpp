#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "c2fb/linops.hpp"
#include "oracles.hpp"

using namespace c2fb;

namespace {

Vector rand_vec(Shape s, std::mt19937_64& eng) { return Vector(s, oracle::random_values(s.size(), eng)); }

double adjoint_gap(const LinearOperator& op, std::mt19937_64& eng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vector x = rand_vec(op.input_shape(), eng), y = rand_vec(op.output_shape(), eng);
    const Vector ax = op.apply(x);
    const double gap = std::abs(dot(ax.span(), y.span()) - dot(x.span(), op.adjoint(y).span()));
    worst = std::max(worst, gap / (norm(ax.span()) * norm(y.span()) + 1.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("identity leaves vectors unchanged") {
  const Vector x = Vector::from_values({1, 2, 3});
  const LinearOperator id = LinearOperator::identity(x.shape());
  CHECK(id.apply(x).values() == x.values());
  CHECK(id.adjoint(x).values() == x.values());
  CHECK(id.is_unit_identity());
  CHECK(id.is_orthonormal());
  CHECK_FALSE(LinearOperator::identity(x.shape(), 2.0).is_orthonormal());
}

TEST_CASE("delta kernel convolution is the identity") {
  std::mt19937_64 eng(1);
  const Shape s = Shape::image(8, 6);
  const Vector x = rand_vec(s, eng);
  const LinearOperator H = LinearOperator::convolution(s, Vector(Shape{1, 1}, 1.0));
  CHECK(H.apply(x).values() == x.values());
}

TEST_CASE("two-tap periodic convolution matches direct summation") {
  const Vector k(Shape{1, 2}, std::vector<double>{0.5, 0.5});
  const Vector x = Vector::from_values({1, 0, 0, 0});
  const Vector y = LinearOperator::convolution(x.shape(), k).apply(x);
  const auto ref = oracle::convolve(x.values(), 1, 4, k.values(), 1, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-15));
  // 0.5 lands on two adjacent indices
  CHECK(y[0] == 0.5);
  CHECK(y[1] == 0.5);
  CHECK(y[2] == 0.0);
  CHECK(y[3] == 0.0);
}

TEST_CASE("2-D convolution matches direct summation for odd and even kernels") {
  std::mt19937_64 eng(2);
  const Shape s = Shape::image(9, 7);
  const std::vector<std::pair<std::size_t, std::size_t>> sizes{{3, 3}, {5, 2}, {4, 4}, {1, 5}};
  for (auto [kr, kc] : sizes) {
    const Vector k(Shape{kr, kc}, oracle::random_values(kr * kc, eng));
    const Vector x = rand_vec(s, eng);
    const Vector y = LinearOperator::convolution(s, k).apply(x);
    const auto ref = oracle::convolve(x.values(), s.rows, s.cols, k.values(), kr, kc);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("adjoint identity holds for every operator kind") {
  std::mt19937_64 eng(3);
  const Shape s = Shape::image(16, 16);
  const LinearOperator blur = make_motion_blur(5, 60.0, s);
  const LinearOperator W = LinearOperator::dwt(s, 3);
  CHECK(adjoint_gap(LinearOperator::identity(s, 0.7), eng) <= 1e-10);
  CHECK(adjoint_gap(blur, eng) <= 1e-10);
  CHECK(adjoint_gap(LinearOperator::convolution(s, Vector(Shape{3, 4}, oracle::random_values(12, eng))), eng) <=
        1e-10);
  CHECK(adjoint_gap(W, eng) <= 1e-10);
  CHECK(adjoint_gap(LinearOperator::compose(W, blur), eng) <= 1e-10);
  CHECK(adjoint_gap(LinearOperator::dwt(Shape::vector(32), 2), eng) <= 1e-10);
}

TEST_CASE("adjoint of a convolution is convolution with the reversed kernel") {
  std::mt19937_64 eng(4);
  const Shape s = Shape::image(8, 8);
  const std::vector<double> k = oracle::random_values(9, eng);
  std::vector<double> rev(k.rbegin(), k.rend());
  const Vector y = rand_vec(s, eng);
  const Vector got = LinearOperator::convolution(s, Vector(Shape{3, 3}, k)).adjoint(y);
  const auto ref = oracle::convolve(y.values(), 8, 8, rev, 3, 3);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("shape mismatches raise dimension errors") {
  const LinearOperator W = LinearOperator::dwt(Shape::image(16, 16), 2);
  try {
    W.apply(Vector(Shape::image(8, 8)));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension);
  }
  CHECK_THROWS_AS(LinearOperator::compose(W, LinearOperator::identity(Shape::image(8, 8))), Error);
}

TEST_CASE("db8 filter is orthonormal with eight vanishing moments") {
  const auto& h = db8_lowpass();
  CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (int shift = 0; shift < 8; ++shift) {
    double s = 0.0;
    for (int n = 0; n + 2 * shift < 16; ++n) s += h[n] * h[n + 2 * shift];
    CHECK(s == doctest::Approx(shift == 0 ? 1.0 : 0.0).epsilon(1e-13).scale(1.0));
  }
  // highpass g[n] = (-1)^n h[15-n] annihilates polynomials of degree < 8
  for (int m = 0; m < 8; ++m) {
    double s = 0.0, scale = 0.0;
    for (int n = 0; n < 16; ++n) {
      const double g = (n % 2 ? -1.0 : 1.0) * h[15 - n];
      s += g * std::pow(n, m);
      scale += std::abs(g) * std::pow(n, m);
    }
    CHECK(std::abs(s) <= 1e-9 * scale);
  }
}

TEST_CASE("dwt annihilates constants in every detail band") {
  const Shape s = Shape::image(32, 32);
  const Vector c = dwt_forward(Vector(s, 3.25), 4);
  // the coarse approximation occupies the top-left 2x2 block
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = 0; j < s.cols; ++j) {
      if (i < 2 && j < 2) {
        CHECK(c.at(i, j) == doctest::Approx(3.25 * 16.0).epsilon(1e-12));
      } else {
        REQUIRE(std::abs(c.at(i, j)) <= 1e-10);
      }
    }
}

TEST_CASE("dwt is an isometry with perfect reconstruction") {
  std::mt19937_64 eng(5);
  for (Shape s : {Shape::image(32, 32), Shape::image(64, 16), Shape::vector(128)}) {
    for (int levels : {1, 2, 4}) {
      const Vector x = rand_vec(s, eng);
      const Vector c = dwt_forward(x, levels);
      CHECK(std::abs(norm(c.span()) - norm(x.span())) <= 1e-10 * norm(x.span()));
      CHECK(distance(dwt_inverse(c, levels).span(), x.span()) <= 1e-10);
      const Vector coeffs = rand_vec(s, eng);
      CHECK(distance(dwt_forward(dwt_inverse(coeffs, levels), levels).span(), coeffs.span()) <= 1e-10);
    }
  }
}

TEST_CASE("dwt inverse of zero and of unit coefficients") {
  const Shape s = Shape::image(32, 32);
  const Vector z = dwt_inverse(Vector(s), 4);
  CHECK(norm(z.span()) == 0.0);
  for (std::size_t idx : {std::size_t{0}, std::size_t{5}, std::size_t{37}, std::size_t{1023}}) {
    Vector e(s);
    e[idx] = 1.0;
    CHECK(norm(dwt_inverse(e, 4).span()) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("dwt rejects indivisible shapes") {
  try {
    dwt_forward(Vector(Shape::image(24, 32)), 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension);
  }
  CHECK_THROWS_AS(LinearOperator::dwt(Shape::image(32, 32), 0), Error);
}

TEST_CASE("motion blur kernels") {
  SUBCASE("length 1 is the delta kernel") {
    for (double angle : {0.0, 45.0, 60.0, 170.0}) {
      const Vector k = motion_blur_kernel(1, angle);
      REQUIRE(k.size() == 1);
      CHECK(k[0] == 1.0);
    }
  }
  SUBCASE("horizontal length 5") {
    const Vector k = motion_blur_kernel(5, 0.0);
    REQUIRE(k.shape() == Shape::image(1, 5));
    for (std::size_t i = 0; i < 5; ++i) CHECK(k[i] == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("length 5 at 60 degrees") {
    const Vector k = motion_blur_kernel(5, 60.0);
    CHECK(k.shape().rows <= 5);
    CHECK(k.shape().cols <= 5);
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(k[i] >= 0.0);
      s += k[i];
    }
    CHECK(s == 1.0);
    // regression snapshot of the rasterizer (rows run downward, so the
    // segment rises to the right)
    const std::vector<double> golden{0, 0, 0.15,   0,    0.0875, 0.15, 0, 0.225,
                                     0, 0.15, 0.0875, 0, 0.15, 0,      0};
    REQUIRE(k.shape() == Shape::image(5, 3));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == doctest::Approx(golden[i]).epsilon(1e-14));
  }
  SUBCASE("normalization is exact for assorted lengths and angles") {
    for (int len = 1; len <= 9; ++len)
      for (double angle = 0.0; angle < 180.0; angle += 7.5) {
        const Vector k = motion_blur_kernel(len, angle);
        double s = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
          REQUIRE(k[i] >= 0.0);
          s += k[i];
        }
        REQUIRE(s == 1.0);
      }
  }
  CHECK_THROWS_AS(motion_blur_kernel(0, 0.0), Error);
}

TEST_CASE("power iteration") {
  CHECK(operator_norm_sq(LinearOperator::identity(Shape::image(8, 8))).value == doctest::Approx(1.01).epsilon(1e-12));
  CHECK(operator_norm_sq(LinearOperator::identity(Shape::image(8, 8), 3.0)).value ==
        doctest::Approx(9.09).epsilon(1e-12));
  std::mt19937_64 eng(6);
  const Shape s = Shape::image(16, 16);
  SUBCASE("circulant blur matches the DFT oracle") {
    const Vector k = motion_blur_kernel(5, 60.0);
    const NormEstimate est = operator_norm_sq(LinearOperator::convolution(s, k));
    const double exact = oracle::circulant_norm_sq(k.values(), k.shape().rows, k.shape().cols, 16, 16);
    CHECK(est.converged);
    CHECK(std::abs(est.raw - exact) <= 1e-6 * exact);
    CHECK(est.value >= exact);
  }
  SUBCASE("random kernels") {
    for (int t = 0; t < 3; ++t) {
      const Vector k(Shape{3, 3}, oracle::random_values(9, eng));
      const NormEstimate est = operator_norm_sq(LinearOperator::convolution(s, k), 1e-10, 20000);
      const double exact = oracle::circulant_norm_sq(k.values(), 3, 3, 16, 16);
      CHECK(std::abs(est.raw - exact) <= 1e-6 * exact);
      CHECK(est.value >= exact);
    }
  }
}
