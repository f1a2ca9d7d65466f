#include <doctest.h>

#include <cmath>
#include <random>

#include "c2fb/smooth.hpp"
#include "oracles.hpp"

using namespace c2fb;

namespace {

Vector rand_vec(Shape s, std::mt19937_64& eng, double scale = 1.0) {
  return Vector(s, oracle::random_values(s.size(), eng, scale));
}

double majorization_gap(const SmoothTerm& h, const Metric& A, const Vector& x, const Vector& xt) {
  const Vector g = h.gradient(xt);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - xt[i];
  const double ub = h.value(xt) + dot(d, g.span()) + 0.5 * std::pow(A.norm(d), 2);
  return ub - h.value(x);
}

}  // namespace

TEST_CASE("h value examples") {
  std::mt19937_64 eng(31);
  const Shape s = Shape::image(16, 16);
  const LinearOperator H = make_motion_blur(5, 60.0, s);
  const Vector x = rand_vec(s, eng);
  CHECK(SmoothTerm(H, H.apply(x)).value(x) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  const Shape s2 = Shape::vector(2);
  CHECK(SmoothTerm(LinearOperator::identity(s2), Vector(s2)).value(Vector::from_values({2.0, 2.0})) == 4.0);
}

TEST_CASE("h value matches a direct loop") {
  std::mt19937_64 eng(32);
  const Shape s = Shape::image(12, 10);
  const Vector k = motion_blur_kernel(5, 60.0);
  const Vector x = rand_vec(s, eng), y = rand_vec(s, eng);
  const auto hx = oracle::convolve(x.values(), 12, 10, k.values(), k.shape().rows, k.shape().cols);
  double ref = 0.0;
  for (std::size_t i = 0; i < hx.size(); ++i) ref += 0.5 * (hx[i] - y[i]) * (hx[i] - y[i]);
  CHECK(SmoothTerm(LinearOperator::convolution(s, k), y).value(x) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("gradient examples") {
  std::mt19937_64 eng(33);
  const Shape s = Shape::vector(7);
  const Vector x = rand_vec(s, eng);
  CHECK(SmoothTerm(LinearOperator::identity(s), Vector(s)).gradient(x).values() == x.values());
  const Shape si = Shape::image(16, 16);
  const LinearOperator H = make_motion_blur(5, 60.0, si);
  const Vector xi = rand_vec(si, eng);
  CHECK(norm(SmoothTerm(H, H.apply(xi)).gradient(xi).span()) <= 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 eng(34);
  const Shape s = Shape::image(8, 8);
  for (const LinearOperator& H : {LinearOperator::identity(s), LinearOperator::identity(s, 0.5),
                                  make_motion_blur(5, 60.0, s), make_motion_blur(3, 0.0, s)}) {
    const SmoothTerm h(H, rand_vec(s, eng));
    for (int t = 0; t < 3; ++t) {
      const Vector x = rand_vec(s, eng);
      const Vector g = h.gradient(x);
      auto f = [&](const std::vector<double>& v) { return h.value(Vector(s, v)); };
      for (std::size_t n = 0; n < x.size(); ++n) {
        const double fd = oracle::central_difference(f, x.values(), n);
        REQUIRE(std::abs(fd - g[n]) <= 1e-5 * std::max(1.0, std::abs(g[n])));
      }
    }
  }
}

TEST_CASE("metric construction") {
  const Shape s = Shape::image(8, 8);
  SUBCASE("identity") {
    const SmoothTerm h(LinearOperator::identity(s), Vector(s));
    CHECK(h.lipschitz() == doctest::Approx(1.01).epsilon(1e-12));
    const Metric sc = h.metric(MetricPolicy::scalar);
    CHECK(sc.lower() == doctest::Approx(1.01).epsilon(1e-12));
    CHECK(sc.is_scalar());
    const Metric d = h.metric(MetricPolicy::diagonal_majorant);
    CHECK(d.lower() == 1.0);
    CHECK(d.upper() == 1.0);
  }
  SUBCASE("half identity") {
    const SmoothTerm h(LinearOperator::identity(s, 0.5), Vector(s));
    const Metric d = h.metric(MetricPolicy::diagonal_majorant);
    CHECK(d.lower() == 0.25);
    CHECK(d.upper() == 0.25);
  }
  SUBCASE("normalized nonnegative blur gives unit row sums") {
    const SmoothTerm h(make_motion_blur(5, 60.0, s), Vector(s));
    const Metric d = h.metric(MetricPolicy::diagonal_majorant);
    CHECK(d.lower() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.upper() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("row sums of |H^T H| from an explicit matrix") {
    std::mt19937_64 eng(35);
    const Vector k(Shape{3, 2}, oracle::random_values(6, eng));
    const LinearOperator H = LinearOperator::convolution(s, k);
    const std::size_t n = s.size();
    std::vector<double> cols(n * n);  // column j = H e_j
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(s);
      e[j] = 1.0;
      const Vector c = H.apply(e);
      for (std::size_t i = 0; i < n; ++i) cols[j * n + i] = c[i];
    }
    const std::vector<double> got = gershgorin_row_sums(H);
    for (std::size_t a = 0; a < n; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        double hth = 0.0;
        for (std::size_t i = 0; i < n; ++i) hth += cols[a * n + i] * cols[b * n + i];
        row += std::abs(hth);
      }
      REQUIRE(got[a] == doctest::Approx(row).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gershgorin_row_sums(LinearOperator::dwt(s, 1)), Error);
}

TEST_CASE("both metrics majorize h") {
  std::mt19937_64 eng(36);
  const Shape s = Shape::image(16, 16);
  for (const LinearOperator& H : {make_motion_blur(5, 60.0, s),
                                  LinearOperator::convolution(s, Vector(Shape{3, 3}, oracle::random_values(9, eng)))}) {
    const SmoothTerm h(H, rand_vec(s, eng));
    for (MetricPolicy pol : {MetricPolicy::scalar, MetricPolicy::diagonal_majorant}) {
      const Metric A = h.metric(pol);
      CHECK(A.lower() > 0.0);
      CHECK(A.upper() >= A.lower());
      for (int t = 0; t < 100; ++t) {
        const Vector x = rand_vec(s, eng, 5.0), xt = rand_vec(s, eng, 5.0);
        const double hx = h.value(x);
        REQUIRE(majorization_gap(h, A, x, xt) >= -1e-9 * (1.0 + std::abs(hx)));
      }
    }
  }
}

TEST_CASE("a gradient step with 1/mu decreases h") {
  std::mt19937_64 eng(37);
  const Shape s = Shape::image(16, 16);
  const SmoothTerm h(make_motion_blur(5, 60.0, s), rand_vec(s, eng));
  for (int t = 0; t < 20; ++t) {
    Vector x = rand_vec(s, eng, 3.0);
    const double before = h.value(x);
    const Vector g = h.gradient(x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= g[i] / h.lipschitz();
    CHECK(h.value(x) <= before);
  }
}

TEST_CASE("observation shape must match the operator") {
  const Shape s = Shape::image(8, 8);
  CHECK_THROWS_AS(SmoothTerm(LinearOperator::identity(s), Vector(Shape::image(4, 4))), Error);
  CHECK_THROWS_AS(SmoothTerm(LinearOperator::identity(s), Vector(s), -1.0), Error);
}
