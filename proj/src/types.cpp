#include "c2fb/types.hpp"

#include <cmath>
#include <numeric>

namespace c2fb {

std::string to_string(const Shape& s) {
  return "(" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + ")";
}

Vector::Vector(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Vector::Vector(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (shape_.size() != data_.size()) {
    throw Error(ErrorCode::dimension, "vector data length " + std::to_string(data_.size()) +
                                          " does not match shape " + to_string(shape_));
  }
}

Vector Vector::from_values(std::vector<double> values) {
  const auto n = values.size();
  return Vector(Shape::vector(n), std::move(values));
}

bool Vector::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension, std::string(what) + ": length mismatch " + std::to_string(a) +
                                          " vs " + std::to_string(b));
  }
}

void require_shape(const Shape& expected, const Shape& got, const char* what) {
  if (!(expected == got)) {
    throw Error(ErrorCode::dimension, std::string(what) + ": expected shape " +
                                          to_string(expected) + ", got " + to_string(got));
  }
}

}  // namespace c2fb
