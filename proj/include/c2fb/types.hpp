#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2fb {

enum class ErrorCode {
  invalid_argument = 1,
  dimension = 2,
  io = 3,
  parse = 4,
  numerical = 5,
  unsupported = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Row-major extent of a vector. A 1-D signal of length n is {1, n}.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  bool operator==(const Shape&) const = default;

  static Shape vector(std::size_t n) { return {1, n}; }
  static Shape image(std::size_t rows, std::size_t cols) { return {rows, cols}; }
};

std::string to_string(const Shape& s);

/// Flat real-valued array with 2-D shape metadata.
class Vector {
 public:
  Vector() = default;
  explicit Vector(Shape shape, double fill = 0.0);
  Vector(Shape shape, std::vector<double> data);

  static Vector from_values(std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }

  bool all_finite() const noexcept;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

void require_same_size(std::size_t a, std::size_t b, const char* what);
void require_shape(const Shape& expected, const Shape& got, const char* what);

}  // namespace c2fb
