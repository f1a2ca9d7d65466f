#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "c2fb/linops.hpp"

namespace c2fb {

// The segment [-L/2, L/2] along the blur direction is sampled at the midpoints
// of 16 sub-intervals per pixel; each sample lands on its nearest pixel.
// Axis-aligned segments thus give exactly L equal taps.
Vector motion_blur_kernel(int length, double angle_deg) {
  if (length < 1) throw Error(ErrorCode::invalid_argument, "blur length must be >= 1");
  if (!std::isfinite(angle_deg)) throw Error(ErrorCode::invalid_argument, "blur angle must be finite");

  constexpr int kSamplesPerPixel = 16;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(theta);
  const double dy = -std::sin(theta);  // image rows grow downwards
  const int samples = kSamplesPerPixel * length;

  std::map<std::pair<long, long>, int> hits;
  long max_r = 0, max_c = 0;
  for (int s = 0; s < samples; ++s) {
    const double t = -0.5 * length + (s + 0.5) / kSamplesPerPixel;
    // Snap away float dust so that exact axis angles stay on one row/column.
    const double fr = std::round(t * dy * 1e12) / 1e12;
    const double fc = std::round(t * dx * 1e12) / 1e12;
    const long r = std::lround(fr);
    const long c = std::lround(fc);
    ++hits[{r, c}];
    max_r = std::max(max_r, std::labs(r));
    max_c = std::max(max_c, std::labs(c));
  }

  const Shape ks{static_cast<std::size_t>(2 * max_r + 1), static_cast<std::size_t>(2 * max_c + 1)};
  Vector kernel(ks);
  for (const auto& [pos, count] : hits) {
    kernel.at(static_cast<std::size_t>(pos.first + max_r), static_cast<std::size_t>(pos.second + max_c)) =
        static_cast<double>(count);
  }
  for (double& v : kernel.span()) v /= static_cast<double>(samples);

  // Fold the rounding residue into the last nonzero tap so the row-major sum
  // is exactly one.
  std::size_t last = 0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    if (kernel[i] != 0.0) last = i;
  }
  double rest = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    if (i != last) rest += kernel[i];
  }
  kernel[last] = 1.0 - rest;
  return kernel;
}

}  // namespace c2fb
