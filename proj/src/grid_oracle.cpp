#include <cmath>
#include <random>

#include "c2fb/bench.hpp"
#include "c2fb/prox.hpp"

namespace c2fb {

const char* to_string(ProxKind k) {
  switch (k) {
    case ProxKind::weighted_l1: return "weighted-l1";
    case ProxKind::weighted_sq: return "weighted-sq";
    case ProxKind::logsum: return "logsum";
    case ProxKind::lrho: return "lrho";
  }
  return "?";
}

ProxKind parse_prox_kind(const std::string& s) {
  if (s == "weighted-l1" || s == "l1") return ProxKind::weighted_l1;
  if (s == "weighted-sq" || s == "sq") return ProxKind::weighted_sq;
  if (s == "logsum") return ProxKind::logsum;
  if (s == "lrho") return ProxKind::lrho;
  throw Error(ErrorCode::invalid_argument, "unknown prox kind '" + s + "'");
}

double grid_argmin(const std::function<double(double)>& obj, double range, double step) {
  constexpr long kCoarseRatio = 100;
  const long n_fine = static_cast<long>(std::ceil(range / step));
  const long n_coarse = n_fine / kCoarseRatio + 1;
  const double coarse = step * kCoarseRatio;

  std::vector<double> vals(static_cast<std::size_t>(2 * n_coarse + 1));
  for (long j = -n_coarse; j <= n_coarse; ++j) vals[static_cast<std::size_t>(j + n_coarse)] = obj(j * coarse);

  double best_t = 0.0, best_f = obj(0.0);
  for (long j = -n_coarse; j <= n_coarse; ++j) {
    const std::size_t k = static_cast<std::size_t>(j + n_coarse);
    const bool left_ok = k == 0 || vals[k] <= vals[k - 1];
    const bool right_ok = k + 1 == vals.size() || vals[k] <= vals[k + 1];
    if (!(left_ok && right_ok)) continue;
    // Refine on the fine grid over the two neighbouring coarse cells.
    const long center = j * kCoarseRatio;
    for (long m = center - kCoarseRatio; m <= center + kCoarseRatio; ++m) {
      if (m < -n_fine || m > n_fine) continue;
      const double t = m * step;
      const double f = obj(t);
      if (f < best_f) {
        best_f = f;
        best_t = t;
      }
    }
  }
  return best_t;
}

OracleReport run_prox_oracle(ProxKind kind, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "prox oracle: trials must be >= 1");
  constexpr double kStep = 1e-5;
  constexpr double kRange = 6.0;
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> ux(-5.0, 5.0), ua(0.5, 3.0), ulam(0.0, 2.0), utheta(0.1, 2.0),
      ueps(0.01, 1.0), urho(0.2, 0.9);

  OracleReport rep;
  rep.kind = kind;
  rep.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const double x = ux(eng), a = ua(eng);
    const double lam = ulam(eng), theta = utheta(eng), eps = ueps(eng), rho = urho(eng);
    std::function<double(double)> penalty;
    double p = 0.0;
    switch (kind) {
      case ProxKind::weighted_l1:
        penalty = [lam](double t) { return lam * std::abs(t); };
        p = prox1d::soft_threshold(x, lam, a);
        break;
      case ProxKind::weighted_sq:
        penalty = [lam](double t) { return lam * t * t; };
        p = prox1d::weighted_sq(x, lam, a);
        break;
      case ProxKind::logsum:
        penalty = [theta, eps](double t) { return theta * std::log(std::abs(t) + eps); };
        p = prox1d::logsum(x, theta, eps, a);
        break;
      case ProxKind::lrho:
        penalty = [theta, rho](double t) { return theta * std::pow(std::abs(t), rho); };
        p = prox1d::lrho(x, theta, rho, a);
        break;
    }
    auto obj = [&](double t) { return penalty(t) + 0.5 * a * (t - x) * (t - x); };
    const double g = grid_argmin(obj, kRange, kStep);
    const double err = std::abs(p - g);
    const double excess = obj(p) - obj(g);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    rep.max_objective_excess = std::max(rep.max_objective_excess, excess);
    if (!(err <= 2.0 * kStep) || !(excess <= 1e-9)) ++rep.failures;
  }
  return rep;
}

}  // namespace c2fb
