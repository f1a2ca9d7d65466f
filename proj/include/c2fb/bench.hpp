#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "c2fb/linops.hpp"
#include "c2fb/penalty.hpp"
#include "c2fb/smooth.hpp"
#include "c2fb/solver.hpp"
#include "c2fb/types.hpp"

namespace c2fb {

enum class PenaltyKind { logsum, lrho, cauchy, l1 };

const char* to_string(PenaltyKind k);
PenaltyKind parse_penalty_kind(const std::string& s);

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::logsum;
  double theta = 300.0;
  double epsilon = 10.0;
  double rho = 0.5;  // lrho only
};

/// logsum: logsum + abs; lrho: power + abs; cauchy: logsum + sq; l1: identity + abs.
CompositePenalty make_penalty(const PenaltySpec& spec, LinearOperator analysis);

struct ExperimentConfig {
  std::string image_path;
  std::size_t size = 128;  // side S after crop and resampling
  int blur_length = 5;
  double blur_angle_deg = 60.0;
  int wavelet_levels = 4;
  double isnr_db = 20.0;
  std::uint64_t noise_seed = 1;  // realization r uses noise_seed + r
  PenaltySpec penalty;
  bool run_c2fb = true;
  bool run_vmfb = true;
  std::vector<int> inner_iters{5, 15};
  double gamma = 0.99;
  MetricPolicy metric_policy = MetricPolicy::diagonal_majorant;
  int max_outer = 20000;
  int realizations = 5;
  std::string output_dir;  // empty: nothing is written
  bool write_traces = true;
  bool write_images = false;
  bool record_timing = false;  // wall_ms stays 0 otherwise, keeping outputs byte-stable

  void validate() const;
};

struct ExperimentRow {
  int realization = 0;
  Algorithm algo = Algorithm::c2fb;
  int inner = 1;
  int outer_iters = 0;
  std::size_t total_inner = 0;
  double f_final = 0.0;
  double snr_db = 0.0;
  double C = 0.0;  // NaN when no baseline ran; 0 on baseline rows
  double wall_ms = 0.0;
  bool converged = false;
  bool invariants_hold = true;
};

struct AggregateRow {
  Algorithm algo = Algorithm::c2fb;
  int inner = 1;
  std::size_t count = 0;
  double mean_total_inner = 0.0, std_total_inner = 0.0;
  double mean_f = 0.0, std_f = 0.0;
  double mean_snr = 0.0, std_snr = 0.0;
  double mean_C = 0.0, std_C = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<double> sigmas;  // per realization
  double observation_snr_mean = 0.0;
  bool all_converged = true;
  bool invariants_hold = true;
};

struct Observation {
  Vector y;
  double sigma = 0.0;
};

/// y = H xbar + b with b ~ N(0, sigma^2), sigma = ||H xbar|| / sqrt(N 10^(isnr/10)).
/// Draws come from mt19937_64(seed) through Box-Muller.
Observation generate_observation(const Vector& xbar, const LinearOperator& H, double isnr_db, std::uint64_t seed);

/// Standard normal draws, deterministic across platforms for a given seed.
std::vector<double> gaussian_draws(std::size_t n, std::uint64_t seed);

inline constexpr double kSnrCapDb = 300.0;

/// 10 log10(||ref||^2 / ||ref - x||^2), capped at kSnrCapDb.
double snr_db(const Vector& ref, const Vector& x);

struct Criterion {
  double value = 0.0;
  bool degenerate = false;  // f_vmfb == 0: value is the plain difference
};

/// (f_vmfb - f_c2fb) / |f_vmfb|.
Criterion compare_criterion(double f_vmfb, double f_c2fb);

/// Center crop to a square, then resample to side S (block average when the
/// side is a multiple of S, bilinear otherwise).
Vector prepare_image(const Vector& image, std::size_t side);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Output helpers; doubles are printed with 17 significant digits.
std::string summary_csv(const std::vector<ExperimentRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string trace_csv(const SolverTrace& trace);
std::string format_double(double v);

// --- validation entry points shared by the CLI ------------------------------

enum class ProxKind { weighted_l1, weighted_sq, logsum, lrho };

const char* to_string(ProxKind k);
ProxKind parse_prox_kind(const std::string& s);

struct OracleReport {
  ProxKind kind = ProxKind::weighted_l1;
  int trials = 0;
  int failures = 0;
  double max_abs_error = 0.0;
  double max_objective_excess = 0.0;
  bool passed() const { return failures == 0; }
};

/// Compares the prox kernels against a grid search (step 1e-5) on random
/// scalar instances.
OracleReport run_prox_oracle(ProxKind kind, int trials, std::uint64_t seed = 7);

/// Global grid minimizer of `obj` over multiples of `step` in [-range, range].
/// Coarse scan, then fine refinement around every coarse local minimum.
double grid_argmin(const std::function<double(double)>& obj, double range, double step = 1e-5);

using SelftestReporter = std::function<void(const std::string& name, bool passed, const std::string& detail)>;

/// Runs the invariant suite at reduced sizes; returns true when every check passed.
bool run_selftest(const SelftestReporter& report);

}  // namespace c2fb
