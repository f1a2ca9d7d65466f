#include "c2fb/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "c2fb/pgm.hpp"

namespace c2fb {

const char* to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::logsum: return "logsum";
    case PenaltyKind::lrho: return "lrho";
    case PenaltyKind::cauchy: return "cauchy";
    case PenaltyKind::l1: return "l1";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(const std::string& s) {
  if (s == "logsum") return PenaltyKind::logsum;
  if (s == "lrho") return PenaltyKind::lrho;
  if (s == "cauchy") return PenaltyKind::cauchy;
  if (s == "l1") return PenaltyKind::l1;
  throw Error(ErrorCode::invalid_argument, "unknown penalty kind '" + s + "'");
}

CompositePenalty make_penalty(const PenaltySpec& spec, LinearOperator analysis) {
  switch (spec.kind) {
    case PenaltyKind::logsum:
      return CompositePenalty(Phi::logsum(spec.theta, spec.epsilon), PsiTag::abs_coeff, std::move(analysis));
    case PenaltyKind::lrho:
      return CompositePenalty(Phi::power(spec.theta, spec.rho, spec.epsilon), PsiTag::abs_coeff,
                              std::move(analysis));
    case PenaltyKind::cauchy:
      return CompositePenalty(Phi::logsum(spec.theta, spec.epsilon), PsiTag::sq_coeff, std::move(analysis));
    case PenaltyKind::l1:
      return CompositePenalty(Phi::identity(spec.theta), PsiTag::abs_coeff, std::move(analysis));
  }
  throw Error(ErrorCode::invalid_argument, "unknown penalty kind");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, "experiment: " + m); };
  if (image_path.empty()) fail("image path is required");
  if (wavelet_levels < 1) fail("wavelet levels must be >= 1");
  const std::size_t block = std::size_t{1} << wavelet_levels;
  if (size == 0 || size % block != 0) {
    fail("size " + std::to_string(size) + " must be a positive multiple of 2^levels = " + std::to_string(block));
  }
  if (blur_length < 1) fail("blur length must be >= 1");
  if (!std::isfinite(isnr_db)) fail("isnr must be finite");
  if (!run_c2fb && !run_vmfb) fail("no algorithm selected");
  if (run_c2fb && inner_iters.empty()) fail("at least one inner iteration count is required");
  for (int i : inner_iters)
    if (i < 1) fail("inner iteration counts must be >= 1");
  if (realizations < 1) fail("realizations must be >= 1");
  if (max_outer < 1) fail("max_outer must be >= 1");
}

std::vector<double> gaussian_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  auto uniform = [&eng] {
    // (0, 1]: 53 random bits, shifted away from zero.
    return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(kTwoPi * u2);
    if (i + 1 < n) out[i + 1] = r * std::sin(kTwoPi * u2);
  }
  return out;
}

Observation generate_observation(const Vector& xbar, const LinearOperator& H, double isnr_db, std::uint64_t seed) {
  if (!std::isfinite(isnr_db)) throw Error(ErrorCode::invalid_argument, "isnr must be finite");
  Observation obs;
  obs.y = H.apply(xbar);
  const double n = static_cast<double>(obs.y.size());
  obs.sigma = norm(obs.y.span()) / std::sqrt(n * std::pow(10.0, isnr_db / 10.0));
  const std::vector<double> z = gaussian_draws(obs.y.size(), seed);
  for (std::size_t i = 0; i < z.size(); ++i) obs.y[i] += obs.sigma * z[i];
  return obs;
}

double snr_db(const Vector& ref, const Vector& x) {
  require_shape(ref.shape(), x.shape(), "snr_db");
  const double num = squared_norm(ref.span());
  if (!(num > 0.0)) throw Error(ErrorCode::invalid_argument, "snr_db: reference must be nonzero");
  const double den = std::pow(distance(ref.span(), x.span()), 2);
  if (den == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(num / den));
}

Criterion compare_criterion(double f_vmfb, double f_c2fb) {
  if (f_vmfb == 0.0) return {f_vmfb - f_c2fb, true};
  return {(f_vmfb - f_c2fb) / std::abs(f_vmfb), false};
}

Vector prepare_image(const Vector& image, std::size_t side) {
  const Shape s = image.shape();
  if (side == 0 || s.size() == 0) throw Error(ErrorCode::invalid_argument, "prepare_image: empty input");
  const std::size_t sq = std::min(s.rows, s.cols);
  const std::size_t r0 = (s.rows - sq) / 2, c0 = (s.cols - sq) / 2;
  Vector out(Shape::image(side, side));
  if (sq % side == 0) {
    const std::size_t b = sq / side;
    const double inv = 1.0 / static_cast<double>(b * b);
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) {
        double acc = 0.0;
        for (std::size_t u = 0; u < b; ++u)
          for (std::size_t v = 0; v < b; ++v) acc += image.at(r0 + i * b + u, c0 + j * b + v);
        out.at(i, j) = acc * inv;
      }
    return out;
  }
  const double scale = static_cast<double>(sq) / static_cast<double>(side);
  auto sample = [&](double p, std::size_t& lo, std::size_t& hi, double& w) {
    p = std::clamp(p, 0.0, static_cast<double>(sq - 1));
    lo = static_cast<std::size_t>(std::floor(p));
    hi = std::min(lo + 1, sq - 1);
    w = p - static_cast<double>(lo);
  };
  for (std::size_t i = 0; i < side; ++i) {
    std::size_t ra, rb;
    double wr;
    sample((static_cast<double>(i) + 0.5) * scale - 0.5, ra, rb, wr);
    for (std::size_t j = 0; j < side; ++j) {
      std::size_t ca, cb;
      double wc;
      sample((static_cast<double>(j) + 0.5) * scale - 0.5, ca, cb, wc);
      const double top = (1 - wc) * image.at(r0 + ra, c0 + ca) + wc * image.at(r0 + ra, c0 + cb);
      const double bot = (1 - wc) * image.at(r0 + rb, c0 + ca) + wc * image.at(r0 + rb, c0 + cb);
      out.at(i, j) = (1 - wr) * top + wr * bot;
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string summary_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "realization,algo,I,outer_iters,total_inner,f_final,snr_db,C,wall_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.realization) + "," + to_string(r.algo) + "," + std::to_string(r.inner) + "," +
           std::to_string(r.outer_iters) + "," + std::to_string(r.total_inner) + "," + format_double(r.f_final) +
           "," + format_double(r.snr_db) + "," + format_double(r.C) + "," + format_double(r.wall_ms) + "\n";
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "algo,I,count,mean_total_inner,std_total_inner,mean_f_final,std_f_final,mean_snr_db,std_snr_db,mean_C,std_C\n";
  for (const auto& a : rows) {
    out += std::string(to_string(a.algo)) + "," + std::to_string(a.inner) + "," + std::to_string(a.count) + "," +
           format_double(a.mean_total_inner) + "," + format_double(a.std_total_inner) + "," +
           format_double(a.mean_f) + "," + format_double(a.std_f) + "," + format_double(a.mean_snr) + "," +
           format_double(a.std_snr) + "," + format_double(a.mean_C) + "," + format_double(a.std_C) + "\n";
  }
  return out;
}

std::string trace_csv(const SolverTrace& trace) {
  std::string out = "outer,inner,f,chi_norm,step_norm,subgrad_residual\n";
  out += "0,0," + format_double(trace.f_initial) + ",0,0,nan\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.outer) + "," + std::to_string(r.total_inner) + "," + format_double(r.f) + "," +
           format_double(r.chi_norm) + "," + format_double(r.step_norm) + "," + format_double(r.subgrad_residual) +
           "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + p.string());
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRow>& rows) {
  std::map<std::pair<int, int>, std::vector<const ExperimentRow*>> groups;
  for (const auto& r : rows) groups[{r.algo == Algorithm::vmfb ? 0 : 1, r.inner}].push_back(&r);
  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.algo = members.front()->algo;
    a.inner = key.second;
    a.count = members.size();
    std::vector<double> ti, f, snr, c;
    for (const auto* m : members) {
      ti.push_back(static_cast<double>(m->total_inner));
      f.push_back(m->f_final);
      snr.push_back(m->snr_db);
      c.push_back(m->C);
    }
    mean_std(ti, a.mean_total_inner, a.std_total_inner);
    mean_std(f, a.mean_f, a.std_f);
    mean_std(snr, a.mean_snr, a.std_snr);
    mean_std(c, a.mean_C, a.std_C);
    out.push_back(a);
  }
  return out;
}

std::string echo_config(const ExperimentConfig& cfg, const Shape& source_shape, const SmoothTerm& smooth,
                        const Metric& A, const SolverConfig& scfg, const std::vector<double>& sigmas,
                        const Vector& kernel) {
  std::ostringstream o;
  auto kv = [&o](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  kv("image", cfg.image_path);
  kv("image_source_shape", to_string(source_shape));
  kv("size", std::to_string(cfg.size));
  kv("blur_length", std::to_string(cfg.blur_length));
  kv("blur_angle_deg", format_double(cfg.blur_angle_deg));
  kv("blur_kernel_shape", to_string(kernel.shape()));
  kv("boundary", "periodic");
  kv("wavelet", "db8 (16 taps), periodized, orthonormal");
  kv("wavelet_levels", std::to_string(cfg.wavelet_levels));
  kv("isnr_db", format_double(cfg.isnr_db));
  kv("noise_prng", "mt19937_64 + box-muller");
  kv("noise_seed", std::to_string(cfg.noise_seed));
  kv("realizations", std::to_string(cfg.realizations));
  for (std::size_t r = 0; r < sigmas.size(); ++r) {
    kv("sigma[" + std::to_string(r) + "]", format_double(sigmas[r]));
  }
  kv("penalty", to_string(cfg.penalty.kind));
  kv("theta", format_double(cfg.penalty.theta));
  kv("epsilon", cfg.penalty.kind == PenaltyKind::l1 ? "unused" : format_double(cfg.penalty.epsilon));
  kv("rho", cfg.penalty.kind == PenaltyKind::lrho ? format_double(cfg.penalty.rho) : "unused");
  std::string algos;
  if (cfg.run_vmfb) algos += "vmfb";
  if (cfg.run_c2fb) algos += algos.empty() ? "c2fb" : ",c2fb";
  kv("algo", algos);
  std::string inner;
  for (int i : cfg.inner_iters) inner += (inner.empty() ? "" : ",") + std::to_string(i);
  kv("inner", inner);
  kv("gamma", format_double(scfg.gamma));
  kv("gamma_bar", format_double(scfg.gamma_bar));
  kv("metric", cfg.metric_policy == MetricPolicy::scalar ? "scalar" : "diag");
  kv("metric_lower", format_double(A.lower()));
  kv("metric_upper", format_double(A.upper()));
  kv("lipschitz", format_double(smooth.lipschitz()));
  kv("lipschitz_converged", smooth.lipschitz_converged() ? "true" : "false");
  kv("alpha", format_double(scfg.alpha()));
  kv("max_outer", std::to_string(scfg.max_outer));
  kv("stop_x_tol", format_double(scfg.stop_x_tol));
  kv("stop_f_tol", format_double(scfg.stop_f_tol));
  kv("newton_tol", format_double(scfg.newton_tol));
  kv("newton_max", std::to_string(scfg.newton_max));
  kv("initialization", "H^T y");
  kv("monitor_inexact", scfg.monitor_inexact ? "true" : "false");
  kv("record_timing", cfg.record_timing ? "true" : "false");
  return o.str();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Vector source = load_pgm(cfg.image_path);
  const Vector xbar = prepare_image(source, cfg.size);
  const Shape shape = xbar.shape();
  const Vector kernel = motion_blur_kernel(cfg.blur_length, cfg.blur_angle_deg);
  const LinearOperator H = LinearOperator::convolution(shape, kernel);
  const LinearOperator W = LinearOperator::dwt(shape, cfg.wavelet_levels);
  const CompositePenalty pen = make_penalty(cfg.penalty, W);
  const double mu = operator_norm_sq(H).value;

  SolverConfig base;
  base.gamma = cfg.gamma;
  base.metric_policy = cfg.metric_policy;
  base.max_outer = cfg.max_outer;
  base.validate();

  std::filesystem::path dir;
  if (!cfg.output_dir.empty()) {
    dir = cfg.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
    if (cfg.write_images) save_pgm((dir / "original.pgm").string(), xbar);
  }

  ExperimentReport rep;
  std::vector<double> obs_snr;
  Metric metric_for_echo;
  for (int r = 0; r < cfg.realizations; ++r) {
    const std::uint64_t seed = cfg.noise_seed + static_cast<std::uint64_t>(r);
    const Observation obs = generate_observation(xbar, H, cfg.isnr_db, seed);
    rep.sigmas.push_back(obs.sigma);
    obs_snr.push_back(snr_db(xbar, obs.y));
    const SmoothTerm smooth(H, obs.y, mu);
    if (r == 0) metric_for_echo = smooth.metric(cfg.metric_policy);
    const Vector x0 = default_initialization(smooth);
    const std::string tag = "r" + std::to_string(r);
    if (!dir.empty() && cfg.write_images) save_pgm((dir / ("observed_" + tag + ".pgm")).string(), obs.y);

    auto run_one = [&](Algorithm algo, int inner) {
      SolverConfig sc = base;
      sc.algo = algo;
      sc.inner_iters = inner;
      const auto t0 = std::chrono::steady_clock::now();
      SolveResult res;
      try {
        res = solve(smooth, pen, sc, x0);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(to_string(algo)) + " I=" + std::to_string(inner) + " realization " +
                                  std::to_string(r) + ": " + e.what());
      }
      const auto t1 = std::chrono::steady_clock::now();
      ExperimentRow row;
      row.realization = r;
      row.algo = algo;
      row.inner = algo == Algorithm::c2fb ? inner : 1;
      row.outer_iters = res.outer_iters;
      row.total_inner = res.total_inner;
      row.f_final = res.f_final;
      row.snr_db = snr_db(xbar, res.x_star);
      row.wall_ms = cfg.record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      row.converged = res.converged;
      row.invariants_hold = res.trace.invariants_hold();
      rep.all_converged &= row.converged;
      rep.invariants_hold &= row.invariants_hold;
      if (!dir.empty()) {
        const std::string stem = algo == Algorithm::vmfb ? tag + "_vmfb" : tag + "_c2fb_I" + std::to_string(inner);
        if (cfg.write_traces) write_file(dir / ("trace_" + stem + ".csv"), trace_csv(res.trace));
        if (cfg.write_images) save_pgm((dir / ("recon_" + stem + ".pgm")).string(), res.x_star);
      }
      return row;
    };

    double f_vmfb = std::numeric_limits<double>::quiet_NaN();
    if (cfg.run_vmfb) {
      ExperimentRow row = run_one(Algorithm::vmfb, 1);
      row.C = 0.0;
      f_vmfb = row.f_final;
      rep.rows.push_back(row);
    }
    if (cfg.run_c2fb) {
      for (int inner : cfg.inner_iters) {
        ExperimentRow row = run_one(Algorithm::c2fb, inner);
        row.C = std::isnan(f_vmfb) ? std::numeric_limits<double>::quiet_NaN()
                                   : compare_criterion(f_vmfb, row.f_final).value;
        rep.rows.push_back(row);
      }
    }
  }
  rep.aggregates = aggregate(rep.rows);
  double sd = 0.0;
  mean_std(obs_snr, rep.observation_snr_mean, sd);

  if (!dir.empty()) {
    write_file(dir / "summary.csv", summary_csv(rep.rows));
    write_file(dir / "aggregate.csv", aggregate_csv(rep.aggregates));
    write_file(dir / "config.echo.txt", echo_config(cfg, source.shape(), SmoothTerm(H, Vector(shape), mu),
                                                    metric_for_echo, base, rep.sigmas, kernel));
  }
  return rep;
}

}  // namespace c2fb
