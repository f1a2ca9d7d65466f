#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2fb/bench.hpp"
#include "c2fb/pgm.hpp"

using namespace c2fb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("c2fb_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string data(const char* name) { return std::string(C2FB_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("pgm round trip is exact for 8-bit values") {
  const Vector img(Shape::image(2, 2), std::vector<double>{0, 128, 255, 64});
  const std::string enc = encode_pgm(img);
  const std::string head = "P5\n2 2\n255\n";
  REQUIRE(enc.size() == head.size() + 4);
  CHECK(enc.substr(0, head.size()) == head);
  const Vector back = parse_pgm(enc);
  CHECK(back.shape() == img.shape());
  CHECK(back.values() == img.values());
  const fs::path dir = scratch_dir("pgm");
  save_pgm((dir / "a.pgm").string(), img);
  CHECK(load_pgm((dir / "a.pgm").string()).values() == img.values());
}

TEST_CASE("pgm writer clamps and rounds") {
  const Vector img(Shape::image(1, 4), std::vector<double>{-3.0, 1.4, 1.6, 300.0});
  const Vector back = parse_pgm(encode_pgm(img));
  CHECK(back.values() == std::vector<double>{0, 1, 2, 255});
}

TEST_CASE("pgm parser accepts comments and rejects malformed input") {
  CHECK(parse_pgm(std::string("P5\n# note\n1 2 # trailing\n255\n\x01\x02")).values() == std::vector<double>{1, 2});
  auto code_of = [](const std::string& s) -> int {
    try {
      parse_pgm(s);
    } catch (const Error& e) {
      return static_cast<int>(e.code());
    }
    return -1;
  };
  CHECK(code_of("P5\n2 2\n255\n\x01\x02") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("P2\n1 1\n255\n1") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("P5\n1 1\n65535\n\x01\x02") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("P5\n0 1\n255\n") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("") == static_cast<int>(ErrorCode::parse));
  try {
    load_pgm("/nonexistent/file.pgm");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("bundled images load at their nominal size") {
  CHECK(load_pgm(data("astronaut_128.pgm")).shape() == Shape::image(128, 128));
  CHECK(load_pgm(data("astronaut_64.pgm")).shape() == Shape::image(64, 64));
}

TEST_CASE("image preparation crops and resamples") {
  Vector img(Shape::image(4, 6));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) img.at(i, j) = static_cast<double>(10 * i + j);
  const Vector sq = prepare_image(img, 4);
  CHECK(sq.shape() == Shape::image(4, 4));
  CHECK(sq.at(0, 0) == 1.0);  // columns 1..4 survive the center crop
  const Vector half = prepare_image(img, 2);
  CHECK(half.at(0, 0) == doctest::Approx((1 + 2 + 11 + 12) / 4.0));
  CHECK(half.at(1, 1) == doctest::Approx((23 + 24 + 33 + 34) / 4.0));
  const Vector up = prepare_image(Vector(Shape::image(3, 3), 7.0), 5);
  for (std::size_t i = 0; i < up.size(); ++i) CHECK(up[i] == doctest::Approx(7.0));
}

TEST_CASE("noise level follows the requested input SNR") {
  const Shape s = Shape::image(16, 16);
  const LinearOperator I = LinearOperator::identity(s);
  // ||H xbar||^2 = N: sigma = 10^(-isnr/20)
  const Vector ones(s, 1.0);
  CHECK(generate_observation(ones, I, 0.0, 1).sigma == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(generate_observation(ones, I, 20.0, 1).sigma == doctest::Approx(0.1).epsilon(1e-14));
  const Observation hi = generate_observation(ones, I, 300.0, 1);
  CHECK(hi.sigma == doctest::Approx(1e-15).epsilon(1e-12));
  CHECK(distance(hi.y.span(), ones.span()) <= 1e-12);
}

TEST_CASE("gaussian draws have unit variance and are seed-deterministic") {
  const std::vector<double> g = gaussian_draws(65536, 5);
  double mean = 0.0, var = 0.0;
  for (double v : g) mean += v;
  mean /= g.size();
  for (double v : g) var += (v - mean) * (v - mean);
  var /= g.size();
  CHECK(std::abs(mean) <= 0.02);
  CHECK(std::abs(var - 1.0) <= 0.03);
  CHECK(gaussian_draws(100, 5) == std::vector<double>(g.begin(), g.begin() + 100));
  CHECK(gaussian_draws(100, 6) != gaussian_draws(100, 5));
}

TEST_CASE("realized input SNR is close to the target") {
  const Vector img = prepare_image(load_pgm(data("astronaut_128.pgm")), 128);
  const LinearOperator H = make_motion_blur(5, 60.0, img.shape());
  const Vector hx = H.apply(img);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Observation obs = generate_observation(img, H, 20.0, seed);
    const double noise = distance(obs.y.span(), hx.span());
    const double realized = 10.0 * std::log10(std::pow(norm(hx.span()), 2) / (noise * noise));
    CHECK(std::abs(realized - 20.0) <= 0.2);
  }
}

TEST_CASE("snr and comparison criterion") {
  const Vector ref = Vector::from_values({3.0, 4.0});
  CHECK(snr_db(ref, Vector::from_values({3.0, 4.0})) == kSnrCapDb);
  CHECK(snr_db(ref, Vector::from_values({3.0, 4.5})) == doctest::Approx(10.0 * std::log10(25.0 / 0.25)));
  CHECK(snr_db(ref, Vector::from_values({0.0, 0.0})) == doctest::Approx(0.0).scale(1.0));
  CHECK(compare_criterion(10.0, 8.0).value == doctest::Approx(0.2));
  CHECK(compare_criterion(-10.0, -12.0).value == doctest::Approx(0.2));
  CHECK(compare_criterion(5.0, 5.0).value == 0.0);
  const Criterion z = compare_criterion(0.0, -1.0);
  CHECK(z.degenerate);
  CHECK(z.value == 1.0);
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(summary_csv({}) == "realization,algo,I,outer_iters,total_inner,f_final,snr_db,C,wall_ms\n");
  SolverTrace t;
  t.f_initial = 2.0;
  OuterRecord r;
  r.outer = 1;
  r.total_inner = 3;
  r.f = 1.5;
  r.chi_norm = 0.25;
  r.step_norm = 0.125;
  r.subgrad_residual = 0.0625;
  t.records.push_back(r);
  CHECK(trace_csv(t) ==
        "outer,inner,f,chi_norm,step_norm,subgrad_residual\n0,0,2,0,0,nan\n1,3,1.5,0.25,0.125,0.0625\n");
}

TEST_CASE("penalty and prox kind names") {
  for (PenaltyKind k : {PenaltyKind::logsum, PenaltyKind::lrho, PenaltyKind::cauchy, PenaltyKind::l1})
    CHECK(parse_penalty_kind(to_string(k)) == k);
  for (ProxKind k : {ProxKind::weighted_l1, ProxKind::weighted_sq, ProxKind::logsum, ProxKind::lrho})
    CHECK(parse_prox_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_penalty_kind("huber"), Error);
  CHECK_THROWS_AS(parse_prox_kind("huber"), Error);
}

TEST_CASE("library grid oracle finds global minima") {
  CHECK(grid_argmin([](double t) { return (t - 1.23456) * (t - 1.23456); }, 5.0) == doctest::Approx(1.23456).epsilon(1e-9));
  // double well with the deeper minimum on the left
  auto dw = [](double t) { return (t * t - 1) * (t * t - 1) + 0.1 * t; };
  CHECK(grid_argmin(dw, 3.0) < -0.9);
  CHECK(run_prox_oracle(ProxKind::logsum, 50).passed());
}

TEST_CASE("experiment smoke run writes deterministic outputs") {
  const fs::path a = scratch_dir("exp_a"), b = scratch_dir("exp_b");
  ExperimentConfig cfg;
  cfg.image_path = data("astronaut_64.pgm");
  cfg.size = 32;
  cfg.wavelet_levels = 3;
  cfg.realizations = 2;
  cfg.inner_iters = {2, 5};
  cfg.max_outer = 3000;
  cfg.output_dir = a.string();
  const ExperimentReport r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.all_converged);
  CHECK(r.invariants_hold);
  CHECK(r.sigmas.size() == 2);
  CHECK(r.aggregates.size() == 3);
  CHECK(r.aggregates[0].algo == Algorithm::vmfb);
  for (const ExperimentRow& row : r.rows) {
    if (row.algo == Algorithm::vmfb) {
      CHECK(row.C == 0.0);
      CHECK(row.inner == 1);
    } else {
      CHECK(std::isfinite(row.C));
    }
    CHECK(row.wall_ms == 0.0);
  }
  const std::string summary = slurp(a / "summary.csv");
  CHECK(summary.rfind("realization,algo,I,outer_iters,total_inner,f_final,snr_db,C,wall_ms\n", 0) == 0);
  CHECK(slurp(a / "trace_r0_c2fb_I5.csv").rfind("outer,inner,f,chi_norm,step_norm,subgrad_residual\n", 0) == 0);
  CHECK(fs::exists(a / "trace_r1_vmfb.csv"));
  CHECK(fs::exists(a / "aggregate.csv"));
  const std::string echo = slurp(a / "config.echo.txt");
  for (const char* key : {"theta", "epsilon", "gamma", "isnr", "inner", "metric", "seed", "size"})
    CHECK(echo.find(key) != std::string::npos);

  cfg.output_dir = b.string();
  run_experiment(cfg);
  for (const char* f : {"summary.csv", "aggregate.csv", "trace_r0_vmfb.csv", "trace_r1_c2fb_I2.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("experiment configuration validation") {
  ExperimentConfig cfg;
  cfg.image_path = data("astronaut_64.pgm");
  cfg.size = 30;  // not divisible by 2^4
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  cfg.size = 32;
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.realizations = 1;
  cfg.inner_iters = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.inner_iters = {3};
  cfg.penalty.kind = PenaltyKind::cauchy;
  CHECK_THROWS_AS(run_experiment(cfg), Error);  // cauchy has no exact prox for the baseline
}
