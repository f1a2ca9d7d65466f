#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "c2fb/c2fb.h"

// Exercises only the exported C symbols of the shared library.

TEST_CASE("version and status strings") {
  CHECK(std::string(c2fb_version()) == "0.1.0");
  CHECK(std::string(c2fb_status_string(C2FB_OK)) == "ok");
  CHECK(std::strlen(c2fb_status_string(C2FB_ERR_UNSUPPORTED)) > 0);
}

TEST_CASE("operator handles") {
  c2fb_operator* blur = nullptr;
  REQUIRE(c2fb_operator_motion_blur(16, 16, 5, 60.0, &blur) == C2FB_OK);
  size_t ir = 0, ic = 0, orows = 0, ocols = 0;
  REQUIRE(c2fb_operator_shape(blur, &ir, &ic, &orows, &ocols) == C2FB_OK);
  CHECK(ir == 16);
  CHECK(ocols == 16);

  std::vector<double> x(256, 2.0), y(256), back(256);
  REQUIRE(c2fb_operator_apply(blur, x.data(), x.size(), y.data(), y.size()) == C2FB_OK);
  for (double v : y) CHECK(v == doctest::Approx(2.0));  // normalized kernel preserves constants
  REQUIRE(c2fb_operator_adjoint(blur, y.data(), y.size(), back.data(), back.size()) == C2FB_OK);

  double nsq = 0.0;
  int conv = 0;
  REQUIRE(c2fb_operator_norm_sq(blur, 1e-8, 1000, &nsq, &conv) == C2FB_OK);
  CHECK(conv == 1);
  CHECK(nsq == doctest::Approx(1.01).epsilon(1e-6));

  c2fb_operator* W = nullptr;
  REQUIRE(c2fb_operator_dwt(16, 16, 2, &W) == C2FB_OK);
  c2fb_operator* WH = nullptr;
  REQUIRE(c2fb_operator_compose(W, blur, &WH) == C2FB_OK);
  std::vector<double> c(256);
  CHECK(c2fb_operator_apply(WH, x.data(), x.size(), c.data(), c.size()) == C2FB_OK);
  c2fb_operator_free(WH);
  c2fb_operator_free(W);

  SUBCASE("size mismatch reports a dimension error") {
    CHECK(c2fb_operator_apply(blur, x.data(), 100, y.data(), y.size()) == C2FB_ERR_DIMENSION);
    CHECK(std::strlen(c2fb_last_error()) > 0);
  }
  SUBCASE("null arguments") {
    CHECK(c2fb_operator_apply(nullptr, x.data(), 256, y.data(), 256) == C2FB_ERR_INVALID_ARGUMENT);
    CHECK(c2fb_operator_identity(4, 4, 1.0, nullptr) == C2FB_ERR_INVALID_ARGUMENT);
  }
  SUBCASE("invalid construction") {
    c2fb_operator* bad = nullptr;
    CHECK(c2fb_operator_dwt(24, 32, 4, &bad) == C2FB_ERR_DIMENSION);
    CHECK(bad == nullptr);
    CHECK(c2fb_operator_motion_blur(8, 8, 0, 0.0, &bad) == C2FB_ERR_INVALID_ARGUMENT);
  }
  c2fb_operator_free(blur);
  c2fb_operator_free(nullptr);
}

TEST_CASE("scalar prox through the C interface") {
  const double x[3] = {0.0, 2.0, -3.0};
  const double a[3] = {1.0, 1.0, 2.0};
  double out[3];
  REQUIRE(c2fb_prox(C2FB_PROX_WEIGHTED_L1, x, a, 3, 1.0, 0.0, out) == C2FB_OK);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);
  CHECK(out[2] == -2.5);
  CHECK(c2fb_prox(C2FB_PROX_LRHO, x, a, 3, 1.0, 2.0, out) == C2FB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("penalty, smooth term and solve") {
  c2fb_operator *H = nullptr, *W = nullptr;
  REQUIRE(c2fb_operator_motion_blur(32, 32, 5, 60.0, &H) == C2FB_OK);
  REQUIRE(c2fb_operator_dwt(32, 32, 3, &W) == C2FB_OK);
  std::vector<double> img(1024), y(1024);
  for (size_t i = 0; i < 32; ++i)
    for (size_t j = 0; j < 32; ++j) img[i * 32 + j] = ((i / 8 + j / 8) % 2) ? 200.0 : 50.0;
  REQUIRE(c2fb_operator_apply(H, img.data(), 1024, y.data(), 1024) == C2FB_OK);

  c2fb_smooth* h = nullptr;
  REQUIRE(c2fb_smooth_create(H, y.data(), y.size(), &h) == C2FB_OK);
  double hv = -1.0;
  REQUIRE(c2fb_smooth_value(h, img.data(), img.size(), &hv) == C2FB_OK);
  CHECK(hv == doctest::Approx(0.0).scale(1.0));
  std::vector<double> diag(1024);
  REQUIRE(c2fb_smooth_metric(h, C2FB_METRIC_DIAG, diag.data(), diag.size()) == C2FB_OK);
  CHECK(diag[17] == doctest::Approx(1.0));

  c2fb_penalty* pen = nullptr;
  REQUIRE(c2fb_penalty_create(C2FB_PHI_LOGSUM, 30.0, 3.0, 0.0, C2FB_PSI_ABS, W, &pen) == C2FB_OK);
  double g = 0.0, maj = 0.0;
  REQUIRE(c2fb_penalty_eval(pen, img.data(), img.size(), &g) == C2FB_OK);
  REQUIRE(c2fb_penalty_majorant(pen, img.data(), img.data(), img.size(), &maj) == C2FB_OK);
  CHECK(maj == doctest::Approx(g).epsilon(1e-12));
  std::vector<double> lam(1024);
  REQUIRE(c2fb_penalty_weights(pen, img.data(), img.size(), lam.data(), lam.size()) == C2FB_OK);
  for (double l : lam) REQUIRE(l > 0.0);

  c2fb_solver_config cfg;
  c2fb_solver_config_init(&cfg);
  CHECK(cfg.gamma == 0.99);
  cfg.inner_iters = 5;
  cfg.max_outer = 3000;
  c2fb_result* res = nullptr;
  REQUIRE(c2fb_solve(h, pen, &cfg, nullptr, 0, &res) == C2FB_OK);
  c2fb_result_summary sum;
  REQUIRE(c2fb_result_summary_get(res, &sum) == C2FB_OK);
  CHECK(sum.converged == 1);
  CHECK(sum.invariants_hold == 1);
  CHECK(sum.f_final <= sum.f_initial);
  CHECK(sum.total_inner == static_cast<size_t>(sum.outer_iters) * 5);
  REQUIRE(c2fb_result_trace_length(res) == static_cast<size_t>(sum.outer_iters));
  c2fb_trace_record rec;
  REQUIRE(c2fb_result_trace_record(res, 0, &rec) == C2FB_OK);
  CHECK(rec.outer == 1);
  CHECK(c2fb_result_trace_record(res, 1u << 30, &rec) == C2FB_ERR_DIMENSION);
  std::vector<double> xs(1024);
  REQUIRE(c2fb_result_x(res, xs.data(), xs.size()) == C2FB_OK);
  c2fb_result_free(res);

  SUBCASE("cauchy baseline is unsupported") {
    c2fb_penalty* cauchy = nullptr;
    REQUIRE(c2fb_penalty_create(C2FB_PHI_LOGSUM, 1.0, 1.0, 0.0, C2FB_PSI_SQ, W, &cauchy) == C2FB_OK);
    cfg.algo = C2FB_ALGO_VMFB;
    c2fb_result* r2 = nullptr;
    CHECK(c2fb_solve(h, cauchy, &cfg, nullptr, 0, &r2) == C2FB_ERR_UNSUPPORTED);
    CHECK(r2 == nullptr);
    c2fb_penalty_free(cauchy);
  }
  SUBCASE("starting point of the wrong size") {
    c2fb_result* r2 = nullptr;
    CHECK(c2fb_solve(h, pen, &cfg, xs.data(), 10, &r2) == C2FB_ERR_DIMENSION);
  }
  c2fb_penalty_free(pen);
  c2fb_smooth_free(h);
  c2fb_operator_free(W);
  c2fb_operator_free(H);
}

TEST_CASE("image load and save") {
  c2fb_image* img = nullptr;
  REQUIRE(c2fb_image_load(C2FB_DATA_DIR "/astronaut_64.pgm", &img) == C2FB_OK);
  CHECK(c2fb_image_rows(img) == 64);
  CHECK(c2fb_image_cols(img) == 64);
  const double* px = c2fb_image_data(img);
  for (size_t i = 0; i < 64 * 64; ++i) REQUIRE((px[i] >= 0.0 && px[i] <= 255.0));
  c2fb_image_free(img);
  c2fb_image* none = nullptr;
  CHECK(c2fb_image_load("/nonexistent.pgm", &none) == C2FB_ERR_IO);
  CHECK(std::string(c2fb_last_error()).find("nonexistent") != std::string::npos);
}

TEST_CASE("validation entry points") {
  c2fb_oracle_report rep;
  REQUIRE(c2fb_prox_oracle(C2FB_PROX_LOGSUM, 20, 3, &rep) == C2FB_OK);
  CHECK(rep.trials == 20);
  CHECK(rep.failures == 0);

  c2fb_experiment_config ec;
  c2fb_experiment_config_init(&ec);
  CHECK(ec.n_inner == 2);
  CHECK(ec.realizations == 5);
  ec.image_path = nullptr;
  c2fb_experiment* e = nullptr;
  CHECK(c2fb_experiment_run(&ec, &e) == C2FB_ERR_INVALID_ARGUMENT);
}
