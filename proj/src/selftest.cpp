#include <cmath>
#include <complex>
#include <random>

#include "c2fb/bench.hpp"
#include "c2fb/prox.hpp"

namespace c2fb {

namespace {

Vector random_vector(Shape s, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  Vector v(s);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = nd(eng);
  return v;
}

std::string fmt(double v) { return format_double(v); }

// Worst relative adjoint mismatch over random pairs.
double adjoint_gap(const LinearOperator& op, std::mt19937_64& eng, int pairs) {
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Vector x = random_vector(op.input_shape(), eng);
    const Vector y = random_vector(op.output_shape(), eng);
    const Vector ax = op.apply(x);
    const double lhs = dot(ax.span(), y.span());
    const double rhs = dot(x.span(), op.adjoint(y).span());
    worst = std::max(worst, std::abs(lhs - rhs) / (norm(ax.span()) * norm(y.span()) + 1.0));
  }
  return worst;
}

// max |DFT(kernel placed on the grid)|^2, evaluated directly.
double circulant_norm_sq(const Vector& kernel, Shape grid) {
  const double pi = std::acos(-1.0);
  const long kr = static_cast<long>(kernel.shape().rows), kc = static_cast<long>(kernel.shape().cols);
  double best = 0.0;
  for (std::size_t u = 0; u < grid.rows; ++u)
    for (std::size_t v = 0; v < grid.cols; ++v) {
      std::complex<double> acc = 0.0;
      for (long i = 0; i < kr; ++i)
        for (long j = 0; j < kc; ++j) {
          const double ph = 2.0 * pi *
                            (static_cast<double>(u) * static_cast<double>(i - (kr - 1) / 2) / grid.rows +
                             static_cast<double>(v) * static_cast<double>(j - (kc - 1) / 2) / grid.cols);
          acc += kernel.at(i, j) * std::polar(1.0, -ph);
        }
      best = std::max(best, std::norm(acc));
    }
  return best;
}

}  // namespace

bool run_selftest(const SelftestReporter& report) {
  bool all = true;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    all &= ok;
    if (report) report(name, ok, detail);
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(name, false, std::string("exception: ") + e.what());
    }
  };
  std::mt19937_64 eng(2024);
  const Shape img = Shape::image(32, 32);
  const LinearOperator blur = make_motion_blur(5, 60.0, img);
  const LinearOperator dwt = LinearOperator::dwt(img, 2);

  guarded("adjoint", [&] {
    double worst = 0.0;
    for (const auto& op : {LinearOperator::identity(img, 0.5), blur, dwt, LinearOperator::compose(dwt, blur)})
      worst = std::max(worst, adjoint_gap(op, eng, 20));
    check("adjoint", worst <= 1e-10, "worst relative gap " + fmt(worst));
  });

  guarded("dwt-isometry", [&] {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Vector x = random_vector(img, eng);
      const Vector c = dwt.apply(x);
      worst = std::max(worst, std::abs(norm(c.span()) - norm(x.span())) / norm(x.span()));
      worst = std::max(worst, distance(dwt.adjoint(c).span(), x.span()));
    }
    check("dwt-isometry", worst <= 1e-10, "worst deviation " + fmt(worst));
  });

  guarded("blur-kernel", [&] {
    bool ok = true;
    for (double angle : {0.0, 30.0, 60.0, 90.0, 137.0}) {
      const Vector k = motion_blur_kernel(5, angle);
      double s = 0.0;
      for (std::size_t i = 0; i < k.size(); ++i) {
        ok &= k[i] >= 0.0;
        s += k[i];
      }
      ok &= s == 1.0;
    }
    check("blur-kernel", ok, "nonnegative taps summing exactly to 1");
  });

  guarded("power-iteration", [&] {
    const NormEstimate est = operator_norm_sq(blur);
    const double exact = circulant_norm_sq(convolution_kernel(blur), img);
    const double rel = std::abs(est.raw - exact) / exact;
    check("power-iteration", rel <= 1e-6 && est.value >= exact,
          "raw " + fmt(est.raw) + " vs DFT " + fmt(exact));
  });

  guarded("majorant", [&] {
    const std::vector<CompositePenalty> pens{
        CompositePenalty(Phi::logsum(2.0, 0.5), PsiTag::abs_coeff, dwt),
        CompositePenalty(Phi::power(1.5, 0.5, 0.1), PsiTag::abs_coeff, dwt),
        CompositePenalty(Phi::logsum(1.0, 0.3), PsiTag::sq_coeff, dwt),
        CompositePenalty(Phi::identity(), PsiTag::abs_coeff, dwt)};
    double worst_major = 0.0, worst_tangent = 0.0;
    for (const auto& pen : pens)
      for (int i = 0; i < 20; ++i) {
        const Vector x = random_vector(img, eng), xk = random_vector(img, eng);
        const double g = pen.eval(x);
        worst_major = std::max(worst_major, (g - pen.majorant(x, xk)) / (1.0 + std::abs(g)));
        const double gk = pen.eval(xk);
        worst_tangent = std::max(worst_tangent, std::abs(pen.majorant(xk, xk) - gk) / (1.0 + std::abs(gk)));
      }
    check("majorant", worst_major <= 1e-9 && worst_tangent <= 1e-12,
          "max violation " + fmt(worst_major) + ", tangency gap " + fmt(worst_tangent));
  });

  guarded("quadratic-majorant", [&] {
    const SmoothTerm h(blur, random_vector(img, eng));
    double worst = 0.0;
    for (MetricPolicy pol : {MetricPolicy::scalar, MetricPolicy::diagonal_majorant}) {
      const Metric A = h.metric(pol);
      for (int i = 0; i < 20; ++i) {
        const Vector x = random_vector(img, eng), xt = random_vector(img, eng);
        const Vector g = h.gradient(xt);
        std::vector<double> d(x.size());
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - xt[j];
        const double ub = h.value(xt) + dot(d, g.span()) + 0.5 * std::pow(A.norm(d), 2);
        const double hx = h.value(x);
        worst = std::max(worst, (hx - ub) / (1.0 + std::abs(hx)));
      }
    }
    check("quadratic-majorant", worst <= 1e-9, "max violation " + fmt(worst));
  });

  for (ProxKind k : {ProxKind::weighted_l1, ProxKind::weighted_sq, ProxKind::logsum, ProxKind::lrho}) {
    const std::string name = std::string("prox-oracle-") + to_string(k);
    guarded(name, [&] {
      const OracleReport r = run_prox_oracle(k, 100);
      check(name, r.passed(),
            std::to_string(r.failures) + " failures, max error " + fmt(r.max_abs_error));
    });
  }

  guarded("reduction", [&] {
    const Shape s = Shape::image(16, 16);
    const LinearOperator H = make_motion_blur(3, 30.0, s);
    const SmoothTerm h(H, random_vector(s, eng));
    const CompositePenalty pen(Phi::identity(0.3), PsiTag::abs_coeff, LinearOperator::dwt(s, 2));
    SolverConfig cfg;
    cfg.max_outer = 30;
    cfg.stop_x_tol = cfg.stop_f_tol = 0.0;
    std::vector<Vector> seq;
    const Vector x0 = default_initialization(h);
    cfg.algo = Algorithm::vmfb;
    solve(h, pen, cfg, x0, [&](int, int, const Vector& x) { seq.push_back(x); });
    cfg.algo = Algorithm::c2fb;
    cfg.inner_iters = 3;
    cfg.max_outer = 10;
    std::size_t idx = 0;
    double worst = 0.0;
    solve(h, pen, cfg, x0, [&](int, int, const Vector& x) {
      if (idx < seq.size()) worst = std::max(worst, distance(x.span(), seq[idx].span()));
      ++idx;
    });
    check("reduction", idx == seq.size() && worst <= 1e-12, "max iterate gap " + fmt(worst));
  });

  guarded("critical-point", [&] {
    const Shape s = Shape::vector(1);
    const SmoothTerm h(LinearOperator::identity(s), Vector(s, 4.0));
    const CompositePenalty pen(Phi::logsum(1.0, 0.5), PsiTag::abs_coeff, LinearOperator::identity(s));
    SolverConfig cfg;
    cfg.metric_policy = MetricPolicy::scalar;
    cfg.stop_x_tol = 1e-14;
    cfg.stop_f_tol = 1e-15;
    const SolveResult r = solve(h, pen, cfg, Vector(s, 1.0));
    const double t = r.trace.records.back().subgrad_residual;
    auto f = [](double x) { return 0.5 * (x - 4.0) * (x - 4.0) + std::log(std::abs(x) + 0.5); };
    const double g = grid_argmin(f, 10.0);
    const double gap = std::abs(r.x_star[0] - g);
    check("critical-point", r.converged && t <= 1e-6 && gap <= 1e-4,
          "x* " + fmt(r.x_star[0]) + ", grid " + fmt(g) + ", residual " + fmt(t));
  });

  guarded("descent-run", [&] {
    Vector xbar(img);
    for (std::size_t i = 0; i < img.rows; ++i)
      for (std::size_t j = 0; j < img.cols; ++j) xbar.at(i, j) = (i / 8 + j / 8) % 2 ? 200.0 : 50.0;
    const Observation obs = generate_observation(xbar, blur, 20.0, 11);
    const Observation again = generate_observation(xbar, blur, 20.0, 11);
    check("determinism", obs.y.values() == again.y.values(), "identical observation for identical seed");
    const SmoothTerm h(blur, obs.y);
    const CompositePenalty pen(Phi::logsum(30.0, 10.0), PsiTag::abs_coeff, dwt);
    SolverConfig cfg;
    cfg.inner_iters = 5;
    cfg.max_outer = 5000;
    const SolveResult r = solve(h, pen, cfg, default_initialization(h));
    check("descent-run", r.converged && r.trace.invariants_hold(),
          std::to_string(r.outer_iters) + " outer iterations, f " + fmt(r.f_final));
  });

  return all;
}

}  // namespace c2fb
