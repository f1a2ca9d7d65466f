#include "c2fb/penalty.hpp"

#include <cmath>

namespace c2fb {

Phi Phi::identity(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::invalid_argument, "identity phi: theta must be positive");
  }
  return {PhiTag::identity, theta, 0.0, 0.0};
}

Phi Phi::logsum(double theta, double epsilon) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::invalid_argument, "logsum phi: theta must be positive");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_argument, "logsum phi: epsilon must be positive");
  }
  return {PhiTag::logsum, theta, epsilon, 0.0};
}

Phi Phi::power(double theta, double rho, double epsilon) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::invalid_argument, "power phi: theta must be positive");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "power phi: rho must lie in (0, 1)");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_argument, "power phi: epsilon must be positive");
  }
  return {PhiTag::power, theta, epsilon, rho};
}

double Phi::value(double u) const {
  switch (tag) {
    case PhiTag::identity:
      return theta * u;
    case PhiTag::logsum:
      return theta * std::log(u + epsilon);
    case PhiTag::power:
      return theta * (std::pow(u + epsilon, rho) - std::pow(epsilon, rho));
  }
  return 0.0;
}

double Phi::derivative(double u) const {
  switch (tag) {
    case PhiTag::identity:
      return theta;
    case PhiTag::logsum:
      return theta / (u + epsilon);
    case PhiTag::power:
      return theta * rho * std::pow(u + epsilon, rho - 1.0);
  }
  return 0.0;
}

CompositePenalty::CompositePenalty(Phi phi, PsiTag psi, LinearOperator analysis)
    : phi_(phi), psi_(psi), analysis_(std::move(analysis)) {}

double CompositePenalty::eval_coeffs(std::span<const double> c) const {
  double s = 0.0;
  for (double v : c) s += phi_.value(psi_of(psi_, v));
  return s;
}

void CompositePenalty::weights_from_coeffs(std::span<const double> c, std::span<double> lambda) const {
  require_same_size(c.size(), lambda.size(), "weights");
  for (std::size_t p = 0; p < c.size(); ++p) lambda[p] = phi_.derivative(psi_of(psi_, c[p]));
}

double CompositePenalty::majorant_offset(std::span<const double> c_k,
                                         std::span<const double> lambda) const {
  require_same_size(c_k.size(), lambda.size(), "majorant_offset");
  double s = 0.0;
  for (std::size_t p = 0; p < c_k.size(); ++p) {
    const double u = psi_of(psi_, c_k[p]);
    s += phi_.value(u) - lambda[p] * u;
  }
  return s;
}

double CompositePenalty::weighted_eval(std::span<const double> lambda, std::span<const double> c) const {
  return weighted_l1_eval(lambda, c, psi_);
}

double CompositePenalty::eval(const Vector& x) const {
  const Vector c = analysis_.apply(x);
  return eval_coeffs(c.span());
}

WeightVector CompositePenalty::weights(const Vector& x_k) const {
  const Vector c = analysis_.apply(x_k);
  WeightVector w{std::vector<double>(c.size()), x_k};
  weights_from_coeffs(c.span(), w.lambda);
  return w;
}

double CompositePenalty::majorant(const Vector& x, const Vector& x_k) const {
  const Vector c = analysis_.apply(x);
  const Vector ck = analysis_.apply(x_k);
  // Summed term by term so that x == x_k reproduces g(x_k) exactly.
  double s = 0.0;
  for (std::size_t p = 0; p < c.size(); ++p) {
    const double uk = psi_of(psi_, ck[p]);
    const double u = psi_of(psi_, c[p]);
    s += phi_.value(uk) + phi_.derivative(uk) * (u - uk);
  }
  return s;
}

double weighted_l1_eval(std::span<const double> lambda, std::span<const double> coeffs, PsiTag psi) {
  require_same_size(lambda.size(), coeffs.size(), "weighted_l1_eval");
  double s = 0.0;
  for (std::size_t p = 0; p < coeffs.size(); ++p) s += lambda[p] * psi_of(psi, coeffs[p]);
  return s;
}

double weighted_l1_eval(const WeightVector& w, const Vector& coeffs, PsiTag psi) {
  return weighted_l1_eval(w.lambda, coeffs.span(), psi);
}

}  // namespace c2fb
