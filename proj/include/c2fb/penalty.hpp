#pragma once

#include <span>
#include <vector>

#include "c2fb/linops.hpp"
#include "c2fb/types.hpp"

namespace c2fb {

enum class PhiTag { identity, logsum, power };

/// Concave, strictly increasing outer function phi on [0, +inf):
///   identity  phi(u) = theta * u
///   logsum    phi(u) = theta * log(u + eps)
///   power     phi(u) = theta * ((u + eps)^rho - eps^rho)
struct Phi {
  PhiTag tag = PhiTag::identity;
  double theta = 1.0;
  double epsilon = 0.0;
  double rho = 0.0;

  static Phi identity(double theta = 1.0);
  static Phi logsum(double theta, double epsilon);
  static Phi power(double theta, double rho, double epsilon);

  double value(double u) const;
  double derivative(double u) const;
};

/// Inner function psi_p(x) = |[Wx]_p| or ([Wx]_p)^2.
enum class PsiTag { abs_coeff, sq_coeff };

inline double psi_of(PsiTag tag, double c) { return tag == PsiTag::abs_coeff ? (c < 0 ? -c : c) : c * c; }

/// Tangent-majorant weights lambda_p = phi'(psi_p(x_k)), with their anchor.
struct WeightVector {
  std::vector<double> lambda;
  Vector anchor;
};

/// g(x) = sum_p phi(psi_p(x)) with a single phi shared by all terms and
/// psi_p reading coefficient p of the analysis operator W.
class CompositePenalty {
 public:
  CompositePenalty(Phi phi, PsiTag psi, LinearOperator analysis);

  const Phi& phi() const noexcept { return phi_; }
  PsiTag psi() const noexcept { return psi_; }
  const LinearOperator& analysis() const noexcept { return analysis_; }
  std::size_t terms() const { return analysis_.output_shape().size(); }

  double eval(const Vector& x) const;
  WeightVector weights(const Vector& x_k) const;
  /// q(x, x_k) = sum_p phi(psi_p(x_k)) + lambda_p (psi_p(x) - psi_p(x_k)).
  double majorant(const Vector& x, const Vector& x_k) const;

  // Coefficient-domain kernels (c = Wx), used by the solver to avoid
  // re-applying W.
  double eval_coeffs(std::span<const double> c) const;
  void weights_from_coeffs(std::span<const double> c, std::span<double> lambda) const;
  /// C_k = sum_p phi(psi_p(c_k)) - lambda_p psi_p(c_k), so that q = l_k + C_k.
  double majorant_offset(std::span<const double> c_k, std::span<const double> lambda) const;
  double weighted_eval(std::span<const double> lambda, std::span<const double> c) const;

 private:
  Phi phi_;
  PsiTag psi_;
  LinearOperator analysis_;
};

/// l(c) = sum_p lambda_p |c_p| (abs) or sum_p lambda_p c_p^2 (sq).
double weighted_l1_eval(std::span<const double> lambda, std::span<const double> coeffs,
                        PsiTag psi = PsiTag::abs_coeff);
double weighted_l1_eval(const WeightVector& w, const Vector& coeffs, PsiTag psi = PsiTag::abs_coeff);

}  // namespace c2fb
