#pragma once

#include <optional>

#include "lcfg/stats.hpp"

namespace lcfg {

/// Conditional/unconditional pair sharing the conditional eigenbasis U.
/// lam_uc follows U's column order and need not be sorted.
struct CommonPCPair {
  Matrix U;
  Vector lam_c;
  Vector lam_uc;
  Vector mu_c;
  Vector mu_uc;

  /// Validates shapes, orthonormality and nonnegativity.
  void validate() const;
  Eigen::Index dim() const { return mu_c.size(); }
};

struct CommonPCCheck {
  bool accepted = false;
  double commutator_norm = 0.0;      // ||Sigma_c Sigma_uc - Sigma_uc Sigma_c||_F
  double commutator_bound = 0.0;     // tol * ||Sigma_c||_F * ||Sigma_uc||_F
  double off_diagonal_mass = 0.0;    // ||offdiag(U_c^T Sigma_uc U_c)||_F
  std::optional<CommonPCPair> pair;  // set when accepted
};

/// Pair in the conditional eigenbasis, lam_uc = diag(U_c^T Sigma_uc U_c), regardless of how
/// well the two covariances commute. `off_diagonal_mass` receives the discarded part.
CommonPCPair to_common_basis(const GaussianStats& cond, const GaussianStats& uncond,
                             double* off_diagonal_mass = nullptr);

/// Accepts when the Frobenius commutator norm is within tol * ||Sigma_c||_F * ||Sigma_uc||_F.
CommonPCCheck check_common_pc(const GaussianStats& cond, const GaussianStats& uncond, double tol = 1e-8);

/// (lc + st^2)/(lc + sT^2) * (luc + sT^2)/(luc + st^2)
double h_factor(double lam_c, double lam_uc, double sigma_t, double sigma_T);

/// Mean-shift coefficient of the guided solution along one common component:
///   sqrt(lc + st^2) ((lc + st^2)/(luc + st^2))^(gamma/2)
///     * int_{st}^{sT} (luc + s^2)^(gamma/2 - 1) / (lc + s^2)^((gamma + 1)/2) s ds.
/// Uses the closed form 1 - sqrt((l + st^2)/(l + sT^2)) when |lc - luc| < 1e-12.
double b_coefficient(double lam_c, double lam_uc, double sigma_t, double sigma_T, double gamma);

/// Same integral, always by adaptive quadrature.
double b_coefficient_quadrature(double lam_c, double lam_uc, double sigma_t, double sigma_T, double gamma);

/// 1 - sqrt((lam + st^2)/(lam + sT^2)), the equal-eigenvalue case.
double b_coefficient_equal(double lam, double sigma_t, double sigma_T);

/// Closed-form guided solution at sigma_t starting from x_T at sigma_T.
Vector closed_form_cfg(const CommonPCPair& pair, const Vector& x_T, double sigma_t, double sigma_T, double gamma);

}  // namespace lcfg
