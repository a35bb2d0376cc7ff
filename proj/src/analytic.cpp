#include "lcfg/analytic.hpp"

#include <cmath>
#include <string>

#include "lcfg/error.hpp"
#include "lcfg/quadrature.hpp"

namespace lcfg {

namespace {

void require_sigma_order(double sigma_t, double sigma_T) {
  if (!(sigma_t > 0.0) || !(sigma_T >= sigma_t) || !std::isfinite(sigma_T))
    throw DomainError("need sigma_T >= sigma_t > 0");
}

void require_eigenvalues(double lam_c, double lam_uc) {
  if (!(lam_c >= 0.0) || !(lam_uc >= 0.0)) throw DomainError("eigenvalues must be nonnegative");
}

}  // namespace

void CommonPCPair::validate() const {
  const Eigen::Index d = mu_c.size();
  if (d == 0 || mu_uc.size() != d || lam_c.size() != d || lam_uc.size() != d || U.rows() != d || U.cols() != d)
    throw ShapeError("CommonPCPair: inconsistent sizes");
  if ((lam_c.array() < 0.0).any() || (lam_uc.array() < 0.0).any())
    throw DomainError("CommonPCPair: negative eigenvalue");
  if ((U.transpose() * U - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("CommonPCPair: U is not orthonormal");
}

CommonPCPair to_common_basis(const GaussianStats& cond, const GaussianStats& uncond, double* off_diagonal_mass) {
  if (cond.dim() != uncond.dim()) throw ShapeError("to_common_basis: dimension mismatch");
  const Matrix& u = cond.eigvecs();
  const Matrix projected = u.transpose() * uncond.covariance() * u;
  CommonPCPair pair{u, cond.eigvals(), projected.diagonal().cwiseMax(0.0), cond.mean(), uncond.mean()};
  if (off_diagonal_mass) {
    Matrix off = projected;
    off.diagonal().setZero();
    *off_diagonal_mass = off.norm();
  }
  return pair;
}

CommonPCCheck check_common_pc(const GaussianStats& cond, const GaussianStats& uncond, double tol) {
  if (cond.dim() != uncond.dim()) throw ShapeError("check_common_pc: dimension mismatch");
  const Matrix sc = cond.covariance();
  const Matrix suc = uncond.covariance();
  CommonPCCheck out;
  out.commutator_norm = (sc * suc - suc * sc).norm();
  out.commutator_bound = tol * sc.norm() * suc.norm();
  auto pair = to_common_basis(cond, uncond, &out.off_diagonal_mass);
  out.accepted = out.commutator_norm <= out.commutator_bound;
  if (out.accepted) out.pair = std::move(pair);
  return out;
}

double h_factor(double lam_c, double lam_uc, double sigma_t, double sigma_T) {
  require_eigenvalues(lam_c, lam_uc);
  require_sigma_order(sigma_t, sigma_T);
  const double t2 = sigma_t * sigma_t;
  const double T2 = sigma_T * sigma_T;
  return (lam_c + t2) / (lam_c + T2) * ((lam_uc + T2) / (lam_uc + t2));
}

double b_coefficient_equal(double lam, double sigma_t, double sigma_T) {
  if (!(lam >= 0.0)) throw DomainError("eigenvalue must be nonnegative");
  require_sigma_order(sigma_t, sigma_T);
  return 1.0 - std::sqrt((lam + sigma_t * sigma_t) / (lam + sigma_T * sigma_T));
}

double b_coefficient_quadrature(double lam_c, double lam_uc, double sigma_t, double sigma_T, double gamma) {
  require_eigenvalues(lam_c, lam_uc);
  require_sigma_order(sigma_t, sigma_T);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
  if (sigma_t == sigma_T) return 0.0;

  // The prefactor is folded into the integrand in log space so neither factor overflows.
  const double t2 = sigma_t * sigma_t;
  const double log_prefactor =
      0.5 * std::log(lam_c + t2) + 0.5 * gamma * (std::log(lam_c + t2) - std::log(lam_uc + t2));
  const double a_uc = 0.5 * gamma - 1.0;
  const double a_c = 0.5 * (gamma + 1.0);
  auto integrand = [&](double s) {
    const double s2 = s * s;
    return s * std::exp(log_prefactor + a_uc * std::log(lam_uc + s2) - a_c * std::log(lam_c + s2));
  };
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-12;
  return integrate_adaptive(integrand, sigma_t, sigma_T, opt).value;
}

double b_coefficient(double lam_c, double lam_uc, double sigma_t, double sigma_T, double gamma) {
  require_eigenvalues(lam_c, lam_uc);
  require_sigma_order(sigma_t, sigma_T);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
  if (sigma_t == sigma_T) return 0.0;
  if (std::abs(lam_c - lam_uc) < 1e-12) return b_coefficient_equal(0.5 * (lam_c + lam_uc), sigma_t, sigma_T);
  return b_coefficient_quadrature(lam_c, lam_uc, sigma_t, sigma_T, gamma);
}

Vector closed_form_cfg(const CommonPCPair& pair, const Vector& x_T, double sigma_t, double sigma_T, double gamma) {
  pair.validate();
  if (x_T.size() != pair.dim()) throw ShapeError("closed_form_cfg: dimension mismatch");
  require_sigma_order(sigma_t, sigma_T);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
  if (sigma_t == sigma_T) return x_T;

  const Eigen::Index d = pair.dim();
  const double t2 = sigma_t * sigma_t;
  const double T2 = sigma_T * sigma_T;
  const Vector coeffs = pair.U.transpose() * (x_T - pair.mu_c);
  const Vector offset = pair.U.transpose() * (pair.mu_c - pair.mu_uc);
  Vector scale(d), shift(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lc = pair.lam_c(i);
    const double luc = pair.lam_uc(i);
    const double unguided = std::sqrt((lc + t2) / (lc + T2));
    scale(i) = std::pow(h_factor(lc, luc, sigma_t, sigma_T), 0.5 * gamma) * unguided;
    shift(i) = gamma == 0.0 ? 0.0 : gamma * b_coefficient(lc, luc, sigma_t, sigma_T, gamma) * offset(i);
  }
  // Same evaluation order as closed_form_unguided, so gamma = 0 reproduces it bit for bit.
  Vector x = pair.mu_c + pair.U * scale.cwiseProduct(coeffs);
  if (gamma != 0.0) x += pair.U * shift;
  return x;
}

}  // namespace lcfg
