#pragma once

#include <vector>

#include "lcfg/stats.hpp"

namespace lcfg {

/// Eigenpairs of a symmetric difference A - B, sorted descending.
///
/// The first `n_pos` columns are the positive contrastive components, the last
/// `n_neg` the negative ones. Eigenvalues within `tol` of zero belong to neither.
struct SignedSpectrum {
  Vector eigvals;
  Matrix eigvecs;
  Eigen::Index n_pos = 0;
  Eigen::Index n_neg = 0;
  double tol = 0.0;

  Eigen::Index dim() const { return eigvals.size(); }
  auto positive_vectors() const { return eigvecs.leftCols(n_pos); }
  auto positive_values() const { return eigvals.head(n_pos); }
  auto negative_vectors() const { return eigvecs.rightCols(n_neg); }
  auto negative_values() const { return eigvals.tail(n_neg); }

  /// V+ diag(lambda+) V+^T v
  Vector apply_positive(const Vector& v) const;
  /// V- diag(lambda-) V-^T v
  Vector apply_negative(const Vector& v) const;
};

/// Signed eigendecomposition of sym(A) - sym(B). Inputs must be symmetric within 1e-8.
SignedSpectrum contrastive_components(const Matrix& a, const Matrix& b);

/// CPCs contrasting the conditional and unconditional posterior covariances at `sigma`.
/// Eigenvalues are in shrinkage units (the common sigma^2 factor is dropped).
SignedSpectrum posterior_cpcs(const GaussianStats& cond, const GaussianStats& uncond, double sigma);

/// v^T Sigma v for a unit vector v.
double variance_along(const GaussianStats& stats, const Vector& v);

/// Empirical E_X||x - v v^T x||^2 - E_Y||y - v v^T y||^2 over two centered sample sets (rows).
double contrastive_reconstruction_objective(const Matrix& x_centered, const Matrix& y_centered, const Vector& v);

/// Principal angles (radians, ascending) between the column spans of `a` and `b`.
Vector principal_angles(const Matrix& a, const Matrix& b);

/// Largest principal angle between the +CPC subspace of the posterior difference at each sigma
/// and the +CPC subspace of Sigma_c - Sigma_uc, truncated to the smaller of the two ranks.
std::vector<double> cpc_drift(const GaussianStats& cond, const GaussianStats& uncond,
                              const std::vector<double>& sigmas);

}  // namespace lcfg
