#pragma once

#include <random>
#include <vector>

#include "lcfg/analytic.hpp"
#include "lcfg/gmm.hpp"
#include "lcfg/stats.hpp"

namespace lcfg::synthetic {

/// Columns (1, 1)/sqrt2 and (1, -1)/sqrt2.
Matrix toy_basis();

/// 2D conditional class: toy basis, eigenvalues (10, 3).
GaussianStats toy_conditional(const Vector& mu_c);
/// 2D unconditional pool: toy basis, eigenvalues (3, 10) along the same columns.
GaussianStats toy_unconditional(const Vector& mu_uc);
/// Both of the above in the shared basis, lam_uc = (3, 10).
CommonPCPair toy_pair(const Vector& mu_c, const Vector& mu_uc);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Eigen::Index d, std::mt19937_64& rng);

/// Random mean in [-1, 1]^d and eigenvalues uniform in [lam_lo, lam_hi] in a random basis.
GaussianStats random_stats(Eigen::Index d, std::mt19937_64& rng, double lam_lo = 0.1, double lam_hi = 10.0);

/// Random symmetric PSD matrix with eigenvalues uniform in [lam_lo, lam_hi].
Matrix random_spd(Eigen::Index d, std::mt19937_64& rng, double lam_lo = 0.1, double lam_hi = 10.0);

/// K random components with Dirichlet(1) weights.
MixtureModel random_mixture(std::size_t k, Eigen::Index d, std::mt19937_64& rng, double mean_scale = 3.0);

/// Rows drawn from N(mean, covariance).
Matrix draw_gaussian(const GaussianStats& stats, Eigen::Index n, std::mt19937_64& rng);

/// Three classes in 4D with distinct means and partially shared covariance structure,
/// plus the pooled unconditional statistics of their equal-weight union.
struct ThreeClassSetup {
  std::vector<GaussianStats> classes;
  GaussianStats pooled;
};
ThreeClassSetup three_class_setup();

/// Moment-matched Gaussian of an equal-weight union of classes.
GaussianStats pooled_stats(const std::vector<GaussianStats>& classes);

}  // namespace lcfg::synthetic
