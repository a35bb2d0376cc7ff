#pragma once

#include "lcfg/stats.hpp"

namespace lcfg {

/// Per-eigendirection attenuation lambda_i / (lambda_i + sigma^2) of the optimal linear denoiser.
struct ShrinkageSpectrum {
  double sigma = 0.0;  // 0 only in the zero-noise limit
  Vector factors;
};

/// Shrinkage factors at noise level `sigma` (> 0). With `limit_zero_noise`,
/// `sigma` is ignored and the sigma -> 0 limit 1{lambda_i > 0} is returned.
ShrinkageSpectrum shrinkage(const GaussianStats& stats, double sigma, bool limit_zero_noise = false);

/// U diag(factors) U^T v without forming the d x d matrix.
Vector apply_spectral(const GaussianStats& stats, const Vector& factors, const Vector& v);

/// Optimal linear denoiser mu + U diag(shrinkage) U^T (x - mu).
Vector denoise(const GaussianStats& stats, const Vector& x, double sigma);

/// (denoise(x) - x) / sigma^2, the score of N(mu, Sigma + sigma^2 I).
Vector score(const GaussianStats& stats, const Vector& x, double sigma);

/// U diag(lambda / (lambda + sigma^2)) U^T, the denoiser Jacobian.
Matrix shrunk_covariance(const GaussianStats& stats, double sigma);

/// Cov[x | x_t] = sigma^2 U diag(lambda / (lambda + sigma^2)) U^T.
Matrix posterior_cov(const GaussianStats& stats, double sigma);

}  // namespace lcfg
