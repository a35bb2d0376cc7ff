#include "lcfg/denoiser.hpp"

#include <cmath>
#include <string>

#include "lcfg/error.hpp"

namespace lcfg {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("noise level must be a positive finite number, got " + std::to_string(sigma));
}

void require_dim(const GaussianStats& stats, const Vector& x) {
  if (x.size() != stats.dim())
    throw ShapeError("vector has dimension " + std::to_string(x.size()) + ", stats have " +
                     std::to_string(stats.dim()));
}

}  // namespace

ShrinkageSpectrum shrinkage(const GaussianStats& stats, double sigma, bool limit_zero_noise) {
  const Vector& lam = stats.eigvals();
  if (limit_zero_noise) {
    return {0.0, (lam.array() > 0.0).cast<double>().matrix()};
  }
  require_sigma(sigma);
  const double s2 = sigma * sigma;
  return {sigma, (lam.array() / (lam.array() + s2)).matrix()};
}

Vector apply_spectral(const GaussianStats& stats, const Vector& factors, const Vector& v) {
  require_dim(stats, v);
  const Vector coeffs = stats.eigvecs().transpose() * v;
  return stats.eigvecs() * factors.cwiseProduct(coeffs);
}

Vector denoise(const GaussianStats& stats, const Vector& x, double sigma) {
  require_dim(stats, x);
  const auto shrink = shrinkage(stats, sigma);
  return stats.mean() + apply_spectral(stats, shrink.factors, x - stats.mean());
}

Vector score(const GaussianStats& stats, const Vector& x, double sigma) {
  require_dim(stats, x);
  require_sigma(sigma);
  // (lambda/(lambda+s2) - 1)/s2 = -1/(lambda+s2); avoids cancelling D - x at small sigma.
  const Vector inv = -(stats.eigvals().array() + sigma * sigma).inverse().matrix();
  return apply_spectral(stats, inv, x - stats.mean());
}

Matrix shrunk_covariance(const GaussianStats& stats, double sigma) {
  const auto shrink = shrinkage(stats, sigma);
  const Matrix& u = stats.eigvecs();
  Matrix m = u * shrink.factors.asDiagonal() * u.transpose();
  return 0.5 * (m + m.transpose());
}

Matrix posterior_cov(const GaussianStats& stats, double sigma) {
  return (sigma * sigma) * shrunk_covariance(stats, sigma);
}

}  // namespace lcfg
