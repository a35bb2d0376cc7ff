#include "lcfg/cpca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"

namespace lcfg {

Vector SignedSpectrum::apply_positive(const Vector& v) const {
  if (n_pos == 0) return Vector::Zero(dim());
  const auto vp = positive_vectors();
  return vp * positive_values().cwiseProduct(vp.transpose() * v);
}

Vector SignedSpectrum::apply_negative(const Vector& v) const {
  if (n_neg == 0) return Vector::Zero(dim());
  const auto vn = negative_vectors();
  return vn * negative_values().cwiseProduct(vn.transpose() * v);
}

namespace {

void require_symmetric(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) throw ShapeError(std::string(name) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw DomainError(std::string(name) + " is not symmetric (max asymmetry " + std::to_string(asym) + ")");
}

}  // namespace

SignedSpectrum contrastive_components(const Matrix& a, const Matrix& b) {
  require_symmetric(a, "A");
  require_symmetric(b, "B");
  if (a.rows() != b.rows()) throw ShapeError("contrastive_components: A and B differ in size");
  const Matrix diff = 0.5 * (a + a.transpose()) - 0.5 * (b + b.transpose());
  auto eig = symmetric_eigen(diff);

  SignedSpectrum out;
  out.tol = 1e-10 * std::max(1.0, std::abs(eig.values(0)));
  out.n_pos = (eig.values.array() > out.tol).count();
  out.n_neg = (eig.values.array() < -out.tol).count();
  out.eigvals = std::move(eig.values);
  out.eigvecs = std::move(eig.vectors);
  return out;
}

SignedSpectrum posterior_cpcs(const GaussianStats& cond, const GaussianStats& uncond, double sigma) {
  if (cond.dim() != uncond.dim()) throw ShapeError("posterior_cpcs: dimension mismatch");
  return contrastive_components(shrunk_covariance(cond, sigma), shrunk_covariance(uncond, sigma));
}

double variance_along(const GaussianStats& stats, const Vector& v) {
  if (v.size() != stats.dim()) throw ShapeError("variance_along: dimension mismatch");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-8) throw DomainError("variance_along: direction is not a unit vector");
  const Vector coeffs = stats.eigvecs().transpose() * v;
  return std::max(0.0, coeffs.cwiseAbs2().dot(stats.eigvals()));
}

double contrastive_reconstruction_objective(const Matrix& x_centered, const Matrix& y_centered, const Vector& v) {
  if (x_centered.cols() != v.size() || y_centered.cols() != v.size())
    throw ShapeError("reconstruction objective: dimension mismatch");
  auto mean_residual = [&](const Matrix& s) {
    const Vector proj = s * v;                          // v^T x per row
    const Matrix resid = s - proj * v.transpose();      // x - v v^T x
    return resid.rowwise().squaredNorm().mean();
  };
  return mean_residual(x_centered) - mean_residual(y_centered);
}

Vector principal_angles(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("principal_angles: ambient dimensions differ");
  if (a.cols() == 0 || b.cols() == 0) return Vector();
  if (b.cols() > a.cols()) return principal_angles(b, a);
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Matrix overlap = qa.transpose() * qb;
  // Cosines lose resolution near zero angle, sines near pi/2; take each from the accurate side.
  const Vector cosines = Eigen::JacobiSVD<Matrix>(overlap).singularValues();         // descending
  const Vector sines = Eigen::JacobiSVD<Matrix>(qb - qa * overlap).singularValues();  // descending
  const Eigen::Index k = cosines.size();
  Vector angles(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(k - 1 - i), 0.0, 1.0);
    angles(i) = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  return angles;
}

std::vector<double> cpc_drift(const GaussianStats& cond, const GaussianStats& uncond,
                              const std::vector<double>& sigmas) {
  const auto reference = contrastive_components(cond.covariance(), uncond.covariance());
  std::vector<double> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) {
    const auto at = posterior_cpcs(cond, uncond, sigma);
    const Eigen::Index k = std::min(reference.n_pos, at.n_pos);
    if (k == 0) {
      out.push_back(0.0);
      continue;
    }
    const Vector angles = principal_angles(reference.eigvecs.leftCols(k), at.eigvecs.leftCols(k));
    out.push_back(angles.maxCoeff());
  }
  return out;
}

}  // namespace lcfg
