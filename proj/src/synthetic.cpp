#include "lcfg/synthetic.hpp"

#include <cmath>

#include <Eigen/QR>

namespace lcfg::synthetic {

Matrix toy_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix u(2, 2);
  u << r, r, r, -r;
  return u;
}

GaussianStats toy_conditional(const Vector& mu_c) {
  return GaussianStats(mu_c, toy_basis(), Eigen::Vector2d(10.0, 3.0), std::string("toy_cond"));
}

GaussianStats toy_unconditional(const Vector& mu_uc) {
  return GaussianStats(mu_uc, toy_basis(), Eigen::Vector2d(3.0, 10.0), std::string("toy_uncond"));
}

CommonPCPair toy_pair(const Vector& mu_c, const Vector& mu_uc) {
  return CommonPCPair{toy_basis(), Eigen::Vector2d(10.0, 3.0), Eigen::Vector2d(3.0, 10.0), mu_c, mu_uc};
}

Matrix random_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

GaussianStats random_stats(Eigen::Index d, std::mt19937_64& rng, double lam_lo, double lam_hi) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> lam(lam_lo, lam_hi);
  Vector mean(d), eigvals(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    mean(i) = unit(rng);
    eigvals(i) = lam(rng);
  }
  return GaussianStats(mean, random_orthogonal(d, rng), eigvals);
}

Matrix random_spd(Eigen::Index d, std::mt19937_64& rng, double lam_lo, double lam_hi) {
  std::uniform_real_distribution<double> lam(lam_lo, lam_hi);
  Vector eigvals(d);
  for (Eigen::Index i = 0; i < d; ++i) eigvals(i) = lam(rng);
  const Matrix q = random_orthogonal(d, rng);
  Matrix s = q * eigvals.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

MixtureModel random_mixture(std::size_t k, Eigen::Index d, std::mt19937_64& rng, double mean_scale) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<GaussianStats> comps;
  std::vector<double> w(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    auto s = random_stats(d, rng, 0.2, 3.0);
    comps.emplace_back(mean_scale * s.mean(), s.eigvecs(), s.eigvals());
    w[i] = expo(rng) + 0.05;
    total += w[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    w[i] /= total;
    acc += w[i];
  }
  w[k - 1] = 1.0 - acc;
  return MixtureModel(std::move(comps), std::move(w));
}

Matrix draw_gaussian(const GaussianStats& stats, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index d = stats.dim();
  Matrix z(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = normal(rng);
  const Matrix factor = stats.eigvecs() * stats.eigvals().cwiseSqrt().asDiagonal();
  Matrix x = z * factor.transpose();
  x.rowwise() += stats.mean().transpose();
  return x;
}

GaussianStats pooled_stats(const std::vector<GaussianStats>& classes) {
  const Eigen::Index d = classes.front().dim();
  const double k = static_cast<double>(classes.size());
  Vector mean = Vector::Zero(d);
  for (const auto& c : classes) mean += c.mean() / k;
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& c : classes) {
    const Vector dm = c.mean() - mean;
    cov += (c.covariance() + dm * dm.transpose()) / k;
  }
  return GaussianStats::from_covariance(mean, cov, std::string("pooled"));
}

ThreeClassSetup three_class_setup() {
  // Classes share the first two basis directions (with different variances) and differ
  // in how they rotate the remaining plane.
  auto basis = [](double angle) {
    Matrix u = Matrix::Identity(4, 4);
    const double c = std::cos(angle), s = std::sin(angle);
    u(2, 2) = c;
    u(3, 2) = s;
    u(2, 3) = -s;
    u(3, 3) = c;
    return u;
  };
  ThreeClassSetup out;
  const double angles[3] = {0.0, 0.6, 1.2};
  const Eigen::Vector4d lams[3] = {{6.0, 2.0, 4.0, 0.5}, {3.0, 5.0, 4.0, 0.5}, {2.0, 2.5, 6.0, 1.0}};
  const Eigen::Vector4d means[3] = {{3.0, 0.0, 1.0, 0.0}, {-1.5, 2.5, 0.0, 1.0}, {-1.5, -2.5, -1.0, -1.0}};
  for (int i = 0; i < 3; ++i)
    out.classes.emplace_back(Vector(means[i]), basis(angles[i]), Vector(lams[i]), "class" + std::to_string(i));
  out.pooled = pooled_stats(out.classes);
  return out;
}

}  // namespace lcfg::synthetic
