#include <doctest.h>

#include "helpers.hpp"
#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/synthetic.hpp"

using namespace lcfg;

TEST_CASE("shrinkage factors") {
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  const auto f = shrinkage(toy, 80.0).factors;
  CHECK(f(0) == doctest::Approx(10.0 / 6410.0).epsilon(1e-14));
  CHECK(f(1) == doctest::Approx(3.0 / 6403.0).epsilon(1e-14));
  const auto small = shrinkage(toy, 1e-9).factors;
  CHECK(small(0) == doctest::Approx(1.0));
  const GaussianStats zero(Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(shrinkage(zero, 1.0).factors.norm() == 0.0);
  CHECK(shrinkage(toy, 0.0, true).factors == Vector::Ones(2));
  CHECK_THROWS_AS(shrinkage(toy, 0.0), DomainError);
  CHECK_THROWS_AS(shrinkage(toy, -1.0), DomainError);
}

TEST_CASE("denoiser fixed point, limits and toy value") {
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  CHECK(denoise(toy, toy.mean(), 3.0).norm() == 0.0);
  CHECK(denoise(toy, Eigen::Vector2d(5.0, -2.0), 1e8).norm() < 1e-12);
  const Vector d = denoise(toy, Eigen::Vector2d(1.0, 1.0), 1.0);
  CHECK(d(0) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
  CHECK(d(1) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
  // Brute-force matrix formula.
  const Matrix cov = toy.covariance();
  const Vector brute = cov * (cov + Matrix::Identity(2, 2)).inverse() * Eigen::Vector2d(1.0, 1.0);
  CHECK((d - brute).norm() < 1e-14);
  CHECK_THROWS_AS(denoise(toy, Vector::Zero(3), 1.0), ShapeError);
}

TEST_CASE("denoiser is affine") {
  std::mt19937_64 rng(5);
  const auto s = synthetic::random_stats(6, rng);
  const Vector x = test::gaussian_vector(rng, 6, 2.0), y = test::gaussian_vector(rng, 6, 2.0);
  for (double a : {-1.5, 0.25, 2.0}) {
    const Vector lhs = denoise(s, a * x + (1 - a) * y, 0.7);
    const Vector rhs = a * denoise(s, x, 0.7) + (1 - a) * denoise(s, y, 0.7);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("score matches dense solve and Tweedie") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const auto s = synthetic::random_stats(5, rng);
    const Vector x = test::gaussian_vector(rng, 5, 3.0);
    const double sigma = 0.1 + k;
    const Vector dense = -(s.covariance() + sigma * sigma * Matrix::Identity(5, 5)).ldlt().solve(x - s.mean());
    CHECK((score(s, x, sigma) - dense).norm() <= 1e-8 * dense.norm());
    CHECK((denoise(s, x, sigma) - (x + sigma * sigma * score(s, x, sigma))).cwiseAbs().maxCoeff() < 1e-10);
  }
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  CHECK(score(toy, toy.mean(), 2.0).norm() == 0.0);
  const GaussianStats iso(Vector::Zero(3), Matrix::Identity(3, 3), Vector::Constant(3, 2.5));
  const Vector x = Eigen::Vector3d(1.0, -2.0, 3.0);
  CHECK((score(iso, x, 0.5) + x / (2.5 + 0.25)).norm() < 1e-15);
}

TEST_CASE("posterior covariance") {
  const GaussianStats zero(Vector::Zero(3), Matrix::Identity(3, 3), Vector::Zero(3));
  CHECK(posterior_cov(zero, 1.0).norm() == 0.0);
  std::mt19937_64 rng(7);
  const auto s = synthetic::random_stats(4, rng);
  const double sigma = 1.3;
  const Matrix p = posterior_cov(s, sigma);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  Vector expected = (sigma * sigma * s.eigvals().array() / (s.eigvals().array() + sigma * sigma)).matrix();
  std::sort(expected.begin(), expected.end());
  CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(expected(i) <= std::min(s.eigvals().maxCoeff(), sigma * sigma) + 1e-12);
  CHECK((p - p.transpose()).norm() == 0.0);
}
