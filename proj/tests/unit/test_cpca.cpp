#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "lcfg/cpca.hpp"
#include "lcfg/error.hpp"
#include "lcfg/synthetic.hpp"

using namespace lcfg;

TEST_CASE("no contrast gives a zero spectrum") {
  std::mt19937_64 rng(1);
  const Matrix a = synthetic::random_spd(4, rng);
  const auto spec = contrastive_components(a, a);
  CHECK(spec.eigvals.cwiseAbs().maxCoeff() == 0.0);
  CHECK(spec.n_pos == 0);
  CHECK(spec.n_neg == 0);
}

TEST_CASE("toy posterior CPCs at sigma = 1") {
  const auto cond = synthetic::toy_conditional(Vector::Zero(2));
  const auto uncond = synthetic::toy_unconditional(Vector::Zero(2));
  const auto spec = posterior_cpcs(cond, uncond, 1.0);
  const double expect = 10.0 / 11.0 - 3.0 / 4.0;
  CHECK(spec.eigvals(0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(spec.eigvals(1) == doctest::Approx(-expect).epsilon(1e-12));
  CHECK(spec.n_pos == 1);
  CHECK(spec.n_neg == 1);
  CHECK(std::abs(spec.eigvecs.col(0).dot(Eigen::Vector2d(1.0, 1.0).normalized())) == doctest::Approx(1.0));
  CHECK(posterior_cpcs(cond, cond, 2.0).eigvals.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("common-basis posterior CPC values and signs") {
  std::mt19937_64 rng(2);
  const Matrix u = synthetic::random_orthogonal(5, rng);
  const Vector lc = Eigen::Matrix<double, 5, 1>(9.0, 4.0, 2.0, 1.0, 0.3);
  const Vector luc = Eigen::Matrix<double, 5, 1>(3.0, 6.0, 2.5, 0.2, 0.8);
  const GaussianStats c(Vector::Zero(5), u, lc), uc(Vector::Zero(5), u, luc);
  const double sigma = 0.9, s2 = sigma * sigma;
  const auto spec = posterior_cpcs(c, uc, sigma);
  const Vector expected = (lc.array() / (lc.array() + s2) - luc.array() / (luc.array() + s2)).matrix();
  Vector sorted = expected;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  CHECK((spec.eigvals - sorted).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(spec.n_pos == (lc.array() > luc.array()).count());
  for (Eigen::Index i = 0; i < spec.n_pos; ++i) {
    const Vector v = spec.eigvecs.col(i);
    CHECK(variance_along(c, v) > variance_along(uc, v));
  }
}

TEST_CASE("reconstruction and grid search in 2D") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const Matrix a = synthetic::random_spd(2, rng), b = synthetic::random_spd(2, rng);
    const auto spec = contrastive_components(a, b);
    const Matrix recon = spec.eigvecs * spec.eigvals.asDiagonal() * spec.eigvecs.transpose();
    CHECK((recon - (a - b)).cwiseAbs().maxCoeff() <= 1e-8 * (a - b).cwiseAbs().maxCoeff());
    double best = -1e300, best_t = 0.0;
    for (int i = 0; i < 3600; ++i) {
      const double t = i * std::numbers::pi / 1800.0;
      const Vector v = Eigen::Vector2d(std::cos(t), std::sin(t));
      if (v.dot((a - b) * v) > best) best = v.dot((a - b) * v), best_t = t;
    }
    const Vector g = Eigen::Vector2d(std::cos(best_t), std::sin(best_t));
    CHECK(std::acos(std::min(1.0, std::abs(g.dot(spec.eigvecs.col(0))))) * 180 / std::numbers::pi < 0.2);
  }
}

TEST_CASE("signed spectrum applies its halves") {
  std::mt19937_64 rng(4);
  const Matrix a = synthetic::random_spd(4, rng), b = synthetic::random_spd(4, rng);
  const auto spec = contrastive_components(a, b);
  const Vector v = test::gaussian_vector(rng, 4);
  CHECK((spec.apply_positive(v) + spec.apply_negative(v) - (a - b) * v).norm() < 1e-10);
}

TEST_CASE("variance along a direction") {
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  CHECK(variance_along(toy, Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(6.5));
  CHECK(variance_along(toy, toy.eigvecs().col(1)) == doctest::Approx(3.0));
  const GaussianStats zero(Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(variance_along(zero, Eigen::Vector2d(0.6, 0.8)) == 0.0);
  CHECK_THROWS_AS(variance_along(toy, Eigen::Vector2d(1.0, 1.0)), DomainError);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = 0.5;
  CHECK_THROWS_AS(contrastive_components(a, Matrix::Identity(2, 2)), DomainError);
  CHECK_THROWS_AS(contrastive_components(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), ShapeError);
}

TEST_CASE("CPC drift is zero for a common basis and positive otherwise") {
  const auto cond = synthetic::toy_conditional(Vector::Zero(2));
  const auto uncond = synthetic::toy_unconditional(Vector::Zero(2));
  for (double a : cpc_drift(cond, uncond, {0.1, 1.0, 10.0})) CHECK(a < 1e-8);
  std::mt19937_64 rng(5);
  const auto c = synthetic::random_stats(3, rng), u = synthetic::random_stats(3, rng);
  double maxdrift = 0.0;
  for (double a : cpc_drift(c, u, {0.05, 1.0, 30.0})) maxdrift = std::max(maxdrift, a);
  CHECK(maxdrift > 1e-6);
}
