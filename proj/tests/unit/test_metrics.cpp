#include <doctest.h>

#include "helpers.hpp"
#include "lcfg/error.hpp"
#include "lcfg/image.hpp"
#include "lcfg/metrics.hpp"
#include "lcfg/synthetic.hpp"

using namespace lcfg;

TEST_CASE("projection histogram basics") {
  const Vector center = Eigen::Vector2d(1.0, 2.0);
  Matrix s(4, 2);
  s.rowwise() = center.transpose();
  const auto h = project_histogram(s, Eigen::Vector2d(1.0, 0.0), center, 10);
  CHECK(h.values.cwiseAbs().maxCoeff() == 0.0);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 4);
  for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);
  CHECK_THROWS_AS(project_histogram(s, Eigen::Vector2d(1.0, 1.0), center), DomainError);
  CHECK_THROWS(project_histogram(Matrix(0, 2), Eigen::Vector2d(1.0, 0.0), center));
}

TEST_CASE("projected std recovers eigenvalues") {
  std::mt19937_64 rng(1);
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  const Matrix x = synthetic::draw_gaussian(toy, 10000, rng);
  for (int i = 0; i < 2; ++i) {
    const auto h = project_histogram(x, toy.eigvecs().col(i), Vector::Zero(2));
    CHECK(std::abs(h.summary.stddev / std::sqrt(toy.eigvals()(i)) - 1.0) < 0.05);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 10000);
  }
  const auto mag = project_histogram(x, toy.eigvecs().col(0), Vector::Zero(2), 20, true);
  CHECK(mag.values.minCoeff() >= 0.0);
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({5.0}, 0.95) == 5.0);
  CHECK(quantile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));
}

TEST_CASE("Gaussian Frechet distance") {
  std::mt19937_64 rng(2);
  const auto a = synthetic::random_stats(4, rng), b = synthetic::random_stats(4, rng);
  CHECK(gaussian_frechet(a, a) < 1e-10);
  CHECK(std::abs(gaussian_frechet(a, b) - gaussian_frechet(b, a)) < 1e-9);
  const GaussianStats z1(Vector::Zero(3), Matrix::Identity(3, 3), Vector::Zero(3));
  const GaussianStats z2(Vector(Eigen::Vector3d(1.0, 2.0, 2.0)), Matrix::Identity(3, 3), Vector::Zero(3));
  CHECK(gaussian_frechet(z1, z2) == doctest::Approx(9.0));
  // Commuting case: toy conditional vs unconditional share a basis.
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  const double expect = 32.0 + 2.0 * std::pow(std::sqrt(10.0) - std::sqrt(3.0), 2);
  CHECK(gaussian_frechet(c, u) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("class similarity matrix") {
  std::mt19937_64 rng(3);
  const auto a = synthetic::random_stats(3, rng), b = synthetic::random_stats(3, rng), c = synthetic::random_stats(3, rng);
  const Matrix m = class_similarity_matrix({a, b, c});
  CHECK(m.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(class_similarity_matrix({a, a})(0, 1) < 1e-10);
  CHECK_THROWS(class_similarity_matrix({a}));
}

TEST_CASE("mean-shifted init") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  const auto zero = mean_shifted_init(c, u, 0.0, kMeanShiftSigmaT);
  CHECK(zero.shift.norm() == 0.0);
  CHECK(zero.stddev == 31.9);
  const auto shifted = mean_shifted_init(c, u, 3.0, 10.0);
  CHECK((shifted.shift - Vector(Eigen::Vector2d(12.0, 12.0))).norm() == 0.0);
  CHECK(kMeanShiftGammaSweep.size() == 9);
}

TEST_CASE("csv and svg export") {
  std::mt19937_64 rng(4);
  const auto toy = synthetic::toy_conditional(Vector::Zero(2));
  const auto h = project_histogram(synthetic::draw_gaussian(toy, 100, rng), Eigen::Vector2d(1.0, 0.0), Vector::Zero(2), 5);
  const std::string csv = histogram_csv(h);
  CHECK(csv.rfind("left,right,count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(histogram_svg(h, "t").find("<svg") != std::string::npos);
  const Matrix m = Matrix::Identity(2, 2);
  CHECK(matrix_csv(m, {"a", "b"}).rfind("a,b\n", 0) == 0);
  CHECK(heatmap_svg(m, {"a", "b"}, "t").find("</svg>") != std::string::npos);
}

TEST_CASE("netpbm encoding") {
  const ImageShape rgb = parse_image_shape("2x2x3");
  CHECK(rgb.size() == 12);
  const std::string gray = encode_netpbm(Vector::Constant(12, 0.7), rgb);
  REQUIRE(gray.rfind("P6\n2 2\n255\n", 0) == 0);
  const std::string body = gray.substr(std::string("P6\n2 2\n255\n").size());
  CHECK(body.size() == 12);
  for (unsigned char ch : body) CHECK(ch == 128);
  Vector ramp(4);
  ramp << -1.0, 0.0, 0.5, 3.0;
  const std::string pgm = encode_netpbm(ramp, parse_image_shape("2x2"), PixelRange{-1.0, 1.0});
  REQUIRE(pgm.rfind("P5\n2 2\n255\n", 0) == 0);
  const std::string px = pgm.substr(pgm.size() - 4);
  CHECK(static_cast<unsigned char>(px[0]) == 0);
  CHECK(static_cast<unsigned char>(px[3]) == 255);
  const std::string big = encode_netpbm(Vector::LinSpaced(12288, 0.0, 1.0), parse_image_shape("64x64x3"));
  CHECK(big.size() == std::string("P6\n64 64\n255\n").size() + 12288);
  CHECK_THROWS_AS(encode_netpbm(Vector::Zero(2), parse_image_shape("8x8x3")), ShapeError);
  CHECK_THROWS(parse_image_shape("8x8x2"));
  CHECK_THROWS(parse_image_shape("abc"));
}
