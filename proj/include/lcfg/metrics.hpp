#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "lcfg/sampler.hpp"
#include "lcfg/stats.hpp"

namespace lcfg {

struct HistogramSummary {
  double mean = 0.0;
  double stddev = 0.0;                 // population
  std::array<double, 5> quantiles{};   // 5, 25, 50, 75, 95 %
};

struct ProjectionHistogram {
  Vector direction;
  Vector center;
  Vector values;
  std::vector<double> edges;            // n_bins + 1, strictly increasing
  std::vector<std::size_t> counts;      // n_bins
  HistogramSummary summary;
};

inline constexpr std::size_t kDefaultBins = 50;
inline constexpr std::array<double, 5> kQuantileLevels = {0.05, 0.25, 0.50, 0.75, 0.95};

/// Projects each row of `samples` onto `direction` after subtracting `center`.
/// With `magnitude`, absolute projections are histogrammed.
ProjectionHistogram project_histogram(const Matrix& samples, const Vector& direction, const Vector& center,
                                      std::size_t n_bins = kDefaultBins, bool magnitude = false);
ProjectionHistogram project_histogram(const SampleBatch& batch, const Vector& direction, const Vector& center,
                                      std::size_t n_bins = kDefaultBins, bool magnitude = false);

/// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// ||mu_a - mu_b||^2 + tr(Sigma_a + Sigma_b - 2 (Sigma_a^1/2 Sigma_b Sigma_a^1/2)^1/2), clamped at 0.
double gaussian_frechet(const GaussianStats& a, const GaussianStats& b);

/// Pairwise gaussian_frechet matrix with an exactly zero diagonal.
Matrix class_similarity_matrix(const std::vector<GaussianStats>& stats);

/// x_T ~ N(gamma (mu_c - mu_uc), sigma_T^2 I).
InitSpec mean_shifted_init(const GaussianStats& cond, const GaussianStats& uncond, double gamma, double sigma_T);

/// sigma(T) used with the mean-shifted initialization and the gamma sweep it is run over.
inline constexpr double kMeanShiftSigmaT = 31.9;
inline constexpr std::array<double, 9> kMeanShiftGammaSweep = {0, 1, 3, 5, 7, 9, 10, 15, 20};

// --- export -----------------------------------------------------------------

/// "left,right,count" rows.
std::string histogram_csv(const ProjectionHistogram& h);
/// Full matrix, comma separated, optional header row of labels.
std::string matrix_csv(const Matrix& m, const std::vector<std::string>& labels = {});
std::string histogram_svg(const ProjectionHistogram& h, const std::string& title);
std::string heatmap_svg(const Matrix& m, const std::vector<std::string>& labels, const std::string& title);

}  // namespace lcfg
