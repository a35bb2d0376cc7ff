#pragma once

#include <filesystem>
#include <vector>

#include "lcfg/sampler.hpp"
#include "lcfg/stats.hpp"

namespace lcfg {

/// Weighted collection of Gaussian components sharing one dimension.
class MixtureModel {
 public:
  MixtureModel(std::vector<GaussianStats> components, std::vector<double> weights);

  std::size_t size() const { return components_.size(); }
  Eigen::Index dim() const { return components_.front().dim(); }
  const std::vector<GaussianStats>& components() const { return components_; }
  const GaussianStats& component(std::size_t i) const { return components_.at(i); }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<GaussianStats> components_;
  std::vector<double> weights_;
};

struct PosteriorWeights {
  Vector w;      // responsibilities, sum to 1
  Vector log_w;  // normalized log responsibilities
};

/// log N(x; mu, Sigma + sigma^2 I), evaluated in the eigenbasis.
double log_density(const GaussianStats& stats, const Vector& x, double sigma);

/// log p(x; sigma) of the noise-mollified mixture (log-sum-exp).
double mixture_log_density(const MixtureModel& model, const Vector& x, double sigma);

/// w_i proportional to pi_i N(x; mu_i, Sigma_i + sigma^2 I), normalized in log space.
/// Weights more than 745 nats below the maximum are exactly zero.
PosteriorWeights posterior_weights(const MixtureModel& model, const Vector& x, double sigma);

/// sum_i w_i(x) (Sigma_i + sigma^2 I)^{-1} (mu_i - x)
Vector mixture_score(const MixtureModel& model, const Vector& x, double sigma);

/// Tweedie denoiser x + sigma^2 mixture_score(x).
Vector mixture_denoise(const MixtureModel& model, const Vector& x, double sigma);

struct MixtureGuidance {
  Vector g_cpc_like;
  Vector g_mean_like;
  Vector total() const { return g_cpc_like + g_mean_like; }
};

/// CFG guidance toward component `target` (0-based) split into the covariance-contrast term
/// and the weighted mean-shift term.
MixtureGuidance gmm_cfg_guidance(const MixtureModel& model, std::size_t target, const Vector& x, double sigma,
                                 double gamma);

/// Guided sampling with the target component's linear score as the conditional score and the
/// mixture score as the unconditional one. pos/neg CPC switches gate the covariance-contrast term,
/// the mean-shift switch gates the weighted mean term.
SampleBatch gmm_sample_batch(const MixtureModel& model, std::size_t target, std::size_t m, std::uint64_t seed,
                             const NoiseSchedule& schedule, const GuidanceConfig& cfg, const InitSpec& init = {},
                             Solver solver = Solver::Euler);

/// Text manifest, one "path weight" pair per line, '#' starts a comment.
/// Relative paths resolve against the manifest's directory; weights are normalized to sum to 1.
MixtureModel load_mixture_manifest(const std::filesystem::path& path);

}  // namespace lcfg
