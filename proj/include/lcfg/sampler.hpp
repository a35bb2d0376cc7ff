#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "lcfg/cpca.hpp"
#include "lcfg/stats.hpp"

namespace lcfg {

/// Strictly decreasing noise levels sigmas[0] = sigma_max > ... > sigmas[N] = sigma_min > 0.
struct NoiseSchedule {
  std::vector<double> sigmas;
  double rho = 1.0;

  std::size_t steps() const { return sigmas.size() - 1; }
  double sigma_max() const { return sigmas.front(); }
  double sigma_min() const { return sigmas.back(); }
};

/// EDM-style warped grid: (smax^(1/rho) + i/N (smin^(1/rho) - smax^(1/rho)))^rho.
NoiseSchedule make_schedule(double sigma_max, double sigma_min, int steps, double rho);

/// Wraps an explicit grid after validating strict decrease and positivity.
NoiseSchedule schedule_from_sigmas(std::vector<double> sigmas);

struct SigmaInterval {
  double lo = std::numeric_limits<double>::min();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double sigma) const { return sigma >= lo && sigma <= hi; }
};

struct GuidanceConfig {
  double gamma = 4.0;
  bool enable_cond = true;
  bool enable_pos_cpc = true;
  bool enable_neg_cpc = true;
  bool enable_mean_shift = true;
  SigmaInterval active_interval{};

  void validate() const;
  /// True when any guidance term can be nonzero at `sigma`.
  bool guidance_active(double sigma) const;
  bool needs_cpcs() const { return gamma != 0.0 && (enable_pos_cpc || enable_neg_cpc); }
};

/// The guided drift split into the conditional score and the three guidance terms.
struct GuidanceTerms {
  Vector f_c;
  Vector g_pos;
  Vector g_neg;
  Vector g_mean;

  Vector total() const { return f_c + g_pos + g_neg + g_mean; }
};

/// Conditional score plus +CPC, -CPC and mean-shift guidance at (x, sigma).
/// Disabled terms, and guidance terms with sigma outside the active interval, are exactly zero.
GuidanceTerms guidance_terms(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x,
                             double sigma, const GuidanceConfig& cfg);

/// As above with the signed spectrum of the posterior difference supplied by the caller.
GuidanceTerms guidance_terms(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x,
                             double sigma, const GuidanceConfig& cfg, const SignedSpectrum& cpcs);

enum class Solver { Euler, Heun };

struct IntegrateOptions {
  Solver solver = Solver::Euler;
  /// Keep the sigma_max CPC eigenvectors for every step and only re-evaluate
  /// their Rayleigh quotients at the current sigma.
  bool freeze_cpc = false;
  bool keep_trajectory = false;
};

inline constexpr double kDivergenceBound = 1e6;

struct Trajectory {
  Vector final_state;
  std::vector<Vector> states;  // sigmas.size() states when kept, else empty
};

/// Score-like field s(x, sigma, grid_index); the ODE is dx/dsigma = -sigma s.
using ScoreField = std::function<Vector(const Vector& x, double sigma, std::size_t grid_index)>;

/// Integrates dx = -sigma s(x, sigma) dsigma along the schedule (sigma(t) = t).
/// Throws DivergenceError with the step index if the state leaves the finite box |x|_inf <= 1e6.
Trajectory integrate_ode(const ScoreField& field, const Vector& x_T, const NoiseSchedule& schedule,
                         Solver solver, bool keep_trajectory);

/// Guided reverse ODE for a conditional/unconditional Gaussian pair. The CPC split is cached
/// per grid point, so one instance can drive many trajectories on the same schedule.
class GuidedSampler {
 public:
  GuidedSampler(GaussianStats cond, GaussianStats uncond, NoiseSchedule schedule, GuidanceConfig cfg,
                IntegrateOptions options = {});

  Trajectory integrate(const Vector& x_T) const;
  GuidanceTerms terms_at(const Vector& x, std::size_t grid_index) const;

  const NoiseSchedule& schedule() const { return schedule_; }
  const GuidanceConfig& config() const { return cfg_; }
  Eigen::Index dim() const { return cond_.dim(); }

 private:
  GaussianStats cond_;
  GaussianStats uncond_;
  NoiseSchedule schedule_;
  GuidanceConfig cfg_;
  IntegrateOptions options_;
  std::vector<SignedSpectrum> cpcs_;  // per grid point; empty when not needed
};

Trajectory integrate(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x_T,
                     const NoiseSchedule& schedule, const GuidanceConfig& cfg, const IntegrateOptions& options = {});

/// mu + sum_i sqrt((lambda_i + sigma_t^2) / (lambda_i + sigma_T^2)) u_i^T (x_T - mu) u_i.
Vector closed_form_unguided(const GaussianStats& stats, const Vector& x_T, double sigma_T, double sigma_t);

/// Initial distribution x_T ~ N(shift, stddev^2 I). An empty shift means zero;
/// stddev <= 0 means "use the schedule's sigma_max".
struct InitSpec {
  Vector shift;
  double stddev = 0.0;
};

struct SampleBatch {
  std::vector<std::uint64_t> seeds;  // per-sample stream seeds
  Matrix samples;                     // m x d final states
  std::vector<std::vector<Vector>> trajectories;
};

/// Per-sample seed derived from the batch seed (splitmix64 of seed and index).
std::uint64_t sample_seed(std::uint64_t batch_seed, std::uint64_t index);

/// Draws x_T for one sample stream.
Vector draw_initial_state(std::uint64_t stream_seed, Eigen::Index dim, const InitSpec& init, double sigma_max);

/// m independent integrations; sample k starts from draw_initial_state(sample_seed(seed, k), ...).
/// Deterministic for a fixed seed, independent of thread count.
SampleBatch sample_batch(const GaussianStats& cond, const GaussianStats& uncond, std::size_t m, std::uint64_t seed,
                         const NoiseSchedule& schedule, const GuidanceConfig& cfg, const InitSpec& init = {},
                         const IntegrateOptions& options = {});

/// Batch driver for an arbitrary score field (used by the mixture path).
SampleBatch sample_batch_field(const ScoreField& field, Eigen::Index dim, std::size_t m, std::uint64_t seed,
                               const NoiseSchedule& schedule, const InitSpec& init, Solver solver,
                               bool keep_trajectory);

}  // namespace lcfg
