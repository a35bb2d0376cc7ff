#include "lcfg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/parallel.hpp"

namespace lcfg {

NoiseSchedule make_schedule(double sigma_max, double sigma_min, int steps, double rho) {
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || !std::isfinite(sigma_max))
    throw DomainError("make_schedule: need sigma_max > sigma_min > 0");
  if (steps < 1) throw DomainError("make_schedule: need at least one step");
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw DomainError("make_schedule: need rho >= 1");
  const double a = std::pow(sigma_max, 1.0 / rho);
  const double b = std::pow(sigma_min, 1.0 / rho);
  NoiseSchedule s;
  s.rho = rho;
  s.sigmas.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    s.sigmas[static_cast<std::size_t>(i)] = std::pow(a + t * (b - a), rho);
  }
  // Pin the endpoints against pow round-off.
  s.sigmas.front() = sigma_max;
  s.sigmas.back() = sigma_min;
  for (std::size_t i = 0; i + 1 < s.sigmas.size(); ++i)
    if (!(s.sigmas[i] > s.sigmas[i + 1])) throw DomainError("make_schedule: grid is not strictly decreasing");
  return s;
}

NoiseSchedule schedule_from_sigmas(std::vector<double> sigmas) {
  if (sigmas.size() < 2) throw DomainError("schedule needs at least two noise levels");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0) || !std::isfinite(sigmas[i])) throw DomainError("schedule entries must be positive");
    if (i > 0 && !(sigmas[i - 1] > sigmas[i])) throw DomainError("schedule must be strictly decreasing");
  }
  return NoiseSchedule{std::move(sigmas), 1.0};
}

void GuidanceConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("guidance strength must be >= 0");
  if (!(active_interval.lo > 0.0) || !(active_interval.lo <= active_interval.hi))
    throw DomainError("active interval must satisfy 0 < lo <= hi");
}

bool GuidanceConfig::guidance_active(double sigma) const {
  return gamma != 0.0 && active_interval.contains(sigma);
}

namespace {

void require_pair(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x) {
  if (cond.dim() != uncond.dim()) throw ShapeError("conditional and unconditional stats differ in dimension");
  if (x.size() != cond.dim()) throw ShapeError("state dimension does not match stats");
}

// Signed spectrum from arbitrary (value, vector) pairs: sorted descending, split by the tolerance rule.
SignedSpectrum make_signed(const Vector& values, const Matrix& vectors) {
  const Eigen::Index d = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  SignedSpectrum out;
  out.eigvals.resize(d);
  out.eigvecs.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.eigvals(i) = values(order[static_cast<std::size_t>(i)]);
    out.eigvecs.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  out.tol = 1e-10 * std::max(1.0, std::abs(out.eigvals(0)));
  out.n_pos = (out.eigvals.array() > out.tol).count();
  out.n_neg = (out.eigvals.array() < -out.tol).count();
  return out;
}

}  // namespace

GuidanceTerms guidance_terms(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x,
                             double sigma, const GuidanceConfig& cfg, const SignedSpectrum& cpcs) {
  require_pair(cond, uncond, x);
  if (!(sigma > 0.0)) throw DomainError("guidance_terms: sigma must be positive");
  cfg.validate();
  const Eigen::Index d = x.size();
  GuidanceTerms t{Vector::Zero(d), Vector::Zero(d), Vector::Zero(d), Vector::Zero(d)};
  if (cfg.enable_cond) t.f_c = score(cond, x, sigma);
  if (!cfg.guidance_active(sigma)) return t;

  const double scale = cfg.gamma / (sigma * sigma);
  const Vector xc = x - cond.mean();
  if (cfg.enable_pos_cpc || cfg.enable_neg_cpc) {
    if (cpcs.dim() != d) throw ShapeError("guidance_terms: CPC spectrum has wrong dimension");
    if (cfg.enable_pos_cpc) t.g_pos = scale * cpcs.apply_positive(xc);
    if (cfg.enable_neg_cpc) t.g_neg = scale * cpcs.apply_negative(xc);
  }
  if (cfg.enable_mean_shift) {
    // (I - shrunk_uc)/sigma^2 = U diag(1/(lambda + sigma^2)) U^T
    const Vector inv = (uncond.eigvals().array() + sigma * sigma).inverse().matrix();
    t.g_mean = cfg.gamma * apply_spectral(uncond, inv, cond.mean() - uncond.mean());
  }
  return t;
}

GuidanceTerms guidance_terms(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x,
                             double sigma, const GuidanceConfig& cfg) {
  require_pair(cond, uncond, x);
  if (cfg.guidance_active(sigma) && (cfg.enable_pos_cpc || cfg.enable_neg_cpc))
    return guidance_terms(cond, uncond, x, sigma, cfg, posterior_cpcs(cond, uncond, sigma));
  return guidance_terms(cond, uncond, x, sigma, cfg, SignedSpectrum{});
}

Trajectory integrate_ode(const ScoreField& field, const Vector& x_T, const NoiseSchedule& schedule,
                         Solver solver, bool keep_trajectory) {
  if (schedule.sigmas.size() < 2) throw DomainError("integrate: schedule has no steps");
  if (!x_T.allFinite()) throw DomainError("integrate: initial state is not finite");
  Trajectory out;
  if (keep_trajectory) {
    out.states.reserve(schedule.sigmas.size());
    out.states.push_back(x_T);
  }
  auto check = [](const Vector& x, std::size_t step) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) throw DivergenceError(step);
  };

  Vector x = x_T;
  for (std::size_t i = 0; i + 1 < schedule.sigmas.size(); ++i) {
    const double s = schedule.sigmas[i];
    const double s_next = schedule.sigmas[i + 1];
    const double ds = s_next - s;
    // dx/dsigma = -sigma * score
    const Vector slope = -s * field(x, s, i);
    if (solver == Solver::Euler) {
      x = x + ds * slope;
    } else {
      const Vector predictor = x + ds * slope;
      check(predictor, i);
      const Vector slope_next = -s_next * field(predictor, s_next, i + 1);
      x = x + ds * (0.5 * (slope + slope_next));
    }
    check(x, i);
    if (keep_trajectory) out.states.push_back(x);
  }
  out.final_state = std::move(x);
  return out;
}

GuidedSampler::GuidedSampler(GaussianStats cond, GaussianStats uncond, NoiseSchedule schedule, GuidanceConfig cfg,
                             IntegrateOptions options)
    : cond_(std::move(cond)),
      uncond_(std::move(uncond)),
      schedule_(std::move(schedule)),
      cfg_(cfg),
      options_(options) {
  if (cond_.dim() != uncond_.dim()) throw ShapeError("conditional and unconditional stats differ in dimension");
  cfg_.validate();
  schedule_ = schedule_from_sigmas(schedule_.sigmas);  // revalidate
  if (!cfg_.needs_cpcs()) return;

  const auto& sig = schedule_.sigmas;
  cpcs_.resize(sig.size());
  if (!options_.freeze_cpc) {
    for (std::size_t i = 0; i < sig.size(); ++i)
      if (cfg_.guidance_active(sig[i])) cpcs_[i] = posterior_cpcs(cond_, uncond_, sig[i]);
    return;
  }
  // Frozen basis: eigenvectors from sigma_max, eigenvalues re-evaluated as Rayleigh quotients
  // v^T (shrunk_c - shrunk_uc) v = sum_j f_j (u_j^T v)^2 in O(d^2) per grid point.
  const SignedSpectrum ref = posterior_cpcs(cond_, uncond_, sig.front());
  const Matrix wc = (cond_.eigvecs().transpose() * ref.eigvecs).cwiseAbs2();
  const Matrix wuc = (uncond_.eigvecs().transpose() * ref.eigvecs).cwiseAbs2();
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (!cfg_.guidance_active(sig[i])) continue;
    const Vector values = wc.transpose() * shrinkage(cond_, sig[i]).factors -
                          wuc.transpose() * shrinkage(uncond_, sig[i]).factors;
    cpcs_[i] = make_signed(values, ref.eigvecs);
  }
}

GuidanceTerms GuidedSampler::terms_at(const Vector& x, std::size_t grid_index) const {
  const double sigma = schedule_.sigmas.at(grid_index);
  static const SignedSpectrum kNone{};
  const SignedSpectrum& cpcs = cpcs_.empty() ? kNone : cpcs_[grid_index];
  return guidance_terms(cond_, uncond_, x, sigma, cfg_, cpcs);
}

Trajectory GuidedSampler::integrate(const Vector& x_T) const {
  if (x_T.size() != dim()) throw ShapeError("integrate: initial state has wrong dimension");
  return integrate_ode([this](const Vector& x, double, std::size_t idx) { return terms_at(x, idx).total(); }, x_T,
                       schedule_, options_.solver, options_.keep_trajectory);
}

Trajectory integrate(const GaussianStats& cond, const GaussianStats& uncond, const Vector& x_T,
                     const NoiseSchedule& schedule, const GuidanceConfig& cfg, const IntegrateOptions& options) {
  return GuidedSampler(cond, uncond, schedule, cfg, options).integrate(x_T);
}

Vector closed_form_unguided(const GaussianStats& stats, const Vector& x_T, double sigma_T, double sigma_t) {
  if (x_T.size() != stats.dim()) throw ShapeError("closed_form_unguided: dimension mismatch");
  if (!(sigma_t > 0.0) || !(sigma_T >= sigma_t)) throw DomainError("closed_form_unguided: need sigma_T >= sigma_t > 0");
  if (sigma_t == sigma_T) return x_T;
  const Vector& lam = stats.eigvals();
  const Vector coeffs = stats.eigvecs().transpose() * (x_T - stats.mean());
  const Vector scale = ((lam.array() + sigma_t * sigma_t) / (lam.array() + sigma_T * sigma_T)).sqrt().matrix();
  return stats.mean() + stats.eigvecs() * scale.cwiseProduct(coeffs);
}

std::uint64_t sample_seed(std::uint64_t batch_seed, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl sequence keyed by the batch seed
  std::uint64_t z = batch_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector draw_initial_state(std::uint64_t stream_seed, Eigen::Index dim, const InitSpec& init, double sigma_max) {
  if (init.shift.size() != 0 && init.shift.size() != dim) throw ShapeError("init shift has wrong dimension");
  const double stddev = init.stddev > 0.0 ? init.stddev : sigma_max;
  std::mt19937_64 gen(stream_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(dim);
  for (Eigen::Index j = 0; j < dim; ++j) x(j) = stddev * normal(gen);
  if (init.shift.size() != 0) x += init.shift;
  return x;
}

SampleBatch sample_batch_field(const ScoreField& field, Eigen::Index dim, std::size_t m, std::uint64_t seed,
                               const NoiseSchedule& schedule, const InitSpec& init, Solver solver,
                               bool keep_trajectory) {
  if (m == 0) throw DomainError("sample_batch: need at least one sample");
  SampleBatch batch;
  batch.seeds.resize(m);
  batch.samples.resize(static_cast<Eigen::Index>(m), dim);
  if (keep_trajectory) batch.trajectories.resize(m);
  for (std::size_t k = 0; k < m; ++k) batch.seeds[k] = sample_seed(seed, k);

  parallel_for(m, [&](std::size_t k) {
    const Vector x_T = draw_initial_state(batch.seeds[k], dim, init, schedule.sigma_max());
    try {
      auto traj = integrate_ode(field, x_T, schedule, solver, keep_trajectory);
      batch.samples.row(static_cast<Eigen::Index>(k)) = traj.final_state.transpose();
      if (keep_trajectory) batch.trajectories[k] = std::move(traj.states);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.step(), k);
    }
  });
  return batch;
}

SampleBatch sample_batch(const GaussianStats& cond, const GaussianStats& uncond, std::size_t m, std::uint64_t seed,
                         const NoiseSchedule& schedule, const GuidanceConfig& cfg, const InitSpec& init,
                         const IntegrateOptions& options) {
  const GuidedSampler sampler(cond, uncond, schedule, cfg, options);
  return sample_batch_field(
      [&sampler](const Vector& x, double, std::size_t idx) { return sampler.terms_at(x, idx).total(); }, sampler.dim(),
      m, seed, sampler.schedule(), init, options.solver, options.keep_trajectory);
}

}  // namespace lcfg
