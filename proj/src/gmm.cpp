#include "lcfg/gmm.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"

namespace lcfg {

namespace {

// exp(-745) is below the smallest subnormal double.
constexpr double kLogUnderflow = -745.0;

void require_query(const MixtureModel& model, const Vector& x, double sigma) {
  if (x.size() != model.dim()) throw ShapeError("mixture: state dimension does not match model");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("mixture: sigma must be positive");
}

}  // namespace

MixtureModel::MixtureModel(std::vector<GaussianStats> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  if (weights_.size() != components_.size()) throw ShapeError("mixture: one weight per component required");
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].dim() != components_.front().dim()) throw ShapeError("mixture components differ in dimension");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) throw DomainError("mixture weights must be positive");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

double log_density(const GaussianStats& stats, const Vector& x, double sigma) {
  if (x.size() != stats.dim()) throw ShapeError("log_density: dimension mismatch");
  const Vector var = (stats.eigvals().array() + sigma * sigma).matrix();
  const Vector coeffs = stats.eigvecs().transpose() * (x - stats.mean());
  const double quad = (coeffs.array().square() / var.array()).sum();
  const double logdet = var.array().log().sum();
  const double d = static_cast<double>(stats.dim());
  return -0.5 * (quad + logdet + d * std::log(2.0 * std::numbers::pi));
}

namespace {

Vector component_log_terms(const MixtureModel& model, const Vector& x, double sigma) {
  Vector terms(static_cast<Eigen::Index>(model.size()));
  for (std::size_t i = 0; i < model.size(); ++i)
    terms(static_cast<Eigen::Index>(i)) = std::log(model.weights()[i]) + log_density(model.component(i), x, sigma);
  return terms;
}

}  // namespace

double mixture_log_density(const MixtureModel& model, const Vector& x, double sigma) {
  require_query(model, x, sigma);
  const Vector terms = component_log_terms(model, x, sigma);
  const double mx = terms.maxCoeff();
  return mx + std::log((terms.array() - mx).exp().sum());
}

PosteriorWeights posterior_weights(const MixtureModel& model, const Vector& x, double sigma) {
  require_query(model, x, sigma);
  const Vector terms = component_log_terms(model, x, sigma);
  const double mx = terms.maxCoeff();
  Vector shifted = (terms.array() - mx).matrix();
  Vector w(shifted.size());
  for (Eigen::Index i = 0; i < shifted.size(); ++i) w(i) = shifted(i) < kLogUnderflow ? 0.0 : std::exp(shifted(i));
  const double total = w.sum();  // >= 1, the max term contributes exactly 1
  PosteriorWeights out;
  out.w = w / total;
  out.log_w = (shifted.array() - std::log(total)).matrix();
  return out;
}

Vector mixture_score(const MixtureModel& model, const Vector& x, double sigma) {
  const auto weights = posterior_weights(model, x, sigma);
  Vector s = Vector::Zero(x.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double w = weights.w(static_cast<Eigen::Index>(i));
    if (w == 0.0) continue;
    s += w * score(model.component(i), x, sigma);
  }
  return s;
}

Vector mixture_denoise(const MixtureModel& model, const Vector& x, double sigma) {
  return x + (sigma * sigma) * mixture_score(model, x, sigma);
}

MixtureGuidance gmm_cfg_guidance(const MixtureModel& model, std::size_t target, const Vector& x, double sigma,
                                 double gamma) {
  require_query(model, x, sigma);
  if (target >= model.size()) throw DomainError("gmm_cfg_guidance: target index out of range");
  if (!(gamma >= 0.0)) throw DomainError("gmm_cfg_guidance: gamma must be >= 0");
  const auto weights = posterior_weights(model, x, sigma);
  const GaussianStats& c1 = model.component(target);
  const Vector xc = x - c1.mean();
  const double scale = gamma / (sigma * sigma);

  // (shrunk_c1 - sum_i w_i shrunk_i)(x - mu_c1)
  Vector contrast = apply_spectral(c1, shrinkage(c1, sigma).factors, xc);
  Vector mean_like = Vector::Zero(x.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double w = weights.w(static_cast<Eigen::Index>(i));
    if (w == 0.0) continue;
    const GaussianStats& ci = model.component(i);
    contrast -= w * apply_spectral(ci, shrinkage(ci, sigma).factors, xc);
    if (i == target) continue;
    // (I - shrunk_i)/sigma^2 = U_i diag(1/(lambda + sigma^2)) U_i^T
    const Vector inv = (ci.eigvals().array() + sigma * sigma).inverse().matrix();
    mean_like += w * apply_spectral(ci, inv, c1.mean() - ci.mean());
  }
  return {scale * contrast, gamma * mean_like};
}

SampleBatch gmm_sample_batch(const MixtureModel& model, std::size_t target, std::size_t m, std::uint64_t seed,
                             const NoiseSchedule& schedule, const GuidanceConfig& cfg, const InitSpec& init,
                             Solver solver) {
  cfg.validate();
  if (target >= model.size()) throw DomainError("gmm_sample_batch: target index out of range");
  const GaussianStats& cond = model.component(target);
  const bool cpc_like = cfg.enable_pos_cpc || cfg.enable_neg_cpc;
  auto field = [&](const Vector& x, double sigma, std::size_t) -> Vector {
    Vector s = cfg.enable_cond ? score(cond, x, sigma) : Vector::Zero(x.size());
    if (!cfg.guidance_active(sigma)) return s;
    const auto g = gmm_cfg_guidance(model, target, x, sigma, cfg.gamma);
    if (cpc_like) s += g.g_cpc_like;
    if (cfg.enable_mean_shift) s += g.g_mean_like;
    return s;
  };
  return sample_batch_field(field, model.dim(), m, seed, schedule, init, solver, false);
}

MixtureModel load_mixture_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("no such input: " + path.string());
  std::vector<GaussianStats> comps;
  std::vector<double> weights;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string file;
    if (!(fields >> file)) continue;
    double w = 0.0;
    std::string extra;
    if (!(fields >> w) || (fields >> extra)) throw FormatError("manifest line must be \"path weight\"", line_start);
    std::filesystem::path p(file);
    if (p.is_relative()) p = path.parent_path() / p;
    auto stats = load_stats(p);
    if (!comps.empty() && stats.dim() != comps.front().dim())
      throw FormatError("manifest component dimension mismatch", line_start);
    if (!(w > 0.0)) throw FormatError("manifest weights must be positive", line_start);
    comps.push_back(std::move(stats));
    weights.push_back(w);
  }
  if (comps.empty()) throw FormatError("manifest lists no components", 0);
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  // Repair the last ulp so the sum invariant holds exactly enough.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) sum += weights[i];
  weights.back() = 1.0 - sum;
  return MixtureModel(std::move(comps), std::move(weights));
}

}  // namespace lcfg
