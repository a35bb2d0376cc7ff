#include "lcfg/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "lcfg/analytic.hpp"
#include "lcfg/cpca.hpp"
#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/gmm.hpp"
#include "lcfg/sampler.hpp"
#include "lcfg/synthetic.hpp"

namespace lcfg {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

CheckResult make_check(std::string name, double worst, double tol, std::string detail = {}) {
  return CheckResult{std::move(name), worst <= tol, worst, tol, std::move(detail)};
}

double rel_err(const Vector& got, const Vector& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

double line_angle(const Vector& a, const Vector& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

// --- theorem1 ---------------------------------------------------------------

std::vector<CheckResult> suite_theorem1() {
  std::vector<CheckResult> out;
  const Vector mu_c = Eigen::Vector2d(4.0, 4.0);
  const Vector mu_uc = Eigen::Vector2d::Zero();
  const auto cond = synthetic::toy_conditional(mu_c);
  const auto uncond = synthetic::toy_unconditional(mu_uc);
  const auto check = check_common_pc(cond, uncond);
  out.push_back(make_check("toy_pair_common_pc", check.commutator_norm, check.commutator_bound));
  const auto pair = synthetic::toy_pair(mu_c, mu_uc);
  const auto schedule = make_schedule(80.0, 0.002, 2000, 7.0);

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  for (double gamma : {0.5, 1.0, 2.0}) {
    GuidanceConfig cfg;
    cfg.gamma = gamma;
    const GuidedSampler sampler(cond, uncond, schedule, cfg);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Vector x_T = 80.0 * Eigen::Vector2d(normal(rng), normal(rng));
      const Vector ode = sampler.integrate(x_T).final_state;
      const Vector exact = closed_form_cfg(pair, x_T, 0.002, 80.0, gamma);
      worst = std::max(worst, rel_err(ode, exact));
    }
    out.push_back(make_check("closed_form_cfg_vs_euler2000_gamma" + std::to_string(gamma).substr(0, 3), worst, 1e-2));
  }

  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Vector x_T = 80.0 * Eigen::Vector2d(normal(rng), normal(rng));
      const Vector a = closed_form_cfg(pair, x_T, 0.002, 80.0, 0.0);
      const Vector b = closed_form_unguided(cond, x_T, 80.0, 0.002);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    out.push_back(make_check("gamma0_reduces_to_unguided", worst, 0.0));
  }

  {
    int violations = 0;
    for (double lc : {0.0, 0.5, 3.0, 10.0, 50.0})
      for (double luc : {0.0, 0.5, 3.0, 10.0, 50.0})
        for (double st : {0.002, 0.1, 1.0, 10.0}) {
          const double h = h_factor(lc, luc, st, 80.0);
          const bool ok = lc > luc ? h > 1.0 : lc < luc ? h < 1.0 : std::abs(h - 1.0) <= 1e-12;
          if (!ok) ++violations;
        }
    out.push_back(make_check("h_amplifies_iff_lam_c_exceeds_lam_uc", violations, 0.0));
  }

  {
    double worst_neg = 0.0, worst_eq = 0.0;
    for (double lc : {0.1, 1.0, 10.0})
      for (double luc : {0.2, 3.0, 10.0})
        for (double gamma : {0.0, 0.5, 2.0, 4.0}) {
          const double b = b_coefficient(lc, luc, 0.002, 80.0, gamma);
          worst_neg = std::max(worst_neg, -b);
        }
    for (double lam : {0.1, 1.0, 10.0, 100.0})
      worst_eq = std::max(worst_eq, std::abs(b_coefficient_quadrature(lam, lam, 0.002, 80.0, 1.5) -
                                             b_coefficient_equal(lam, 0.002, 80.0)));
    out.push_back(make_check("b_coefficient_nonnegative", worst_neg, 0.0));
    out.push_back(make_check("b_quadrature_vs_equal_eig_closed_form", worst_eq, 1e-10));
  }
  return out;
}

// --- decomposition ----------------------------------------------------------

std::vector<CheckResult> suite_decomposition() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_sigma(std::log(0.5), std::log(20.0));
  std::uniform_real_distribution<double> gamma_dist(0.0, 8.0);

  double worst_identity = 0.0, worst_score = 0.0, worst_jac = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto cond = synthetic::random_stats(8, rng);
    const auto uncond = synthetic::random_stats(8, rng);
    Vector x(8);
    for (auto& v : x) v = 3.0 * normal(rng);
    const double sigma = std::exp(log_sigma(rng));
    GuidanceConfig cfg;
    cfg.gamma = gamma_dist(rng);
    const Vector split = guidance_terms(cond, uncond, x, sigma, cfg).total();
    const Vector dc = denoise(cond, x, sigma), duc = denoise(uncond, x, sigma);
    const Vector assembled = (dc - x) / (sigma * sigma) + cfg.gamma * (dc - duc) / (sigma * sigma);
    worst_identity = std::max(worst_identity, (split - assembled).cwiseAbs().maxCoeff());

    const Matrix reg = cond.covariance() + sigma * sigma * Matrix::Identity(8, 8);
    const Vector dense = -reg.ldlt().solve(x - cond.mean());
    worst_score = std::max(worst_score, rel_err(score(cond, x, sigma), dense));

    if (trial < 20) {
      const double h = 1e-4;
      Matrix jac(8, 8);
      for (int j = 0; j < 8; ++j) {
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        jac.col(j) = (denoise(cond, xp, sigma) - denoise(cond, xm, sigma)) / (2 * h);
      }
      worst_jac = std::max(worst_jac, (sigma * sigma * jac - posterior_cov(cond, sigma)).cwiseAbs().maxCoeff());
    }
  }
  out.push_back(make_check("three_term_decomposition_identity", worst_identity, 1e-10));
  out.push_back(make_check("score_vs_dense_solve", worst_score, 1e-8));
  out.push_back(make_check("posterior_cov_vs_fd_jacobian", worst_jac, 1e-5));
  return out;
}

// --- cpca -------------------------------------------------------------------

std::vector<CheckResult> suite_cpca() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(11);
  double worst_grid = 0.0, worst_recon = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = synthetic::random_spd(2, rng);
    const Matrix b = synthetic::random_spd(2, rng);
    const auto spec = contrastive_components(a, b);
    double best = -1e300;
    Vector best_v(2);
    for (int k = 0; k < 3600; ++k) {
      const double t = k * 0.1 * kDeg;
      const Vector v = Eigen::Vector2d(std::cos(t), std::sin(t));
      const double val = v.dot((a - b) * v);
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    worst_grid = std::max(worst_grid, line_angle(best_v, spec.eigvecs.col(0)) / kDeg);
    worst_recon = std::max(worst_recon, (spec.eigvecs * spec.eigvals.asDiagonal() * spec.eigvecs.transpose() - (a - b))
                                            .cwiseAbs()
                                            .maxCoeff() /
                                            std::max(1e-300, (a - b).cwiseAbs().maxCoeff()));
  }
  out.push_back(make_check("eigen_vs_grid_search_deg", worst_grid, 0.2));
  out.push_back(make_check("signed_spectrum_reconstruction", worst_recon, 1e-8));

  // Reconstruction-error form on centered samples picks the top eigenvector of the
  // empirical second-moment difference.
  double worst_obj = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto sx = synthetic::random_stats(2, rng, 0.5, 8.0);
    const auto sy = synthetic::random_stats(2, rng, 0.5, 8.0);
    Matrix x = synthetic::draw_gaussian(sx, 5000, rng);
    Matrix y = synthetic::draw_gaussian(sy, 5000, rng);
    x.rowwise() -= x.colwise().mean();
    y.rowwise() -= y.colwise().mean();
    const Matrix cx = x.transpose() * x / 5000.0, cy = y.transpose() * y / 5000.0;
    const auto spec = contrastive_components(cx, cy);
    double best = 1e300;
    Vector best_v(2);
    for (int k = 0; k < 180; ++k) {
      const double t = k * kDeg;
      const Vector v = Eigen::Vector2d(std::cos(t), std::sin(t));
      const double obj = contrastive_reconstruction_objective(x, y, v);
      if (obj < best) {
        best = obj;
        best_v = v;
      }
    }
    worst_obj = std::max(worst_obj, line_angle(best_v, spec.eigvecs.col(0)) / kDeg);
  }
  out.push_back(make_check("reconstruction_objective_argmin_deg", worst_obj, 0.5 + 1e-9));
  return out;
}

// --- gmm --------------------------------------------------------------------

std::vector<CheckResult> suite_gmm() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;

  double worst_single = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = synthetic::random_stats(3, rng);
    const MixtureModel one({s}, {1.0});
    Vector x(3);
    for (auto& v : x) v = 2.0 * normal(rng);
    const double sigma = 0.5 + trial * 0.1;
    worst_single = std::max(worst_single, (mixture_score(one, x, sigma) - score(s, x, sigma)).cwiseAbs().maxCoeff());
    worst_single = std::max(worst_single, (mixture_denoise(one, x, sigma) - denoise(s, x, sigma)).cwiseAbs().maxCoeff());
    worst_single = std::max(worst_single, gmm_cfg_guidance(one, 0, x, sigma, 3.0).total().cwiseAbs().maxCoeff());
  }
  out.push_back(make_check("single_component_reduction", worst_single, 1e-12));

  double worst_fd = 0.0, worst_split = 0.0, worst_tweedie = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = synthetic::random_mixture(3, 2, rng, 2.0);
    Vector x(2);
    for (auto& v : x) v = 2.0 * normal(rng);
    const double sigma = 0.3 + 0.1 * trial;
    const double h = 1e-4;
    Vector fd(2);
    for (int j = 0; j < 2; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      fd(j) = (mixture_log_density(model, xp, sigma) - mixture_log_density(model, xm, sigma)) / (2 * h);
    }
    worst_fd = std::max(worst_fd, (mixture_score(model, x, sigma) - fd).cwiseAbs().maxCoeff());

    const double gamma = 2.5;
    const auto g = gmm_cfg_guidance(model, 0, x, sigma, gamma);
    const Vector expected =
        gamma * (denoise(model.component(0), x, sigma) - mixture_denoise(model, x, sigma)) / (sigma * sigma);
    worst_split = std::max(worst_split, (g.total() - expected).cwiseAbs().maxCoeff());
    worst_tweedie = std::max(
        worst_tweedie,
        (mixture_denoise(model, x, sigma) - (x + sigma * sigma * mixture_score(model, x, sigma))).cwiseAbs().maxCoeff());
  }
  out.push_back(make_check("mixture_score_vs_fd_log_density", worst_fd, 1e-5));
  out.push_back(make_check("mixture_guidance_split_identity", worst_split, 1e-10));
  out.push_back(make_check("tweedie_identity", worst_tweedie, 1e-12));

  {
    int bad = 0;
    const auto model = synthetic::random_mixture(4, 3, rng, 5.0);
    for (double scale : {1.0, 1e2, 1e4})
      for (double sigma : {1e-3, 1e-1, 10.0}) {
        Vector x(3);
        for (auto& v : x) v = scale * normal(rng);
        const auto w = posterior_weights(model, x, sigma);
        if (!w.w.allFinite() || std::abs(w.w.sum() - 1.0) > 1e-10) ++bad;
      }
    out.push_back(make_check("posterior_weights_stable", bad, 0.0));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"theorem1", "decomposition", "cpca", "gmm"};
  return names;
}

std::vector<CheckResult> run_verify_suite(const std::string& suite) {
  if (suite == "theorem1") return suite_theorem1();
  if (suite == "decomposition") return suite_decomposition();
  if (suite == "cpca") return suite_cpca();
  if (suite == "gmm") return suite_gmm();
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& name : verify_suite_names()) {
      auto part = run_verify_suite(name);
      for (auto& c : part) c.name = name + "/" + c.name;
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw DomainError("unknown verify suite \"" + suite + "\"");
}

}  // namespace lcfg
