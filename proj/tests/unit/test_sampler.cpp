#include <doctest.h>

#include <cstdlib>

#include "helpers.hpp"
#include "lcfg/analytic.hpp"
#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/sampler.hpp"
#include "lcfg/synthetic.hpp"

using namespace lcfg;

TEST_CASE("schedule construction") {
  const auto one = make_schedule(80.0, 0.002, 1, 7.0);
  REQUIRE(one.sigmas.size() == 2);
  CHECK(one.sigmas[0] == 80.0);
  CHECK(one.sigmas[1] == 0.002);
  const auto lin = make_schedule(10.0, 2.0, 4, 1.0);
  for (int i = 0; i <= 4; ++i) CHECK(lin.sigmas[i] == doctest::Approx(10.0 - 2.0 * i));
  const auto edm = make_schedule(80.0, 0.002, 20, 7.0);
  CHECK(edm.sigmas.front() == 80.0);
  CHECK(edm.sigmas.back() == 0.002);
  for (std::size_t i = 1; i < edm.sigmas.size(); ++i) CHECK(edm.sigmas[i] < edm.sigmas[i - 1]);
  CHECK_THROWS_AS(make_schedule(1.0, 2.0, 5, 7.0), DomainError);
  CHECK_THROWS_AS(make_schedule(80.0, 0.0, 5, 7.0), DomainError);
  CHECK_THROWS_AS(make_schedule(80.0, 0.1, 0, 7.0), DomainError);
  CHECK_THROWS_AS(make_schedule(80.0, 0.1, 5, 0.0), DomainError);
  CHECK_THROWS_AS(schedule_from_sigmas({1.0, 2.0}), DomainError);
}

TEST_CASE("guidance terms: trivial cases") {
  std::mt19937_64 rng(1);
  const auto c = synthetic::random_stats(4, rng), u = synthetic::random_stats(4, rng);
  const Vector x = test::gaussian_vector(rng, 4, 2.0);
  GuidanceConfig cfg;
  cfg.gamma = 0.0;
  auto t = guidance_terms(c, u, x, 1.5, cfg);
  CHECK(t.g_pos.norm() == 0.0);
  CHECK(t.g_neg.norm() == 0.0);
  CHECK(t.g_mean.norm() == 0.0);
  CHECK((t.f_c - score(c, x, 1.5)).norm() < 1e-14);

  // Equal covariances: only the mean-shift term survives.
  const GaussianStats c2(Vector::Constant(4, 1.0), u.eigvecs(), u.eigvals());
  cfg.gamma = 2.0;
  const double sigma = 0.8;
  t = guidance_terms(c2, u, x, sigma, cfg);
  CHECK(t.g_pos.norm() < 1e-12);
  CHECK(t.g_neg.norm() < 1e-12);
  const Vector delta = c2.mean() - u.mean();
  const Vector expect = cfg.gamma / (sigma * sigma) * (delta - shrunk_covariance(u, sigma) * delta);
  CHECK((t.g_mean - expect).norm() < 1e-12);
}

TEST_CASE("guidance terms match the assembled CFG field") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto c = synthetic::random_stats(8, rng), u = synthetic::random_stats(8, rng);
    const Vector x = test::gaussian_vector(rng, 8, 3.0);
    const double sigma = 0.3 + 0.5 * k;
    GuidanceConfig cfg;
    cfg.gamma = 0.5 + 0.3 * k;
    const Vector dc = denoise(c, x, sigma), du = denoise(u, x, sigma);
    const Vector ref = (dc - x) / (sigma * sigma) + cfg.gamma * (dc - du) / (sigma * sigma);
    CHECK((guidance_terms(c, u, x, sigma, cfg).total() - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("ablation masks and interval gating") {
  std::mt19937_64 rng(3);
  const auto c = synthetic::random_stats(3, rng), u = synthetic::random_stats(3, rng);
  const Vector x = test::gaussian_vector(rng, 3);
  GuidanceConfig all;
  all.gamma = 3.0;
  const auto full = guidance_terms(c, u, x, 2.0, all);
  GuidanceConfig only = all;
  only.enable_pos_cpc = only.enable_neg_cpc = false;
  const auto mean_only = guidance_terms(c, u, x, 2.0, only);
  CHECK(mean_only.g_pos.norm() == 0.0);
  CHECK(mean_only.g_neg.norm() == 0.0);
  CHECK((mean_only.g_mean - full.g_mean).norm() < 1e-14);
  GuidanceConfig gated = all;
  gated.active_interval = SigmaInterval{4.0, 80.0};
  const auto outside = guidance_terms(c, u, x, 2.0, gated);
  CHECK(outside.g_pos.norm() + outside.g_neg.norm() + outside.g_mean.norm() == 0.0);
  CHECK((outside.f_c - full.f_c).norm() == 0.0);
  const auto inside = guidance_terms(c, u, x, 5.0, gated);
  CHECK((inside.total() - guidance_terms(c, u, x, 5.0, all).total()).norm() < 1e-14);
  GuidanceConfig bad;
  bad.gamma = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("unguided fixed point and closed form") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  GuidanceConfig naive;
  naive.gamma = 0.0;
  IntegrateOptions keep;
  keep.keep_trajectory = true;
  const auto traj = integrate(c, u, c.mean(), make_schedule(80.0, 0.002, 50, 7.0), naive, keep);
  REQUIRE(traj.states.size() == 51);
  for (const auto& s : traj.states) CHECK((s - c.mean()).norm() < 1e-12);

  const Vector x_T = Eigen::Vector2d(30.0, -70.0);
  CHECK(closed_form_unguided(c, x_T, 80.0, 80.0) == x_T);
  CHECK((closed_form_unguided(c, c.mean(), 80.0, 0.1) - c.mean()).norm() < 1e-14);
  const GaussianStats null(Vector::Zero(2), Matrix::Identity(2, 2), Vector(Eigen::Vector2d(1.0, 0.0)));
  const Vector out = closed_form_unguided(null, Eigen::Vector2d(0.0, 8.0), 80.0, 2.0);
  CHECK(out(1) == doctest::Approx(8.0 * 2.0 / 80.0));

  // Heun converges to the closed form much faster than Euler.
  IntegrateOptions heun;
  heun.solver = Solver::Heun;
  const auto sched = make_schedule(80.0, 0.002, 400, 7.0);
  const Vector exact = closed_form_unguided(c, x_T, 80.0, 0.002);
  const double e_euler = (integrate(c, u, x_T, sched, naive).final_state - exact).norm();
  const double e_heun = (integrate(c, u, x_T, sched, naive, heun).final_state - exact).norm();
  CHECK(e_heun < 0.2 * e_euler);
}

TEST_CASE("Euler error is first order") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  GuidanceConfig naive;
  naive.gamma = 0.0;
  const Vector x_T = Eigen::Vector2d(50.0, 20.0);
  const Vector exact = closed_form_unguided(c, x_T, 80.0, 0.002);
  const double e1 = (integrate(c, u, x_T, make_schedule(80.0, 0.002, 100, 7.0), naive).final_state - exact).norm();
  const double e2 = (integrate(c, u, x_T, make_schedule(80.0, 0.002, 200, 7.0), naive).final_state - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("frozen CPC directions agree on a common basis") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  GuidanceConfig cfg;
  cfg.gamma = 1.5;
  IntegrateOptions frozen;
  frozen.freeze_cpc = true;
  const auto sched = make_schedule(80.0, 0.002, 100, 7.0);
  const Vector x_T = Eigen::Vector2d(-20.0, 60.0);
  const Vector a = integrate(c, u, x_T, sched, cfg).final_state;
  const Vector b = integrate(c, u, x_T, sched, cfg, frozen).final_state;
  CHECK((a - b).norm() < 1e-9 * a.norm());
}

TEST_CASE("divergence is reported with the step index") {
  const ScoreField blowup = [](const Vector& x, double, std::size_t) -> Vector { return -1e3 * x; };
  try {
    integrate_ode(blowup, Vector::Constant(2, 1.0), make_schedule(80.0, 0.002, 10, 7.0), Solver::Euler, false);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() < 10);
  }
}

TEST_CASE("batches are deterministic and thread-count independent") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  GuidanceConfig cfg;
  cfg.gamma = 1.0;
  const auto sched = make_schedule(80.0, 0.002, 32, 7.0);
  const auto a = sample_batch(c, u, 64, 7, sched, cfg);
  ::setenv("LCFG_THREADS", "1", 1);
  const auto b = sample_batch(c, u, 64, 7, sched, cfg);
  ::unsetenv("LCFG_THREADS");
  CHECK(a.samples == b.samples);
  CHECK(a.seeds == b.seeds);
  const auto other = sample_batch(c, u, 64, 8, sched, cfg);
  CHECK(other.samples != a.samples);

  // A batch of one reproduces a single integration from the same initial state.
  const auto one = sample_batch(c, u, 1, 7, sched, cfg);
  const Vector x_T = draw_initial_state(sample_seed(7, 0), 2, {}, 80.0);
  CHECK(one.samples.row(0).transpose() == integrate(c, u, x_T, sched, cfg).final_state);
  CHECK(one.samples.row(0) == a.samples.row(0));
}

TEST_CASE("toy CFG shifts along the mean difference and stretches the +CPC") {
  const auto c = synthetic::toy_conditional(Eigen::Vector2d(4.0, 4.0));
  const auto u = synthetic::toy_unconditional(Vector::Zero(2));
  const auto sched = make_schedule(80.0, 0.002, 100, 7.0);
  GuidanceConfig naive, cfg;
  naive.gamma = 0.0;
  cfg.gamma = 1.0;
  const auto a = sample_batch(c, u, 1000, 3, sched, naive);
  const auto b = sample_batch(c, u, 1000, 3, sched, cfg);
  const Vector pos = Eigen::Vector2d(1, 1).normalized(), neg = Eigen::Vector2d(1, -1).normalized();
  auto var = [](const Matrix& s, const Vector& v) {
    const Vector p = s * v;
    return (p.array() - p.mean()).square().mean();
  };
  CHECK(var(b.samples, pos) > var(a.samples, pos));
  CHECK(var(b.samples, neg) < var(a.samples, neg));
  CHECK((b.samples * pos).mean() > (a.samples * pos).mean());
}
