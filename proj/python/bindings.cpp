#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lcfg/analytic.hpp"
#include "lcfg/cpca.hpp"
#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/gmm.hpp"
#include "lcfg/metrics.hpp"
#include "lcfg/sampler.hpp"
#include "lcfg/stats.hpp"
#include "lcfg/synthetic.hpp"
#include "lcfg/verify.hpp"

namespace py = pybind11;
using namespace lcfg;

PYBIND11_MODULE(_lcfg, m) {
  m.doc() = "Linear-Gaussian diffusion denoisers, guided sampling and contrastive PCA";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  // --- stats -------------------------------------------------------------------
  py::class_<GaussianStats>(m, "GaussianStats")
      .def(py::init<Vector, Matrix, Vector, std::optional<std::string>>(), py::arg("mean"), py::arg("eigvecs"),
           py::arg("eigvals"), py::arg("label") = std::nullopt)
      .def_static("from_covariance", &GaussianStats::from_covariance, py::arg("mean"), py::arg("cov"),
                  py::arg("label") = std::nullopt)
      .def_property_readonly("dim", &GaussianStats::dim)
      .def_property_readonly("mean", &GaussianStats::mean)
      .def_property_readonly("eigvecs", &GaussianStats::eigvecs)
      .def_property_readonly("eigvals", &GaussianStats::eigvals)
      .def_property("label", &GaussianStats::label, &GaussianStats::set_label)
      .def("covariance", &GaussianStats::covariance)
      .def("__repr__", [](const GaussianStats& s) { return "<GaussianStats d=" + std::to_string(s.dim()) + ">"; });

  m.def("estimate_gaussian_stats", [](const Matrix& x) { return estimate_gaussian_stats(DataMatrix(x)); },
        py::arg("samples"), "Population mean and covariance spectrum of an n x d array.");
  m.def("save_stats", &save_stats, py::arg("stats"), py::arg("path"));
  m.def("load_stats", py::overload_cast<const std::filesystem::path&>(&load_stats), py::arg("path"));
  m.def("load_data", [](const std::filesystem::path& p) { return read_data_any(p).values(); }, py::arg("path"));
  m.def("save_data", [](const Matrix& x, const std::filesystem::path& p) { save_data_matrix(DataMatrix(x), p); },
        py::arg("samples"), py::arg("path"));

  // --- denoiser ------------------------------------------------------------------
  m.def("shrinkage", [](const GaussianStats& s, double sigma) { return shrinkage(s, sigma).factors; }, py::arg("stats"),
        py::arg("sigma"));
  m.def("denoise", &denoise, py::arg("stats"), py::arg("x"), py::arg("sigma"));
  m.def("score", &score, py::arg("stats"), py::arg("x"), py::arg("sigma"));
  m.def("posterior_cov", &posterior_cov, py::arg("stats"), py::arg("sigma"));

  // --- cpca ----------------------------------------------------------------------
  py::class_<SignedSpectrum>(m, "SignedSpectrum")
      .def_readonly("eigvals", &SignedSpectrum::eigvals)
      .def_readonly("eigvecs", &SignedSpectrum::eigvecs)
      .def_readonly("n_pos", &SignedSpectrum::n_pos)
      .def_readonly("n_neg", &SignedSpectrum::n_neg)
      .def_readonly("tol", &SignedSpectrum::tol);
  m.def("contrastive_components", &contrastive_components, py::arg("a"), py::arg("b"));
  m.def("posterior_cpcs", &posterior_cpcs, py::arg("cond"), py::arg("uncond"), py::arg("sigma"));
  m.def("principal_angles", &principal_angles, py::arg("a"), py::arg("b"));

  // --- sampler -------------------------------------------------------------------
  m.def("make_schedule", [](double smax, double smin, int steps, double rho) { return make_schedule(smax, smin, steps, rho).sigmas; },
        py::arg("sigma_max") = 80.0, py::arg("sigma_min") = 0.002, py::arg("steps") = 18, py::arg("rho") = 7.0);

  py::class_<GuidanceConfig>(m, "GuidanceConfig")
      .def(py::init([](double gamma, bool pos, bool neg, bool mean_shift, std::optional<std::pair<double, double>> interval) {
             GuidanceConfig c;
             c.gamma = gamma;
             c.enable_pos_cpc = pos;
             c.enable_neg_cpc = neg;
             c.enable_mean_shift = mean_shift;
             if (interval) c.active_interval = SigmaInterval{interval->first, interval->second};
             c.validate();
             return c;
           }),
           py::arg("gamma") = 4.0, py::arg("pos_cpc") = true, py::arg("neg_cpc") = true, py::arg("mean_shift") = true,
           py::arg("interval") = std::nullopt)
      .def_readwrite("gamma", &GuidanceConfig::gamma)
      .def_readwrite("pos_cpc", &GuidanceConfig::enable_pos_cpc)
      .def_readwrite("neg_cpc", &GuidanceConfig::enable_neg_cpc)
      .def_readwrite("mean_shift", &GuidanceConfig::enable_mean_shift);

  m.def(
      "guidance_terms",
      [](const GaussianStats& c, const GaussianStats& u, const Vector& x, double sigma, const GuidanceConfig& cfg) {
        const auto t = guidance_terms(c, u, x, sigma, cfg);
        py::dict d;
        d["f_c"] = t.f_c;
        d["g_pos"] = t.g_pos;
        d["g_neg"] = t.g_neg;
        d["g_mean"] = t.g_mean;
        return d;
      },
      py::arg("cond"), py::arg("uncond"), py::arg("x"), py::arg("sigma"), py::arg("config"));

  auto to_schedule = [](const std::vector<double>& sigmas) { return schedule_from_sigmas(sigmas); };
  auto to_solver = [](const std::string& s) {
    if (s == "euler") return Solver::Euler;
    if (s == "heun") return Solver::Heun;
    throw DomainError("solver must be 'euler' or 'heun'");
  };

  m.def(
      "integrate",
      [=](const GaussianStats& c, const GaussianStats& u, const Vector& x_T, const std::vector<double>& sigmas,
          const GuidanceConfig& cfg, const std::string& solver) {
        IntegrateOptions o;
        o.solver = to_solver(solver);
        return integrate(c, u, x_T, to_schedule(sigmas), cfg, o).final_state;
      },
      py::arg("cond"), py::arg("uncond"), py::arg("x_T"), py::arg("sigmas"), py::arg("config"), py::arg("solver") = "euler");

  m.def(
      "sample_batch",
      [=](const GaussianStats& c, const GaussianStats& u, std::size_t n, std::uint64_t seed, const std::vector<double>& sigmas,
          const GuidanceConfig& cfg, const std::string& solver) {
        IntegrateOptions o;
        o.solver = to_solver(solver);
        py::gil_scoped_release release;
        return sample_batch(c, u, n, seed, to_schedule(sigmas), cfg, {}, o).samples;
      },
      py::arg("cond"), py::arg("uncond"), py::arg("m"), py::arg("seed"), py::arg("sigmas"), py::arg("config"),
      py::arg("solver") = "euler");

  m.def("closed_form_unguided", &closed_form_unguided, py::arg("stats"), py::arg("x_T"), py::arg("sigma_T"), py::arg("sigma_t"));

  // --- analytic ------------------------------------------------------------------
  py::class_<CommonPCPair>(m, "CommonPCPair")
      .def_readonly("U", &CommonPCPair::U)
      .def_readonly("lam_c", &CommonPCPair::lam_c)
      .def_readonly("lam_uc", &CommonPCPair::lam_uc)
      .def_readonly("mu_c", &CommonPCPair::mu_c)
      .def_readonly("mu_uc", &CommonPCPair::mu_uc);
  m.def("to_common_basis", [](const GaussianStats& c, const GaussianStats& u) { return to_common_basis(c, u); },
        py::arg("cond"), py::arg("uncond"));
  m.def(
      "check_common_pc",
      [](const GaussianStats& c, const GaussianStats& u, double tol) {
        const auto r = check_common_pc(c, u, tol);
        return py::make_tuple(r.accepted, r.commutator_norm, r.commutator_bound);
      },
      py::arg("cond"), py::arg("uncond"), py::arg("tol") = 1e-8);
  m.def("h_factor", &h_factor, py::arg("lam_c"), py::arg("lam_uc"), py::arg("sigma_t"), py::arg("sigma_T"));
  m.def("b_coefficient", &b_coefficient, py::arg("lam_c"), py::arg("lam_uc"), py::arg("sigma_t"), py::arg("sigma_T"),
        py::arg("gamma"));
  m.def("closed_form_cfg", &closed_form_cfg, py::arg("pair"), py::arg("x_T"), py::arg("sigma_t"), py::arg("sigma_T"),
        py::arg("gamma"));

  // --- gmm -----------------------------------------------------------------------
  py::class_<MixtureModel>(m, "MixtureModel")
      .def(py::init<std::vector<GaussianStats>, std::vector<double>>(), py::arg("components"), py::arg("weights"))
      .def_property_readonly("weights", &MixtureModel::weights)
      .def("__len__", &MixtureModel::size);
  m.def("posterior_weights", [](const MixtureModel& mm, const Vector& x, double s) { return posterior_weights(mm, x, s).w; },
        py::arg("model"), py::arg("x"), py::arg("sigma"));
  m.def("mixture_score", &mixture_score, py::arg("model"), py::arg("x"), py::arg("sigma"));
  m.def("mixture_denoise", &mixture_denoise, py::arg("model"), py::arg("x"), py::arg("sigma"));
  m.def(
      "gmm_cfg_guidance",
      [](const MixtureModel& mm, std::size_t target, const Vector& x, double sigma, double gamma) {
        const auto g = gmm_cfg_guidance(mm, target, x, sigma, gamma);
        return py::make_tuple(g.g_cpc_like, g.g_mean_like);
      },
      py::arg("model"), py::arg("target"), py::arg("x"), py::arg("sigma"), py::arg("gamma"),
      "Target index is 0-based.");

  // --- metrics -------------------------------------------------------------------
  m.def("gaussian_frechet", &gaussian_frechet, py::arg("a"), py::arg("b"));
  m.def("class_similarity_matrix", &class_similarity_matrix, py::arg("stats"));

  // --- synthetic instances and verification -----------------------------------------
  m.def("toy_pair", [](const Vector& mu_c, const Vector& mu_uc) {
    return py::make_tuple(synthetic::toy_conditional(mu_c), synthetic::toy_unconditional(mu_uc));
  }, py::arg("mu_c"), py::arg("mu_uc"));
  m.def(
      "verify",
      [](const std::string& suite) {
        py::list out;
        for (const auto& c : run_verify_suite(suite)) out.append(py::make_tuple(c.name, c.passed, c.worst, c.tolerance));
        return out;
      },
      py::arg("suite") = "all");
}
