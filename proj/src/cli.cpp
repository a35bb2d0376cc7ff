#include "lcfg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "file_util.hpp"
#include "lcfg/cpca.hpp"
#include "lcfg/denoiser.hpp"
#include "lcfg/error.hpp"
#include "lcfg/gmm.hpp"
#include "lcfg/image.hpp"
#include "lcfg/metrics.hpp"
#include "lcfg/sampler.hpp"
#include "lcfg/stats.hpp"
#include "lcfg/synthetic.hpp"
#include "lcfg/verify.hpp"

namespace lcfg::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") throw DomainError(key + ": expected a number, got \"" + text + "\"");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") throw DomainError(key + ": expected an integer, got \"" + text + "\"");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw DomainError(key + ": expected a boolean, got \"" + text + "\"");
}

std::pair<double, double> parse_range(const std::string& key, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError(key + ": expected lo:hi, got \"" + text + "\"");
  const double lo = parse_double(key, text.substr(0, colon));
  const double hi = parse_double(key, text.substr(colon + 1));
  if (!(lo < hi)) throw DomainError(key + ": need lo < hi");
  return {lo, hi};
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) { detail::write_file_atomic(path, text); }

std::string read_text(const fs::path& path) {
  const auto bytes = detail::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

// --- sample configuration ----------------------------------------------------

// Keys understood by `sample`, each also available as --key.
const std::vector<std::pair<std::string, std::string>>& sample_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"cond", "conditional stats file"},
      {"uncond", "unconditional stats file"},
      {"mixture", "mixture manifest (replaces uncond; cond is the target component)"},
      {"target", "1-based target component of the mixture"},
      {"sigma-max", "largest noise level"},
      {"sigma-min", "smallest noise level"},
      {"steps", "number of integration steps"},
      {"rho", "schedule curvature"},
      {"gamma", "guidance strength"},
      {"components", "guidance terms: all, none, or a comma list of pos_cpc,neg_cpc,mean_shift"},
      {"interval", "noise levels lo:hi where guidance is active"},
      {"m", "number of samples"},
      {"seed", "batch seed"},
      {"init", "zero or mean_shifted"},
      {"init-gamma", "shift strength for mean_shifted init (defaults to gamma)"},
      {"init-sigma", "initial standard deviation (defaults to sigma-max)"},
      {"solver", "euler or heun"},
      {"freeze-cpc", "keep the sigma-max CPC directions for all steps"},
      {"out", "output directory"},
      {"images", "number of samples to write as images"},
      {"shape", "image shape HxWxC"},
      {"fixed-range", "clamp range lo:hi for image export"},
  };
  return keys;
}

const ConfigMap& sample_defaults() {
  static const ConfigMap defaults = {
      {"target", "1"},      {"sigma-max", "80"},     {"sigma-min", "0.002"}, {"steps", "256"},
      {"rho", "7"},         {"gamma", "4"},          {"components", "all"},  {"m", "16"},
      {"seed", "0"},        {"init", "zero"},        {"solver", "euler"},    {"freeze-cpc", "false"},
      {"out", "lcfg_run"},  {"images", "0"},
  };
  return defaults;
}

std::string get(const ConfigMap& c, const std::string& key) {
  const auto it = c.find(key);
  if (it != c.end()) return it->second;
  const auto d = sample_defaults().find(key);
  return d == sample_defaults().end() ? std::string{} : d->second;
}

bool has(const ConfigMap& c, const std::string& key) { return !get(c, key).empty(); }

GuidanceConfig guidance_from(const ConfigMap& c) {
  GuidanceConfig cfg;
  cfg.gamma = parse_double("gamma", get(c, "gamma"));
  const std::string comps = get(c, "components");
  if (comps != "all") {
    cfg.enable_pos_cpc = cfg.enable_neg_cpc = cfg.enable_mean_shift = false;
    if (comps != "none") {
      std::stringstream ss(comps);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "pos_cpc") cfg.enable_pos_cpc = true;
        else if (item == "neg_cpc") cfg.enable_neg_cpc = true;
        else if (item == "mean_shift") cfg.enable_mean_shift = true;
        else throw DomainError("components: unknown term \"" + item + "\"");
      }
    }
  }
  if (has(c, "interval")) {
    const auto [lo, hi] = parse_range("interval", get(c, "interval"));
    cfg.active_interval = SigmaInterval{lo, hi};
  }
  cfg.validate();
  return cfg;
}

NoiseSchedule schedule_from(const ConfigMap& c) {
  const long long steps = parse_int("steps", get(c, "steps"));
  if (steps < 1 || steps > 1000000) throw DomainError("steps must be in [1, 1e6]");
  return make_schedule(parse_double("sigma-max", get(c, "sigma-max")), parse_double("sigma-min", get(c, "sigma-min")),
                       static_cast<int>(steps), parse_double("rho", get(c, "rho")));
}

Solver solver_from(const ConfigMap& c) {
  const std::string s = get(c, "solver");
  if (s == "euler") return Solver::Euler;
  if (s == "heun") return Solver::Heun;
  throw DomainError("solver must be euler or heun");
}

std::optional<PixelRange> range_from(const ConfigMap& c) {
  if (!has(c, "fixed-range")) return std::nullopt;
  const auto [lo, hi] = parse_range("fixed-range", get(c, "fixed-range"));
  return PixelRange{lo, hi};
}

// The config echo stores absolute input paths so a manifest can be replayed from anywhere.
void absolutize(ConfigMap& c, const fs::path& base) {
  for (const char* key : {"cond", "uncond", "mixture"}) {
    auto it = c.find(key);
    if (it == c.end() || it->second.empty()) continue;
    fs::path p(it->second);
    if (p.is_relative()) p = base / p;
    it->second = fs::absolute(p).lexically_normal().string();
  }
}

void require_file(const std::string& key, const std::string& path) {
  if (path.empty()) throw IoError("no such input: --" + key + " is required");
  if (!fs::exists(path)) throw IoError("no such input: " + path);
}

int cmd_sample(ConfigMap config, std::ostream& out) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  const bool mixture_mode = has(config, "mixture");
  require_file("cond", get(config, "cond"));
  if (mixture_mode) require_file("mixture", get(config, "mixture"));
  else require_file("uncond", get(config, "uncond"));

  const GuidanceConfig cfg = guidance_from(config);
  const NoiseSchedule schedule = schedule_from(config);
  const Solver solver = solver_from(config);
  const long long m = parse_int("m", get(config, "m"));
  if (m < 1) throw DomainError("m must be positive");
  const auto seed = static_cast<std::uint64_t>(parse_int("seed", get(config, "seed")));
  const bool freeze = parse_bool("freeze-cpc", get(config, "freeze-cpc"));
  const long long n_images = parse_int("images", get(config, "images"));
  std::optional<ImageShape> shape;
  if (has(config, "shape")) shape = parse_image_shape(get(config, "shape"));
  if (n_images > 0 && !shape) throw DomainError("images requires shape");
  const auto range = range_from(config);

  const GaussianStats cond = load_stats(get(config, "cond"));
  std::optional<GaussianStats> uncond;
  std::optional<MixtureModel> mixture;
  std::size_t target = 0;
  if (mixture_mode) {
    mixture = load_mixture_manifest(get(config, "mixture"));
    const long long t = parse_int("target", get(config, "target"));
    if (t < 1 || static_cast<std::size_t>(t) > mixture->size())
      throw DomainError("target must be in 1.." + std::to_string(mixture->size()));
    target = static_cast<std::size_t>(t - 1);
    if (mixture->dim() != cond.dim()) throw ShapeError("mixture and cond dimensions differ");
  } else {
    uncond = load_stats(get(config, "uncond"), cond.dim());
  }
  if (shape && shape->size() != cond.dim())
    throw ShapeError("shape " + get(config, "shape") + " holds " + std::to_string(shape->size()) +
                     " values but samples have d = " + std::to_string(cond.dim()));

  InitSpec init;
  const std::string init_mode = get(config, "init");
  if (init_mode == "mean_shifted") {
    if (mixture_mode) throw DomainError("mean_shifted init needs an uncond stats file");
    const double g = has(config, "init-gamma") ? parse_double("init-gamma", get(config, "init-gamma")) : cfg.gamma;
    const double s = has(config, "init-sigma") ? parse_double("init-sigma", get(config, "init-sigma"))
                                                : schedule.sigma_max();
    init = mean_shifted_init(cond, *uncond, g, s);
  } else if (init_mode == "zero") {
    if (has(config, "init-sigma")) init.stddev = parse_double("init-sigma", get(config, "init-sigma"));
  } else {
    throw DomainError("init must be zero or mean_shifted");
  }

  const fs::path out_dir = get(config, "out");
  const auto t1 = clock::now();
  SampleBatch batch;
  if (mixture_mode) {
    batch = gmm_sample_batch(*mixture, target, static_cast<std::size_t>(m), seed, schedule, cfg, init, solver);
  } else {
    IntegrateOptions opts;
    opts.solver = solver;
    opts.freeze_cpc = freeze;
    batch = sample_batch(cond, *uncond, static_cast<std::size_t>(m), seed, schedule, cfg, init, opts);
  }
  const auto t2 = clock::now();

  fs::create_directories(out_dir);
  save_data_matrix(DataMatrix(batch.samples), out_dir / "samples.lcfd");
  json outputs = json::array({"samples.lcfd"});
  for (long long k = 0; k < std::min<long long>(n_images, m); ++k) {
    const std::string name = "sample_" + std::to_string(k) + (shape->channels == 3 ? ".ppm" : ".pgm");
    write_netpbm(out_dir / name, batch.samples.row(k).transpose(), *shape, range);
    outputs.push_back(name);
  }
  const auto t3 = clock::now();

  const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  json manifest;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["dim"] = cond.dim();
  manifest["outputs"] = outputs;
  manifest["timings"] = {{"load_s", secs(t0, t1)}, {"sample_s", secs(t1, t2)}, {"write_s", secs(t2, t3)}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  out << "wrote " << m << " samples (d = " << cond.dim() << ") to " << (out_dir / "samples.lcfd").string() << "\n";
  out << "sampling took " << fmt(secs(t1, t2), 4) << " s\n";
  return kOk;
}

ConfigMap read_config_file(const fs::path& path) {
  ConfigMap c = parse_config_text(read_text(path));
  absolutize(c, path.parent_path());
  return c;
}

ConfigMap read_manifest_config(const fs::path& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.contains("config") || !j["config"].is_object()) throw FormatError("manifest has no config object", 0);
  ConfigMap c;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw FormatError("manifest config value for \"" + k + "\" is not a string", 0);
    c[k] = v.get<std::string>();
  }
  absolutize(c, path.parent_path());
  return c;
}

// --- other commands ---------------------------------------------------------

int cmd_fit(const std::string& data_path, const std::string& out_path, const std::string& label, std::ostream& out) {
  if (!fs::exists(data_path)) throw IoError("no such input: " + data_path);
  const DataMatrix data = read_data_any(data_path);
  GaussianStats stats = estimate_gaussian_stats(data);
  if (!label.empty()) stats.set_label(label);
  save_stats(stats, out_path);
  out << "d = " << data.d() << ", n = " << data.n() << "\n";
  out << "top eigenvalues:";
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(10, stats.dim()); ++i) out << " " << fmt(stats.eigvals()(i));
  out << "\nwrote " << out_path << "\n";
  return kOk;
}

int cmd_verify(const std::string& suite, std::ostream& out) {
  const auto checks = run_verify_suite(suite);
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  worst = " << fmt(c.worst, 4)
        << "  tol = " << fmt(c.tolerance, 4);
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
    if (!c.passed) failed.push_back(c.name);
  }
  if (failed.empty()) {
    out << checks.size() << " checks passed\n";
    return kOk;
  }
  out << "failing invariants:";
  for (const auto& f : failed) out << " " << f;
  out << "\n";
  return kVerifyFailed;
}

std::vector<GaussianStats> load_stats_list(const std::vector<std::string>& paths) {
  std::vector<GaussianStats> list;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw IoError("no such input: " + p);
    list.push_back(list.empty() ? load_stats(p) : load_stats(p, list.front().dim()));
  }
  return list;
}

std::vector<std::string> labels_for(const std::vector<GaussianStats>& list, const std::vector<std::string>& paths) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < list.size(); ++i)
    labels.push_back(list[i].label().value_or(fs::path(paths[i]).stem().string()));
  return labels;
}

void print_matrix(const Matrix& m, const std::vector<std::string>& labels, std::ostream& out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << std::setw(12) << labels[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << std::setw(12) << fmt(m(i, j));
    out << "\n";
  }
}

int cmd_similarity(const std::vector<std::string>& paths, const std::string& csv, const std::string& svg,
                   std::ostream& out) {
  if (paths.size() < 2) throw DomainError("similarity needs at least two stats files");
  const auto list = load_stats_list(paths);
  const auto labels = labels_for(list, paths);
  const Matrix sim = class_similarity_matrix(list);
  print_matrix(sim, labels, out);
  if (!csv.empty()) write_text(csv, matrix_csv(sim, labels));
  if (!svg.empty()) write_text(svg, heatmap_svg(sim, labels, "Gaussian Frechet distance"));
  return kOk;
}

struct ExportArgs {
  std::string what;
  std::string cond, uncond, samples;
  std::vector<std::string> stats;
  double sigma = 0.0;  // 0 means the raw covariance difference
  int count = 3;
  std::string shape, fixed_range;
  std::string out = "lcfg_export";
  std::string direction = "pos_cpc";
  int index = 1;
  int bins = static_cast<int>(kDefaultBins);
  bool magnitude = false;
};

void write_vector_csv(const fs::path& path, const std::vector<std::pair<std::string, Vector>>& vectors) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& [name, v] : vectors) {
    os << name;
    for (double x : v) os << "," << x;
    os << "\n";
  }
  write_text(path, os.str());
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const fs::path dir = a.out;
  std::optional<ImageShape> shape;
  if (!a.shape.empty()) shape = parse_image_shape(a.shape);
  std::optional<PixelRange> range;
  if (!a.fixed_range.empty()) {
    const auto [lo, hi] = parse_range("fixed-range", a.fixed_range);
    range = PixelRange{lo, hi};
  }

  if (a.what == "similarity") {
    if (a.stats.size() < 2) throw DomainError("export similarity needs --stats with at least two files");
    fs::create_directories(dir);
    return cmd_similarity(a.stats, (dir / "similarity.csv").string(), (dir / "similarity.svg").string(), out);
  }

  require_file("cond", a.cond);
  const GaussianStats cond = load_stats(a.cond);
  std::optional<GaussianStats> uncond;
  if (!a.uncond.empty()) {
    require_file("uncond", a.uncond);
    uncond = load_stats(a.uncond, cond.dim());
  }
  if (shape && shape->size() != cond.dim())
    throw ShapeError("shape " + a.shape + " holds " + std::to_string(shape->size()) + " values but d = " +
                     std::to_string(cond.dim()));
  if (a.sigma < 0.0) throw DomainError("sigma must be nonnegative");
  const auto spectrum = [&]() {
    if (!uncond) throw IoError("no such input: --uncond is required");
    return a.sigma > 0.0 ? posterior_cpcs(cond, *uncond, a.sigma)
                         : contrastive_components(cond.covariance(), uncond->covariance());
  };

  std::vector<std::pair<std::string, Vector>> vectors;
  if (a.what == "cpcs") {
    const auto spec = spectrum();
    const Eigen::Index k = std::max(0, a.count);
    for (Eigen::Index i = 0; i < std::min(k, cond.dim()); ++i)
      vectors.emplace_back("pc_" + std::to_string(i + 1), cond.eigvecs().col(i));
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, spec.n_pos); ++i)
      vectors.emplace_back("cpc_pos_" + std::to_string(i + 1), spec.eigvecs.col(i));
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, spec.n_neg); ++i)
      vectors.emplace_back("cpc_neg_" + std::to_string(i + 1), spec.eigvecs.col(spec.dim() - 1 - i));
    std::ostringstream vals;
    vals << std::setprecision(17) << "name,eigenvalue\n";
    for (Eigen::Index i = 0; i < spec.dim(); ++i) vals << "cpc_" << i + 1 << "," << spec.eigvals(i) << "\n";
    fs::create_directories(dir);
    write_text(dir / "cpc_eigenvalues.csv", vals.str());
  } else if (a.what == "mean_shift_dir") {
    if (!uncond) throw IoError("no such input: --uncond is required");
    const Vector delta = cond.mean() - uncond->mean();
    vectors.emplace_back("mean_shift", delta);
    if (a.sigma > 0.0) {
      const auto f = shrinkage(*uncond, a.sigma).factors;
      vectors.emplace_back("mean_shift_sigma", delta - apply_spectral(*uncond, f, delta));
    }
  } else if (a.what == "histograms") {
    require_file("samples", a.samples);
    const DataMatrix data = read_data_any(a.samples);
    if (data.d() != cond.dim()) throw ShapeError("samples and stats dimensions differ");
    Vector dir_vec;
    if (a.direction == "mean_shift") {
      if (!uncond) throw IoError("no such input: --uncond is required");
      dir_vec = cond.mean() - uncond->mean();
      if (dir_vec.norm() == 0.0) throw DomainError("means coincide; mean-shift direction undefined");
      dir_vec.normalize();
    } else if (a.direction == "pc") {
      if (a.index < 1 || a.index > cond.dim()) throw DomainError("index out of range");
      dir_vec = cond.eigvecs().col(a.index - 1);
    } else if (a.direction == "pos_cpc" || a.direction == "neg_cpc") {
      const auto spec = spectrum();
      const Eigen::Index n = a.direction == "pos_cpc" ? spec.n_pos : spec.n_neg;
      if (a.index < 1 || a.index > n) throw DomainError("no " + a.direction + " with index " + std::to_string(a.index));
      dir_vec = a.direction == "pos_cpc" ? Vector(spec.eigvecs.col(a.index - 1))
                                         : Vector(spec.eigvecs.col(spec.dim() - a.index));
    } else {
      throw DomainError("direction must be pos_cpc, neg_cpc, mean_shift or pc");
    }
    if (a.bins < 1) throw DomainError("bins must be positive");
    const auto h = project_histogram(data.values(), dir_vec, cond.mean(), static_cast<std::size_t>(a.bins), a.magnitude);
    fs::create_directories(dir);
    write_text(dir / "histogram.csv", histogram_csv(h));
    write_text(dir / "histogram.svg", histogram_svg(h, a.direction + " projection"));
    out << "mean = " << fmt(h.summary.mean) << ", std = " << fmt(h.summary.stddev) << ", median = "
        << fmt(h.summary.quantiles[2]) << "\n";
    return kOk;
  } else {
    throw DomainError("export target must be cpcs, mean_shift_dir, histograms or similarity");
  }

  fs::create_directories(dir);
  write_vector_csv(dir / (a.what + ".csv"), vectors);
  if (shape) {
    for (const auto& [name, v] : vectors)
      write_netpbm(dir / (name + (shape->channels == 3 ? ".ppm" : ".pgm")), v, *shape, range);
  }
  out << "exported " << vectors.size() << " vectors to " << dir.string() << "\n";
  return kOk;
}

struct DemoArgs {
  std::string out = "lcfg_gmm_demo";
  double gamma = 4.0;
  int m = 2000;
  int steps = 64;
  long long seed = 1;
};

int cmd_gmm_demo(const DemoArgs& a, std::ostream& out) {
  if (a.m < 2) throw DomainError("m must be at least 2");
  const fs::path dir = a.out;
  fs::create_directories(dir);

  // 2D toy pair.
  const Vector mu_c = Eigen::Vector2d(4.0, 4.0);
  save_stats(synthetic::toy_conditional(mu_c), dir / "toy_cond.lcfs");
  save_stats(synthetic::toy_unconditional(Eigen::Vector2d::Zero()), dir / "toy_uncond.lcfs");

  // Three-class instance as an equal-weight mixture.
  const auto setup = synthetic::three_class_setup();
  std::ostringstream manifest;
  manifest << "# equal-weight three-class mixture\n";
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < setup.classes.size(); ++i) {
    const std::string name = "class_" + std::to_string(i + 1) + ".lcfs";
    save_stats(setup.classes[i], dir / name);
    manifest << name << " " << std::setprecision(17) << 1.0 / 3.0 << "\n";
    labels.push_back("class_" + std::to_string(i + 1));
  }
  save_stats(setup.pooled, dir / "pooled.lcfs");
  write_text(dir / "mixture.txt", manifest.str());
  const MixtureModel model = load_mixture_manifest(dir / "mixture.txt");

  const NoiseSchedule schedule = make_schedule(80.0, 0.002, a.steps, 7.0);
  const Matrix train = class_similarity_matrix(setup.classes);
  out << "training statistics (Gaussian Frechet distance):\n";
  print_matrix(train, labels, out);
  write_text(dir / "similarity_train.csv", matrix_csv(train, labels));

  for (double gamma : {0.0, a.gamma}) {
    std::vector<GaussianStats> generated;
    for (std::size_t c = 0; c < model.size(); ++c) {
      GuidanceConfig cfg;
      cfg.gamma = gamma;
      const auto batch = gmm_sample_batch(model, c, static_cast<std::size_t>(a.m), static_cast<std::uint64_t>(a.seed),
                                          schedule, cfg);
      generated.push_back(estimate_gaussian_stats(DataMatrix(batch.samples)));
    }
    const Matrix sim = class_similarity_matrix(generated);
    out << "generated with gamma = " << fmt(gamma) << ":\n";
    print_matrix(sim, labels, out);
    write_text(dir / ("similarity_gamma" + fmt(gamma) + ".csv"), matrix_csv(sim, labels));
    write_text(dir / ("similarity_gamma" + fmt(gamma) + ".svg"),
               heatmap_svg(sim, labels, "gamma = " + fmt(gamma)));
  }
  out << "wrote demo instances to " << dir.string() << "\n";
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Io: return kMissingInput;
    case ErrorKind::Shape: return kShapeError;
    case ErrorKind::Divergence:
    case ErrorKind::Numerical: return kDivergence;
    case ErrorKind::Format:
    case ErrorKind::Data:
    case ErrorKind::Domain: return kFormatError;
  }
  return kFormatError;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap c;
  std::size_t offset = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(offset, end - offset);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("config line without '='", offset);
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw FormatError("config line with empty key", offset);
      c[key] = trim(line.substr(eq + 1));
    }
    offset = end + 1;
  }
  return c;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear-Gaussian diffusion and classifier-free guidance toolkit", "lcfg"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "estimate Gaussian stats from a data file (CSV or binary)");
  std::string fit_data, fit_out, fit_label;
  fit->add_option("data", fit_data, "input data file")->required();
  fit->add_option("stats", fit_out, "output stats file")->required();
  fit->add_option("--label", fit_label, "class label");

  // sample
  auto* sample = app.add_subcommand("sample", "run guided reverse-ODE sampling");
  std::string config_path, manifest_path;
  sample->add_option("config", config_path, "key=value config file");
  sample->add_option("--from-manifest", manifest_path, "replay the config stored in a run manifest");
  std::map<std::string, std::string> flag_values;
  for (const auto& [key, help] : sample_keys()) sample->add_option("--" + key, flag_values[key], help);

  // verify
  auto* verify = app.add_subcommand("verify", "run a property suite on built-in instances");
  std::string suite = "all";
  verify->add_option("suite", suite, "theorem1 | decomposition | cpca | gmm | all");

  // export
  auto* exp = app.add_subcommand("export", "export CPCs, mean-shift directions, histograms or similarities");
  ExportArgs ea;
  exp->add_option("what", ea.what, "cpcs | mean_shift_dir | histograms | similarity")->required();
  exp->add_option("--cond", ea.cond, "conditional stats");
  exp->add_option("--uncond", ea.uncond, "unconditional stats");
  exp->add_option("--samples", ea.samples, "sample file for histograms");
  exp->add_option("--stats", ea.stats, "stats files for similarity");
  exp->add_option("--sigma", ea.sigma, "noise level for posterior CPCs (0: raw covariances)");
  exp->add_option("--count", ea.count, "vectors per family");
  exp->add_option("--shape", ea.shape, "image shape HxWxC");
  exp->add_option("--fixed-range", ea.fixed_range, "clamp range lo:hi");
  exp->add_option("--out", ea.out, "output directory");
  exp->add_option("--direction", ea.direction, "pos_cpc | neg_cpc | mean_shift | pc");
  exp->add_option("--index", ea.index, "1-based component index");
  exp->add_option("--bins", ea.bins, "histogram bins");
  exp->add_flag("--magnitude", ea.magnitude, "histogram absolute projections");

  // similarity
  auto* sim = app.add_subcommand("similarity", "pairwise Gaussian Frechet distances");
  std::vector<std::string> sim_paths;
  std::string sim_csv, sim_svg;
  sim->add_option("stats", sim_paths, "stats files")->required();
  sim->add_option("--csv", sim_csv, "write matrix CSV");
  sim->add_option("--svg", sim_svg, "write heatmap SVG");

  // gmm-demo
  auto* demo = app.add_subcommand("gmm-demo", "build the synthetic instances and compare class separation");
  DemoArgs da;
  demo->add_option("--out", da.out, "output directory");
  demo->add_option("--gamma", da.gamma, "guidance strength");
  demo->add_option("--m", da.m, "samples per class");
  demo->add_option("--steps", da.steps, "integration steps");
  demo->add_option("--seed", da.seed, "batch seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFormatError;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_data, fit_out, fit_label, out);
    if (sample->parsed()) {
      ConfigMap config;
      if (!manifest_path.empty()) config = read_manifest_config(manifest_path);
      if (!config_path.empty())
        for (auto& [k, v] : read_config_file(config_path)) config[k] = v;
      ConfigMap flags;
      for (const auto& [key, help] : sample_keys())
        if (sample->count("--" + key) > 0) flags[key] = flag_values[key];
      absolutize(flags, fs::current_path());
      for (auto& [k, v] : flags) config[k] = v;
      for (const auto& [k, v] : config) {
        const bool known = std::any_of(sample_keys().begin(), sample_keys().end(),
                                       [&](const auto& kv) { return kv.first == k; });
        if (!known) throw DomainError("unknown config key \"" + k + "\"");
      }
      return cmd_sample(config, out);
    }
    if (verify->parsed()) return cmd_verify(suite, out);
    if (exp->parsed()) return cmd_export(ea, out);
    if (sim->parsed()) return cmd_similarity(sim_paths, sim_csv, sim_svg, out);
    if (demo->parsed()) return cmd_gmm_demo(da, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFormatError;
  }
  return kFormatError;
}

}  // namespace lcfg::cli
