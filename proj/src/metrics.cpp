#include "lcfg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lcfg/error.hpp"
#include "lcfg/parallel.hpp"

namespace lcfg {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ProjectionHistogram project_histogram(const Matrix& samples, const Vector& direction, const Vector& center,
                                      std::size_t n_bins, bool magnitude) {
  if (samples.rows() == 0) throw DataError("project_histogram: empty batch");
  if (direction.size() != samples.cols() || center.size() != samples.cols())
    throw ShapeError("project_histogram: dimension mismatch");
  if (std::abs(direction.norm() - 1.0) > 1e-8) throw DomainError("project_histogram: direction is not a unit vector");
  if (n_bins == 0) throw DomainError("project_histogram: need at least one bin");

  ProjectionHistogram h;
  h.direction = direction;
  h.center = center;
  h.values = (samples.rowwise() - center.transpose()) * direction;
  if (magnitude) h.values = h.values.cwiseAbs();

  double lo = h.values.minCoeff();
  double hi = h.values.maxCoeff();
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / n_bins;
  h.edges.back() = hi;
  h.counts.assign(n_bins, 0);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (const double v : h.values) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    if (bin >= n_bins) bin = n_bins - 1;  // right edge is inclusive
    ++h.counts[bin];
  }

  const std::vector<double> vals(h.values.data(), h.values.data() + h.values.size());
  h.summary.mean = h.values.mean();
  h.summary.stddev = std::sqrt((h.values.array() - h.summary.mean).square().mean());
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) h.summary.quantiles[i] = quantile(vals, kQuantileLevels[i]);
  return h;
}

ProjectionHistogram project_histogram(const SampleBatch& batch, const Vector& direction, const Vector& center,
                                      std::size_t n_bins, bool magnitude) {
  return project_histogram(batch.samples, direction, center, n_bins, magnitude);
}

double gaussian_frechet(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim() != b.dim()) throw ShapeError("gaussian_frechet: dimension mismatch");
  const double mean_term = (a.mean() - b.mean()).squaredNorm();
  const Matrix& ua = a.eigvecs();
  const Matrix sqrt_a = ua * a.eigvals().cwiseSqrt().asDiagonal() * ua.transpose();
  const Matrix inner = sqrt_a * b.covariance() * sqrt_a;
  const auto eig = symmetric_eigen(inner);
  const double cross = eig.values.cwiseMax(0.0).cwiseSqrt().sum();
  const double trace = a.eigvals().sum() + b.eigvals().sum() - 2.0 * cross;
  return std::max(0.0, mean_term + trace);
}

Matrix class_similarity_matrix(const std::vector<GaussianStats>& stats) {
  if (stats.size() < 2) throw DomainError("class_similarity_matrix: need at least two classes");
  for (const auto& s : stats)
    if (s.dim() != stats.front().dim()) throw ShapeError("class_similarity_matrix: dimension mismatch");
  const auto k = static_cast<Eigen::Index>(stats.size());
  Matrix m = Matrix::Zero(k, k);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double dist = gaussian_frechet(stats[static_cast<std::size_t>(i)], stats[static_cast<std::size_t>(j)]);
    m(i, j) = dist;
    m(j, i) = dist;
  });
  return m;
}

InitSpec mean_shifted_init(const GaussianStats& cond, const GaussianStats& uncond, double gamma, double sigma_T) {
  if (cond.dim() != uncond.dim()) throw ShapeError("mean_shifted_init: dimension mismatch");
  if (!(gamma >= 0.0)) throw DomainError("mean_shifted_init: gamma must be >= 0");
  if (!(sigma_T > 0.0)) throw DomainError("mean_shifted_init: sigma_T must be positive");
  return InitSpec{gamma * (cond.mean() - uncond.mean()), sigma_T};
}

// --- export -----------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string histogram_csv(const ProjectionHistogram& h) {
  std::ostringstream os;
  os << "left,right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << fmt_double(h.edges[i]) << ',' << fmt_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  return os.str();
}

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& labels) {
  std::ostringstream os;
  if (!labels.empty()) {
    for (std::size_t j = 0; j < labels.size(); ++j) os << (j ? "," : "") << labels[j];
    os << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt_double(m(i, j));
    os << '\n';
  }
  return os.str();
}

std::string histogram_svg(const ProjectionHistogram& h, const std::string& title) {
  constexpr double W = 640, H = 360, pad = 40;
  const std::size_t peak = h.counts.empty() ? 1 : std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
  const double bar_w = (W - 2 * pad) / static_cast<double>(h.counts.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double bh = (H - 2 * pad) * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
    os << "<rect x=\"" << pad + bar_w * static_cast<double>(i) << "\" y=\"" << H - pad - bh << "\" width=\""
       << bar_w * 0.95 << "\" height=\"" << bh << "\" fill=\"steelblue\"/>\n";
  }
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  char lo[32], hi[32];
  std::snprintf(lo, sizeof lo, "%.3g", h.edges.front());
  std::snprintf(hi, sizeof hi, "%.3g", h.edges.back());
  os << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" font-family=\"sans-serif\" font-size=\"11\">" << lo
     << "</text>\n";
  os << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 16
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << hi << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string heatmap_svg(const Matrix& m, const std::vector<std::string>& labels, const std::string& title) {
  constexpr double cell = 48, pad = 60;
  const auto k = static_cast<double>(m.rows());
  const double W = 2 * pad + cell * k, H = 2 * pad + cell * k;
  const double mx = m.size() ? std::max(m.maxCoeff(), 1e-300) : 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - m(i, j) / mx)));
      char val[32];
      std::snprintf(val, sizeof val, "%.3g", m(i, j));
      const double x = pad + cell * static_cast<double>(j), y = pad + cell * static_cast<double>(i);
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"rgb(255," << shade << ',' << shade << ")\" stroke=\"gray\"/>\n";
      os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << val << "</text>\n";
    }
    if (static_cast<std::size_t>(i) < labels.size()) {
      os << "<text x=\"" << pad - 4 << "\" y=\"" << pad + cell * static_cast<double>(i) + cell / 2 + 4
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
         << xml_escape(labels[static_cast<std::size_t>(i)]) << "</text>\n";
      os << "<text x=\"" << pad + cell * static_cast<double>(i) + cell / 2 << "\" y=\"" << pad - 6
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
         << xml_escape(labels[static_cast<std::size_t>(i)]) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lcfg
