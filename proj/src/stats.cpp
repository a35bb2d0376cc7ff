#include "lcfg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "file_util.hpp"
#include "lcfg/error.hpp"

namespace lcfg {

namespace {

// UᵀU costs O(d³); above this size only the cheap invariants are checked.
constexpr Eigen::Index kOrthonormalCheckMaxDim = 256;

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0) throw DataError("empty dataset: n = 0");
  if (values_.cols() == 0) throw DataError("data dimension must be at least 1");
  if (!all_finite(values_)) throw DataError("data contains non-finite entries");
}

void canonicalize_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, j) < 0) vectors.col(j) *= -1.0;
  }
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("symmetric_eigen: matrix is not square");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigendecomposition failed");
  const Eigen::Index d = a.rows();
  SymmetricEigen out{Vector(d), Matrix(d, d)};
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values(i) = solver.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  canonicalize_signs(out.vectors);
  return out;
}

GaussianStats::GaussianStats(Vector mean, Matrix eigvecs, Vector eigvals,
                             std::optional<std::string> label)
    : label_(std::move(label)) {
  const Eigen::Index d = mean.size();
  if (d == 0) throw ShapeError("GaussianStats: dimension must be at least 1");
  if (eigvecs.rows() != d || eigvecs.cols() != d || eigvals.size() != d)
    throw ShapeError("GaussianStats: inconsistent mean/eigvecs/eigvals sizes");
  if (!mean.allFinite() || !eigvecs.allFinite() || !eigvals.allFinite())
    throw DataError("GaussianStats: non-finite entries");
  if ((eigvals.array() < 0.0).any()) throw DomainError("GaussianStats: negative eigenvalue");
  if (d <= kOrthonormalCheckMaxDim) {
    const double err = (eigvecs.transpose() * eigvecs - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw DomainError("GaussianStats: eigenvectors are not orthonormal");
  }

  // Sort descending (stable, so equal eigenvalues keep their given order).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eigvals(a) > eigvals(b); });
  mean_ = std::move(mean);
  eigvals_.resize(d);
  eigvecs_.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    eigvals_(i) = eigvals(order[static_cast<std::size_t>(i)]);
    eigvecs_.col(i) = eigvecs.col(order[static_cast<std::size_t>(i)]);
  }
  canonicalize_signs(eigvecs_);
}

GaussianStats GaussianStats::from_covariance(const Vector& mean, const Matrix& cov,
                                             std::optional<std::string> label) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw ShapeError("from_covariance: covariance does not match mean dimension");
  auto eig = symmetric_eigen(cov);
  eig.values = eig.values.cwiseMax(0.0);
  return GaussianStats(mean, std::move(eig.vectors), std::move(eig.values), std::move(label));
}

Matrix GaussianStats::covariance() const {
  Matrix cov = eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose();
  return 0.5 * (cov + cov.transpose());
}

GaussianStats estimate_gaussian_stats(const DataMatrix& data) {
  const Matrix& x = data.values();
  const double n = static_cast<double>(x.rows());
  const Vector mean = x.colwise().sum().transpose() / n;
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / n;
  return GaussianStats::from_covariance(mean, cov);
}

// --- stats file -------------------------------------------------------------

void save_stats(const GaussianStats& stats, const std::filesystem::path& path) {
  const auto d = stats.dim();
  detail::ByteWriter w;
  w.raw(kStatsMagic, 5);
  w.put<std::uint8_t>(kStatsVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.raw(stats.mean().data(), sizeof(double) * static_cast<std::size_t>(d));
  w.raw(stats.eigvals().data(), sizeof(double) * static_cast<std::size_t>(d));
  // Eigen is column-major; the file is row-major.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u = stats.eigvecs();
  w.raw(u.data(), sizeof(double) * static_cast<std::size_t>(d * d));
  detail::write_file_atomic(path, w.bytes());
}

namespace {

GaussianStats parse_stats(const std::vector<char>& bytes, std::optional<Eigen::Index> expected_dim) {
  detail::ByteReader r(bytes);
  r.expect_magic(std::string_view(kStatsMagic, 5));
  const std::size_t version_at = r.offset();
  const auto version = r.get<std::uint8_t>("version");
  if (version != kStatsVersion) throw FormatError("unsupported stats version " + std::to_string(version), version_at);
  const std::size_t dim_at = r.offset();
  const auto d32 = r.get<std::uint32_t>("dimension");
  if (d32 == 0) throw FormatError("stats dimension is zero", dim_at);
  const auto d = static_cast<Eigen::Index>(d32);
  if (expected_dim && *expected_dim != d)
    throw FormatError("stats dimension " + std::to_string(d) + " does not match expected " +
                          std::to_string(*expected_dim),
                      dim_at);
  const std::size_t need = sizeof(double) * (2 * static_cast<std::size_t>(d) + static_cast<std::size_t>(d) * d);
  if (r.remaining() < need) throw FormatError("truncated stats payload", r.offset());
  if (r.remaining() > need) throw FormatError("trailing bytes after stats payload", r.offset() + need);

  Vector mean(d), eigvals(d);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u(d, d);
  r.get_doubles(mean.data(), static_cast<std::size_t>(d), "mean");
  const std::size_t eig_at = r.offset();
  r.get_doubles(eigvals.data(), static_cast<std::size_t>(d), "eigenvalues");
  r.get_doubles(u.data(), static_cast<std::size_t>(d * d), "eigenvectors");
  for (Eigen::Index i = 0; i + 1 < d; ++i)
    if (!(eigvals(i) >= eigvals(i + 1))) throw FormatError("eigenvalues not sorted descending", eig_at);
  try {
    return GaussianStats(std::move(mean), Matrix(u), std::move(eigvals));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid stats payload: ") + e.what(), eig_at);
  }
}

}  // namespace

GaussianStats load_stats(const std::filesystem::path& path) {
  return parse_stats(detail::read_file(path), std::nullopt);
}

GaussianStats load_stats(const std::filesystem::path& path, Eigen::Index expected_dim) {
  return parse_stats(detail::read_file(path), expected_dim);
}

// --- data files -------------------------------------------------------------

void save_data_matrix(const DataMatrix& data, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.raw(kDataMagic, 5);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.n()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.d()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> v = data.values();
  w.raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  detail::write_file_atomic(path, w.bytes());
}

namespace {

DataMatrix parse_data_binary(const std::vector<char>& bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(std::string_view(kDataMagic, 5));
  const std::size_t n_at = r.offset();
  const auto n = r.get<std::uint32_t>("sample count");
  const auto d = r.get<std::uint32_t>("dimension");
  if (n == 0) throw FormatError("data file has n = 0", n_at);
  if (d == 0) throw FormatError("data file has d = 0", n_at + 4);
  const std::size_t count = static_cast<std::size_t>(n) * d;
  if (r.remaining() / sizeof(double) < count) throw FormatError("truncated data payload", r.offset());
  if (r.remaining() != count * sizeof(double))
    throw FormatError("trailing bytes after data payload", r.offset() + count * sizeof(double));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> v(n, d);
  r.get_doubles(v.data(), count, "samples");
  return DataMatrix(Matrix(v));
}

DataMatrix parse_data_csv(const std::vector<char>& bytes) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t pos = 0;
  const std::size_t size = bytes.size();
  while (pos < size) {
    const std::size_t line_start = pos;
    std::size_t end = pos;
    while (end < size && bytes[end] != '\n') ++end;
    std::string line(bytes.data() + pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    Eigen::Index count = 0;
    const char* p = line.c_str();
    while (true) {
      char* next = nullptr;
      const double v = std::strtod(p, &next);
      if (next == p) throw FormatError("malformed CSV value", line_start + static_cast<std::size_t>(p - line.c_str()));
      values.push_back(v);
      ++count;
      p = next;
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      if (*p != ',') throw FormatError("expected ',' in CSV row", line_start + static_cast<std::size_t>(p - line.c_str()));
      ++p;
    }
    if (cols < 0) cols = count;
    if (count != cols) throw FormatError("CSV row has " + std::to_string(count) + " columns, expected " + std::to_string(cols), line_start);
    ++rows;
  }
  if (rows == 0) throw DataError("empty dataset: CSV has no rows");
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(values.data(), rows, cols);
  return DataMatrix(Matrix(m));
}

}  // namespace

DataMatrix load_data_matrix(const std::filesystem::path& path) {
  return parse_data_binary(detail::read_file(path));
}

DataMatrix read_data_csv(const std::filesystem::path& path) {
  return parse_data_csv(detail::read_file(path));
}

DataMatrix read_data_any(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  // Anything starting with the data magic's first letter is treated as binary,
  // so a damaged header is reported as a format error rather than bad CSV.
  if (!bytes.empty() && bytes[0] == kDataMagic[0]) return parse_data_binary(bytes);
  return parse_data_csv(bytes);
}

}  // namespace lcfg
