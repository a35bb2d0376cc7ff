#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace lcfg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n x d sample matrix, one sample per row.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index d() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// Mean plus spectral form of a covariance, Sigma = U diag(lambda) U^T.
///
/// Eigenvalues are nonnegative and sorted descending; columns of U are
/// orthonormal and each column has its largest-magnitude entry positive.
class GaussianStats {
 public:
  GaussianStats() = default;

  /// Takes an already-decomposed covariance. Validates orthonormality and ordering.
  GaussianStats(Vector mean, Matrix eigvecs, Vector eigvals,
                std::optional<std::string> label = std::nullopt);

  /// Decomposes a symmetric PSD covariance. Negative round-off eigenvalues are clamped to 0.
  static GaussianStats from_covariance(const Vector& mean, const Matrix& cov,
                                       std::optional<std::string> label = std::nullopt);

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& eigvecs() const { return eigvecs_; }
  const Vector& eigvals() const { return eigvals_; }
  const std::optional<std::string>& label() const { return label_; }
  void set_label(std::optional<std::string> label) { label_ = std::move(label); }

  /// U diag(lambda) U^T, explicitly symmetrized.
  Matrix covariance() const;

 private:
  Vector mean_;
  Matrix eigvecs_;
  Vector eigvals_;
  std::optional<std::string> label_;
};

/// Symmetric eigendecomposition sorted by descending eigenvalue, with the
/// largest-magnitude entry of every eigenvector made positive.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Flips each column so that its entry of largest magnitude is positive.
void canonicalize_signs(Matrix& vectors);

/// Empirical mean and population (1/n) covariance of the rows of `data`.
GaussianStats estimate_gaussian_stats(const DataMatrix& data);

// Stats file: "LCFG1", u8 version, u32 d, d f64 mean, d f64 eigvals, d*d f64 U (row-major).
inline constexpr char kStatsMagic[] = "LCFG1";
inline constexpr std::uint8_t kStatsVersion = 1;

void save_stats(const GaussianStats& stats, const std::filesystem::path& path);
GaussianStats load_stats(const std::filesystem::path& path);
/// Same as load_stats but rejects files whose dimension differs from `expected_dim`.
GaussianStats load_stats(const std::filesystem::path& path, Eigen::Index expected_dim);

// Data file: "LCFD1", u32 n, u32 d, n*d f64 row-major.
inline constexpr char kDataMagic[] = "LCFD1";

void save_data_matrix(const DataMatrix& data, const std::filesystem::path& path);
DataMatrix load_data_matrix(const std::filesystem::path& path);
/// One sample per line, comma separated. Blank lines and lines starting with '#' are skipped.
DataMatrix read_data_csv(const std::filesystem::path& path);
/// Dispatches on the leading magic: LCFD1 binary, otherwise CSV.
DataMatrix read_data_any(const std::filesystem::path& path);

}  // namespace lcfg
