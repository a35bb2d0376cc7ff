#pragma once

#include <filesystem>
#include <random>

#include <Eigen/Dense>
#include <string>

#include <unistd.h>

#include "lcfg/stats.hpp"

namespace lcfg::test {

inline Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (auto& x : v) x = scale * n(rng);
  return v;
}

/// Fresh scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("lcfg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace lcfg::test
