#pragma once

#include "msunmix/rng.hpp"
#include "msunmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

namespace msunmix::test {

inline std::string data_path(const std::string& rel) {
  return std::string(MSUNMIX_DATA_DIR) + "/" + rel;
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(lo, hi);
  }
  return m;
}

inline Vector random_simplex_point(Rng& rng, Eigen::Index p) {
  Vector v(p);
  for (Eigen::Index k = 0; k < p; ++k) v[k] = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("msunmix_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace msunmix::test
