#pragma once

// Abundance estimation under the linear mixing model.
//
// With both constraints on (the default) each pixel is solved as fully
// constrained least squares: NNLS on the system augmented with the weighted
// row delta * 1^T x = delta, followed by an exact equality-constrained solve
// on the active support and a final renormalisation to sum 1.

#include "msunmix/spectral.hpp"

#include <cstddef>

namespace msunmix {

struct AbundanceConfig {
  bool sum_to_one = true;
  bool nonnegative = true;
  /// Weight of the sum-to-one row, relative to the largest endmember norm.
  double sto_weight = 1e3;

  void validate() const;
};

struct NnlsResult {
  Vector x;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set NNLS: min ||A x - b|| s.t. x >= 0.
/// `tol` is the dual-feasibility threshold relative to max(1, ||b||);
/// `max_iter` caps the number of variables moved into the passive set.
NnlsResult nnls(const Matrix& a, const Vector& b, std::size_t max_iter, double tol = 1e-10);

/// Fractions for a single band vector; `endmembers` is bands x p.
Vector solve_pixel(const Vector& spectrum, const Matrix& endmembers, const AbundanceConfig& config);

/// solve_pixel for every column of a bands x pixels table; returns p x pixels.
Matrix solve_table(const Matrix& data, const Matrix& endmembers, const AbundanceConfig& config);

/// Abundance field for a cube. Requires config.nonnegative (the field type
/// holds nonnegative fractions only).
AbundanceField solve_cube(const SpectralCube& cube, const EndmemberSet& endmembers,
                          const AbundanceConfig& config);

}  // namespace msunmix
