#pragma once

// Endmember extraction on a bands x pixels table.
//
// VCA and N-FINDR select columns of the input (pure-pixel methods); NMF
// estimates signatures by factorization. All three are deterministic given
// the seed in ExtractionConfig.

#include "msunmix/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace msunmix {

enum class Method { vca, nfindr, nmf };

std::string_view to_string(Method m);
/// Accepts "vca", "nfindr", "nmf"; throws InvalidArgument otherwise.
Method parse_method(std::string_view name);

struct ExtractionConfig {
  std::size_t p = 2;
  std::uint64_t seed = 0;
  /// N-FINDR sweeps / NMF iterations.
  std::size_t max_iter = 1000;
  /// NMF relative objective decrease threshold.
  double tol = 1e-9;

  void validate() const;
};

struct ExtractionResult {
  EndmemberSet endmembers;
  Method method;
  /// Source pixels (VCA, N-FINDR).
  std::optional<std::vector<std::size_t>> pixel_indices;
  /// NMF: Frobenius error after each accepted iteration.
  /// N-FINDR: simplex volume at start and after each sweep.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  /// NMF only: p x pixels abundance factor matching `endmembers` column order.
  std::optional<Matrix> abundance_factor;
};

struct SubspaceProjection {
  Matrix projected;  ///< dim x pixels
  Matrix basis;      ///< bands x dim, orthonormal columns
  Vector mean;       ///< bands
  Vector singular_values;
  /// True when dim exceeds the numerical rank of the centred data; the
  /// trailing directions then carry (numerically) zero energy.
  bool rank_deficient = false;

  Matrix reconstruct() const;
};

/// Mean-centred principal subspace of dimension `dim`. Basis signs are fixed
/// so the largest-magnitude entry of each basis vector is positive.
SubspaceProjection project_subspace(const Matrix& data, std::size_t dim);

/// Uncentred variant used by VCA's projective step: top `dim` left singular
/// vectors of the raw data, same sign convention.
Matrix principal_basis_uncentered(const Matrix& data, std::size_t dim);

ExtractionResult vca(const Matrix& data, const WavelengthAxis& axis, const ExtractionConfig& config);
ExtractionResult nfindr(const Matrix& data, const WavelengthAxis& axis,
                        const ExtractionConfig& config);
ExtractionResult nmf(const Matrix& data, const WavelengthAxis& axis, const ExtractionConfig& config);

ExtractionResult extract(Method method, const Matrix& data, const WavelengthAxis& axis,
                         const ExtractionConfig& config);

/// |det| of the p x p matrix whose columns are [1; vertex_i] for the given
/// (p-1)-dimensional vertices.
double simplex_volume(const Matrix& reduced, std::span<const std::size_t> vertices);

}  // namespace msunmix
