#pragma once

// Synthetic scenes with exact ground truth: smooth random endmember spectra,
// Dirichlet abundances, optional pure pixels and clamped Gaussian noise.

#include "msunmix/spectral.hpp"

#include <cstdint>

namespace msunmix {

struct SceneSpec {
  std::size_t width = 32;
  std::size_t height = 32;
  std::size_t p = 3;
  WavelengthAxis axis = WavelengthAxis::uniform(400.0, 2500.0, 198);
  std::uint64_t seed = 0;
  /// Symmetric Dirichlet concentration.
  double alpha = 1.0;
  /// One-hot pixels forced per endmember.
  std::size_t pure_pixel_count = 1;
  /// Additive noise standard deviation; noisy values are clamped at 0.
  double noise_sigma = 0.0;
  std::string units = "reflectance";

  void validate() const;
};

struct Scene {
  SpectralCube cube;
  EndmemberSet endmembers;
  AbundanceField abundances;
};

/// Deterministic in `spec.seed`. Each pixel draws from its own substream, so
/// the result does not depend on generation order.
Scene generate(const SceneSpec& spec);

/// One smooth positive spectrum (3-6 Gaussian bumps over a small offset,
/// peak in [0.5, 1]); exposed for tests and benchmarks.
Vector smooth_signature(const WavelengthAxis& axis, std::uint64_t seed, std::uint64_t index);

}  // namespace msunmix
