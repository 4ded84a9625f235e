#include "msunmix/error.hpp"
#include "msunmix/extraction.hpp"
#include "msunmix/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace msunmix {
namespace {

// p distinct indices in [0, n) by a partial Fisher-Yates shuffle.
std::vector<std::size_t> draw_distinct(std::size_t n, std::size_t p, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(p);
  return pool;
}

}  // namespace

ExtractionResult nfindr(const Matrix& data, const WavelengthAxis& axis,
                        const ExtractionConfig& config) {
  config.validate();
  const std::size_t p = config.p;
  const auto n = static_cast<std::size_t>(data.cols());
  if (p < 2) throw InvalidArgument("nfindr: p must be >= 2");
  if (n < p) {
    throw InvalidArgument("nfindr: " + std::to_string(n) + " pixels, fewer than p = " +
                          std::to_string(p));
  }
  if (p > static_cast<std::size_t>(data.rows())) throw InvalidArgument("nfindr: p exceeds band count");

  const Matrix reduced = project_subspace(data, p - 1).projected;
  // Volumes below this are rounding noise of a flat simplex.
  const double extent = reduced.cwiseAbs().maxCoeff();
  const double zero_volume = 1e-12 * std::pow(std::max(extent, 1e-300), static_cast<double>(p - 1));

  std::vector<std::size_t> vertices;
  double volume = 0.0;
  for (std::size_t attempt = 0; attempt < config.max_iter; ++attempt) {
    Rng rng(config.seed + attempt);
    vertices = draw_distinct(n, p, rng);
    volume = simplex_volume(reduced, vertices);
    if (volume > zero_volume) break;
  }
  if (!(volume > zero_volume)) {
    throw NumericalError("nfindr: zero initial simplex volume after " +
                         std::to_string(config.max_iter) + " seeding attempts");
  }

  std::vector<double> trace{volume};
  std::size_t sweeps = 0;
  std::vector<std::size_t> candidate = vertices;
  while (sweeps < config.max_iter) {
    ++sweeps;
    bool replaced = false;
    for (std::size_t slot = 0; slot < p; ++slot) {
      for (std::size_t j = 0; j < n; ++j) {
        candidate[slot] = j;
        const double v = simplex_volume(reduced, candidate);
        if (v > volume) {
          volume = v;
          vertices[slot] = j;
          replaced = true;
        }
      }
      candidate[slot] = vertices[slot];
    }
    trace.push_back(volume);
    if (!replaced) break;
  }

  Matrix signatures(data.rows(), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    signatures.col(static_cast<Eigen::Index>(i)) = data.col(static_cast<Eigen::Index>(vertices[i]));
  }
  return ExtractionResult{EndmemberSet(axis, std::move(signatures), {}, vertices),
                          Method::nfindr,
                          vertices,
                          std::move(trace),
                          sweeps,
                          std::nullopt};
}

}  // namespace msunmix
