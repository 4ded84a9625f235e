#include "msunmix/scene_gen.hpp"

#include "msunmix/error.hpp"
#include "msunmix/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace msunmix {
namespace {

// Substream ids; the high word separates the uses.
constexpr std::uint64_t kSignatureStream = 0x1ULL << 32;
constexpr std::uint64_t kPlacementStream = 0x2ULL << 32;
constexpr std::uint64_t kAbundanceStream = 0x3ULL << 32;
constexpr std::uint64_t kNoiseStream = 0x4ULL << 32;

}  // namespace

void SceneSpec::validate() const {
  if (width == 0 || height == 0) throw InvalidArgument("scene: width and height must be >= 1");
  if (p < 1) throw InvalidArgument("scene: p must be >= 1");
  if (p > axis.size()) {
    throw InvalidArgument("scene: p = " + std::to_string(p) + " exceeds " +
                          std::to_string(axis.size()) + " bands");
  }
  if (!(alpha > 0.0)) throw InvalidArgument("scene: alpha must be > 0");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("scene: noise_sigma must be >= 0");
  if (p * pure_pixel_count > width * height) {
    throw InvalidArgument("scene: " + std::to_string(p * pure_pixel_count) +
                          " pure pixels do not fit in " + std::to_string(width * height));
  }
}

Vector smooth_signature(const WavelengthAxis& axis, std::uint64_t seed, std::uint64_t index) {
  Rng rng = Rng::substream(seed, kSignatureStream + index);
  const double lo = axis.front();
  const double range = std::max(axis.back() - lo, 1.0);
  const auto bumps = 3 + rng.below(4);
  std::vector<double> amp(bumps), centre(bumps), width(bumps);
  for (std::size_t b = 0; b < bumps; ++b) {
    amp[b] = rng.uniform(0.2, 1.0);
    centre[b] = lo + range * rng.uniform();
    width[b] = range * rng.uniform(0.05, 0.25);
  }
  Vector v(static_cast<Eigen::Index>(axis.size()));
  for (std::size_t i = 0; i < axis.size(); ++i) {
    double s = 0.05;
    for (std::size_t b = 0; b < bumps; ++b) {
      const double z = (axis[i] - centre[b]) / width[b];
      s += amp[b] * std::exp(-0.5 * z * z);
    }
    v[static_cast<Eigen::Index>(i)] = s;
  }
  const double peak = rng.uniform(0.5, 1.0);
  return v * (peak / v.maxCoeff());
}

Scene generate(const SceneSpec& spec) {
  spec.validate();
  const auto p = static_cast<Eigen::Index>(spec.p);
  const std::size_t n = spec.width * spec.height;

  Matrix signatures(static_cast<Eigen::Index>(spec.axis.size()), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    signatures.col(k) = smooth_signature(spec.axis, spec.seed, static_cast<std::uint64_t>(k));
  }

  Matrix fractions(p, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng = Rng::substream(spec.seed, kAbundanceStream + j);
    Vector g(p);
    for (Eigen::Index k = 0; k < p; ++k) g[k] = rng.gamma(spec.alpha);
    const double total = g.sum();
    fractions.col(static_cast<Eigen::Index>(j)) =
        total > 0.0 ? Vector(g / total) : Vector(Vector::Constant(p, 1.0 / static_cast<double>(p)));
  }

  // Pure pixel locations: a partial shuffle of all pixel indices.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng place = Rng::substream(spec.seed, kPlacementStream);
  const std::size_t forced = spec.p * spec.pure_pixel_count;
  for (std::size_t i = 0; i < forced; ++i) {
    std::swap(pool[i], pool[i + static_cast<std::size_t>(place.below(n - i))]);
  }
  for (std::size_t i = 0; i < forced; ++i) {
    const auto j = static_cast<Eigen::Index>(pool[i]);
    fractions.col(j).setZero();
    fractions(static_cast<Eigen::Index>(i / spec.pure_pixel_count), j) = 1.0;
  }

  Matrix data = signatures * fractions;
  if (spec.noise_sigma > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      Rng rng = Rng::substream(spec.seed, kNoiseStream + j);
      for (Eigen::Index b = 0; b < data.rows(); ++b) {
        double& v = data(b, static_cast<Eigen::Index>(j));
        v = std::max(0.0, v + spec.noise_sigma * rng.normal());
      }
    }
  }

  EndmemberSet endmembers(spec.axis, signatures);
  return Scene{SpectralCube(spec.width, spec.height, spec.axis, std::move(data), spec.units),
               endmembers,
               AbundanceField(spec.width, spec.height, std::move(fractions), true, endmembers.names())};
}

}  // namespace msunmix
