#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace msunmix {

// Seeded generator with a fully specified output sequence.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
// The standard distributions are not (their algorithms are implementation
// defined), so every variate below is derived from raw engine output with an
// explicit formula:
//
//   uniform()   = (next() >> 11) * 2^-53                       in [0, 1)
//   normal()    = Box-Muller, cosine branch only, u1 -> 1 - u1  (one draw per pair)
//   gamma(a)    = Marsaglia-Tsang; a < 1 boosted with u^(1/a)
//   below(n)    = floor(uniform() * n)
//
// Identical seeds therefore give identical results across compilers and
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream keyed by (seed, stream). Streams are derived with a
  /// splitmix64 mix so neighbouring stream ids are decorrelated.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double gamma(double shape) {
    if (shape < 1.0) {
      const double boost = std::pow(1.0 - uniform(), 1.0 / shape);
      return gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = 1.0 - uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace msunmix
