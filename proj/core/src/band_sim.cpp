#include "msunmix/band_sim.hpp"

#include "msunmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msunmix {
namespace {

// Linear interpolation of (xs, ys) at x; 0 outside [xs.front(), xs.back()].
double interpolate(std::span<const double> xs, const Vector& ys, double x) {
  if (x < xs.front() || x > xs.back()) return 0.0;
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  if (xs[hi] == x) return ys[static_cast<Eigen::Index>(hi)];
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  const auto l = static_cast<Eigen::Index>(lo);
  return ys[l] + t * (ys[l + 1] - ys[l]);
}

// Trapezoid weights for the samples of `axis` inside [lo, hi]; samples outside
// get weight 0. Throws when fewer than two samples fall inside.
Vector trapezoid_weights(const WavelengthAxis& axis, double lo, double hi,
                         const std::string& channel_name) {
  Vector w = Vector::Zero(static_cast<Eigen::Index>(axis.size()));
  std::size_t first = axis.size();
  std::size_t last = 0;
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (axis[k] >= lo && axis[k] <= hi) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first >= axis.size() || last <= first) {
    throw InvalidArgument("empty overlap between channel '" + channel_name +
                          "' and the spectral axis");
  }
  for (std::size_t k = first; k < last; ++k) {
    const double half = 0.5 * (axis[k + 1] - axis[k]);
    w[static_cast<Eigen::Index>(k)] += half;
    w[static_cast<Eigen::Index>(k + 1)] += half;
  }
  return w;
}

struct Overlap {
  double lo;
  double hi;
};

Overlap overlap_of(const WavelengthAxis& axis, const SensitivityChannel& channel,
                   const std::optional<Spectrum>& illumination) {
  Overlap o{std::max(axis.front(), channel.support_min), std::min(axis.back(), channel.support_max)};
  if (illumination) {
    o.lo = std::max(o.lo, illumination->axis().front());
    o.hi = std::min(o.hi, illumination->axis().back());
  }
  return o;
}

}  // namespace

SensitivityChannel SensitivityChannel::make(std::string name, WavelengthAxis axis, Vector response,
                                            BandKind kind) {
  SensitivityChannel c{std::move(name), std::move(axis), std::move(response), kind, 0.0, 0.0};
  if (static_cast<std::size_t>(c.response.size()) != c.axis.size()) {
    throw InvalidArgument("channel '" + c.name + "': response length does not match axis");
  }
  bool any_positive = false;
  for (Eigen::Index i = 0; i < c.response.size(); ++i) {
    const double v = c.response[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("channel '" + c.name + "': response must be finite and >= 0");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw InvalidArgument("channel '" + c.name + "': response is identically 0");
  c.support_min = c.axis.front();
  c.support_max = c.axis.back();
  return c;
}

double SensitivityChannel::centroid() const {
  if (axis.size() < 2) return axis.front();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
    const double h = 0.5 * (axis[k + 1] - axis[k]);
    const auto i = static_cast<Eigen::Index>(k);
    num += h * (axis[k] * response[i] + axis[k + 1] * response[i + 1]);
    den += h * (response[i] + response[i + 1]);
  }
  if (den <= 0.0) return 0.5 * (axis.front() + axis.back());
  return num / den;
}

void SensitivityModel::validate() const {
  if (channels.empty()) throw InvalidArgument("camera: no channels");
}

SensitivityChannel resample(const SensitivityChannel& channel, const WavelengthAxis& target) {
  if (channel.axis.size() < 2) {
    throw InvalidArgument("resample: channel '" + channel.name +
                          "' has a degenerate axis (fewer than 2 samples)");
  }
  Vector out(static_cast<Eigen::Index>(target.size()));
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double x = target[k];
    out[static_cast<Eigen::Index>(k)] =
        (x < channel.support_min || x > channel.support_max)
            ? 0.0
            : interpolate(channel.axis.samples(), channel.response, x);
  }
  SensitivityChannel r{channel.name, target, std::move(out), channel.kind, channel.support_min,
                       channel.support_max};
  return r;
}

Spectrum resample(const Spectrum& spectrum, const WavelengthAxis& target) {
  if (spectrum.axis().size() < 2) {
    throw InvalidArgument("resample: degenerate spectrum axis (fewer than 2 samples)");
  }
  Vector out(static_cast<Eigen::Index>(target.size()));
  for (std::size_t k = 0; k < target.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] =
        interpolate(spectrum.axis().samples(), spectrum.values(), target[k]);
  }
  return Spectrum(target, std::move(out));
}

double integrate_channel(const Spectrum& reflectance, const Spectrum& illumination,
                         const SensitivityChannel& channel) {
  const WavelengthAxis& axis = reflectance.axis();
  if (!(channel.axis == axis) || !(illumination.axis() == axis)) {
    throw InvalidArgument("integrate_channel: channel '" + channel.name +
                          "' or illumination is not on the reflectance axis");
  }
  const double lo = std::max(axis.front(), channel.support_min);
  const double hi = std::min(axis.back(), channel.support_max);
  const Vector w = trapezoid_weights(axis, lo, hi, channel.name);
  double y = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    y += w[k] * illumination.values()[k] * reflectance.values()[k] * channel.response[k];
  }
  return y;
}

Vector channel_weights(const WavelengthAxis& axis, const SensitivityChannel& channel,
                       const std::optional<Spectrum>& illumination, bool normalize) {
  const Overlap o = overlap_of(axis, channel, illumination);
  Vector w = trapezoid_weights(axis, o.lo, o.hi, channel.name);
  const SensitivityChannel s = resample(channel, axis);
  const double area = w.dot(s.response);
  w = w.cwiseProduct(s.response);
  if (illumination) w = w.cwiseProduct(resample(*illumination, axis).values());
  if (normalize) {
    if (!(area > 0.0)) {
      throw InvalidArgument("channel '" + channel.name + "' has zero response over the overlap");
    }
    w /= area;
  }
  return w;
}

SimulatedLayout simulated_layout(const SensitivityModel& camera) {
  camera.validate();
  const std::size_t n = camera.channels.size();
  std::vector<double> centroids(n);
  for (std::size_t c = 0; c < n; ++c) centroids[c] = camera.channels[c].centroid();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return centroids[a] < centroids[b]; });

  std::vector<double> wl;
  std::vector<BandKind> kinds;
  std::vector<std::string> names;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t c = order[b];
    if (b > 0 && !(centroids[c] > wl.back())) {
      throw InvalidArgument("camera: channels '" + camera.channels[order[b - 1]].name + "' and '" +
                            camera.channels[c].name + "' share a reference wavelength");
    }
    wl.push_back(centroids[c]);
    kinds.push_back(camera.channels[c].kind);
    names.push_back(camera.channels[c].name);
  }
  return {WavelengthAxis(std::move(wl), std::move(kinds)), std::move(order), std::move(names)};
}

Matrix simulation_matrix(const WavelengthAxis& axis, const SensitivityModel& camera,
                         const SimulationOptions& options) {
  const SimulatedLayout layout = simulated_layout(camera);
  Matrix m(static_cast<Eigen::Index>(layout.channel_of_band.size()),
           static_cast<Eigen::Index>(axis.size()));
  for (std::size_t b = 0; b < layout.channel_of_band.size(); ++b) {
    const auto& channel = camera.channels[layout.channel_of_band[b]];
    m.row(static_cast<Eigen::Index>(b)) =
        channel_weights(axis, channel, camera.illumination, options.normalize).transpose();
  }
  return m;
}

SpectralCube simulate_cube(const SpectralCube& cube, const SensitivityModel& camera,
                           const SimulationOptions& options) {
  const SimulatedLayout layout = simulated_layout(camera);
  const Matrix m = simulation_matrix(cube.axis(), camera, options);
  Matrix out = m * cube.data();
  return SpectralCube(cube.width(), cube.height(), layout.axis, std::move(out), cube.units());
}

EndmemberSet simulate_endmembers(const EndmemberSet& endmembers, const SensitivityModel& camera,
                                 const SimulationOptions& options) {
  const SimulatedLayout layout = simulated_layout(camera);
  const Matrix m = simulation_matrix(endmembers.axis(), camera, options);
  return EndmemberSet(layout.axis, m * endmembers.signatures(), endmembers.names(),
                      endmembers.pixel_indices());
}

}  // namespace msunmix
