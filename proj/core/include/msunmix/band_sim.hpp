#pragma once

// Multispectral band simulation: each camera channel value is the integral
// over wavelength of illumination x reflectance x channel sensitivity,
// evaluated with the trapezoidal rule on the reflectance axis after the
// sensitivity curve has been linearly interpolated onto that axis.

#include "msunmix/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msunmix {

struct SensitivityChannel {
  std::string name;
  WavelengthAxis axis;
  Vector response;
  BandKind kind = BandKind::selective;
  /// Wavelength interval on which the response was measured. Resampling
  /// keeps the original support so integration can restrict itself to it.
  double support_min = 0.0;
  double support_max = 0.0;

  /// Validates and sets the support to the axis range.
  static SensitivityChannel make(std::string name, WavelengthAxis axis, Vector response,
                                 BandKind kind = BandKind::selective);

  /// Response-weighted centroid wavelength over the channel's own axis.
  double centroid() const;
};

struct SensitivityModel {
  std::vector<SensitivityChannel> channels;
  /// I(lambda); a unit spectrum is used when absent.
  std::optional<Spectrum> illumination;

  void validate() const;
};

struct SimulationOptions {
  /// Divide each channel value by the quadrature of I*S over the overlap.
  bool normalize = false;
};

/// Linear interpolation of the channel onto `target`; wavelengths outside
/// the source support map to 0.
SensitivityChannel resample(const SensitivityChannel& channel, const WavelengthAxis& target);

/// Linear interpolation of a spectrum onto `target`, 0 outside its range.
Spectrum resample(const Spectrum& spectrum, const WavelengthAxis& target);

/// Trapezoidal quadrature of I*R*S over the overlap of the reflectance axis
/// and the channel (and illumination) support. `illumination` and `channel`
/// must already be on the reflectance axis.
double integrate_channel(const Spectrum& reflectance, const Spectrum& illumination,
                         const SensitivityChannel& channel);

/// Per-band quadrature weights w such that Y = w . R for any reflectance R on
/// `axis`. Throws InvalidArgument ("empty overlap") when the channel and the
/// axis share fewer than two samples.
Vector channel_weights(const WavelengthAxis& axis, const SensitivityChannel& channel,
                       const std::optional<Spectrum>& illumination, bool normalize = false);

/// Band layout of a simulated cube: output band b comes from channel
/// `channel_of_band[b]`. Bands are ordered by ascending centroid wavelength
/// so the output axis stays strictly increasing; for a camera whose channels
/// are already in centroid order this is the identity.
struct SimulatedLayout {
  WavelengthAxis axis;
  std::vector<std::size_t> channel_of_band;
  std::vector<std::string> band_names;
};

SimulatedLayout simulated_layout(const SensitivityModel& camera);

/// Simulated multispectral cube; one band per camera channel.
SpectralCube simulate_cube(const SpectralCube& cube, const SensitivityModel& camera,
                           const SimulationOptions& options = {});

/// Same transform applied to endmember signatures (columns).
EndmemberSet simulate_endmembers(const EndmemberSet& endmembers, const SensitivityModel& camera,
                                 const SimulationOptions& options = {});

/// channels x bands matrix M such that simulated = M * hyperspectral,
/// rows in simulated band order.
Matrix simulation_matrix(const WavelengthAxis& axis, const SensitivityModel& camera,
                         const SimulationOptions& options = {});

}  // namespace msunmix
