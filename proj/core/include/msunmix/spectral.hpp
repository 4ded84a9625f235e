#pragma once

// Core spectral data types and the linear mixing model.
//
// Pixel order is row-major (left to right, top to bottom) everywhere in the
// library. A cube is stored as a bands x pixels matrix, so column j is the
// spectrum of pixel j and the column-major storage is band-interleaved by
// pixel.

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msunmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class BandKind { selective, panchromatic };

/// Strictly increasing, positive wavelengths in nanometres, optionally
/// tagged per band as selective or panchromatic.
class WavelengthAxis {
 public:
  WavelengthAxis() = default;
  explicit WavelengthAxis(std::vector<double> samples);
  WavelengthAxis(std::vector<double> samples, std::vector<BandKind> kinds);

  /// `count` samples evenly spaced on [first, last].
  static WavelengthAxis uniform(double first, double last, std::size_t count);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double front() const { return samples_.front(); }
  double back() const { return samples_.back(); }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const BandKind> kinds() const noexcept { return kinds_; }
  BandKind kind(std::size_t i) const { return kinds_[i]; }
  bool has_panchromatic() const noexcept;

  /// Same length, same kinds, wavelengths equal within `rel_tol`.
  bool matches(const WavelengthAxis& other, double rel_tol = 1e-6) const;

  friend bool operator==(const WavelengthAxis&, const WavelengthAxis&) = default;

 private:
  std::vector<double> samples_;
  std::vector<BandKind> kinds_;
};

/// Nonnegative values sampled on a wavelength axis.
class Spectrum {
 public:
  Spectrum(WavelengthAxis axis, Vector values);

  const WavelengthAxis& axis() const noexcept { return axis_; }
  const Vector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return axis_.size(); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  WavelengthAxis axis_;
  Vector values_;
};

class SpectralCube {
 public:
  /// `data` is bands x (width*height), pixels in row-major order.
  SpectralCube(std::size_t width, std::size_t height, WavelengthAxis axis, Matrix data,
               std::string units = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  std::size_t band_count() const noexcept { return axis_.size(); }
  const WavelengthAxis& axis() const noexcept { return axis_; }
  const std::string& units() const noexcept { return units_; }

  /// bands x pixels view of the data.
  const Matrix& data() const noexcept { return data_; }

  Spectrum pixel(std::size_t index) const;
  Spectrum pixel(std::size_t x, std::size_t y) const { return pixel(y * width_ + x); }

 private:
  std::size_t width_;
  std::size_t height_;
  WavelengthAxis axis_;
  Matrix data_;
  std::string units_;
};

/// p spectral signatures on a shared axis, stored as the columns of a
/// bands x p matrix.
class EndmemberSet {
 public:
  EndmemberSet(WavelengthAxis axis, Matrix signatures, std::vector<std::string> names = {},
               std::optional<std::vector<std::size_t>> pixel_indices = std::nullopt);

  const WavelengthAxis& axis() const noexcept { return axis_; }
  const Matrix& signatures() const noexcept { return signatures_; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(signatures_.cols()); }
  std::size_t band_count() const noexcept { return axis_.size(); }

  /// Names are always populated; unnamed sets get "em1", "em2", ...
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::optional<std::vector<std::size_t>>& pixel_indices() const noexcept {
    return pixel_indices_;
  }

  Spectrum signature(std::size_t k) const;

 private:
  WavelengthAxis axis_;
  Matrix signatures_;
  std::vector<std::string> names_;
  std::optional<std::vector<std::size_t>> pixel_indices_;
};

/// Per-pixel endmember fractions stored as a p x pixels matrix.
class AbundanceField {
 public:
  AbundanceField(std::size_t width, std::size_t height, Matrix fractions, bool sum_to_one,
                 std::vector<std::string> names = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  std::size_t endmember_count() const noexcept { return static_cast<std::size_t>(fractions_.rows()); }
  bool sum_to_one() const noexcept { return sum_to_one_; }
  const Matrix& fractions() const noexcept { return fractions_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::size_t width_;
  std::size_t height_;
  Matrix fractions_;
  bool sum_to_one_;
  std::vector<std::string> names_;
};

/// Fraction-weighted sum of the signatures.
Spectrum mix(const EndmemberSet& endmembers, std::span<const double> fractions);

/// bands x pixels table of the cube, column j = pixel j.
Matrix flatten(const SpectralCube& cube);

SpectralCube unflatten(const Matrix& table, std::size_t width, std::size_t height,
                       WavelengthAxis axis, std::string units = {});

/// Default endmember labels "em1".."emN".
std::vector<std::string> default_names(std::size_t count);

}  // namespace msunmix
