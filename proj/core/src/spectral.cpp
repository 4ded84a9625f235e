#include "msunmix/spectral.hpp"

#include "msunmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msunmix {
namespace {

void check_finite_nonnegative(const Matrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + ": non-finite value at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
      if (v < 0.0) {
        throw InvalidArgument(std::string(what) + ": negative value " + std::to_string(v) +
                              " at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

WavelengthAxis::WavelengthAxis(std::vector<double> samples)
    : WavelengthAxis(samples, std::vector<BandKind>(samples.size(), BandKind::selective)) {}

WavelengthAxis::WavelengthAxis(std::vector<double> samples, std::vector<BandKind> kinds)
    : samples_(std::move(samples)), kinds_(std::move(kinds)) {
  if (samples_.empty()) throw InvalidArgument("wavelength axis: no samples");
  if (kinds_.size() != samples_.size()) {
    throw InvalidArgument("wavelength axis: " + std::to_string(kinds_.size()) +
                          " band kinds for " + std::to_string(samples_.size()) + " samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double w = samples_[i];
    if (!std::isfinite(w) || w <= 0.0) {
      throw InvalidArgument("wavelength axis: sample " + std::to_string(i) +
                            " is not a positive finite value");
    }
    if (i > 0 && !(w > samples_[i - 1])) {
      throw InvalidArgument("wavelength axis: not strictly increasing at sample " +
                            std::to_string(i));
    }
  }
}

WavelengthAxis WavelengthAxis::uniform(double first, double last, std::size_t count) {
  if (count < 2) throw InvalidArgument("wavelength axis: uniform axis needs >= 2 samples");
  std::vector<double> s(count);
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) s[i] = first + step * static_cast<double>(i);
  s.back() = last;
  return WavelengthAxis(std::move(s));
}

bool WavelengthAxis::has_panchromatic() const noexcept {
  return std::find(kinds_.begin(), kinds_.end(), BandKind::panchromatic) != kinds_.end();
}

bool WavelengthAxis::matches(const WavelengthAxis& other, double rel_tol) const {
  if (size() != other.size() || kinds_ != other.kinds_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(samples_[i] - other.samples_[i]) > rel_tol * std::abs(samples_[i])) return false;
  }
  return true;
}

Spectrum::Spectrum(WavelengthAxis axis, Vector values)
    : axis_(std::move(axis)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != axis_.size()) {
    throw InvalidArgument("spectrum: " + std::to_string(values_.size()) + " values for " +
                          std::to_string(axis_.size()) + " wavelengths");
  }
  check_finite_nonnegative(values_, "spectrum");
}

SpectralCube::SpectralCube(std::size_t width, std::size_t height, WavelengthAxis axis,
                           Matrix data, std::string units)
    : width_(width), height_(height), axis_(std::move(axis)), data_(std::move(data)),
      units_(std::move(units)) {
  if (width_ == 0 || height_ == 0) throw InvalidArgument("cube: width and height must be >= 1");
  if (static_cast<std::size_t>(data_.rows()) != axis_.size()) {
    throw InvalidArgument("cube: data has " + std::to_string(data_.rows()) + " bands, axis has " +
                          std::to_string(axis_.size()));
  }
  if (static_cast<std::size_t>(data_.cols()) != width_ * height_) {
    throw InvalidArgument("cube: data has " + std::to_string(data_.cols()) +
                          " pixels, expected " + std::to_string(width_ * height_));
  }
  check_finite_nonnegative(data_, "cube");
}

Spectrum SpectralCube::pixel(std::size_t index) const {
  if (index >= pixel_count()) throw InvalidArgument("cube: pixel index out of range");
  return Spectrum(axis_, data_.col(static_cast<Eigen::Index>(index)));
}

EndmemberSet::EndmemberSet(WavelengthAxis axis, Matrix signatures, std::vector<std::string> names,
                           std::optional<std::vector<std::size_t>> pixel_indices)
    : axis_(std::move(axis)), signatures_(std::move(signatures)), names_(std::move(names)),
      pixel_indices_(std::move(pixel_indices)) {
  const auto p = static_cast<std::size_t>(signatures_.cols());
  if (static_cast<std::size_t>(signatures_.rows()) != axis_.size()) {
    throw InvalidArgument("endmembers: signatures have " + std::to_string(signatures_.rows()) +
                          " bands, axis has " + std::to_string(axis_.size()));
  }
  if (p < 1 || p > axis_.size()) {
    throw InvalidArgument("endmembers: count " + std::to_string(p) + " outside [1, " +
                          std::to_string(axis_.size()) + "]");
  }
  check_finite_nonnegative(signatures_, "endmembers");
  if (names_.empty()) names_ = default_names(p);
  if (names_.size() != p) throw InvalidArgument("endmembers: name count does not match p");
  if (pixel_indices_ && pixel_indices_->size() != p) {
    throw InvalidArgument("endmembers: pixel index count does not match p");
  }
}

Spectrum EndmemberSet::signature(std::size_t k) const {
  return Spectrum(axis_, signatures_.col(static_cast<Eigen::Index>(k)));
}

AbundanceField::AbundanceField(std::size_t width, std::size_t height, Matrix fractions,
                               bool sum_to_one, std::vector<std::string> names)
    : width_(width), height_(height), fractions_(std::move(fractions)), sum_to_one_(sum_to_one),
      names_(std::move(names)) {
  if (static_cast<std::size_t>(fractions_.cols()) != width_ * height_) {
    throw InvalidArgument("abundances: " + std::to_string(fractions_.cols()) +
                          " pixels, expected " + std::to_string(width_ * height_));
  }
  if (fractions_.rows() < 1) throw InvalidArgument("abundances: no endmembers");
  check_finite_nonnegative(fractions_, "abundances");
  if (sum_to_one_) {
    for (Eigen::Index j = 0; j < fractions_.cols(); ++j) {
      const double s = fractions_.col(j).sum();
      if (std::abs(s - 1.0) > 1e-6) {
        throw InvalidArgument("abundances: pixel " + std::to_string(j) + " sums to " +
                              std::to_string(s) + ", expected 1");
      }
    }
  }
  if (names_.empty()) names_ = default_names(endmember_count());
  if (names_.size() != endmember_count()) {
    throw InvalidArgument("abundances: name count does not match endmember count");
  }
}

Spectrum mix(const EndmemberSet& endmembers, std::span<const double> fractions) {
  if (fractions.size() != endmembers.count()) {
    throw InvalidArgument("mix: " + std::to_string(fractions.size()) + " fractions for " +
                          std::to_string(endmembers.count()) + " endmembers");
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(endmembers.band_count()));
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    if (!(fractions[k] >= 0.0)) {
      throw InvalidArgument("mix: fraction " + std::to_string(k) + " is negative or NaN");
    }
    out += fractions[k] * endmembers.signatures().col(static_cast<Eigen::Index>(k));
  }
  return Spectrum(endmembers.axis(), std::move(out));
}

Matrix flatten(const SpectralCube& cube) { return cube.data(); }

SpectralCube unflatten(const Matrix& table, std::size_t width, std::size_t height,
                       WavelengthAxis axis, std::string units) {
  return SpectralCube(width, height, std::move(axis), table, std::move(units));
}

std::vector<std::string> default_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t k = 0; k < count; ++k) names.push_back("em" + std::to_string(k + 1));
  return names;
}

}  // namespace msunmix
