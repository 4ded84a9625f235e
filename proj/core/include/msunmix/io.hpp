#pragma once

// File formats.
//
// Cube file (binary payload after a text header):
//
//   MSUNMIX-CUBE 1
//   width: <int>
//   height: <int>
//   bands: <int>
//   units: <text>                       optional
//   wavelengths: <w1> <w2> ...          bands values, nm
//   kinds: sel sel ... pan              optional, default all sel
//   end_header
//   <width*height*bands little-endian float32, band-interleaved by pixel,
//    pixels row-major>
//
// Text formats are comma-, tab- or semicolon-delimited (detected from the
// header row), '#' starts a comment line, and numbers are written with 9
// significant digits.
//
//   curve file      wavelength_nm,<channel>,...,<channel>:pan
//   endmember file  wavelength_nm,kind,<name>,...      kind = sel | pan
//                   "# pixel_indices: i j k" records source pixels
//   abundance file  id,<name>,...  with "# width:", "# height:",
//                   "# sum_to_one:" metadata comments
//
// Every reader failure is a FormatError carrying the path and line.

#include "msunmix/band_sim.hpp"
#include "msunmix/metrics.hpp"
#include "msunmix/scene_gen.hpp"
#include "msunmix/spectral.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msunmix::io {

namespace fs = std::filesystem;

// --- cubes -----------------------------------------------------------------

std::string encode_cube(const SpectralCube& cube);
SpectralCube decode_cube(std::string_view bytes, const std::string& source = "<memory>");

SpectralCube read_cube(const fs::path& path);
void write_cube(const SpectralCube& cube, const fs::path& path);

// --- sensitivity curves ----------------------------------------------------

std::string format_curves(const SensitivityModel& model);
SensitivityModel parse_curves(std::string_view text, const std::string& source = "<memory>");

SensitivityModel read_curves(const fs::path& path);
void write_curves(const SensitivityModel& model, const fs::path& path);

/// Single-column curve file read as an illumination spectrum.
Spectrum read_illumination(const fs::path& path);

// --- endmembers ------------------------------------------------------------

std::string format_endmembers(const EndmemberSet& endmembers);
EndmemberSet parse_endmembers(std::string_view text, const std::string& source = "<memory>");

EndmemberSet read_endmembers(const fs::path& path);
void write_endmembers(const EndmemberSet& endmembers, const fs::path& path);

/// Plot-ready spectra: wavelength_nm then one column per named series.
/// Panchromatic bands are dropped unless `include_pan`.
std::string format_spectra(const WavelengthAxis& axis, const std::vector<std::string>& names,
                           const Matrix& values, bool include_pan);

// --- abundances ------------------------------------------------------------

struct AbundanceTable {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  Matrix fractions;  ///< p x instances
  std::optional<std::size_t> width;
  std::optional<std::size_t> height;
  bool sum_to_one = false;

  /// Field of width x height (or instances x 1 when no geometry is recorded).
  AbundanceField to_field() const;
};

AbundanceTable table_from_field(const AbundanceField& field);

std::string format_abundances(const AbundanceTable& table);
AbundanceTable parse_abundances(std::string_view text, const std::string& source = "<memory>");

AbundanceTable read_abundances(const fs::path& path);
void write_abundances(const AbundanceField& field, const fs::path& path);
void write_abundances(const AbundanceTable& table, const fs::path& path);

/// One 8-bit binary PGM per endmember, value round(255 * clamp(f, 0, 1))
/// with halves rounded up. Returns the written paths in endmember order.
std::vector<fs::path> write_abundance_maps(const AbundanceField& field, const fs::path& dir);

std::string encode_pgm(std::size_t width, std::size_t height, const Vector& fractions);

// --- scene specs -----------------------------------------------------------

SceneSpec parse_scene_spec(std::string_view text, const std::string& source = "<memory>");
SceneSpec read_scene_spec(const fs::path& path);

// --- SAVD tables -----------------------------------------------------------

struct LabelledReport {
  std::string label;
  SavdReport report;
};

/// Rows: endmembers, then "Average" and "Std"; one column per report.
std::string format_savd_csv(const std::vector<LabelledReport>& reports);
std::string format_savd_text(const std::vector<LabelledReport>& reports);

// --- helpers ---------------------------------------------------------------

/// 9 significant digits, shortest form ("%.9g").
std::string format_number(double value);

std::string read_file(const fs::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view bytes);

}  // namespace msunmix::io
