#include "msunmix/io.hpp"

#include "msunmix/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace msunmix::io {
namespace {

constexpr std::string_view kCubeMagic = "MSUNMIX-CUBE 1";
// Refuse headers that would describe more than 2^40 payload bytes.
constexpr std::uint64_t kMaxPayloadValues = std::uint64_t{1} << 38;

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++number;
    lines.push_back({number, trim(raw)});
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return lines;
}

char detect_delimiter(std::string_view header) {
  for (char d : {',', '\t', ';'}) {
    if (header.find(d) != std::string_view::npos) return d;
  }
  return ',';
}

std::vector<std::string_view> split_cells(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t end = line.find(delim, pos);
    cells.push_back(trim(line.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                          : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return cells;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    if (end > pos) words.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

double parse_double(std::string_view token, const std::string& source, std::size_t line,
                    std::string_view what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw FormatError(source, line,
                      std::string(what) + ": '" + std::string(token) + "' is not a finite number");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view token, const std::string& source, std::size_t line,
                         std::string_view what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(source, line,
                      std::string(what) + ": '" + std::string(token) + "' is not a non-negative integer");
  }
  return value;
}

std::string shortest(double value) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), r.ptr);
}

// "key: value" split; returns false when there is no colon.
bool split_key_value(std::string_view line, std::string_view& key, std::string_view& value) {
  const std::size_t colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  key = trim(line.substr(0, colon));
  value = trim(line.substr(colon + 1));
  return true;
}

std::string kind_token(BandKind k) { return k == BandKind::panchromatic ? "pan" : "sel"; }

BandKind parse_kind(std::string_view token, const std::string& source, std::size_t line) {
  if (token == "sel") return BandKind::selective;
  if (token == "pan") return BandKind::panchromatic;
  throw FormatError(source, line, "band kind '" + std::string(token) + "' is not 'sel' or 'pan'");
}

void check_name(const std::string& name, std::string_view what) {
  if (name.empty() || name.find_first_of(",;\t\n\r#") != std::string::npos) {
    throw InvalidArgument(std::string(what) + " name '" + name +
                          "' is empty or contains a delimiter, newline or '#'");
  }
}

// Data lines (non-empty, not comments) and the comment lines, in order.
struct TextDocument {
  std::vector<Line> rows;
  std::vector<Line> comments;
};

TextDocument classify(std::string_view text) {
  TextDocument doc;
  for (const Line& l : split_lines(text)) {
    if (l.text.empty()) continue;
    if (l.text.front() == '#') {
      doc.comments.push_back({l.number, trim(l.text.substr(1))});
    } else {
      doc.rows.push_back(l);
    }
  }
  return doc;
}

std::size_t last_line(std::string_view text) { return split_lines(text).size(); }

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                               std::chars_format::general, 9);
  return std::string(buf.data(), r.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

// --- cubes -----------------------------------------------------------------

std::string encode_cube(const SpectralCube& cube) {
  if (cube.units().find('\n') != std::string::npos) {
    throw InvalidArgument("cube units label contains a newline");
  }
  std::string out;
  out += kCubeMagic;
  out += "\nwidth: " + std::to_string(cube.width());
  out += "\nheight: " + std::to_string(cube.height());
  out += "\nbands: " + std::to_string(cube.band_count());
  if (!cube.units().empty()) out += "\nunits: " + cube.units();
  out += "\nwavelengths:";
  for (double w : cube.axis().samples()) out += " " + shortest(w);
  out += "\nkinds:";
  for (BandKind k : cube.axis().kinds()) out += " " + kind_token(k);
  out += "\nend_header\n";

  const Matrix& data = cube.data();
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(data.size()) * 4);
  char* dst = out.data() + header;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    for (Eigen::Index b = 0; b < data.rows(); ++b) {
      const auto f = static_cast<float>(data(b, j));
      if (!std::isfinite(f)) throw InvalidArgument("cube value does not fit in float32");
      const auto bits = std::bit_cast<std::uint32_t>(f);
      for (int byte = 0; byte < 4; ++byte) *dst++ = static_cast<char>((bits >> (8 * byte)) & 0xffu);
    }
  }
  return out;
}

SpectralCube decode_cube(std::string_view bytes, const std::string& source) {
  std::size_t pos = 0;
  std::size_t line = 0;
  const auto next_line = [&]() -> std::string_view {
    const std::size_t end = bytes.find('\n', pos);
    ++line;
    if (end == std::string_view::npos) {
      throw FormatError(source, line, "header is not terminated by 'end_header'");
    }
    const std::string_view l = bytes.substr(pos, end - pos);
    pos = end + 1;
    return l;
  };

  if (trim(next_line()) != kCubeMagic) {
    throw FormatError(source, 1, "missing '" + std::string(kCubeMagic) + "' signature");
  }

  std::optional<std::uint64_t> width, height, bands;
  std::string units;
  std::vector<double> wavelengths;
  std::vector<BandKind> kinds;
  std::size_t wavelength_line = 0;
  std::set<std::string, std::less<>> seen;
  for (;;) {
    const std::string_view l = trim(next_line());
    if (l == "end_header") break;
    if (l.empty()) continue;
    std::string_view key, value;
    if (!split_key_value(l, key, value)) {
      throw FormatError(source, line, "expected 'key: value', got '" + std::string(l) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      throw FormatError(source, line, "duplicate header key '" + std::string(key) + "'");
    }
    if (key == "width") {
      width = parse_uint(value, source, line, "width");
    } else if (key == "height") {
      height = parse_uint(value, source, line, "height");
    } else if (key == "bands") {
      bands = parse_uint(value, source, line, "bands");
    } else if (key == "units") {
      units = std::string(value);
    } else if (key == "wavelengths") {
      wavelength_line = line;
      for (std::string_view w : split_words(value)) {
        wavelengths.push_back(parse_double(w, source, line, "wavelength"));
      }
    } else if (key == "kinds") {
      for (std::string_view k : split_words(value)) kinds.push_back(parse_kind(k, source, line));
    } else {
      throw FormatError(source, line, "unknown header key '" + std::string(key) + "'");
    }
  }
  const std::size_t header_end_line = line;
  if (!width || !height || !bands || wavelength_line == 0) {
    throw FormatError(source, header_end_line,
                      "header must define width, height, bands and wavelengths");
  }
  if (*width == 0 || *height == 0 || *bands == 0) {
    throw FormatError(source, header_end_line, "width, height and bands must be >= 1");
  }
  if (wavelengths.size() != *bands) {
    throw FormatError(source, wavelength_line,
                      "header declares " + std::to_string(*bands) + " bands but lists " +
                          std::to_string(wavelengths.size()) + " wavelengths");
  }
  if (kinds.empty()) kinds.assign(wavelengths.size(), BandKind::selective);
  if (kinds.size() != *bands) {
    throw FormatError(source, header_end_line,
                      "header lists " + std::to_string(kinds.size()) + " band kinds for " +
                          std::to_string(*bands) + " bands");
  }
  if (*width > kMaxPayloadValues || *height > kMaxPayloadValues || *bands > kMaxPayloadValues ||
      *width * *height > kMaxPayloadValues / *bands) {
    throw FormatError(source, header_end_line, "cube dimensions are implausibly large");
  }

  WavelengthAxis axis;
  try {
    axis = WavelengthAxis(wavelengths, kinds);
  } catch (const InvalidArgument& e) {
    throw FormatError(source, wavelength_line, e.what());
  }

  const std::uint64_t values = *width * *height * *bands;
  const std::uint64_t expected = values * 4;
  const std::uint64_t actual = bytes.size() - pos;
  if (actual != expected) {
    throw FormatError(source, header_end_line + 1,
                      "payload length mismatch: expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(actual));
  }

  const auto b = static_cast<Eigen::Index>(*bands);
  Matrix data(b, static_cast<Eigen::Index>(*width * *height));
  const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::uint64_t i = 0; i < values; ++i) {
    std::uint32_t bits = 0;
    for (int byte = 0; byte < 4; ++byte) bits |= std::uint32_t{src[4 * i + byte]} << (8 * byte);
    const auto f = std::bit_cast<float>(bits);
    if (!std::isfinite(f) || f < 0.0f) {
      throw FormatError(source, header_end_line + 1,
                        "payload value at byte offset " + std::to_string(pos + 4 * i) +
                            " is negative or not finite");
    }
    data(static_cast<Eigen::Index>(i % *bands), static_cast<Eigen::Index>(i / *bands)) = f;
  }
  return SpectralCube(*width, *height, std::move(axis), std::move(data), std::move(units));
}

SpectralCube read_cube(const fs::path& path) { return decode_cube(read_file(path), path.string()); }

void write_cube(const SpectralCube& cube, const fs::path& path) {
  write_file_atomic(path, encode_cube(cube));
}

// --- sensitivity curves ----------------------------------------------------

std::string format_curves(const SensitivityModel& model) {
  model.validate();
  const WavelengthAxis& axis = model.channels.front().axis;
  std::string out = "wavelength_nm";
  for (const auto& c : model.channels) {
    if (!(c.axis == axis)) throw InvalidArgument("format_curves: channels do not share an axis");
    check_name(c.name, "channel");
    out += "," + c.name + (c.kind == BandKind::panchromatic ? ":pan" : "");
  }
  out += "\n";
  for (std::size_t i = 0; i < axis.size(); ++i) {
    out += format_number(axis[i]);
    for (const auto& c : model.channels) {
      out += "," + format_number(c.response[static_cast<Eigen::Index>(i)]);
    }
    out += "\n";
  }
  return out;
}

SensitivityModel parse_curves(std::string_view text, const std::string& source) {
  const TextDocument doc = classify(text);
  if (doc.rows.empty()) throw FormatError(source, last_line(text), "no header row");
  const char delim = detect_delimiter(doc.rows.front().text);
  const auto header = split_cells(doc.rows.front().text, delim);
  const std::size_t header_line = doc.rows.front().number;
  if (header.size() < 2) throw FormatError(source, header_line, "no channel columns");

  std::vector<std::string> names;
  std::vector<BandKind> kinds;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string_view name = header[c];
    BandKind kind = BandKind::selective;
    if (name.size() >= 4 && name.substr(name.size() - 4) == ":pan") {
      name.remove_suffix(4);
      kind = BandKind::panchromatic;
    }
    if (name.empty()) throw FormatError(source, header_line, "empty channel name in column " + std::to_string(c + 1));
    names.emplace_back(name);
    kinds.push_back(kind);
  }

  const std::size_t nch = names.size();
  std::vector<double> wl;
  std::vector<std::vector<double>> responses(nch);
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const Line& l = doc.rows[r];
    const auto cells = split_cells(l.text, delim);
    if (cells.size() != header.size()) {
      throw FormatError(source, l.number,
                        "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    const double w = parse_double(cells[0], source, l.number, "wavelength");
    if (w <= 0.0) throw FormatError(source, l.number, "wavelength must be > 0");
    if (!wl.empty() && w == wl.back()) {
      throw FormatError(source, l.number, "duplicate wavelength " + format_number(w));
    }
    if (!wl.empty() && w < wl.back()) {
      throw FormatError(source, l.number, "wavelengths are not increasing");
    }
    wl.push_back(w);
    for (std::size_t c = 0; c < nch; ++c) {
      const double v = parse_double(cells[c + 1], source, l.number, "response");
      if (v < 0.0) {
        throw FormatError(source, l.number, "negative response for channel '" + names[c] + "'");
      }
      responses[c].push_back(v);
    }
  }
  if (wl.size() < 2) {
    throw FormatError(source, last_line(text), "curve file needs at least two wavelength rows");
  }

  const WavelengthAxis axis(wl);
  SensitivityModel model;
  for (std::size_t c = 0; c < nch; ++c) {
    try {
      model.channels.push_back(SensitivityChannel::make(
          names[c], axis, Eigen::Map<const Vector>(responses[c].data(),
                                                   static_cast<Eigen::Index>(responses[c].size())),
          kinds[c]));
    } catch (const InvalidArgument& e) {
      throw FormatError(source, header_line, e.what());
    }
  }
  return model;
}

SensitivityModel read_curves(const fs::path& path) {
  return parse_curves(read_file(path), path.string());
}

void write_curves(const SensitivityModel& model, const fs::path& path) {
  write_file_atomic(path, format_curves(model));
}

Spectrum read_illumination(const fs::path& path) {
  const SensitivityModel m = read_curves(path);
  if (m.channels.size() != 1) {
    throw FormatError(path.string(), 1, "illumination file must have exactly one value column");
  }
  return Spectrum(m.channels.front().axis, m.channels.front().response);
}

// --- endmembers ------------------------------------------------------------

std::string format_endmembers(const EndmemberSet& endmembers) {
  std::string out;
  if (endmembers.pixel_indices()) {
    out += "# pixel_indices:";
    for (std::size_t i : *endmembers.pixel_indices()) out += " " + std::to_string(i);
    out += "\n";
  }
  out += "wavelength_nm,kind";
  for (const auto& n : endmembers.names()) {
    check_name(n, "endmember");
    out += "," + n;
  }
  out += "\n";
  const WavelengthAxis& axis = endmembers.axis();
  for (std::size_t b = 0; b < axis.size(); ++b) {
    out += format_number(axis[b]) + "," + kind_token(axis.kind(b));
    for (std::size_t k = 0; k < endmembers.count(); ++k) {
      out += "," + format_number(endmembers.signatures()(static_cast<Eigen::Index>(b),
                                                         static_cast<Eigen::Index>(k)));
    }
    out += "\n";
  }
  return out;
}

EndmemberSet parse_endmembers(std::string_view text, const std::string& source) {
  const TextDocument doc = classify(text);
  std::optional<std::vector<std::size_t>> indices;
  for (const Line& c : doc.comments) {
    std::string_view key, value;
    if (split_key_value(c.text, key, value) && key == "pixel_indices") {
      indices.emplace();
      for (std::string_view w : split_words(value)) {
        indices->push_back(static_cast<std::size_t>(parse_uint(w, source, c.number, "pixel index")));
      }
    }
  }
  if (doc.rows.empty()) throw FormatError(source, last_line(text), "no header row");
  const char delim = detect_delimiter(doc.rows.front().text);
  const auto header = split_cells(doc.rows.front().text, delim);
  const std::size_t header_line = doc.rows.front().number;
  if (header.size() < 3 || header[1] != "kind") {
    throw FormatError(source, header_line,
                      "expected header 'wavelength_nm,kind,<name>,...' with at least one endmember");
  }
  std::vector<std::string> names(header.begin() + 2, header.end());
  for (const auto& n : names) {
    if (n.empty()) throw FormatError(source, header_line, "empty endmember name");
  }

  const std::size_t p = names.size();
  std::vector<double> wl;
  std::vector<BandKind> kinds;
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const Line& l = doc.rows[r];
    const auto cells = split_cells(l.text, delim);
    if (cells.size() != header.size()) {
      throw FormatError(source, l.number,
                        "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    const double w = parse_double(cells[0], source, l.number, "wavelength");
    if (w <= 0.0 || (!wl.empty() && !(w > wl.back()))) {
      throw FormatError(source, l.number, "wavelengths must be positive and strictly increasing");
    }
    wl.push_back(w);
    kinds.push_back(parse_kind(cells[1], source, l.number));
    std::vector<double> values(p);
    for (std::size_t k = 0; k < p; ++k) {
      values[k] = parse_double(cells[k + 2], source, l.number, "signature value");
      if (values[k] < 0.0) throw FormatError(source, l.number, "negative signature value");
    }
    rows.push_back(std::move(values));
  }
  if (wl.empty()) throw FormatError(source, last_line(text), "no band rows");

  Matrix sig(static_cast<Eigen::Index>(wl.size()), static_cast<Eigen::Index>(p));
  for (std::size_t b = 0; b < wl.size(); ++b) {
    for (std::size_t k = 0; k < p; ++k) {
      sig(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = rows[b][k];
    }
  }
  try {
    return EndmemberSet(WavelengthAxis(std::move(wl), std::move(kinds)), std::move(sig),
                        std::move(names), std::move(indices));
  } catch (const InvalidArgument& e) {
    throw FormatError(source, header_line, e.what());
  }
}

EndmemberSet read_endmembers(const fs::path& path) {
  return parse_endmembers(read_file(path), path.string());
}

void write_endmembers(const EndmemberSet& endmembers, const fs::path& path) {
  write_file_atomic(path, format_endmembers(endmembers));
}

std::string format_spectra(const WavelengthAxis& axis, const std::vector<std::string>& names,
                           const Matrix& values, bool include_pan) {
  if (static_cast<std::size_t>(values.rows()) != axis.size() ||
      static_cast<std::size_t>(values.cols()) != names.size()) {
    throw InvalidArgument("format_spectra: shape mismatch");
  }
  std::string out = "wavelength_nm";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (std::size_t b = 0; b < axis.size(); ++b) {
    if (!include_pan && axis.kind(b) == BandKind::panchromatic) continue;
    out += format_number(axis[b]);
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      out += "," + format_number(values(static_cast<Eigen::Index>(b), k));
    }
    out += "\n";
  }
  return out;
}

// --- abundances ------------------------------------------------------------

AbundanceField AbundanceTable::to_field() const {
  const std::size_t n = static_cast<std::size_t>(fractions.cols());
  const std::size_t w = width.value_or(n);
  const std::size_t h = height.value_or(1);
  return AbundanceField(w, h, fractions, sum_to_one, names);
}

AbundanceTable table_from_field(const AbundanceField& field) {
  AbundanceTable t;
  t.ids.reserve(field.pixel_count());
  for (std::size_t j = 0; j < field.pixel_count(); ++j) t.ids.push_back(std::to_string(j));
  t.names = field.names();
  t.fractions = field.fractions();
  t.width = field.width();
  t.height = field.height();
  t.sum_to_one = field.sum_to_one();
  return t;
}

std::string format_abundances(const AbundanceTable& table) {
  if (static_cast<std::size_t>(table.fractions.cols()) != table.ids.size() ||
      static_cast<std::size_t>(table.fractions.rows()) != table.names.size()) {
    throw InvalidArgument("format_abundances: shape mismatch");
  }
  std::string out;
  if (table.width) out += "# width: " + std::to_string(*table.width) + "\n";
  if (table.height) out += "# height: " + std::to_string(*table.height) + "\n";
  out += std::string("# sum_to_one: ") + (table.sum_to_one ? "1" : "0") + "\n";
  out += "id";
  for (const auto& n : table.names) {
    check_name(n, "endmember");
    out += "," + n;
  }
  out += "\n";
  for (std::size_t j = 0; j < table.ids.size(); ++j) {
    check_name(table.ids[j], "instance");
    out += table.ids[j];
    for (Eigen::Index k = 0; k < table.fractions.rows(); ++k) {
      out += "," + format_number(table.fractions(k, static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

AbundanceTable parse_abundances(std::string_view text, const std::string& source) {
  const TextDocument doc = classify(text);
  AbundanceTable t;
  std::size_t geometry_line = 0;
  for (const Line& c : doc.comments) {
    std::string_view key, value;
    if (!split_key_value(c.text, key, value)) continue;
    if (key == "width") {
      t.width = static_cast<std::size_t>(parse_uint(value, source, c.number, "width"));
      geometry_line = c.number;
    } else if (key == "height") {
      t.height = static_cast<std::size_t>(parse_uint(value, source, c.number, "height"));
      geometry_line = c.number;
    } else if (key == "sum_to_one") {
      if (value != "0" && value != "1") throw FormatError(source, c.number, "sum_to_one must be 0 or 1");
      t.sum_to_one = value == "1";
    }
  }
  if (doc.rows.empty()) throw FormatError(source, last_line(text), "no header row");
  const char delim = detect_delimiter(doc.rows.front().text);
  const auto header = split_cells(doc.rows.front().text, delim);
  const std::size_t header_line = doc.rows.front().number;
  if (header.size() < 2) throw FormatError(source, header_line, "no endmember columns");
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw FormatError(source, header_line, "empty endmember name");
    t.names.emplace_back(header[c]);
  }

  const std::size_t p = t.names.size();
  std::vector<std::vector<double>> cols;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const Line& l = doc.rows[r];
    const auto cells = split_cells(l.text, delim);
    if (cells.size() != header.size()) {
      throw FormatError(source, l.number,
                        "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw FormatError(source, l.number, "empty instance id");
    t.ids.emplace_back(cells[0]);
    std::vector<double> f(p);
    double sum = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      f[k] = parse_double(cells[k + 1], source, l.number, "fraction");
      if (f[k] < 0.0) throw FormatError(source, l.number, "negative fraction");
      sum += f[k];
    }
    if (t.sum_to_one && std::abs(sum - 1.0) > 1e-6) {
      throw FormatError(source, l.number, "fractions sum to " + format_number(sum) + ", expected 1");
    }
    cols.push_back(std::move(f));
  }
  if (cols.empty()) throw FormatError(source, last_line(text), "no instance rows");
  if (t.width.has_value() != t.height.has_value()) {
    throw FormatError(source, geometry_line, "width and height must be given together");
  }
  if (t.width && *t.width * *t.height != cols.size()) {
    throw FormatError(source, geometry_line,
                      "geometry " + std::to_string(*t.width) + "x" + std::to_string(*t.height) +
                          " does not match " + std::to_string(cols.size()) + " rows");
  }
  t.fractions.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      t.fractions(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = cols[j][k];
    }
  }
  return t;
}

AbundanceTable read_abundances(const fs::path& path) {
  return parse_abundances(read_file(path), path.string());
}

void write_abundances(const AbundanceField& field, const fs::path& path) {
  write_abundances(table_from_field(field), path);
}

void write_abundances(const AbundanceTable& table, const fs::path& path) {
  write_file_atomic(path, format_abundances(table));
}

std::string encode_pgm(std::size_t width, std::size_t height, const Vector& fractions) {
  if (static_cast<std::size_t>(fractions.size()) != width * height) {
    throw InvalidArgument("encode_pgm: value count does not match geometry");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + width * height);
  for (Eigen::Index j = 0; j < fractions.size(); ++j) {
    const double f = std::clamp(fractions[j], 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::floor(255.0 * f + 0.5))));
  }
  return out;
}

std::vector<fs::path> write_abundance_maps(const AbundanceField& field, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  std::vector<fs::path> paths;
  std::set<std::string> used;
  for (std::size_t k = 0; k < field.endmember_count(); ++k) {
    std::string stem = field.names()[k];
    for (char& ch : stem) {
      const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
      if (!ok) ch = '_';
    }
    if (stem.empty() || stem.front() == '.') stem = "em" + std::to_string(k + 1) + stem;
    if (!used.insert(stem).second) stem += "_" + std::to_string(k + 1);
    const fs::path path = dir / (stem + ".pgm");
    write_file_atomic(path, encode_pgm(field.width(), field.height(),
                                       field.fractions().row(static_cast<Eigen::Index>(k)).transpose()));
    paths.push_back(path);
  }
  return paths;
}

// --- scene specs -----------------------------------------------------------

SceneSpec parse_scene_spec(std::string_view text, const std::string& source) {
  SceneSpec spec;
  std::size_t bands = 198;
  double wmin = 400.0;
  double wmax = 2500.0;
  bool have_seed = false;
  std::set<std::string, std::less<>> seen;
  for (const Line& l : split_lines(text)) {
    if (l.text.empty() || l.text.front() == '#') continue;
    std::string_view key, value;
    if (!split_key_value(l.text, key, value)) {
      throw FormatError(source, l.number, "expected 'key: value'");
    }
    if (!seen.insert(std::string(key)).second) {
      throw FormatError(source, l.number, "duplicate key '" + std::string(key) + "'");
    }
    const auto as_size = [&](std::string_view what) {
      return static_cast<std::size_t>(parse_uint(value, source, l.number, what));
    };
    if (key == "width") spec.width = as_size("width");
    else if (key == "height") spec.height = as_size("height");
    else if (key == "endmembers") spec.p = as_size("endmembers");
    else if (key == "bands") bands = as_size("bands");
    else if (key == "wavelength_min") wmin = parse_double(value, source, l.number, "wavelength_min");
    else if (key == "wavelength_max") wmax = parse_double(value, source, l.number, "wavelength_max");
    else if (key == "seed") {
      spec.seed = parse_uint(value, source, l.number, "seed");
      have_seed = true;
    } else if (key == "alpha") spec.alpha = parse_double(value, source, l.number, "alpha");
    else if (key == "pure_pixels") spec.pure_pixel_count = as_size("pure_pixels");
    else if (key == "noise_sigma") spec.noise_sigma = parse_double(value, source, l.number, "noise_sigma");
    else if (key == "units") spec.units = std::string(value);
    else throw FormatError(source, l.number, "unknown key '" + std::string(key) + "'");
  }
  if (!have_seed) throw FormatError(source, last_line(text), "scene spec must set 'seed'");
  try {
    if (!(wmin > 0.0) || !(wmax > wmin)) {
      throw InvalidArgument("wavelength range must satisfy 0 < wavelength_min < wavelength_max");
    }
    spec.axis = WavelengthAxis::uniform(wmin, wmax, bands);
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(source, last_line(text), e.what());
  }
  return spec;
}

SceneSpec read_scene_spec(const fs::path& path) {
  return parse_scene_spec(read_file(path), path.string());
}

// --- SAVD tables -----------------------------------------------------------

namespace {

const std::vector<std::string>& common_names(const std::vector<LabelledReport>& reports) {
  if (reports.empty()) throw InvalidArgument("SAVD table: no reports");
  for (const auto& r : reports) {
    if (r.report.names != reports.front().report.names) {
      throw InvalidArgument("SAVD table: reports use different endmember names");
    }
  }
  return reports.front().report.names;
}

}  // namespace

std::string format_savd_csv(const std::vector<LabelledReport>& reports) {
  const auto& names = common_names(reports);
  std::string out = "endmember";
  for (const auto& r : reports) out += "," + r.label;
  out += "\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    out += names[k];
    for (const auto& r : reports) {
      const auto& v = r.report.per_endmember_mean[k];
      out += "," + (v ? format_number(*v) : std::string("NA"));
    }
    out += "\n";
  }
  out += "Average";
  for (const auto& r : reports) out += "," + format_number(r.report.overall_mean);
  out += "\nStd";
  for (const auto& r : reports) out += "," + format_number(r.report.overall_std);
  out += "\n";
  return out;
}

std::string format_savd_text(const std::vector<LabelledReport>& reports) {
  const auto& names = common_names(reports);
  const auto pct = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v << "%";
    return ss.str();
  };
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Endmember"});
  for (const auto& r : reports) rows.back().push_back(r.label);
  for (std::size_t k = 0; k < names.size(); ++k) {
    rows.push_back({names[k]});
    for (const auto& r : reports) {
      const auto& v = r.report.per_endmember_mean[k];
      rows.back().push_back(v ? pct(*v) : "n/a");
    }
  }
  rows.push_back({"Average"});
  for (const auto& r : reports) rows.back().push_back(pct(r.report.overall_mean));
  rows.push_back({"Std"});
  for (const auto& r : reports) rows.back().push_back(pct(r.report.overall_std));

  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  const auto rule = [&] {
    std::size_t total = 0;
    for (std::size_t w : widths) total += w + 3;
    out += std::string(total > 0 ? total - 1 : 0, '-') + "\n";
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == 1 || r == rows.size() - 2) rule();
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const std::string& cell = rows[r][c];
      const std::string pad(widths[c] - cell.size(), ' ');
      out += c == 0 ? cell + pad : pad + cell;
      out += c + 1 < rows[r].size() ? "   " : "\n";
    }
  }
  return out;
}

}  // namespace msunmix::io
