#include "msunmix/extraction.hpp"

#include "msunmix/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace msunmix {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::vca: return "vca";
    case Method::nfindr: return "nfindr";
    case Method::nmf: return "nmf";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "vca") return Method::vca;
  if (name == "nfindr") return Method::nfindr;
  if (name == "nmf") return Method::nmf;
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected vca, nfindr or nmf)");
}

void ExtractionConfig::validate() const {
  if (p < 1) throw InvalidArgument("extraction: p must be >= 1");
  if (max_iter < 1) throw InvalidArgument("extraction: max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("extraction: tol must be > 0");
}

ExtractionResult extract(Method method, const Matrix& data, const WavelengthAxis& axis,
                         const ExtractionConfig& config) {
  switch (method) {
    case Method::vca: return vca(data, axis, config);
    case Method::nfindr: return nfindr(data, axis, config);
    case Method::nmf: return nmf(data, axis, config);
  }
  throw InvalidArgument("extract: unknown method");
}

double simplex_volume(const Matrix& reduced, std::span<const std::size_t> vertices) {
  const auto p = static_cast<Eigen::Index>(vertices.size());
  Matrix m(p, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    m(0, c) = 1.0;
    m.col(c).tail(p - 1) = reduced.col(static_cast<Eigen::Index>(vertices[static_cast<std::size_t>(c)]));
  }
  return std::abs(m.partialPivLu().determinant());
}

}  // namespace msunmix
