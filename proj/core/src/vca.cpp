// Vertex component analysis, projective branch.
//
// Data are projected onto the top-p left singular vectors of the raw table,
// each projected pixel is scaled onto the hyperplane <x, u> = 1 (u = mean
// projected pixel), and endmembers are picked one at a time as the pixel with
// the largest |f^T y| for a random direction f orthogonal to the endmembers
// found so far.

#include "msunmix/error.hpp"
#include "msunmix/extraction.hpp"
#include "msunmix/rng.hpp"

#include <cmath>
#include <string>

namespace msunmix {
namespace {

// Orthonormal basis (modified Gram-Schmidt, two passes) of the nonzero
// columns of `a`; numerically dependent columns are dropped.
Matrix orthonormal_columns(const Matrix& a) {
  Matrix q(a.rows(), 0);
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Vector v = a.col(c);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < q.cols(); ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double norm = v.norm();
    if (norm <= 1e-12 * norm0) continue;
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v / norm;
  }
  return q;
}

}  // namespace

ExtractionResult vca(const Matrix& data, const WavelengthAxis& axis, const ExtractionConfig& config) {
  config.validate();
  const std::size_t p = config.p;
  const auto n = static_cast<std::size_t>(data.cols());
  if (p < 2) throw InvalidArgument("vca: p must be >= 2");
  if (n < p) {
    throw InvalidArgument("vca: " + std::to_string(n) + " pixels, fewer than p = " +
                          std::to_string(p));
  }
  if (p > static_cast<std::size_t>(data.rows())) throw InvalidArgument("vca: p exceeds band count");
  if ((data.colwise() - data.col(0)).cwiseAbs().maxCoeff() == 0.0) {
    throw InvalidArgument("vca: degenerate data (all pixels identical)");
  }

  const auto d = static_cast<Eigen::Index>(p);
  const Matrix basis = principal_basis_uncentered(data, p);
  const Matrix xp = basis.transpose() * data;
  const Vector u = xp.rowwise().mean();

  Matrix y(d, xp.cols());
  std::vector<bool> usable(n, true);
  const Vector dots = (u.transpose() * xp).transpose();
  const double dot_scale = dots.cwiseAbs().maxCoeff();
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (!(dots[jj] > 1e-12 * dot_scale)) {
      // Pixels with no component along the mean direction (e.g. all-zero
      // spectra) have no projective image.
      usable[j] = false;
      y.col(jj).setZero();
    } else {
      y.col(jj) = xp.col(jj) / dots[jj];
    }
  }

  Rng rng(config.seed);
  Matrix a = Matrix::Zero(d, d);
  a(d - 1, 0) = 1.0;
  std::vector<std::size_t> indices(p);
  for (std::size_t i = 0; i < p; ++i) {
    const Matrix q = orthonormal_columns(a);
    Vector f;
    for (int attempt = 0;; ++attempt) {
      Vector w(d);
      for (Eigen::Index k = 0; k < d; ++k) w[k] = rng.normal();
      f = w - q * (q.transpose() * w);
      const double norm = f.norm();
      if (norm > 1e-12 * w.norm()) {
        f /= norm;
        break;
      }
      if (attempt > 100) throw NumericalError("vca: could not draw a usable projection direction");
    }
    const Vector v = (f.transpose() * y).transpose();
    std::size_t best = n;
    double best_abs = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!usable[j]) continue;
      const double av = std::abs(v[static_cast<Eigen::Index>(j)]);
      if (av > best_abs) {
        best_abs = av;
        best = j;
      }
    }
    if (best == n) throw InvalidArgument("vca: no pixel has a projective image");
    indices[i] = best;
    usable[best] = false;
    a.col(static_cast<Eigen::Index>(i)) = y.col(static_cast<Eigen::Index>(best));
  }

  Matrix signatures(data.rows(), d);
  for (std::size_t i = 0; i < p; ++i) {
    signatures.col(static_cast<Eigen::Index>(i)) = data.col(static_cast<Eigen::Index>(indices[i]));
  }
  return ExtractionResult{EndmemberSet(axis, std::move(signatures), {}, indices),
                          Method::vca,
                          indices,
                          {},
                          p,
                          std::nullopt};
}

}  // namespace msunmix
