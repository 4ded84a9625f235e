#include "msunmix/extraction.hpp"

#include "msunmix/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace msunmix {
namespace {

// Flip each column so its largest-magnitude entry (first on ties) is positive.
void fix_signs(Matrix& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const double a = std::abs(basis(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (basis(arg, c) < 0.0) basis.col(c) *= -1.0;
  }
}

struct Eigenbasis {
  Matrix vectors;  // bands x dim, descending eigenvalue order
  Vector singular_values;
};

// Leading `dim` eigenvectors of X X^T (equivalently left singular vectors of X).
Eigenbasis leading_eigenbasis(const Matrix& x, std::size_t dim) {
  const Matrix gram = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("subspace: eigen-decomposition failed");
  const Eigen::Index n = gram.rows();
  const auto d = static_cast<Eigen::Index>(dim);
  Eigenbasis out{Matrix(n, d), Vector(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    // Eigen returns eigenvalues in ascending order.
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    out.singular_values[i] = std::sqrt(std::max(solver.eigenvalues()[n - 1 - i], 0.0));
  }
  fix_signs(out.vectors);
  return out;
}

void check_dim(const Matrix& data, std::size_t dim) {
  if (dim < 1 || dim > static_cast<std::size_t>(data.rows())) {
    throw InvalidArgument("subspace: dimension " + std::to_string(dim) + " outside [1, " +
                          std::to_string(data.rows()) + "]");
  }
  if (data.cols() < 1) throw InvalidArgument("subspace: no pixels");
}

}  // namespace

Matrix SubspaceProjection::reconstruct() const {
  return (basis * projected).colwise() + mean;
}

SubspaceProjection project_subspace(const Matrix& data, std::size_t dim) {
  check_dim(data, dim);
  SubspaceProjection out;
  out.mean = data.rowwise().mean();
  const Matrix centred = data.colwise() - out.mean;
  Eigenbasis eb = leading_eigenbasis(centred, dim);
  out.basis = std::move(eb.vectors);
  out.singular_values = std::move(eb.singular_values);
  out.projected = out.basis.transpose() * centred;

  const double top = out.singular_values.size() > 0 ? out.singular_values[0] : 0.0;
  // Gram-matrix eigenvalues resolve singular values only down to ~sqrt(eps) * top.
  const double floor = 1e-7 * std::max(top, 1e-300);
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values[i] <= floor) out.rank_deficient = true;
  }
  return out;
}

Matrix principal_basis_uncentered(const Matrix& data, std::size_t dim) {
  check_dim(data, dim);
  return leading_eigenbasis(data, dim).vectors;
}

}  // namespace msunmix
