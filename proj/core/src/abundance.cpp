#include "msunmix/abundance.hpp"

#include "msunmix/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace msunmix {
namespace {

// Least squares on the passive columns of `a`, zeros elsewhere.
Vector passive_solve(const Matrix& a, const Vector& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 0; k < passive.size(); ++k) {
    if (passive[k]) cols.push_back(static_cast<Eigen::Index>(k));
  }
  Matrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
  const Vector s = sub.colPivHouseholderQr().solve(b);
  Vector out = Vector::Zero(a.cols());
  for (std::size_t i = 0; i < cols.size(); ++i) out[cols[i]] = s[static_cast<Eigen::Index>(i)];
  return out;
}

// min ||a z - b|| s.t. c^T z = 1 over the columns flagged in `support`.
// Returns false when the KKT system is singular.
bool equality_constrained(const Matrix& a, const Vector& b, const Vector& c,
                          const std::vector<bool>& support, Vector& z) {
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k]) cols.push_back(static_cast<Eigen::Index>(k));
  }
  const auto m = static_cast<Eigen::Index>(cols.size());
  if (m == 0) return false;
  Matrix sub(a.rows(), m);
  Vector cs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sub.col(i) = a.col(cols[static_cast<std::size_t>(i)]);
    cs[i] = c[cols[static_cast<std::size_t>(i)]];
  }
  Matrix kkt = Matrix::Zero(m + 1, m + 1);
  kkt.topLeftCorner(m, m) = sub.transpose() * sub;
  kkt.topRightCorner(m, 1) = cs;
  kkt.bottomLeftCorner(1, m) = cs.transpose();
  Vector rhs(m + 1);
  rhs.head(m) = sub.transpose() * b;
  rhs[m] = 1.0;
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) return false;
  const Vector sol = lu.solve(rhs);
  z = Vector::Zero(a.cols());
  for (Eigen::Index i = 0; i < m; ++i) z[cols[static_cast<std::size_t>(i)]] = sol[i];
  return true;
}

// Primal active-set refinement of min ||a z - b|| s.t. c^T z = 1, z >= 0,
// started from a feasible z. Adds the column with the largest positive
// reduced gradient until none is left, stepping back to the boundary when a
// passive entry would turn negative.
void refine_active_set(const Matrix& a, const Vector& b, const Vector& c, Vector& z,
                       std::size_t max_iter) {
  const auto n = static_cast<std::size_t>(z.size());
  std::vector<bool> support(n);
  for (std::size_t k = 0; k < n; ++k) support[k] = z[static_cast<Eigen::Index>(k)] > 0.0;
  const double tol = 1e-12 * std::max(b.norm(), 1e-300);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const Vector g = a.transpose() * (b - a * z);
    double cg = 0.0, cc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!support[k]) continue;
      const auto i = static_cast<Eigen::Index>(k);
      cg += c[i] * g[i];
      cc += c[i] * c[i];
    }
    const double mu = cc > 0.0 ? cg / cc : 0.0;
    std::size_t t = n;
    double best = tol;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      if (!support[k] && g[i] - mu * c[i] > best) {
        best = g[i] - mu * c[i];
        t = k;
      }
    }
    if (t == n) return;
    support[t] = true;
    for (std::size_t inner = 0; inner <= n; ++inner) {
      Vector s;
      if (!equality_constrained(a, b, c, support, s)) return;
      bool feasible = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (support[k] && s[static_cast<Eigen::Index>(k)] <= 0.0) feasible = false;
      }
      if (feasible) {
        z = s;
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (support[k] && s[i] <= 0.0) alpha = std::min(alpha, z[i] / (z[i] - s[i]));
      }
      z += alpha * (s - z);
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (support[k] && z[i] <= 1e-15 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
          support[k] = false;
          z[i] = 0.0;
        }
      }
    }
  }
}

}  // namespace

void AbundanceConfig::validate() const {
  if (!(sto_weight > 0.0) || !std::isfinite(sto_weight)) {
    throw InvalidArgument("abundance: sum-to-one weight must be a positive finite value");
  }
}

NnlsResult nnls(const Matrix& a, const Vector& b, std::size_t max_iter, double tol) {
  const auto n = static_cast<std::size_t>(a.cols());
  if (b.size() != a.rows()) throw InvalidArgument("nnls: right-hand side length mismatch");
  const double dual_tol = tol * std::max(1.0, b.norm());

  NnlsResult r;
  r.x = Vector::Zero(a.cols());
  std::vector<bool> passive(n, false);
  Vector w = a.transpose() * b;

  while (r.iterations < max_iter) {
    std::size_t t = n;
    double best = dual_tol;
    for (std::size_t k = 0; k < n; ++k) {
      const double wk = w[static_cast<Eigen::Index>(k)];
      if (!passive[k] && wk > best) {
        best = wk;
        t = k;
      }
    }
    if (t == n) {
      r.converged = true;
      return r;
    }
    ++r.iterations;
    passive[t] = true;

    for (std::size_t inner = 0; inner <= 3 * n; ++inner) {
      const Vector s = passive_solve(a, b, passive);
      bool feasible = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (passive[k] && s[static_cast<Eigen::Index>(k)] <= 0.0) feasible = false;
      }
      if (feasible) {
        r.x = s;
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (passive[k] && s[i] <= 0.0) alpha = std::min(alpha, r.x[i] / (r.x[i] - s[i]));
      }
      r.x += alpha * (s - r.x);
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (passive[k] && r.x[i] <= 1e-15 * std::max(1.0, r.x.cwiseAbs().maxCoeff())) {
          passive[k] = false;
          r.x[i] = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * r.x);
  }
  // Iteration cap reached: r.x is feasible but may not be optimal.
  return r;
}

Vector solve_pixel(const Vector& spectrum, const Matrix& endmembers, const AbundanceConfig& config) {
  config.validate();
  const Eigen::Index bands = endmembers.rows();
  const Eigen::Index p = endmembers.cols();
  if (p < 1) throw InvalidArgument("solve_pixel: no endmembers");
  if (p > bands) {
    throw InvalidArgument("solve_pixel: " + std::to_string(p) + " endmembers exceed " +
                          std::to_string(bands) + " bands");
  }
  if (spectrum.size() != bands) throw InvalidArgument("solve_pixel: spectrum length mismatch");

  const Vector norms = endmembers.colwise().norm().transpose();
  if (norms.minCoeff() <= 0.0) throw InvalidArgument("solve_pixel: zero endmember signature");
  const Matrix unit = endmembers * norms.cwiseInverse().asDiagonal();
  // In unit-column coordinates z_k = x_k * ||e_k||, so sum(x) = c^T z.
  const Vector c = norms.cwiseInverse();
  const auto cap = static_cast<std::size_t>(3 * p);
  const std::vector<bool> all(static_cast<std::size_t>(p), true);

  Vector z;
  if (config.nonnegative && config.sum_to_one) {
    const double delta = config.sto_weight * norms.maxCoeff();
    Matrix aug(bands + 1, p);
    aug.topRows(bands) = unit;
    aug.row(bands) = delta * c.transpose();
    Vector rhs(bands + 1);
    rhs.head(bands) = spectrum;
    rhs[bands] = delta;
    z = nnls(aug, rhs, cap).x;

    // The weighted row leaves an O(1/delta^2) violation; resolve the
    // constraint exactly on the support the soft solve selected.
    std::vector<bool> support(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) support[static_cast<std::size_t>(k)] = z[k] > 0.0;
    Vector polished;
    if (equality_constrained(unit, spectrum, c, support, polished) && polished.minCoeff() >= 0.0) {
      z = polished;
      // The weighted row also blunts the dual test, so small true fractions
      // can be left out of the support; finish on the exact problem.
      refine_active_set(unit, spectrum, c, z, cap);
    }
  } else if (config.nonnegative) {
    z = nnls(unit, spectrum, cap).x;
  } else if (config.sum_to_one) {
    if (!equality_constrained(unit, spectrum, c, all, z)) {
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(unit);
      if (cod.rank() == 0) throw NumericalError("solve_pixel: endmember table has rank 0");
      // Minimum-norm solution shifted onto the constraint along c.
      z = cod.solve(spectrum);
      z += c * ((1.0 - c.dot(z)) / c.squaredNorm());
    }
  } else {
    const Matrix gram = unit.transpose() * unit;
    const Eigen::LDLT<Matrix> ldlt(gram);
    const Vector diag = ldlt.vectorD();
    const bool well_posed = ldlt.info() == Eigen::Success &&
                            diag.minCoeff() > 1e-12 * std::max(diag.maxCoeff(), 1e-300);
    if (well_posed) {
      z = ldlt.solve(unit.transpose() * spectrum);
    } else {
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(unit);
      if (cod.rank() == 0) throw NumericalError("solve_pixel: endmember table has rank 0");
      z = cod.solve(spectrum);
    }
  }

  Vector x = z.cwiseProduct(c);
  if (config.nonnegative) x = x.cwiseMax(0.0);
  if (config.sum_to_one) {
    const double s = x.sum();
    if (s > 1e-6) x /= s;
  }
  return x;
}

Matrix solve_table(const Matrix& data, const Matrix& endmembers, const AbundanceConfig& config) {
  if (data.rows() != endmembers.rows()) {
    throw InvalidArgument("abundance: data has " + std::to_string(data.rows()) +
                          " bands, endmembers have " + std::to_string(endmembers.rows()));
  }
  Matrix out(endmembers.cols(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) out.col(j) = solve_pixel(data.col(j), endmembers, config);
  return out;
}

AbundanceField solve_cube(const SpectralCube& cube, const EndmemberSet& endmembers,
                          const AbundanceConfig& config) {
  if (!cube.axis().matches(endmembers.axis())) {
    throw InvalidArgument("abundance: cube axis does not match endmember axis");
  }
  if (!config.nonnegative) {
    throw InvalidArgument("abundance: abundance fields require the nonnegativity constraint");
  }
  return AbundanceField(cube.width(), cube.height(),
                        solve_table(cube.data(), endmembers.signatures(), config),
                        config.sum_to_one, endmembers.names());
}

}  // namespace msunmix
