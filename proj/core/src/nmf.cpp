// Nonnegative matrix factorization V ~ W H by Lee-Seung multiplicative
// updates on the Frobenius objective ||V - W H||_F.

#include "msunmix/error.hpp"
#include "msunmix/extraction.hpp"
#include "msunmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace msunmix {
namespace {

constexpr double kDenominatorFloor = 1e-12;

Matrix seeded_positive(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = scale * (1.0 - rng.uniform());
  }
  return m;
}

}  // namespace

ExtractionResult nmf(const Matrix& data, const WavelengthAxis& axis, const ExtractionConfig& config) {
  config.validate();
  const auto p = static_cast<Eigen::Index>(config.p);
  if (p > std::min(data.rows(), data.cols())) {
    throw InvalidArgument("nmf: p = " + std::to_string(p) + " exceeds min(bands, pixels) = " +
                          std::to_string(std::min(data.rows(), data.cols())));
  }
  if (data.size() == 0) throw InvalidArgument("nmf: empty data");
  if (data.minCoeff() < 0.0) throw InvalidArgument("nmf: negative input value");
  const double mean = data.mean();
  if (!(mean > 0.0)) throw InvalidArgument("nmf: data is identically zero");

  Rng rng(config.seed);
  const double scale = std::sqrt(mean / static_cast<double>(p));
  Matrix w = seeded_positive(data.rows(), p, scale, rng);
  Matrix h = seeded_positive(p, data.cols(), scale, rng);

  double previous = (data - w * h).norm();
  std::vector<double> trace;
  std::size_t iterations = 0;
  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const Matrix wt = w.transpose();
    Matrix h_next = h.cwiseProduct(
        (wt * data).cwiseQuotient(((wt * w) * h).cwiseMax(kDenominatorFloor)));
    const Matrix ht = h_next.transpose();
    Matrix w_next = w.cwiseProduct(
        (data * ht).cwiseQuotient((w * (h_next * ht)).cwiseMax(kDenominatorFloor)));
    const double objective = (data - w_next * h_next).norm();
    // Multiplicative updates never increase the objective in exact
    // arithmetic; a rounding-level uptick means convergence, so keep the
    // previous factors.
    if (objective > previous) break;
    w = std::move(w_next);
    h = std::move(h_next);
    trace.push_back(objective);
    iterations = it;
    const bool converged = previous == 0.0 || (previous - objective) < config.tol * previous;
    previous = objective;
    if (converged) break;
  }

  // Descending column-norm order, stable on ties.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector norms = w.colwise().norm().transpose();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms[a] > norms[b]; });
  Matrix w_sorted(w.rows(), p);
  Matrix h_sorted(p, h.cols());
  for (Eigen::Index k = 0; k < p; ++k) {
    w_sorted.col(k) = w.col(order[static_cast<std::size_t>(k)]);
    h_sorted.row(k) = h.row(order[static_cast<std::size_t>(k)]);
  }

  return ExtractionResult{EndmemberSet(axis, std::move(w_sorted)),
                          Method::nmf,
                          std::nullopt,
                          std::move(trace),
                          iterations,
                          std::move(h_sorted)};
}

}  // namespace msunmix
