#include "msunmix/metrics.hpp"

#include "msunmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace msunmix {

double spectral_angle(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidArgument("spectral_angle: length mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("spectral_angle: zero-norm spectrum");
  // 2 atan2(|u - v|, |u + v|) equals acos(u . v) for unit u, v without the
  // loss of precision acos suffers near 0.
  const Vector u = a / na;
  const Vector v = b / nb;
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm());
}

double spectral_angle(const Spectrum& a, const Spectrum& b) {
  if (!a.axis().matches(b.axis())) throw InvalidArgument("spectral_angle: axis mismatch");
  return spectral_angle(a.values(), b.values());
}

std::vector<std::size_t> assign_exhaustive(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw InvalidArgument("assignment: cost matrix is not square");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    }
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kuhn-Munkres with potentials, O(n^3).
std::vector<std::size_t> assign_hungarian(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw InvalidArgument("assignment: cost matrix is not square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match_col[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(col - 1)) -
                           u[r] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match_col[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> result(n);
  for (std::size_t col = 1; col <= n; ++col) result[match_col[col] - 1] = col - 1;
  return result;
}

MatchResult match_endmembers(const EndmemberSet& estimated, const EndmemberSet& truth) {
  const std::size_t p = estimated.count();
  if (p != truth.count()) {
    throw InvalidArgument("match: " + std::to_string(p) + " estimated vs " +
                          std::to_string(truth.count()) + " reference endmembers");
  }
  if (!estimated.axis().matches(truth.axis())) throw InvalidArgument("match: axis mismatch");

  const auto n = static_cast<Eigen::Index>(p);
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < n; ++t) {
      cost(i, t) = spectral_angle(estimated.signatures().col(i), truth.signatures().col(t));
    }
  }
  MatchResult m;
  m.permutation = p <= 8 ? assign_exhaustive(cost) : assign_hungarian(cost);
  m.per_pair_sad.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    m.per_pair_sad[i] = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.permutation[i]));
    m.total_sad += m.per_pair_sad[i];
  }
  return m;
}

double savd(const Vector& estimated, const Vector& truth) {
  if (estimated.size() != truth.size()) {
    throw InvalidArgument("savd: " + std::to_string(estimated.size()) + " vs " +
                          std::to_string(truth.size()) + " fractions");
  }
  return 100.0 * (estimated - truth).cwiseAbs().sum();
}

MeanStd mean_and_sample_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return r;
}

SavdReport savd_report(const Matrix& estimated, const Matrix& truth, std::vector<std::string> names) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols()) {
    throw InvalidArgument("savd_report: estimate is " + std::to_string(estimated.rows()) + "x" +
                          std::to_string(estimated.cols()) + ", truth is " +
                          std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  }
  const auto p = static_cast<std::size_t>(truth.rows());
  if (names.empty()) names = default_names(p);
  if (names.size() != p) throw InvalidArgument("savd_report: name count does not match p");

  SavdReport r;
  r.names = std::move(names);
  r.per_instance.resize(static_cast<std::size_t>(truth.cols()));
  std::vector<double> sum(p, 0.0);
  std::vector<std::size_t> count(p, 0);
  for (Eigen::Index j = 0; j < truth.cols(); ++j) {
    const double s = savd(estimated.col(j), truth.col(j));
    r.per_instance[static_cast<std::size_t>(j)] = s;
    for (std::size_t k = 0; k < p; ++k) {
      if (truth(static_cast<Eigen::Index>(k), j) > 0.0) {
        sum[k] += s;
        ++count[k];
      }
    }
  }
  std::vector<double> means;
  r.per_endmember_mean.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    if (count[k] == 0) continue;
    r.per_endmember_mean[k] = sum[k] / static_cast<double>(count[k]);
    means.push_back(*r.per_endmember_mean[k]);
  }
  const MeanStd ms = mean_and_sample_std(means);
  r.overall_mean = ms.mean;
  r.overall_std = ms.std;
  return r;
}

Matrix align_rows(const Matrix& estimated, const std::vector<std::size_t>& permutation) {
  if (static_cast<std::size_t>(estimated.rows()) != permutation.size()) {
    throw InvalidArgument("align_rows: permutation size does not match row count");
  }
  Matrix out(estimated.rows(), estimated.cols());
  std::vector<bool> seen(permutation.size(), false);
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    const std::size_t t = permutation[i];
    if (t >= permutation.size() || seen[t]) throw InvalidArgument("align_rows: not a permutation");
    seen[t] = true;
    out.row(static_cast<Eigen::Index>(t)) = estimated.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

double reconstruction_rmse(const Matrix& data, const Matrix& endmembers, const Matrix& abundances) {
  if (endmembers.rows() != data.rows() || abundances.cols() != data.cols() ||
      endmembers.cols() != abundances.rows()) {
    throw InvalidArgument("reconstruction_rmse: incompatible shapes");
  }
  if (data.size() == 0) throw InvalidArgument("reconstruction_rmse: empty data");
  return std::sqrt((data - endmembers * abundances).squaredNorm() / static_cast<double>(data.size()));
}

}  // namespace msunmix
