#pragma once

#include "msunmix/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msunmix {

/// Angle between two nonzero spectra, in radians.
double spectral_angle(const Vector& a, const Vector& b);
double spectral_angle(const Spectrum& a, const Spectrum& b);

struct MatchResult {
  /// permutation[i] = truth index matched to estimated endmember i.
  std::vector<std::size_t> permutation;
  /// SAD of each estimated endmember against its match, radians.
  std::vector<double> per_pair_sad;
  double total_sad = 0.0;
};

/// Permutation minimising the summed spectral angle. Exhaustive for p <= 8,
/// Hungarian assignment above.
MatchResult match_endmembers(const EndmemberSet& estimated, const EndmemberSet& truth);

/// Minimum-cost perfect assignment on a square cost matrix.
/// result[i] = column assigned to row i.
std::vector<std::size_t> assign_exhaustive(const Matrix& cost);
std::vector<std::size_t> assign_hungarian(const Matrix& cost);

/// 100 * sum_k |estimated_k - truth_k|, in percent.
double savd(const Vector& estimated, const Vector& truth);

struct SavdReport {
  std::vector<std::string> names;
  /// SAVD of every instance (pixel or patch), percent.
  std::vector<double> per_instance;
  /// Mean SAVD over instances whose truth contains the endmember
  /// (fraction > 0); empty when no instance contains it.
  std::vector<std::optional<double>> per_endmember_mean;
  /// Mean of the available per-endmember means.
  double overall_mean = 0.0;
  /// Sample standard deviation (n - 1) of the per-endmember means; 0 when
  /// fewer than two are available.
  double overall_std = 0.0;
};

/// `estimated` and `truth` are p x instances, already aligned to the same
/// endmember order.
SavdReport savd_report(const Matrix& estimated, const Matrix& truth,
                       std::vector<std::string> names);

/// Mean and sample standard deviation of a list of values.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_and_sample_std(const std::vector<double>& values);

/// Reorders the rows of a p x instances estimate so row t corresponds to
/// truth endmember t, given permutation[i] = truth index of estimate i.
Matrix align_rows(const Matrix& estimated, const std::vector<std::size_t>& permutation);

/// Root-mean-square of data - endmembers * abundances.
double reconstruction_rmse(const Matrix& data, const Matrix& endmembers, const Matrix& abundances);

}  // namespace msunmix
