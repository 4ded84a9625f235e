#include "msunmix/error.hpp"
#include "msunmix/metrics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace msunmix;

namespace {

double brute_force_cost(const Matrix& cost, std::vector<std::size_t>* best_perm = nullptr) {
  std::vector<std::size_t> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    if (c < best) {
      best = c;
      if (best_perm) *best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double assignment_cost(const Matrix& cost, const std::vector<std::size_t>& a) {
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) c += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a[i]));
  return c;
}

}  // namespace

TEST(SpectralAngle, KnownValues) {
  Vector a(3), b(3);
  a << 1, 2, 3;
  EXPECT_EQ(spectral_angle(a, a), 0.0);
  EXPECT_NEAR(spectral_angle(a, 2.0 * a), 0.0, 1e-15);
  a << 1, 0, 0;
  b << 0, 1, 0;
  EXPECT_NEAR(spectral_angle(a, b), std::acos(0.0), 1e-15);
  b << 1, 1, 0;
  EXPECT_NEAR(spectral_angle(a, b), std::atan(1.0), 1e-15);
}

TEST(SpectralAngle, ZeroNormAndMismatchRejected) {
  EXPECT_THROW(spectral_angle(Vector::Zero(3), Vector::Ones(3)), InvalidArgument);
  EXPECT_THROW(spectral_angle(Vector::Ones(3), Vector::Ones(4)), InvalidArgument);
}

TEST(SpectralAngle, ScaleInvariantAndSymmetric) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = test::random_matrix(rng, 10, 1, 0.01, 1.0);
    const Vector b = test::random_matrix(rng, 10, 1, 0.01, 1.0);
    const double c = rng.uniform(1e-3, 1e3);
    const double s = spectral_angle(a, b);
    EXPECT_NEAR(spectral_angle(c * a, b), s, 1e-12);
    EXPECT_EQ(spectral_angle(b, a), s);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::acos(-1.0));
    EXPECT_NEAR(s, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)), 1e-7);
  }
}

TEST(Match, ShuffledSetGivesInverseShuffle) {
  Rng rng(2);
  const auto axis = WavelengthAxis::uniform(400, 1000, 12);
  const Matrix truth = test::random_matrix(rng, 12, 5, 0.05, 1.0);
  const std::vector<std::size_t> shuffle{3, 0, 4, 1, 2};
  Matrix est(12, 5);
  for (std::size_t i = 0; i < 5; ++i) est.col(static_cast<Eigen::Index>(i)) = 1.7 * truth.col(static_cast<Eigen::Index>(shuffle[i]));
  const auto m = match_endmembers(EndmemberSet(axis, est), EndmemberSet(axis, truth));
  EXPECT_EQ(m.permutation, shuffle);
  EXPECT_NEAR(m.total_sad, 0.0, 1e-7);
}

TEST(Match, IdentityOnSelf) {
  Rng rng(3);
  const auto axis = WavelengthAxis::uniform(400, 1000, 8);
  const EndmemberSet e(axis, test::random_matrix(rng, 8, 4, 0.05, 1.0));
  const auto m = match_endmembers(e, e);
  EXPECT_EQ(m.permutation, (std::vector<std::size_t>{0, 1, 2, 3}));
  for (double s : m.per_pair_sad) EXPECT_EQ(s, 0.0);
}

TEST(Match, MinimisesTotalAngleAgainstBruteForce) {
  Rng rng(4);
  const auto axis = WavelengthAxis::uniform(400, 1000, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const EndmemberSet a(axis, test::random_matrix(rng, 6, 3, 0.01, 1.0));
    const EndmemberSet b(axis, test::random_matrix(rng, 6, 3, 0.01, 1.0));
    Matrix cost(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) cost(i, j) = spectral_angle(a.signatures().col(i), b.signatures().col(j));
    }
    const auto m = match_endmembers(a, b);
    EXPECT_NEAR(m.total_sad, brute_force_cost(cost), 1e-12);
    EXPECT_NEAR(std::accumulate(m.per_pair_sad.begin(), m.per_pair_sad.end(), 0.0), m.total_sad, 1e-12);
  }
}

TEST(Assignment, HungarianAgreesWithExhaustive) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(7));
    Matrix cost = test::random_matrix(rng, n, n, 0.0, 3.0);
    if (trial % 4 == 0) cost = cost.array().round();  // ties
    const double best = brute_force_cost(cost);
    EXPECT_NEAR(assignment_cost(cost, assign_exhaustive(cost)), best, 1e-12);
    EXPECT_NEAR(assignment_cost(cost, assign_hungarian(cost)), best, 1e-12);
  }
  EXPECT_THROW(assign_hungarian(Matrix::Zero(2, 3)), InvalidArgument);
}

TEST(Match, LargeSetsUseAssignment) {
  Rng rng(6);
  const auto axis = WavelengthAxis::uniform(400, 1000, 15);
  const Matrix truth = test::random_matrix(rng, 15, 10, 0.05, 1.0);
  std::vector<std::size_t> shuffle{9, 2, 7, 0, 4, 1, 8, 3, 6, 5};
  Matrix est(15, 10);
  for (std::size_t i = 0; i < 10; ++i) est.col(static_cast<Eigen::Index>(i)) = truth.col(static_cast<Eigen::Index>(shuffle[i]));
  const auto m = match_endmembers(EndmemberSet(axis, est), EndmemberSet(axis, truth));
  EXPECT_EQ(m.permutation, shuffle);
}

TEST(Match, CountMismatchRejected) {
  const auto axis = WavelengthAxis::uniform(400, 1000, 5);
  EXPECT_THROW(match_endmembers(EndmemberSet(axis, Matrix::Ones(5, 2)), EndmemberSet(axis, Matrix::Ones(5, 3))),
               InvalidArgument);
}

TEST(Savd, KnownValues) {
  Vector a(3), b(3);
  a << 1, 0, 0;
  b << 0, 1, 0;
  EXPECT_DOUBLE_EQ(savd(a, b), 200.0);
  EXPECT_EQ(savd(a, a), 0.0);
  a << 0.5, 0.3, 0.2;
  b << 0.6, 0.2, 0.2;
  EXPECT_NEAR(savd(a, b), 20.0, 1e-12);
  EXPECT_THROW(savd(a, Vector::Ones(2)), InvalidArgument);
}

TEST(Savd, MetricPropertiesOnSimplex) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Vector a = test::random_simplex_point(rng, p);
    const Vector b = test::random_simplex_point(rng, p);
    const Vector c = test::random_simplex_point(rng, p);
    const double ab = savd(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 200.0 + 1e-9);
    EXPECT_EQ(ab, savd(b, a));
    EXPECT_LE(ab, savd(a, c) + savd(c, b) + 1e-9);
  }
}

TEST(SavdReport, AllCorrectIsZero) {
  Rng rng(8);
  Matrix truth(3, 20);
  for (Eigen::Index j = 0; j < 20; ++j) truth.col(j) = test::random_simplex_point(rng, 3);
  const auto r = savd_report(truth, truth, {"a", "b", "c"});
  for (double v : r.per_instance) EXPECT_EQ(v, 0.0);
  for (const auto& m : r.per_endmember_mean) {
    ASSERT_TRUE(m);
    EXPECT_EQ(*m, 0.0);
  }
  EXPECT_EQ(r.overall_mean, 0.0);
  EXPECT_EQ(r.overall_std, 0.0);
}

TEST(SavdReport, MeansOnlyOverInstancesContainingEndmember) {
  Matrix truth(3, 3), est(3, 3);
  truth << 1, 0.5, 0,
           0, 0.5, 0,
           0, 0,   1;
  est << 0.9, 0.5, 0,
         0.1, 0.3, 0.5,
         0,   0.2, 0.5;
  // instance SAVDs: 20, 40, 100
  const auto r = savd_report(est, truth, {"a", "b", "c"});
  ASSERT_EQ(r.per_instance.size(), 3u);
  EXPECT_NEAR(r.per_instance[0], 20.0, 1e-12);
  EXPECT_NEAR(r.per_instance[1], 40.0, 1e-12);
  EXPECT_NEAR(r.per_instance[2], 100.0, 1e-12);
  EXPECT_NEAR(*r.per_endmember_mean[0], 30.0, 1e-12);   // instances 0, 1
  EXPECT_NEAR(*r.per_endmember_mean[1], 40.0, 1e-12);   // instance 1
  EXPECT_NEAR(*r.per_endmember_mean[2], 100.0, 1e-12);  // instance 2
  EXPECT_NEAR(r.overall_mean, 170.0 / 3.0, 1e-12);
  const double m = 170.0 / 3.0;
  const double var = ((30 - m) * (30 - m) + (40 - m) * (40 - m) + (100 - m) * (100 - m)) / 2.0;
  EXPECT_NEAR(r.overall_std, std::sqrt(var), 1e-12);
}

TEST(SavdReport, AbsentEndmemberHasNoMean) {
  Matrix truth(2, 2), est(2, 2);
  truth << 1, 1,
           0, 0;
  est << 0.8, 1,
         0.2, 0;
  const auto r = savd_report(est, truth, {"a", "b"});
  EXPECT_TRUE(r.per_endmember_mean[0]);
  EXPECT_FALSE(r.per_endmember_mean[1]);
  EXPECT_NEAR(r.overall_mean, 20.0, 1e-12);
  EXPECT_EQ(r.overall_std, 0.0);
}

TEST(SavdReport, SevenPigmentTableAverages) {
  // One single-pigment patch per pigment; each estimate moves v/2 percent of
  // the fraction to a neighbour so the patch SAVD is exactly v.
  const std::vector<std::vector<double>> columns{
      {18.4, 26.5, 18.5, 15.5, 23.4, 36.2, 13.3},
      {20.1, 14.3, 58.9, 14.3, 22.6, 14.6, 14.0},
      {23.2, 18.0, 25.3, 17.0, 25.6, 20.8, 26.7}};
  const std::vector<double> reported{21.7, 22.7, 22.4};
  const std::vector<std::string> names{"Vermilion", "Gold Ochre DD", "Ultramarine Blue", "Kremer White",
                                       "Carmine", "Naples Yellow", "Viridian Green"};
  for (std::size_t m = 0; m < columns.size(); ++m) {
    Matrix truth = Matrix::Zero(7, 7), est = Matrix::Zero(7, 7);
    for (Eigen::Index k = 0; k < 7; ++k) {
      const double v = columns[m][static_cast<std::size_t>(k)];
      truth(k, k) = 1.0;
      est(k, k) = 1.0 - v / 200.0;
      est((k + 1) % 7, k) = v / 200.0;
    }
    const auto r = savd_report(est, truth, names);
    for (std::size_t k = 0; k < 7; ++k) EXPECT_NEAR(*r.per_endmember_mean[k], columns[m][k], 1e-9);
    EXPECT_NEAR(r.overall_mean, reported[m], 0.05);
    double mean = 0.0;
    for (double v : columns[m]) mean += v / 7.0;
    double ss = 0.0;
    for (double v : columns[m]) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(r.overall_std, std::sqrt(ss / 6.0), 1e-9);
  }
}

TEST(MeanStd, SampleStandardDeviation) {
  const auto a = mean_and_sample_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(a.mean, 5.0);
  EXPECT_NEAR(a.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(mean_and_sample_std({3.0}).std, 0.0);
}

TEST(AlignRows, AppliesPermutation) {
  Matrix est(3, 2);
  est << 1, 2,
         3, 4,
         5, 6;
  const Matrix out = align_rows(est, {2, 0, 1});
  // estimate row 0 is truth 2, row 1 is truth 0, row 2 is truth 1
  EXPECT_EQ(out.row(2), est.row(0));
  EXPECT_EQ(out.row(0), est.row(1));
  EXPECT_EQ(out.row(1), est.row(2));
  EXPECT_THROW(align_rows(est, {0, 0, 1}), InvalidArgument);
}

TEST(ReconstructionRmse, KnownValues) {
  Rng rng(9);
  const Matrix e = test::random_matrix(rng, 6, 3);
  const Matrix a = test::random_matrix(rng, 3, 40);
  const Matrix x = e * a;
  EXPECT_NEAR(reconstruction_rmse(x, e, a), 0.0, 1e-15);
  EXPECT_NEAR(reconstruction_rmse(x, e, Matrix::Zero(3, 40)), std::sqrt(x.squaredNorm() / x.size()), 1e-15);
}

TEST(ReconstructionRmse, MatchesNoiseLevel) {
  Rng rng(10);
  const double sigma = 0.02;
  const Matrix e = test::random_matrix(rng, 20, 3);
  const Matrix a = test::random_matrix(rng, 3, 1000);
  Matrix x = e * a;
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += sigma * rng.normal();
  EXPECT_NEAR(reconstruction_rmse(x, e, a), sigma, 0.05 * sigma);
}
