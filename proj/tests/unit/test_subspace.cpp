#include "msunmix/error.hpp"
#include "msunmix/extraction.hpp"
#include "support.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

using namespace msunmix;

TEST(ProjectSubspace, FullDimensionIsLossless) {
  Rng rng(1);
  const Matrix x = test::random_matrix(rng, 6, 40);
  const auto proj = project_subspace(x, 6);
  EXPECT_LE((proj.reconstruct() - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((proj.basis.transpose() * proj.basis - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectSubspace, ExactAffinePlane) {
  Rng rng(2);
  const Vector origin = test::random_matrix(rng, 8, 1);
  const Matrix dirs = test::random_matrix(rng, 8, 2, -1.0, 1.0);
  const Matrix coeffs = test::random_matrix(rng, 2, 60, -3.0, 3.0);
  const Matrix x = (dirs * coeffs).colwise() + origin;
  const auto proj = project_subspace(x, 2);
  EXPECT_LE((proj.reconstruct() - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_FALSE(proj.rank_deficient);
}

TEST(ProjectSubspace, ResidualEqualsTailSingularEnergy) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = test::random_matrix(rng, 5, 50);
    const auto proj = project_subspace(x, 3);
    const Matrix centred = x.colwise() - x.rowwise().mean();
    const Eigen::JacobiSVD<Matrix> svd(centred);
    const Vector s = svd.singularValues();
    const double tail = s.tail(2).squaredNorm();
    const double residual = (proj.reconstruct() - x).squaredNorm();
    EXPECT_NEAR(residual, tail, 1e-9 * std::max(1.0, s.squaredNorm()));
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(proj.singular_values[i], s[i], 1e-9);
  }
}

TEST(ProjectSubspace, SignConventionLargestEntryPositive) {
  Rng rng(4);
  const auto proj = project_subspace(test::random_matrix(rng, 7, 30), 4);
  for (Eigen::Index c = 0; c < proj.basis.cols(); ++c) {
    Eigen::Index arg = 0;
    proj.basis.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(proj.basis(arg, c), 0.0);
  }
}

TEST(ProjectSubspace, FlagsDimensionAboveRank) {
  Rng rng(5);
  const Matrix dirs = test::random_matrix(rng, 6, 1);
  const Matrix x = dirs * test::random_matrix(rng, 1, 20);
  const auto proj = project_subspace(x, 3);
  EXPECT_TRUE(proj.rank_deficient);
  EXPECT_LE((proj.reconstruct() - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectSubspace, RejectsBadDimension) {
  const Matrix x = Matrix::Ones(4, 10);
  EXPECT_THROW(project_subspace(x, 0), InvalidArgument);
  EXPECT_THROW(project_subspace(x, 5), InvalidArgument);
}

TEST(SimplexVolume, UnitTriangle) {
  Matrix pts(2, 3);
  pts << 0, 1, 0,
         0, 0, 1;
  const std::vector<std::size_t> v{0, 1, 2};
  // |det [1 1 1; 0 1 0; 0 0 1]| = 1 (twice the triangle area)
  EXPECT_NEAR(simplex_volume(pts, v), 1.0, 1e-15);
}
