#include "../oracles.hpp"

#include "ract/data_model.hpp"
#include "ract/error.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace ract;

namespace {
Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}
}  // namespace

TEST(TwoSampleDataset, ValidatesShapeAndValues) {
  EXPECT_THROW(TwoSampleDataset(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 3)), DataError);
  EXPECT_THROW(TwoSampleDataset(Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(3, 2)), DataError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(TwoSampleDataset(bad, Eigen::MatrixXd::Zero(3, 2)), DataError);
  EXPECT_THROW(TwoSampleDataset(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 2), {"a"}), DataError);
  const TwoSampleDataset d(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Zero(4, 2), {"a", "b"});
  EXPECT_EQ(d.n(), 7);
  EXPECT_EQ(d.stacked().rows(), 7);
  EXPECT_EQ(d.stacked()(0, 0), 1.0);
  EXPECT_EQ(d.stacked()(6, 1), 0.0);
}

TEST(CenterByGroup, HandExampleAndIdempotence) {
  const TwoSampleDataset d(rows({{0, 0}, {2, 2}}), rows({{1, 5}, {3, 7}}));
  const auto c = center_by_group(d);
  EXPECT_DOUBLE_EQ(c.group1()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c.group1()(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.group2()(0, 1), -1.0);
  const auto cc = center_by_group(c);
  EXPECT_LT((cc.group1() - c.group1()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CenterByGroup, RandomMeansVanish) {
  std::mt19937_64 eng(10);
  Eigen::MatrixXd g = oracle::normal_matrix(10, 4, eng).array() + 3.0;
  const auto c = center_by_group(TwoSampleDataset(g, g));
  EXPECT_LT(c.group1().colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Residualize, InterceptOnlyCenters) {
  std::mt19937_64 eng(11);
  const Eigen::MatrixXd x = oracle::normal_matrix(12, 3, eng);
  const auto r = residualize(x, CovariateMatrix(Eigen::MatrixXd::Ones(12, 1)));
  EXPECT_LT((r - center_columns(x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Residualize, OrthogonalityIdempotenceAndNoop) {
  std::mt19937_64 eng(12);
  const Eigen::MatrixXd x = oracle::normal_matrix(20, 3, eng);
  const CovariateMatrix c(oracle::normal_matrix(20, 2, eng));
  const auto r = residualize(x, c);
  EXPECT_LT((c.design().transpose() * r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((residualize(r, c) - r).cwiseAbs().maxCoeff(), 1e-10);
  // Against the normal-equation formula.
  const Eigen::MatrixXd& C = c.design();
  const Eigen::MatrixXd ref = x - C * (C.transpose() * C).inverse() * C.transpose() * x;
  EXPECT_LT((r - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Residualize, Errors) {
  Eigen::MatrixXd c(6, 2);
  c.col(0).setOnes();
  c.col(1).setConstant(2.0);
  EXPECT_THROW(residualize(Eigen::MatrixXd::Zero(6, 2), CovariateMatrix(c)), SingularDesignError);
  EXPECT_THROW(CovariateMatrix(Eigen::MatrixXd::Ones(3, 3)), DataError);
  EXPECT_THROW(residualize(Eigen::MatrixXd::Zero(5, 2), CovariateMatrix(Eigen::MatrixXd::Ones(6, 1))),
               DataError);
}

TEST(SampleCovariance, HandAndOracle) {
  const auto s = sample_covariance(rows({{0, 0}, {2, 0}}));
  EXPECT_DOUBLE_EQ(s(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s(1, 1), 0.0);

  std::mt19937_64 eng(50);
  const Eigen::MatrixXd x = oracle::normal_matrix(50, 5, eng);
  EXPECT_LT((sample_covariance(x).entries() - oracle::covariance(x)).cwiseAbs().maxCoeff(), 1e-12);

  Eigen::MatrixXd withconst = x;
  withconst.col(2).setConstant(4.0);
  const auto sc = sample_covariance(withconst);
  EXPECT_EQ(sc.entries().row(2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(sample_covariance(Eigen::MatrixXd::Zero(1, 3)), InsufficientDataError);
}

TEST(SampleCovariance, PositiveSemidefinite) {
  std::mt19937_64 eng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd x = oracle::normal_matrix(5, 12, eng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample_covariance(x).entries());
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(PooledCovariance, StackingOracleAndLabelSwap) {
  std::mt19937_64 eng(52);
  const Eigen::MatrixXd g1 = oracle::normal_matrix(10, 4, eng).array() + 1.0;
  const Eigen::MatrixXd g2 = oracle::normal_matrix(10, 4, eng).array() - 2.0;
  Eigen::MatrixXd stacked(20, 4);
  stacked << center_columns(g1), center_columns(g2);
  const auto pooled = pooled_covariance(TwoSampleDataset(g1, g2));
  EXPECT_LT((pooled.entries() - oracle::covariance(stacked)).cwiseAbs().maxCoeff(), 1e-12);
  const auto swapped = pooled_covariance(TwoSampleDataset(g2, g1));
  EXPECT_LT((pooled.entries() - swapped.entries()).cwiseAbs().maxCoeff(), 1e-12);
  // Global centering lets the mean shift into the spectrum.
  const auto global = pooled_covariance(TwoSampleDataset(g1, g2), PooledCentering::kGlobal);
  EXPECT_GT(global(0, 0), pooled(0, 0) + 1.0);
}

TEST(PooledCovariance, DegeneratePairIsZero) {
  const TwoSampleDataset d(rows({{1, 1}, {1, 1}}), rows({{3, -2}, {3, -2}}));
  EXPECT_EQ(pooled_covariance(d).entries().cwiseAbs().maxCoeff(), 0.0);
}
