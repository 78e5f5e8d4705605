#include "../oracles.hpp"

#include "ract/error.hpp"
#include "ract/matrix_core.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace ract;

TEST(SymmetricMatrix, SymmetrizesExactly) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 4.0, 3.0;
  const SymmetricMatrix m(a);
  EXPECT_EQ(m(0, 1), m(1, 0));
  EXPECT_DOUBLE_EQ(m(0, 1), 3.0);
}

TEST(SymmetricMatrix, RejectsNonSquareAndEmpty) {
  EXPECT_THROW(SymmetricMatrix(Eigen::MatrixXd(2, 3)), DataError);
  EXPECT_THROW(SymmetricMatrix(Eigen::MatrixXd(0, 0)), DataError);
}

TEST(TruncatedSvd, IdentityAndDiagonal) {
  const auto id = truncated_svd(SymmetricMatrix::identity(5), 3);
  ASSERT_EQ(id.size(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(id.values(j), 1.0, 1e-14);

  Eigen::VectorXd d(3);
  d << 1.0, 3.0, 2.0;
  const auto s = truncated_svd(SymmetricMatrix::diagonal(d), 2);
  EXPECT_NEAR(s.values(0), 3.0, 1e-14);
  EXPECT_NEAR(s.values(1), 2.0, 1e-14);
}

TEST(TruncatedSvd, MatchesDenseOracleOnRandom12x12) {
  std::mt19937_64 eng(12);
  const Eigen::MatrixXd a = oracle::random_symmetric(12, eng);
  const auto s = truncated_svd(SymmetricMatrix(a), 5);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(s.values(j), svd.singularValues()(j), 1e-10);
}

TEST(TruncatedSvd, VectorInvariants) {
  std::mt19937_64 eng(7);
  const Eigen::MatrixXd a = oracle::random_symmetric(15, eng);
  const auto s = truncated_svd(SymmetricMatrix(a), 15);
  for (int j = 0; j < 15; ++j) {
    EXPECT_GE(s.values(j), 0.0);
    if (j > 0) EXPECT_LE(s.values(j), s.values(j - 1));
    EXPECT_NEAR(s.left_vectors.col(j).norm(), 1.0, 1e-10);
    const double sign = s.signed_values(j) >= 0.0 ? 1.0 : -1.0;
    EXPECT_LT((s.right_vectors.col(j) - sign * s.left_vectors.col(j)).norm(), 1e-8);
    // A v = sigma u for the singular triplet.
    EXPECT_LT((a * s.right_vectors.col(j) - s.values(j) * s.left_vectors.col(j)).norm(), 1e-9);
  }
  const Eigen::MatrixXd gram = s.left_vectors.transpose() * s.left_vectors;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(TruncatedSvd, Errors) {
  EXPECT_THROW(truncated_svd(SymmetricMatrix::identity(3), 0), ParameterError);
  EXPECT_THROW(truncated_svd(SymmetricMatrix::identity(3), 4), ParameterError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(truncated_svd(SymmetricMatrix(bad), 1), DataError);
}

TEST(KyFan, HandValues) {
  EXPECT_NEAR(ky_fan_norm(SymmetricMatrix::identity(5), 3), 3.0, 1e-14);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(6);
  d(0) = 4.0;
  d(1) = 1.0;
  const auto m = SymmetricMatrix::diagonal(d);
  EXPECT_DOUBLE_EQ(ky_fan_norm(m, 1), 4.0);
  EXPECT_DOUBLE_EQ(ky_fan_norm(m, 2), 5.0);
}

TEST(KyFan, NegativeEigenvaluesCountByMagnitude) {
  Eigen::VectorXd d(3);
  d << -5.0, 2.0, 1.0;
  EXPECT_DOUBLE_EQ(ky_fan_norm(SymmetricMatrix::diagonal(d), 1), 5.0);
  EXPECT_DOUBLE_EQ(ky_fan_norm(SymmetricMatrix::diagonal(d), 3), 8.0);
}

TEST(KyFan, Random20x20AgainstSvd) {
  std::mt19937_64 eng(20);
  const Eigen::MatrixXd a = oracle::random_symmetric(20, eng);
  EXPECT_NEAR(ky_fan_norm(SymmetricMatrix(a), 7), oracle::ky_fan(a, 7), 1e-10);
}

TEST(KyFan, OperatorNormAndProperties) {
  std::mt19937_64 eng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const int p = 3 + rep % 10;
    const Eigen::MatrixXd a = oracle::random_symmetric(p, eng);
    const Eigen::MatrixXd b = oracle::random_symmetric(p, eng);
    const SymmetricMatrix sa(a), sb(b);
    EXPECT_NEAR(ky_fan_norm(sa, 1), a.operatorNorm(), 1e-10);
    const double c = -2.5;
    for (int k = 1; k <= p; ++k) {
      if (k > 1) EXPECT_LE(ky_fan_norm(sa, k - 1), ky_fan_norm(sa, k) + 1e-12);
      EXPECT_LE(ky_fan_norm(sa + sb, k), ky_fan_norm(sa, k) + ky_fan_norm(sb, k) + 1e-9);
      EXPECT_NEAR(ky_fan_norm(c * sa, k), std::abs(c) * ky_fan_norm(sa, k), 1e-10);
    }
  }
}

TEST(KyFan, ProfileIsRunningSum) {
  Eigen::VectorXd s(4);
  s << 4, 3, 2, 1;
  const Eigen::VectorXd prof = ky_fan_profile(s);
  EXPECT_DOUBLE_EQ(prof(0), 4);
  EXPECT_DOUBLE_EQ(prof(3), 10);
}

TEST(SelectK, StrictInequality) {
  const std::vector<double> a = {8, 1, 1};
  EXPECT_EQ(select_K(a, 0.8, 3), 2);
  const std::vector<double> b = {9, 1};
  EXPECT_EQ(select_K(b, 0.8, 2), 1);
  const std::vector<double> ones(10, 1.0);
  EXPECT_EQ(select_K(ones, 0.8, 10), 9);
}

TEST(SelectK, CapAndErrors) {
  const std::vector<double> ones(10, 1.0);
  EXPECT_EQ(select_K(ones, 0.8, 4), 4);
  const std::vector<double> zeros(3, 0.0);
  EXPECT_THROW(select_K(zeros, 0.8, 3), DegenerateInputError);
}

TEST(SelectK, NonDecreasingInCutoff) {
  std::mt19937_64 eng(5);
  std::exponential_distribution<double> e;
  std::vector<double> s(30);
  for (auto& v : s) v = e(eng);
  std::sort(s.rbegin(), s.rend());
  int prev = 0;
  for (double cut = 0.05; cut < 1.0; cut += 0.05) {
    const int K = select_K(s, cut, 30);
    EXPECT_GE(K, prev);
    prev = K;
  }
}

TEST(SingularValuesSymmetric, MatchesOracle) {
  std::mt19937_64 eng(3);
  const Eigen::MatrixXd a = oracle::random_symmetric(9, eng);
  const Eigen::VectorXd s = singular_values_symmetric(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  EXPECT_LT((s - svd.singularValues()).cwiseAbs().maxCoeff(), 1e-10);
}
