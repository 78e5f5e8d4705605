#include "../oracles.hpp"

#include "ract/error.hpp"
#include "ract/theory.hpp"

#include <gtest/gtest.h>

using namespace ract;

namespace {

SymmetricMatrix diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return SymmetricMatrix::diagonal(d);
}

SymmetricMatrix random_pd(int p, std::mt19937_64& eng) {
  const Eigen::MatrixXd a = oracle::normal_matrix(p, p, eng);
  return SymmetricMatrix(a * a.transpose() / p + 0.5 * Eigen::MatrixXd::Identity(p, p));
}

}  // namespace

TEST(PopulationPair, Validation) {
  EXPECT_THROW(PopulationPair(diag({1, -1}), diag({1, 1})), DataError);
  EXPECT_THROW(PopulationPair(diag({1, 1}), diag({1, 1, 1})), DataError);
  EXPECT_THROW(PopulationPair(diag({1, 1}), diag({2, 1}), 3.0, 3.0), ParameterError);
  const auto pop = PopulationPair::from_sizes(diag({1, 1}), diag({2, 1}), 30, 10);
  EXPECT_DOUBLE_EQ(pop.r1(), 40.0 / 30.0);
  EXPECT_DOUBLE_EQ(pop.r2(), 4.0);
}

TEST(OmegaSq, CrossoverExampleClosedForm) {
  for (double c : {0.5, 1.0, 3.0, 10.0}) {
    const auto pop = crossover_example(c);
    EXPECT_NEAR(omega_sq(pop, 1), 4.0 * (c * c + (c + 4) * (c + 4)), 1e-9);
    EXPECT_NEAR(omega_sq(pop, 2), 4.0 * (c * c + (c + 4) * (c + 4)) + 4.0 * (c * c + (c + 1) * (c + 1)), 1e-9);
  }
  EXPECT_NEAR(omega_sq(crossover_example(1.0), 1), 104.0, 1e-10);
}

TEST(OmegaSq, OneDimensionalDifference) {
  // Δ = diag(δ, 0, ...): ω² = 2 (r1 σ1[0,0]² + r2 σ2[0,0]²).
  const auto pop = PopulationPair::from_sizes(diag({5, 2, 3}), diag({3, 2, 3}), 20, 30);
  EXPECT_NEAR(omega_sq(pop, 1), 2.0 * (pop.r1() * 25.0 + pop.r2() * 9.0), 1e-10);
}

TEST(OmegaSq, Homogeneity) {
  std::mt19937_64 eng(1);
  const auto s1 = random_pd(5, eng), s2 = random_pd(5, eng);
  const PopulationPair a(s1, s2), b(3.0 * s1, 3.0 * s2);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(omega_sq(b, k), 9.0 * omega_sq(a, k), 1e-8 * omega_sq(b, k));
}

TEST(OmegaSq, PositiveAndNonDecreasing) {
  std::mt19937_64 eng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const PopulationPair pop(random_pd(6, eng), random_pd(6, eng));
    double prev = 0.0;
    for (int k = 1; k <= difference_rank(pop); ++k) {
      const double w = omega_sq(pop, k);
      EXPECT_GT(w, 0.0);
      EXPECT_GE(w, prev - 1e-12);
      prev = w;
    }
  }
}

TEST(OmegaSq, Errors) {
  const auto pop = crossover_example(1.0);
  EXPECT_THROW(omega_sq(pop, 0), ParameterError);
  EXPECT_THROW(omega_sq(pop, 3), ParameterError);
  const PopulationPair tie(diag({3, 3, 1}), diag({1, 1, 1}));
  EXPECT_THROW(omega_sq(tie, 1), IllPosedSubspaceError);
  EXPECT_NO_THROW(omega_sq(tie, 2));
}

TEST(Snr, CrossoverVerdicts) {
  const auto low = crossover_example(1.0), high = crossover_example(10.0);
  EXPECT_GT(snr_k(low, 2).snr, snr_k(low, 1).snr);
  EXPECT_LT(snr_k(high, 2).snr, snr_k(high, 1).snr);
  const auto s = snr_k(low, 1);
  EXPECT_DOUBLE_EQ(s.kyfan_signal, 4.0);
  EXPECT_NEAR(s.snr, 4.0 / std::sqrt(104.0), 1e-14);
}

TEST(Snr, DoublingDifferenceDoublesSignal) {
  const PopulationPair a(diag({2, 1, 1}), diag({1, 1, 1})), b(diag({3, 1, 1}), diag({1, 1, 1}));
  EXPECT_DOUBLE_EQ(snr_k(b, 1).kyfan_signal, 2.0 * snr_k(a, 1).kyfan_signal);
}

TEST(Increments, CrossoverBetaAndGamma) {
  for (double c : {1.0, 10.0}) {
    const auto inc = increments(crossover_example(c), 1, 2);
    EXPECT_EQ(inc.beta, 0.25);
    EXPECT_NEAR(inc.gamma, (c * c + (c + 1) * (c + 1)) / (c * c + (c + 4) * (c + 4)), 1e-12);
    EXPECT_NEAR(inc.threshold(), std::sqrt(inc.gamma + 1.0) - 1.0, 1e-15);
  }
  EXPECT_TRUE(increments(crossover_example(1.0), 1, 2).snr_k2_at_least_k1);
  EXPECT_FALSE(increments(crossover_example(10.0), 1, 2).snr_k2_at_least_k1);
}

TEST(Increments, PureNoiseIncrement) {
  // An exactly zero λ2 would put k2 above the rank; a negligible one stands in.
  const PopulationPair pop(diag({5, 1 + 1e-6, 1}), diag({1, 1, 1}));
  const auto inc = increments(pop, 1, 2);
  EXPECT_NEAR(inc.beta, 0.0, 1e-6);
  EXPECT_FALSE(inc.snr_k2_at_least_k1);
}

TEST(Increments, CriterionMatchesDirectComparison) {
  std::mt19937_64 eng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const PopulationPair pop(random_pd(5, eng), random_pd(5, eng));
    const int k1 = 1 + rep % 3, k2 = k1 + 1 + rep % 2;
    const auto inc = increments(pop, k1, k2);
    EXPECT_EQ(inc.snr_k2_at_least_k1, snr_k(pop, k2).snr >= snr_k(pop, k1).snr) << rep;
  }
}

TEST(Increments, Errors) {
  const auto pop = crossover_example(1.0);
  EXPECT_THROW(increments(pop, 2, 2), ParameterError);
  EXPECT_THROW(increments(pop, 0, 1), ParameterError);
  EXPECT_THROW(crossover_example(-1.0), ParameterError);
}

TEST(DifferenceRank, Counts) {
  EXPECT_EQ(difference_rank(crossover_example(2.0)), 2);
  EXPECT_EQ(difference_rank(PopulationPair(diag({1, 1}), diag({1, 1}))), 0);
}
