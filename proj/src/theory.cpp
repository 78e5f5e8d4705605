#include "ract/theory.hpp"

#include "ract/error.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ract {

namespace {

void require_positive_definite(const SymmetricMatrix& m, const char* name) {
  if (!m.all_finite()) throw DataError(std::string(name) + " has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries(), Eigen::EigenvaluesOnly);
  if (!(solver.eigenvalues().minCoeff() > 0.0)) {
    throw DataError(std::string(name) + " is not positive definite");
  }
}

}  // namespace

PopulationPair::PopulationPair(SymmetricMatrix sigma1, SymmetricMatrix sigma2, double r1, double r2)
    : sigma1_(std::move(sigma1)), sigma2_(std::move(sigma2)), r1_(r1), r2_(r2) {
  if (sigma1_.dim() != sigma2_.dim()) throw DataError("population covariances differ in dimension");
  require_positive_definite(sigma1_, "sigma1");
  require_positive_definite(sigma2_, "sigma2");
  if (!(r1_ > 1.0 && r2_ > 1.0) || std::abs(1.0 / r1_ + 1.0 / r2_ - 1.0) > 1e-10) {
    throw ParameterError("sample-size ratios must satisfy r1, r2 > 1 and 1/r1 + 1/r2 = 1");
  }
}

PopulationPair PopulationPair::from_sizes(SymmetricMatrix sigma1, SymmetricMatrix sigma2, long n1,
                                          long n2) {
  if (n1 < 1 || n2 < 1) throw ParameterError("group sizes must be positive");
  const double n = static_cast<double>(n1 + n2);
  return PopulationPair(std::move(sigma1), std::move(sigma2), n / static_cast<double>(n1),
                        n / static_cast<double>(n2));
}

int difference_rank(const PopulationPair& pop) {
  const auto spec = truncated_svd(pop.difference(), pop.sigma1().dim());
  const double top = spec.values(0);
  if (top == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    if (spec.values(j) > 1e-10 * top) ++rank;
  }
  return rank;
}

double omega_sq(const PopulationPair& pop, int k) {
  const Eigen::Index p = pop.sigma1().dim();
  const int rank = difference_rank(pop);
  if (k < 1 || k > rank) {
    throw ParameterError("omega_sq: k=" + std::to_string(k) + " outside [1, rank] with rank " +
                         std::to_string(rank));
  }
  const auto spec = truncated_svd(pop.difference(), p);
  const double next = (k < p) ? spec.values(k) : 0.0;
  if (spec.values(k - 1) - next <= kEigenGapTolerance) {
    throw IllPosedSubspaceError("omega_sq: singular values " + std::to_string(k) + " and " +
                                std::to_string(k + 1) + " are not separated");
  }
  const Eigen::MatrixXd U = spec.left_vectors.leftCols(k);
  const Eigen::MatrixXd V = spec.right_vectors.leftCols(k);
  auto trace_of_square = [&](const SymmetricMatrix& sigma) {
    const Eigen::MatrixXd m = U.transpose() * sigma.entries() * V;
    return (m * m).trace();
  };
  return 2.0 * (pop.r1() * trace_of_square(pop.sigma1()) + pop.r2() * trace_of_square(pop.sigma2()));
}

SNRProfile snr_k(const PopulationPair& pop, int k) {
  SNRProfile out;
  out.k = k;
  out.omega_sq = omega_sq(pop, k);
  out.kyfan_signal = ky_fan_norm(pop.difference(), k);
  out.snr = out.kyfan_signal / std::sqrt(out.omega_sq);
  return out;
}

double Increments::threshold() const { return std::sqrt(gamma + 1.0) - 1.0; }

Increments increments(const PopulationPair& pop, int k1, int k2) {
  if (!(k1 >= 1 && k1 < k2)) throw ParameterError("increments: need 1 <= k1 < k2");
  const SymmetricMatrix diff = pop.difference();
  const double s1 = ky_fan_norm(diff, k1);
  if (!(s1 > 0.0)) throw UndefinedRatioError("increments: zero Ky-Fan signal at k1");
  const double s2 = ky_fan_norm(diff, k2);
  const double w1 = omega_sq(pop, k1);
  const double w2 = omega_sq(pop, k2);
  Increments out;
  out.beta = (s2 - s1) / s1;
  out.gamma = (w2 - w1) / w1;
  out.snr_k2_at_least_k1 = out.beta >= out.threshold();
  return out;
}

PopulationPair crossover_example(double c, int p) {
  if (p < 2) throw ParameterError("crossover example needs p >= 2");
  if (!(c > 0.0)) throw ParameterError("crossover example needs c > 0");
  Eigen::VectorXd bump = Eigen::VectorXd::Zero(p);
  bump(0) = 4.0;
  bump(1) = 1.0;
  const Eigen::VectorXd base = Eigen::VectorXd::Constant(p, c);
  return PopulationPair(SymmetricMatrix::diagonal(base), SymmetricMatrix::diagonal(base + bump));
}

}  // namespace ract
