#pragma once

// Observed two-sample statistics: the Ky-Fan(k) grid and the baseline
// kernels (Frobenius, max standardized elementwise, superdiagonal, trace).

#include "ract/data_model.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace ract {

enum class Family { kKyFanGrid, kFrobenius, kMaxElementwise, kSuperdiagGrid, kTrace };

std::string family_name(Family f);

/// Values of one statistic family indexed by k (Ky-Fan, from 1), q
/// (superdiagonal, from 0), or a single scalar at index 0.
struct StatisticVector {
  Family family = Family::kKyFanGrid;
  int first_index = 1;
  std::vector<double> values;

  int size() const noexcept { return static_cast<int>(values.size()); }
  int last_index() const noexcept { return first_index + size() - 1; }
  /// Throws ParameterError when `index` is outside the stored range.
  double at(int index) const;
};

/// Low-rank route to the spectrum of Σ̂(A) - Σ̂(B) for row subsets A, B of a
/// fixed n x p data matrix.
///
/// The rows are factored once as Y = F Q^T with F n x r, r = min(n, p), and
/// Q orthonormal, so every group covariance becomes an r x r core
/// Q^T Σ̂ Q. Eigenvalues of the difference, Frobenius norms and traces are
/// invariant under Q, which lets every permutation work at size r.
class DifferenceKernel {
 public:
  explicit DifferenceKernel(const Eigen::MatrixXd& rows);

  struct Workspace {
    Eigen::MatrixXd gather;
    Eigen::MatrixXd core1;
    Eigen::MatrixXd core2;
  };

  struct Result {
    Eigen::VectorXd singular_values;  // length r, non-increasing
    double frobenius = 0.0;           // ||Σ̂_1 - Σ̂_2||_F
    double trace1 = 0.0, trace2 = 0.0;        // tr(Σ̂_g)
    double trace_sq1 = 0.0, trace_sq2 = 0.0;  // tr(Σ̂_g^2)
  };

  Eigen::Index rank_bound() const noexcept { return factor_.cols(); }
  Eigen::Index rows() const noexcept { return factor_.rows(); }
  Eigen::Index dim() const noexcept { return dim_; }

  /// Each index set needs at least two rows.
  Result evaluate(std::span<const int> rows1, std::span<const int> rows2, Workspace& ws) const;

 private:
  void group_core(std::span<const int> idx, Eigen::MatrixXd& gather, Eigen::MatrixXd& core) const;

  Eigen::MatrixXd factor_;
  Eigen::Index dim_ = 0;
};

/// Ky-Fan(k) norms of Σ̂_1 - Σ̂_2 for k = 1..K from a single decomposition.
/// Requires 1 <= K <= min(n1 + n2, p).
StatisticVector t_k_grid(const TwoSampleDataset& d, int K);

double frobenius_stat(const TwoSampleDataset& d);

struct MaxElementwiseResult {
  double value = 0.0;
  Eigen::Index row = 0;  // argmax position, row <= col
  Eigen::Index col = 0;
  bool floored = false;  // some denominator hit the variance floor
};

inline constexpr double kVarianceFloor = 1e-12;

MaxElementwiseResult max_elementwise_stat(const Eigen::MatrixXd& group1,
                                          const Eigen::MatrixXd& group2);
MaxElementwiseResult max_elementwise_stat(const TwoSampleDataset& d);

/// Sum of squared differences along superdiagonal q. Requires 0 <= q <= p-1.
double superdiag_stat(const TwoSampleDataset& d, int q);

/// superdiag_stat for q = 0..max_q from one difference matrix.
std::vector<double> superdiag_grid(const Eigen::MatrixXd& difference, int max_q);

/// Default number of superdiagonals beyond the diagonal: floor(p^0.7).
int default_superdiag_max_q(Eigen::Index p);

/// |a_1 - a_2| with a_g = tr(Σ̂_g^2)/p - tr(Σ̂_g)^2 / (p n_g).
double trace_stat(const TwoSampleDataset& d);
double trace_stat_from_moments(double trace1, double trace_sq1, Eigen::Index n1, double trace2,
                               double trace_sq2, Eigen::Index n2, Eigen::Index p);

/// Sample covariance difference Σ̂_1 - Σ̂_2 as a dense matrix.
Eigen::MatrixXd covariance_difference(const Eigen::MatrixXd& group1,
                                      const Eigen::MatrixXd& group2);

}  // namespace ract
