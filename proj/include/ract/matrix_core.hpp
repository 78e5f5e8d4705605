#pragma once

// Dense symmetric-matrix primitives: truncated SVD, Ky-Fan norms and
// spectral-mass selection of the Ky-Fan grid size.

#include <Eigen/Dense>

#include <span>

namespace ract {

/// A square real matrix that is exactly symmetric.
///
/// Construction averages the input with its transpose, so entries(r,s) and
/// entries(s,r) are bit-identical afterwards.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Eigen::MatrixXd& entries);

  static SymmetricMatrix identity(Eigen::Index dim);
  static SymmetricMatrix diagonal(const Eigen::VectorXd& diag);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(Eigen::Index r, Eigen::Index s) const { return entries_(r, s); }

  bool all_finite() const { return entries_.allFinite(); }

  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator*(double c, const SymmetricMatrix& a);

 private:
  Eigen::MatrixXd entries_;
};

/// Top singular triplets of a symmetric matrix.
///
/// For a symmetric source with eigenpairs (Λ_j, u_j) the singular values are
/// |Λ_j|, the left vectors are u_j and the right vectors are sign(Λ_j) u_j
/// (sign(0) taken as +1).
struct SymmetricSpectrum {
  Eigen::VectorXd values;          // non-increasing, >= 0
  Eigen::MatrixXd left_vectors;    // p x k
  Eigen::MatrixXd right_vectors;   // p x k
  Eigen::VectorXd signed_values;   // the eigenvalues Λ_j behind values
  Eigen::Index source_dim = 0;

  Eigen::Index size() const noexcept { return values.size(); }
};

SymmetricSpectrum truncated_svd(const SymmetricMatrix& m, Eigen::Index k);

/// Sum of the k largest singular values.
double ky_fan_norm(const SymmetricMatrix& m, Eigen::Index k);

/// Running sums of a non-increasing singular-value sequence; element k-1 is
/// the Ky-Fan(k) norm.
Eigen::VectorXd ky_fan_profile(const Eigen::VectorXd& singular_values);

/// Smallest K <= cap whose top-K share of the total singular-value mass is
/// strictly greater than `cutoff`; returns `cap` when no such K exists.
int select_K(std::span<const double> spectrum_values, double cutoff, int cap);

/// Absolute eigenvalues of a symmetric matrix sorted non-increasing. Values
/// only, no vectors.
Eigen::VectorXd singular_values_symmetric(const Eigen::MatrixXd& m);

}  // namespace ract
