#pragma once

#include "ract/matrix_core.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ract {

/// Two groups of p-dimensional observations, one row per subject.
class TwoSampleDataset {
 public:
  /// Throws DataError on a dimension mismatch, n_g < 2, non-finite entries
  /// or a feature_names length different from p.
  TwoSampleDataset(Eigen::MatrixXd group1, Eigen::MatrixXd group2,
                   std::vector<std::string> feature_names = {});

  const Eigen::MatrixXd& group1() const noexcept { return group1_; }
  const Eigen::MatrixXd& group2() const noexcept { return group2_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  Eigen::Index dim() const noexcept { return group1_.cols(); }
  Eigen::Index n1() const noexcept { return group1_.rows(); }
  Eigen::Index n2() const noexcept { return group2_.rows(); }
  Eigen::Index n() const noexcept { return n1() + n2(); }

  /// Rows of group1 followed by rows of group2.
  Eigen::MatrixXd stacked() const;

 private:
  Eigen::MatrixXd group1_;
  Eigen::MatrixXd group2_;
  std::vector<std::string> feature_names_;
};

/// Per-group covariate design (n x q) used for residualization.
class CovariateMatrix {
 public:
  explicit CovariateMatrix(Eigen::MatrixXd design);

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  Eigen::Index rows() const noexcept { return design_.rows(); }
  Eigen::Index cols() const noexcept { return design_.cols(); }

 private:
  Eigen::MatrixXd design_;
};

enum class PooledCentering {
  kPerGroup,  // subtract each group's own mean before stacking
  kGlobal,    // subtract the mean of all stacked observations
};

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& x);

TwoSampleDataset center_by_group(const TwoSampleDataset& d);

/// X - C (C^T C)^{-1} C^T X. Throws SingularDesignError when C is rank deficient.
Eigen::MatrixXd residualize(const Eigen::MatrixXd& x, const CovariateMatrix& c);

/// Unbiased (n-1 divisor) sample covariance. Throws InsufficientDataError for n < 2.
SymmetricMatrix sample_covariance(const Eigen::MatrixXd& x);

SymmetricMatrix pooled_covariance(const TwoSampleDataset& d,
                                  PooledCentering centering = PooledCentering::kPerGroup);

}  // namespace ract
