#include "ract/data_model.hpp"

#include "ract/error.hpp"

#include <string>
#include <utility>

namespace ract {

TwoSampleDataset::TwoSampleDataset(Eigen::MatrixXd group1, Eigen::MatrixXd group2,
                                   std::vector<std::string> feature_names)
    : group1_(std::move(group1)),
      group2_(std::move(group2)),
      feature_names_(std::move(feature_names)) {
  if (group1_.cols() != group2_.cols()) {
    throw DataError("groups have different dimensions: " + std::to_string(group1_.cols()) +
                    " vs " + std::to_string(group2_.cols()));
  }
  if (group1_.cols() < 1) throw DataError("dataset dimension must be >= 1");
  if (group1_.rows() < 2 || group2_.rows() < 2) {
    throw DataError("each group needs at least 2 observations (got n1=" +
                    std::to_string(group1_.rows()) + ", n2=" + std::to_string(group2_.rows()) +
                    ")");
  }
  if (!group1_.allFinite() || !group2_.allFinite()) {
    throw DataError("dataset contains non-finite entries");
  }
  if (!feature_names_.empty() &&
      static_cast<Eigen::Index>(feature_names_.size()) != group1_.cols()) {
    throw DataError("feature_names length does not match dimension");
  }
}

Eigen::MatrixXd TwoSampleDataset::stacked() const {
  Eigen::MatrixXd out(n(), dim());
  out.topRows(n1()) = group1_;
  out.bottomRows(n2()) = group2_;
  return out;
}

CovariateMatrix::CovariateMatrix(Eigen::MatrixXd design) : design_(std::move(design)) {
  if (design_.cols() < 1) throw DataError("covariate design needs at least one column");
  if (design_.cols() >= design_.rows()) {
    throw DataError("covariate design must have fewer columns than rows");
  }
  if (!design_.allFinite()) throw DataError("covariate design contains non-finite entries");
}

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return x.rowwise() - mean;
}

TwoSampleDataset center_by_group(const TwoSampleDataset& d) {
  return TwoSampleDataset(center_columns(d.group1()), center_columns(d.group2()),
                          d.feature_names());
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& x, const CovariateMatrix& c) {
  if (c.rows() != x.rows()) {
    throw DataError("residualize: covariate rows (" + std::to_string(c.rows()) +
                    ") do not match data rows (" + std::to_string(x.rows()) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c.design());
  qr.setThreshold(1e-10);
  if (qr.rank() < c.cols()) {
    throw SingularDesignError("residualize: covariate design is rank deficient (rank " +
                              std::to_string(qr.rank()) + " < " + std::to_string(c.cols()) +
                              ")");
  }
  // Projection onto the column space through the thin Q factor.
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(c.rows(), c.cols());
  Eigen::MatrixXd out = x - q * (q.transpose() * x);
  return out;
}

SymmetricMatrix sample_covariance(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) {
    throw InsufficientDataError("sample_covariance needs at least 2 observations");
  }
  const Eigen::MatrixXd centered = center_columns(x);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  cov /= static_cast<double>(x.rows() - 1);
  return SymmetricMatrix(cov);
}

SymmetricMatrix pooled_covariance(const TwoSampleDataset& d, PooledCentering centering) {
  if (centering == PooledCentering::kGlobal) return sample_covariance(d.stacked());
  Eigen::MatrixXd stacked(d.n(), d.dim());
  stacked.topRows(d.n1()) = center_columns(d.group1());
  stacked.bottomRows(d.n2()) = center_columns(d.group2());
  return sample_covariance(stacked);
}

}  // namespace ract
