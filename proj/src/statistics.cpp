#include "ract/statistics.hpp"

#include "ract/error.hpp"
#include "ract/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ract {

std::string family_name(Family f) {
  switch (f) {
    case Family::kKyFanGrid: return "KYFAN_GRID";
    case Family::kFrobenius: return "FROBENIUS";
    case Family::kMaxElementwise: return "MAX_ELEMENTWISE";
    case Family::kSuperdiagGrid: return "SUPERDIAG_GRID";
    case Family::kTrace: return "TRACE";
  }
  return "UNKNOWN";
}

double StatisticVector::at(int index) const {
  if (index < first_index || index > last_index()) {
    throw ParameterError("statistic index " + std::to_string(index) + " outside [" +
                         std::to_string(first_index) + ", " + std::to_string(last_index()) + "]");
  }
  return values[static_cast<std::size_t>(index - first_index)];
}

// -- DifferenceKernel --------------------------------------------------------

DifferenceKernel::DifferenceKernel(const Eigen::MatrixXd& rows) : dim_(rows.cols()) {
  if (!rows.allFinite()) throw DataError("difference kernel: non-finite data");
  if (rows.cols() <= rows.rows()) {
    factor_ = rows;
  } else {
    // rows^T = Q R, so rows = R^T Q^T and R^T carries all the information.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
    const Eigen::Index n = rows.rows();
    factor_ = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
  }
}

void DifferenceKernel::group_core(std::span<const int> idx, Eigen::MatrixXd& gather,
                                  Eigen::MatrixXd& core) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index r = factor_.cols();
  gather.resize(m, r);
  for (Eigen::Index i = 0; i < m; ++i) gather.row(i) = factor_.row(idx[static_cast<std::size_t>(i)]);
  const Eigen::RowVectorXd mean = gather.colwise().mean();
  gather.rowwise() -= mean;
  core.setZero(r, r);
  core.selfadjointView<Eigen::Lower>().rankUpdate(gather.transpose(),
                                                  1.0 / static_cast<double>(m - 1));
}

namespace {

// Frobenius norm squared of a symmetric matrix stored in its lower triangle.
double lower_frobenius_sq(const Eigen::MatrixXd& lower) {
  const double diag = lower.diagonal().squaredNorm();
  const double off = lower.triangularView<Eigen::StrictlyLower>().toDenseMatrix().squaredNorm();
  return diag + 2.0 * off;
}

}  // namespace

DifferenceKernel::Result DifferenceKernel::evaluate(std::span<const int> rows1,
                                                    std::span<const int> rows2,
                                                    Workspace& ws) const {
  if (rows1.size() < 2 || rows2.size() < 2) {
    throw InsufficientDataError("difference kernel needs at least 2 rows per group");
  }
  group_core(rows1, ws.gather, ws.core1);
  group_core(rows2, ws.gather, ws.core2);

  Result out;
  out.trace1 = ws.core1.diagonal().sum();
  out.trace2 = ws.core2.diagonal().sum();
  out.trace_sq1 = lower_frobenius_sq(ws.core1);
  out.trace_sq2 = lower_frobenius_sq(ws.core2);

  ws.core1 -= ws.core2;  // lower triangle now holds the difference core
  out.frobenius = std::sqrt(lower_frobenius_sq(ws.core1));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ws.core1, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("difference kernel: eigensolver failed");
  out.singular_values = solver.eigenvalues().cwiseAbs();
  std::sort(out.singular_values.data(), out.singular_values.data() + out.singular_values.size(),
            std::greater<double>());
  return out;
}

// -- Ky-Fan grid -------------------------------------------------------------

namespace {

std::vector<int> iota_rows(int begin, int end) {
  std::vector<int> out(static_cast<std::size_t>(end - begin));
  std::iota(out.begin(), out.end(), begin);
  return out;
}

}  // namespace

StatisticVector t_k_grid(const TwoSampleDataset& d, int K) {
  const auto cap = std::min<Eigen::Index>(d.n(), d.dim());
  if (K < 1 || K > cap) {
    throw ParameterError("t_k_grid: K=" + std::to_string(K) + " outside [1, " +
                         std::to_string(cap) + "]");
  }
  const DifferenceKernel kernel(d.stacked());
  DifferenceKernel::Workspace ws;
  const auto rows1 = iota_rows(0, static_cast<int>(d.n1()));
  const auto rows2 = iota_rows(static_cast<int>(d.n1()), static_cast<int>(d.n()));
  const auto res = kernel.evaluate(rows1, rows2, ws);

  StatisticVector out{Family::kKyFanGrid, 1, {}};
  out.values.reserve(static_cast<std::size_t>(K));
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    if (k < res.singular_values.size()) acc += res.singular_values(k);
    out.values.push_back(acc);
  }
  return out;
}

// -- entrywise baselines -----------------------------------------------------

Eigen::MatrixXd covariance_difference(const Eigen::MatrixXd& group1,
                                      const Eigen::MatrixXd& group2) {
  return sample_covariance(group1).entries() - sample_covariance(group2).entries();
}

double frobenius_stat(const TwoSampleDataset& d) {
  return covariance_difference(d.group1(), d.group2()).norm();
}

namespace {

struct CrossProductMoments {
  Eigen::MatrixXd cov;    // divisor n-1
  Eigen::MatrixXd theta;  // variance of centered cross-products, divisor n
};

CrossProductMoments cross_product_moments(const Eigen::MatrixXd& x) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::MatrixXd c = center_columns(x);
  const Eigen::MatrixXd sq = c.cwiseProduct(c);
  Eigen::MatrixXd gram = c.transpose() * c;
  CrossProductMoments out;
  const Eigen::MatrixXd mean_cross = gram / n;
  out.theta = (sq.transpose() * sq) / n - mean_cross.cwiseProduct(mean_cross);
  out.cov = gram / (n - 1.0);
  return out;
}

}  // namespace

MaxElementwiseResult max_elementwise_stat(const Eigen::MatrixXd& group1,
                                          const Eigen::MatrixXd& group2) {
  if (group1.rows() < 4 || group2.rows() < 4) {
    throw InsufficientDataError("max_elementwise_stat needs n1, n2 >= 4");
  }
  if (group1.cols() != group2.cols()) throw DataError("max_elementwise_stat: dimension mismatch");
  const auto m1 = cross_product_moments(group1);
  const auto m2 = cross_product_moments(group2);
  const auto n1 = static_cast<double>(group1.rows());
  const auto n2 = static_cast<double>(group2.rows());

  MaxElementwiseResult out;
  bool first = true;
  const Eigen::Index p = group1.cols();
  for (Eigen::Index s = 0; s < p; ++s) {
    for (Eigen::Index r = 0; r <= s; ++r) {
      const double diff = m1.cov(r, s) - m2.cov(r, s);
      double denom = m1.theta(r, s) / n1 + m2.theta(r, s) / n2;
      if (!(denom > kVarianceFloor)) {
        denom = kVarianceFloor;
        out.floored = true;
      }
      const double value = diff * diff / denom;
      if (first || value > out.value) {
        out.value = value;
        out.row = r;
        out.col = s;
        first = false;
      }
    }
  }
  return out;
}

MaxElementwiseResult max_elementwise_stat(const TwoSampleDataset& d) {
  return max_elementwise_stat(d.group1(), d.group2());
}

std::vector<double> superdiag_grid(const Eigen::MatrixXd& difference, int max_q) {
  const Eigen::Index p = difference.rows();
  if (max_q < 0 || max_q > p - 1) {
    throw ParameterError("superdiagonal q=" + std::to_string(max_q) + " outside [0, " +
                         std::to_string(p - 1) + "]");
  }
  std::vector<double> out(static_cast<std::size_t>(max_q + 1), 0.0);
  for (int q = 0; q <= max_q; ++q) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r + q < p; ++r) {
      const double v = difference(r, r + q);
      acc += v * v;
    }
    out[static_cast<std::size_t>(q)] = acc;
  }
  return out;
}

double superdiag_stat(const TwoSampleDataset& d, int q) {
  if (q < 0 || q > d.dim() - 1) {
    throw ParameterError("superdiag_stat: q=" + std::to_string(q) + " outside [0, " +
                         std::to_string(d.dim() - 1) + "]");
  }
  const auto diff = covariance_difference(d.group1(), d.group2());
  return superdiag_grid(diff, q).back();
}

int default_superdiag_max_q(Eigen::Index p) {
  const int q = static_cast<int>(std::floor(std::pow(static_cast<double>(p), 0.7)));
  return std::clamp(q, 0, static_cast<int>(p) - 1);
}

double trace_stat_from_moments(double trace1, double trace_sq1, Eigen::Index n1, double trace2,
                               double trace_sq2, Eigen::Index n2, Eigen::Index p) {
  const auto pd = static_cast<double>(p);
  const double a1 = trace_sq1 / pd - trace1 * trace1 / (pd * static_cast<double>(n1));
  const double a2 = trace_sq2 / pd - trace2 * trace2 / (pd * static_cast<double>(n2));
  return std::abs(a1 - a2);
}

double trace_stat(const TwoSampleDataset& d) {
  const auto s1 = sample_covariance(d.group1());
  const auto s2 = sample_covariance(d.group2());
  return trace_stat_from_moments(s1.entries().trace(), s1.entries().squaredNorm(), d.n1(),
                                 s2.entries().trace(), s2.entries().squaredNorm(), d.n2(),
                                 d.dim());
}

}  // namespace ract
