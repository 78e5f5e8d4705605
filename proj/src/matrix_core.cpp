#include "ract/matrix_core.hpp"

#include "ract/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace ract {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols()) {
    throw DataError("symmetric matrix must be square, got " + std::to_string(entries.rows()) +
                    "x" + std::to_string(entries.cols()));
  }
  if (entries.rows() < 1) throw DataError("symmetric matrix must have dim >= 1");
  entries_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymmetricMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw DataError("dimension mismatch in symmetric difference");
  return SymmetricMatrix(a.entries_ - b.entries_);
}

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw DataError("dimension mismatch in symmetric sum");
  return SymmetricMatrix(a.entries_ + b.entries_);
}

SymmetricMatrix operator*(double c, const SymmetricMatrix& a) {
  return SymmetricMatrix(c * a.entries_);
}

namespace {

// Indices of eigenvalues ordered by decreasing magnitude; ties keep the
// larger signed value first so the ordering is deterministic.
std::vector<Eigen::Index> order_by_magnitude(const Eigen::VectorXd& eig) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(eig.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(eig(a));
    const double mb = std::abs(eig(b));
    if (ma != mb) return ma > mb;
    return eig(a) > eig(b);
  });
  return idx;
}

}  // namespace

SymmetricSpectrum truncated_svd(const SymmetricMatrix& m, Eigen::Index k) {
  const Eigen::Index p = m.dim();
  if (k < 1 || k > p) {
    throw ParameterError("truncated_svd: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(p) + "]");
  }
  if (!m.all_finite()) throw DataError("truncated_svd: matrix has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries());
  if (solver.info() != Eigen::Success) throw DataError("truncated_svd: eigensolver failed");

  const auto order = order_by_magnitude(solver.eigenvalues());
  SymmetricSpectrum out;
  out.source_dim = p;
  out.values.resize(k);
  out.signed_values.resize(k);
  out.left_vectors.resize(p, k);
  out.right_vectors.resize(p, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    const double lambda = solver.eigenvalues()(src);
    out.signed_values(j) = lambda;
    out.values(j) = std::abs(lambda);
    out.left_vectors.col(j) = solver.eigenvectors().col(src);
    out.right_vectors.col(j) = (lambda < 0.0 ? -1.0 : 1.0) * solver.eigenvectors().col(src);
  }
  return out;
}

double ky_fan_norm(const SymmetricMatrix& m, Eigen::Index k) {
  return truncated_svd(m, k).values.sum();
}

Eigen::VectorXd ky_fan_profile(const Eigen::VectorXd& singular_values) {
  Eigen::VectorXd out(singular_values.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < singular_values.size(); ++j) {
    acc += singular_values(j);
    out(j) = acc;
  }
  return out;
}

int select_K(std::span<const double> spectrum_values, double cutoff, int cap) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw ParameterError("select_K: cutoff must lie in (0,1)");
  }
  if (cap < 1) throw ParameterError("select_K: cap must be >= 1");
  double total = 0.0;
  for (double v : spectrum_values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("select_K: spectrum values must be finite and non-negative");
    }
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateInputError("select_K: spectrum has zero total mass");

  double acc = 0.0;
  const int limit = std::min<int>(cap, static_cast<int>(spectrum_values.size()));
  for (int K = 1; K <= limit; ++K) {
    acc += spectrum_values[static_cast<std::size_t>(K - 1)];
    if (acc / total > cutoff) return K;
  }
  return cap;
}

Eigen::VectorXd singular_values_symmetric(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("eigensolver failed");
  Eigen::VectorXd values = solver.eigenvalues().cwiseAbs();
  std::sort(values.data(), values.data() + values.size(), std::greater<double>());
  return values;
}

}  // namespace ract
