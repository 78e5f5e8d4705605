#pragma once

// Population signal-to-noise calculus for the Ky-Fan(k) statistics:
// asymptotic noise scale ω²_{1:k}, SNR_k, and the relative signal/noise
// increments that decide whether SNR grows from k1 to k2.

#include "ract/matrix_core.hpp"

namespace ract {

/// Two positive-definite population covariances with sample-size ratios
/// r_g = n / n_g (so 1/r1 + 1/r2 = 1).
class PopulationPair {
 public:
  PopulationPair(SymmetricMatrix sigma1, SymmetricMatrix sigma2, double r1 = 2.0, double r2 = 2.0);

  /// Ratios from group sizes.
  static PopulationPair from_sizes(SymmetricMatrix sigma1, SymmetricMatrix sigma2, long n1, long n2);

  const SymmetricMatrix& sigma1() const noexcept { return sigma1_; }
  const SymmetricMatrix& sigma2() const noexcept { return sigma2_; }
  double r1() const noexcept { return r1_; }
  double r2() const noexcept { return r2_; }

  /// Σ1 - Σ2.
  SymmetricMatrix difference() const { return sigma1_ - sigma2_; }

 private:
  SymmetricMatrix sigma1_;
  SymmetricMatrix sigma2_;
  double r1_;
  double r2_;
};

inline constexpr double kEigenGapTolerance = 1e-8;

/// ω²_{1:k} = 2 Σ_s r_s tr{(U_k^T Σ_s V_k)^2} with U_k, V_k the top-k left and
/// right singular vectors of Σ1 - Σ2 (v_j = sign(Λ_j) u_j).
///
/// Throws ParameterError for k outside [1, rank(Σ1 - Σ2)] and
/// IllPosedSubspaceError when σ_k - σ_{k+1} <= 1e-8.
double omega_sq(const PopulationPair& pop, int k);

struct SNRProfile {
  int k = 0;
  double kyfan_signal = 0.0;  // ||Σ1 - Σ2||_(k)
  double omega_sq = 0.0;
  double snr = 0.0;           // kyfan_signal / sqrt(omega_sq)
};

SNRProfile snr_k(const PopulationPair& pop, int k);

struct Increments {
  double beta = 0.0;   // relative signal increment
  double gamma = 0.0;  // relative variance increment
  bool snr_k2_at_least_k1 = false;  // beta >= sqrt(gamma + 1) - 1
  double threshold() const;          // sqrt(gamma + 1) - 1
};

/// Requires 1 <= k1 < k2 <= rank(Σ1 - Σ2). Throws UndefinedRatioError when
/// the Ky-Fan(k1) signal is zero.
Increments increments(const PopulationPair& pop, int k1, int k2);

/// Numerical rank of Σ1 - Σ2 (singular values above 1e-10 times the largest).
int difference_rank(const PopulationPair& pop);

/// Σ1 = cI, Σ2 = Σ1 + diag(4, 1, 0, ..., 0), balanced groups.
PopulationPair crossover_example(double c, int p = 6);

}  // namespace ract
