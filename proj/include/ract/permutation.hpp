#pragma once

// Label permutation, permutation null distributions, the standardized-max
// RACT statistic, single-statistic p-values and the leave-one-out min-p
// combination.

#include "ract/data_model.hpp"
#include "ract/statistics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ract {

/// Row indices 0..n-1 split into group 1 (first n1 entries) and group 2 (the
/// rest), each part sorted ascending. The split is uniform over all
/// C(n, n1) subsets and depends only on (master_seed, replicate).
std::vector<int> draw_split(int n, int n1, std::uint64_t master_seed, std::uint64_t replicate);

/// Relabels the stacked rows of `d` with split `replicate` (1-based).
TwoSampleDataset permute_labels(const TwoSampleDataset& d, std::uint64_t replicate,
                                std::uint64_t master_seed);

/// B x m table of permuted statistics for one family, with column moments.
struct PermutationNull {
  Family family = Family::kKyFanGrid;
  int first_index = 1;
  Eigen::MatrixXd replicates;  // B x m
  Eigen::VectorXd means;
  Eigen::VectorXd sds;         // sample standard deviations (divisor B-1)
  std::vector<bool> degenerate;
  std::uint64_t master_seed = 0;

  int B() const noexcept { return static_cast<int>(replicates.rows()); }
  int columns() const noexcept { return static_cast<int>(replicates.cols()); }

  /// Fills means/sds/degenerate from the table. Requires at least 2 rows.
  static PermutationNull from_replicates(Family family, int first_index, Eigen::MatrixXd table,
                                         std::uint64_t master_seed);
};

struct FamilySet {
  int kyfan_columns = 0;     // Ky-Fan(1..m); 0 disables the family
  bool frobenius = false;
  bool max_elementwise = false;
  bool trace = false;
  int superdiag_max_q = -1;  // q = 0..max_q; negative disables the family
};

struct NullDistribution {
  std::map<Family, PermutationNull> tables;
  std::vector<std::string> warnings;

  const PermutationNull& at(Family f) const;
  bool has(Family f) const { return tables.count(f) != 0; }
};

/// Observed statistics for the families in `families`, computed through the
/// same kernels as the permuted replicates.
std::map<Family, StatisticVector> observe(const TwoSampleDataset& d, const FamilySet& families);

/// Builds B permuted replicates. K (the Ky-Fan grid size) is fixed by the
/// caller from the unpermuted data and never recomputed per replicate.
/// Replicate b uses split draw_split(n, n1, master_seed, b) for b = 1..B.
/// Results are identical for every worker count.
NullDistribution build_null(const TwoSampleDataset& d, int B, const FamilySet& families,
                            std::uint64_t master_seed, int workers = 1);

/// (1 + #{b : replicate_b >= observed}) / (B + 1).
double permutation_p_value(double observed, std::span<const double> replicates);

struct RactMaxResult {
  double observed = 0.0;
  std::vector<double> replicates;
  std::vector<int> dropped;  // grid indices excluded for zero null sd
};

/// Standardized maximum over the first `columns` grid entries (all when
/// negative), using the null means/sds for the observed value and for every
/// replicate alike. Throws DegenerateInputError when every column is
/// degenerate.
RactMaxResult t_ract(const StatisticVector& observed, const PermutationNull& null,
                     int columns = -1);

/// Copy of `null` whose means/sds are taken over the B replicates plus the
/// observed values, so the observed and replicate standardized maxima are
/// exchangeable. Replicates are unchanged.
PermutationNull with_observed_moments(const StatisticVector& observed, const PermutationNull& null);

/// Per-column permutation p-values p_k = (1 + #{b: T_k^(b) >= T_k}) / (B + 1).
std::vector<double> per_index_pvalues(const StatisticVector& observed, const PermutationNull& null,
                                      int columns = -1);

double minp_observed(std::span<const double> per_index_pvalues);

/// Leave-one-out replicate min-p values,
/// p_k^(b) = (1 + #{b1 != b : T_k^(b1) >= T_k^(b)}) / B.
std::vector<double> minp_replicates(const PermutationNull& null, int columns = -1);

/// (1 + #{b : minp^(b) <= minp_observed}) / (B + 1).
double minp_p_value(double minp_obs, std::span<const double> minp_reps);

// -- end-to-end test ---------------------------------------------------------

struct TestOptions {
  int B = 1000;
  std::uint64_t master_seed = 0;
  double k_cutoff = 0.8;
  std::optional<int> K_override;
  std::vector<int> extra_k;        // single Ky-Fan(k) tests reported beyond the RACT grid
  bool baselines = true;
  int superdiag_max_q = -1;        // -1 selects floor(p^0.7)
  PooledCentering centering = PooledCentering::kPerGroup;
  // Pre-centering each observed group before permuting breaks exchangeability
  // (inflated size at small n); permuted groups re-center on their own means.
  bool center_groups = false;
  // Standardize T_RACT with moments over B replicates + observed (exact size).
  // false uses the B replicates alone, which is liberal at small B.
  bool pool_observed_moments = true;
  int workers = 1;
};

struct TestReport {
  Eigen::Index n1 = 0, n2 = 0, p = 0;
  int K = 0;
  double k_cutoff = 0.8;
  std::vector<double> pooled_spectrum_head;  // top singular values of the pooled covariance
  StatisticVector observed_kyfan;            // Ky-Fan(1..m), m >= K
  double t_ract = 0.0;
  double p_ract = 1.0;
  double minp_observed = 1.0;
  double p_minp = 1.0;
  std::vector<double> per_k_pvalues;         // k = 1..K
  std::vector<double> kyfan_pvalues;         // k = 1..m
  std::map<std::string, double> baseline_observed;
  std::map<std::string, double> baseline_pvalues;
  std::vector<int> dropped_k;
  std::vector<std::string> warnings;
  int B = 0;
  std::uint64_t master_seed = 0;
  double runtime_seconds = 0.0;
};

/// Singular values of the pooled covariance (non-increasing, length
/// min(n, p)).
Eigen::VectorXd pooled_spectrum(const TwoSampleDataset& d, PooledCentering centering);

/// Runs the full permutation test: K from the pooled spectrum, B replicates,
/// RACT (standardized max and min-p), per-k and baseline p-values.
TestReport run_test(const TwoSampleDataset& d, const TestOptions& options);

}  // namespace ract
