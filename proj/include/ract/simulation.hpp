#pragma once

// Scenario generators S1-S4, Gaussian sampling and the Monte Carlo drivers
// for Type I error, power curves, K-cutoff sensitivity, subsample power and
// null-distribution shape studies.

#include "ract/data_model.hpp"
#include "ract/matrix_core.hpp"
#include "ract/permutation.hpp"
#include "ract/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ract {

enum class Scenario { kS1LowRank, kS2BlockLarge, kS3BlockSmall, kS4OffDiagonal };

std::string scenario_name(Scenario s);
/// Accepts "S1".."S4" and the long names (S1_LOWRANK, ...). Throws InvalidConfigError.
Scenario parse_scenario(const std::string& text);

struct ScenarioConfig {
  Scenario scenario = Scenario::kS1LowRank;
  int p = 100;
  int n1 = 25;
  int n2 = 25;
  double tau_sq = 0.0;
  int w = 2;               // rank of each low-rank factor; ignored for S4
  std::uint64_t seed = 0;
  bool fixed_pair = false; // one covariance pair for every replicate
};

/// Throws InvalidConfigError when the configuration cannot produce valid
/// covariances (S3 with p <= 10, S4 with odd p or tau_sq >= 1, w too large).
void validate(const ScenarioConfig& cfg);

/// Top-w left singular vectors of A A^T for a dim x dim standard normal A.
Eigen::MatrixXd lowrank_factor(int dim, int w, Engine& stream);

struct CovariancePair {
  SymmetricMatrix sigma1;
  SymmetricMatrix sigma2;
};

CovariancePair build_scenario(const ScenarioConfig& cfg, Engine& stream);
CovariancePair build_scenario(const ScenarioConfig& cfg);

/// Draws rows from N(0, Σ) through the symmetric square root of Σ.
/// Eigenvalues in [-1e-8, 0) are clipped to zero; anything lower throws.
class GaussianSampler {
 public:
  explicit GaussianSampler(const SymmetricMatrix& sigma);
  Eigen::MatrixXd draw(Eigen::Index n, Engine& stream) const;
  bool clipped() const noexcept { return clipped_; }
  Eigen::Index dim() const noexcept { return root_.rows(); }

 private:
  Eigen::MatrixXd root_;
  bool clipped_ = false;
};

Eigen::MatrixXd sample_gaussian(const SymmetricMatrix& sigma, Eigen::Index n, Engine& stream);

// -- methods -----------------------------------------------------------------

enum class MethodKind { kRactMinP, kRactMax, kKyFan, kFrobenius, kClx, kHc, kSy };

struct Method {
  MethodKind kind = MethodKind::kRactMinP;
  int k = 0;  // Ky-Fan index for kKyFan

  std::string name() const;
  /// "RACT", "RACT-max", "KyFan-<k>", "Frobenius", "CLX", "HC", "SY".
  static Method parse(const std::string& text);
  bool needs_baselines() const;
  double p_value(const TestReport& report) const;
};

std::vector<Method> parse_methods(const std::string& comma_separated);

// -- experiments -------------------------------------------------------------

struct ExperimentRow {
  std::string scenario;
  std::string method;
  double grid_value = 0.0;
  double rate = 0.0;
  double se = 0.0;
  int reps = 0;
  double mean_K = 0.0;
};

struct ExperimentResult {
  std::string grid_name;  // "tau_sq", "k_cutoff" or "subsample"
  std::vector<ExperimentRow> rows;

  /// Throws ParameterError when absent.
  const ExperimentRow& find(const std::string& method, double grid_value) const;
};

struct ExperimentOptions {
  int B = 199;
  int n_datasets = 500;
  double alpha = 0.05;
  std::vector<Method> methods = {Method{}};
  double k_cutoff = 0.8;
  int workers = 1;
};

/// Rejection rates when both groups are drawn from Σ1 of the scenario.
ExperimentResult run_type1(const ScenarioConfig& cfg, const ExperimentOptions& options);

/// Rejection rates under Σ1 vs Σ2 for each tau_sq in the grid.
ExperimentResult run_power(const ScenarioConfig& cfg, const std::vector<double>& tau_grid,
                           const ExperimentOptions& options);

/// K-cutoff sensitivity: fixed scenario, varying cutoff used to select K.
ExperimentResult run_cutoff_sensitivity(const ScenarioConfig& cfg,
                                        const std::vector<double>& cutoffs,
                                        const ExperimentOptions& options);

/// Subsample power: draws `size` rows without replacement from each group of
/// `data` per replicate and tests the subsamples.
ExperimentResult run_subsample_power(const TwoSampleDataset& data, const std::vector<int>& sizes,
                                     std::uint64_t seed, const ExperimentOptions& options);

// -- null shape --------------------------------------------------------------

enum class NullCovariance { kIid, kLowRank2, kLowRank5, kOffDiagonal, kAr };

std::string null_covariance_name(NullCovariance c);
NullCovariance parse_null_covariance(const std::string& text);

/// The shared covariance of a null-shape study; low-rank and off-diagonal
/// structures use tau_sq = 0.5, AR uses Σ[r,s] = 0.8^|r-s|.
SymmetricMatrix null_covariance(NullCovariance c, int p, Engine& stream);

struct NullShapeResult {
  std::vector<int> k_list;
  Eigen::MatrixXd raw;           // n_datasets x |k_list| values of T_k
  Eigen::MatrixXd standardized;  // (T_k - mean_k) / sd_k per column
  Eigen::VectorXd means;
  Eigen::VectorXd sds;
};

NullShapeResult run_nullshape(NullCovariance covariance, const std::vector<int>& k_list, int n,
                              int p, int n_datasets, std::uint64_t seed, int workers = 1);

}  // namespace ract
