#include "ract/permutation.hpp"

#include "ract/error.hpp"
#include "ract/matrix_core.hpp"
#include "ract/parallel.hpp"
#include "ract/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ract {

std::vector<int> draw_split(int n, int n1, std::uint64_t master_seed, std::uint64_t replicate) {
  if (n1 < 0 || n1 > n) throw ParameterError("draw_split: n1 outside [0, n]");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Engine eng = make_stream(master_seed, {kPermutationStream, replicate});
  for (int i = 0; i < n1; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(eng))]);
  }
  std::sort(idx.begin(), idx.begin() + n1);
  std::sort(idx.begin() + n1, idx.end());
  return idx;
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& src, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
  }
  return out;
}

}  // namespace

TwoSampleDataset permute_labels(const TwoSampleDataset& d, std::uint64_t replicate,
                                std::uint64_t master_seed) {
  const auto split = draw_split(static_cast<int>(d.n()), static_cast<int>(d.n1()), master_seed,
                                replicate);
  const Eigen::MatrixXd stacked = d.stacked();
  const std::span<const int> all(split);
  return TwoSampleDataset(gather_rows(stacked, all.first(static_cast<std::size_t>(d.n1()))),
                          gather_rows(stacked, all.subspan(static_cast<std::size_t>(d.n1()))),
                          d.feature_names());
}

PermutationNull PermutationNull::from_replicates(Family family, int first_index,
                                                 Eigen::MatrixXd table,
                                                 std::uint64_t master_seed) {
  if (table.rows() < 2) throw ParameterError("permutation null needs B >= 2 replicates");
  PermutationNull out;
  out.family = family;
  out.first_index = first_index;
  out.master_seed = master_seed;
  out.replicates = std::move(table);
  const auto B = static_cast<double>(out.replicates.rows());
  out.means = out.replicates.colwise().mean().transpose();
  out.sds.resize(out.replicates.cols());
  out.degenerate.assign(static_cast<std::size_t>(out.replicates.cols()), false);
  for (Eigen::Index c = 0; c < out.replicates.cols(); ++c) {
    const double ss = (out.replicates.col(c).array() - out.means(c)).square().sum();
    out.sds(c) = std::sqrt(ss / (B - 1.0));
    const double scale = 1.0 + std::abs(out.means(c));
    out.degenerate[static_cast<std::size_t>(c)] = !(out.sds(c) > 1e-14 * scale);
  }
  return out;
}

const PermutationNull& NullDistribution::at(Family f) const {
  const auto it = tables.find(f);
  if (it == tables.end()) throw ParameterError("null distribution lacks family " + family_name(f));
  return it->second;
}

// -- split evaluation --------------------------------------------------------

namespace {

struct SplitRow {
  std::vector<double> kyfan;
  double frobenius = 0.0;
  double max_elementwise = 0.0;
  bool floored = false;
  double trace = 0.0;
  std::vector<double> superdiag;
};

class SplitEvaluator {
 public:
  SplitEvaluator(const TwoSampleDataset& d, const FamilySet& families)
      : stacked_(d.stacked()), n1_(d.n1()), families_(families), kernel_(stacked_) {
    if (families_.kyfan_columns > kernel_.rank_bound()) {
      throw ParameterError("Ky-Fan grid size " + std::to_string(families_.kyfan_columns) +
                           " exceeds min(n, p) = " + std::to_string(kernel_.rank_bound()));
    }
    if (families_.superdiag_max_q > d.dim() - 1) {
      throw ParameterError("superdiagonal grid exceeds p - 1");
    }
    if (families_.max_elementwise && (d.n1() < 4 || d.n2() < 4)) {
      throw InsufficientDataError("max elementwise statistic needs n1, n2 >= 4");
    }
  }

  bool needs_kernel() const {
    return families_.kyfan_columns > 0 || families_.frobenius || families_.trace;
  }
  bool needs_entries() const { return families_.max_elementwise || families_.superdiag_max_q >= 0; }

  SplitRow evaluate(std::span<const int> split) const {
    const auto rows1 = split.first(static_cast<std::size_t>(n1_));
    const auto rows2 = split.subspan(static_cast<std::size_t>(n1_));
    SplitRow row;
    if (needs_kernel()) {
      DifferenceKernel::Workspace ws;
      const auto res = kernel_.evaluate(rows1, rows2, ws);
      row.kyfan.resize(static_cast<std::size_t>(families_.kyfan_columns));
      double acc = 0.0;
      for (int k = 0; k < families_.kyfan_columns; ++k) {
        acc += res.singular_values(k);
        row.kyfan[static_cast<std::size_t>(k)] = acc;
      }
      row.frobenius = res.frobenius;
      row.trace = trace_stat_from_moments(res.trace1, res.trace_sq1,
                                          static_cast<Eigen::Index>(rows1.size()), res.trace2,
                                          res.trace_sq2, static_cast<Eigen::Index>(rows2.size()),
                                          kernel_.dim());
    }
    if (needs_entries()) {
      const Eigen::MatrixXd g1 = gather_rows(stacked_, rows1);
      const Eigen::MatrixXd g2 = gather_rows(stacked_, rows2);
      if (families_.superdiag_max_q >= 0) {
        row.superdiag = superdiag_grid(covariance_difference(g1, g2), families_.superdiag_max_q);
      }
      if (families_.max_elementwise) {
        const auto clx = max_elementwise_stat(g1, g2);
        row.max_elementwise = clx.value;
        row.floored = clx.floored;
      }
    }
    return row;
  }

  std::vector<int> identity_split() const {
    std::vector<int> out(static_cast<std::size_t>(stacked_.rows()));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }

 private:
  Eigen::MatrixXd stacked_;
  Eigen::Index n1_;
  FamilySet families_;
  DifferenceKernel kernel_;
};

}  // namespace

std::map<Family, StatisticVector> observe(const TwoSampleDataset& d, const FamilySet& families) {
  const SplitEvaluator eval(d, families);
  const auto split = eval.identity_split();
  const SplitRow row = eval.evaluate(split);
  std::map<Family, StatisticVector> out;
  if (families.kyfan_columns > 0) out[Family::kKyFanGrid] = {Family::kKyFanGrid, 1, row.kyfan};
  if (families.frobenius) out[Family::kFrobenius] = {Family::kFrobenius, 0, {row.frobenius}};
  if (families.max_elementwise) {
    out[Family::kMaxElementwise] = {Family::kMaxElementwise, 0, {row.max_elementwise}};
  }
  if (families.trace) out[Family::kTrace] = {Family::kTrace, 0, {row.trace}};
  if (families.superdiag_max_q >= 0) {
    out[Family::kSuperdiagGrid] = {Family::kSuperdiagGrid, 0, row.superdiag};
  }
  return out;
}

NullDistribution build_null(const TwoSampleDataset& d, int B, const FamilySet& families,
                            std::uint64_t master_seed, int workers) {
  if (B < 2) throw ParameterError("build_null: B must be >= 2");
  const SplitEvaluator eval(d, families);
  const auto Bz = static_cast<Eigen::Index>(B);

  Eigen::MatrixXd kyfan(Bz, families.kyfan_columns);
  Eigen::MatrixXd frob(Bz, 1), clx(Bz, 1), trace(Bz, 1);
  Eigen::MatrixXd superdiag(Bz, std::max(0, families.superdiag_max_q + 1));
  std::vector<char> floored(static_cast<std::size_t>(B), 0);

  const int n = static_cast<int>(d.n());
  const int n1 = static_cast<int>(d.n1());
  parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b) {
    const auto split = draw_split(n, n1, master_seed, static_cast<std::uint64_t>(b + 1));
    const SplitRow row = eval.evaluate(split);
    const auto r = static_cast<Eigen::Index>(b);
    for (int k = 0; k < families.kyfan_columns; ++k) kyfan(r, k) = row.kyfan[static_cast<std::size_t>(k)];
    frob(r, 0) = row.frobenius;
    clx(r, 0) = row.max_elementwise;
    trace(r, 0) = row.trace;
    for (std::size_t q = 0; q < row.superdiag.size(); ++q) {
      superdiag(r, static_cast<Eigen::Index>(q)) = row.superdiag[q];
    }
    floored[b] = row.floored ? 1 : 0;
  });

  NullDistribution out;
  auto add = [&](Family f, int first, Eigen::MatrixXd table) {
    out.tables.emplace(f, PermutationNull::from_replicates(f, first, std::move(table), master_seed));
  };
  if (families.kyfan_columns > 0) add(Family::kKyFanGrid, 1, std::move(kyfan));
  if (families.frobenius) add(Family::kFrobenius, 0, std::move(frob));
  if (families.max_elementwise) add(Family::kMaxElementwise, 0, std::move(clx));
  if (families.trace) add(Family::kTrace, 0, std::move(trace));
  if (families.superdiag_max_q >= 0) add(Family::kSuperdiagGrid, 0, std::move(superdiag));

  const auto n_floored = std::count(floored.begin(), floored.end(), 1);
  if (n_floored > 0) {
    out.warnings.push_back("max elementwise statistic: variance floor applied in " +
                           std::to_string(n_floored) + " replicate(s)");
  }
  return out;
}

// -- p-values ----------------------------------------------------------------

double permutation_p_value(double observed, std::span<const double> replicates) {
  if (replicates.empty()) throw ParameterError("permutation_p_value: B must be >= 1");
  const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                    [observed](double r) { return r >= observed; });
  return static_cast<double>(1 + exceed) / static_cast<double>(replicates.size() + 1);
}

namespace {

int resolve_columns(const PermutationNull& null, int columns) {
  if (columns < 0) return null.columns();
  if (columns == 0 || columns > null.columns()) {
    throw ParameterError("requested " + std::to_string(columns) + " columns, null has " +
                         std::to_string(null.columns()));
  }
  return columns;
}

void check_grid(const StatisticVector& observed, const PermutationNull& null, int columns) {
  if (observed.family != null.family || observed.first_index != null.first_index ||
      observed.size() < columns) {
    throw ParameterError("observed statistic does not cover the null grid");
  }
}

}  // namespace

RactMaxResult t_ract(const StatisticVector& observed, const PermutationNull& null, int columns) {
  const int m = resolve_columns(null, columns);
  check_grid(observed, null, m);
  std::vector<int> active;
  RactMaxResult out;
  for (int c = 0; c < m; ++c) {
    if (null.degenerate[static_cast<std::size_t>(c)]) {
      out.dropped.push_back(null.first_index + c);
    } else {
      active.push_back(c);
    }
  }
  if (active.empty()) {
    throw DegenerateInputError("every null column has zero standard deviation");
  }
  auto standardized_max = [&](auto value_of) {
    double best = -std::numeric_limits<double>::infinity();
    for (int c : active) best = std::max(best, (value_of(c) - null.means(c)) / null.sds(c));
    return best;
  };
  out.observed = standardized_max([&](int c) { return observed.values[static_cast<std::size_t>(c)]; });
  out.replicates.resize(static_cast<std::size_t>(null.B()));
  for (int b = 0; b < null.B(); ++b) {
    out.replicates[static_cast<std::size_t>(b)] =
        standardized_max([&](int c) { return null.replicates(b, c); });
  }
  return out;
}

PermutationNull with_observed_moments(const StatisticVector& observed, const PermutationNull& null) {
  const int m = null.columns();
  check_grid(observed, null, m);
  Eigen::MatrixXd pool(null.B() + 1, m);
  pool.topRows(null.B()) = null.replicates;
  for (int c = 0; c < m; ++c) pool(null.B(), c) = observed.values[static_cast<std::size_t>(c)];
  const PermutationNull moments =
      PermutationNull::from_replicates(null.family, null.first_index, std::move(pool), null.master_seed);
  PermutationNull out = null;
  out.means = moments.means;
  out.sds = moments.sds;
  out.degenerate = moments.degenerate;
  return out;
}

std::vector<double> per_index_pvalues(const StatisticVector& observed, const PermutationNull& null,
                                      int columns) {
  const int m = resolve_columns(null, columns);
  check_grid(observed, null, m);
  std::vector<double> out(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    const auto col = null.replicates.col(c);
    out[static_cast<std::size_t>(c)] = permutation_p_value(
        observed.values[static_cast<std::size_t>(c)],
        std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  }
  return out;
}

double minp_observed(std::span<const double> per_index_pvalues) {
  if (per_index_pvalues.empty()) throw ParameterError("minp_observed: empty p-value set");
  return *std::min_element(per_index_pvalues.begin(), per_index_pvalues.end());
}

std::vector<double> minp_replicates(const PermutationNull& null, int columns) {
  const int m = resolve_columns(null, columns);
  const int B = null.B();
  std::vector<double> out(static_cast<std::size_t>(B), std::numeric_limits<double>::infinity());
  std::vector<double> sorted(static_cast<std::size_t>(B));
  for (int c = 0; c < m; ++c) {
    for (int b = 0; b < B; ++b) sorted[static_cast<std::size_t>(b)] = null.replicates(b, c);
    std::sort(sorted.begin(), sorted.end());
    for (int b = 0; b < B; ++b) {
      const double x = null.replicates(b, c);
      // #{b1 : T^(b1) >= x} counts b itself once, which stands in for the "+1".
      const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), x);
      const double p = static_cast<double>(ge) / static_cast<double>(B);
      auto& slot = out[static_cast<std::size_t>(b)];
      slot = std::min(slot, p);
    }
  }
  return out;
}

double minp_p_value(double minp_obs, std::span<const double> minp_reps) {
  if (minp_reps.empty()) throw ParameterError("minp_p_value: B must be >= 1");
  const auto hits = std::count_if(minp_reps.begin(), minp_reps.end(),
                                  [minp_obs](double r) { return r <= minp_obs; });
  return static_cast<double>(1 + hits) / static_cast<double>(minp_reps.size() + 1);
}

// -- end-to-end --------------------------------------------------------------

Eigen::VectorXd pooled_spectrum(const TwoSampleDataset& d, PooledCentering centering) {
  Eigen::MatrixXd rows = d.stacked();
  if (centering == PooledCentering::kPerGroup) {
    rows.topRows(d.n1()) = center_columns(d.group1());
    rows.bottomRows(d.n2()) = center_columns(d.group2());
  }
  rows = center_columns(rows);
  Eigen::MatrixXd core;
  if (rows.cols() <= rows.rows()) {
    core = rows.transpose() * rows;
  } else {
    core = rows * rows.transpose();  // same non-zero spectrum, n x n
  }
  core /= static_cast<double>(d.n() - 1);
  Eigen::VectorXd values = singular_values_symmetric(core);
  const auto cap = std::min(d.n(), d.dim());
  return values.head(cap);
}

TestReport run_test(const TwoSampleDataset& input, const TestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.B < 2) throw ParameterError("run_test: B must be >= 2");

  TestReport report;
  report.n1 = input.n1();
  report.n2 = input.n2();
  report.p = input.dim();
  report.B = options.B;
  report.master_seed = options.master_seed;
  report.k_cutoff = options.k_cutoff;

  const Eigen::VectorXd spectrum = pooled_spectrum(input, options.centering);
  const int cap = static_cast<int>(std::min(input.n(), input.dim()));
  if (options.K_override) {
    if (*options.K_override < 1 || *options.K_override > cap) {
      throw ParameterError("K must lie in [1, min(n, p)]");
    }
    report.K = *options.K_override;
  } else {
    report.K = select_K(std::span<const double>(spectrum.data(), static_cast<std::size_t>(spectrum.size())),
                        options.k_cutoff, cap);
  }
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(spectrum.size(), report.K + 5); ++j) {
    report.pooled_spectrum_head.push_back(spectrum(j));
  }

  const TwoSampleDataset d = options.center_groups ? center_by_group(input) : input;

  FamilySet families;
  families.kyfan_columns = report.K;
  for (int k : options.extra_k) {
    if (k < 1) throw ParameterError("Ky-Fan index must be >= 1");
    families.kyfan_columns = std::max(families.kyfan_columns, std::min(k, cap));
  }
  if (options.baselines) {
    families.frobenius = true;
    families.trace = true;
    families.max_elementwise = d.n1() >= 4 && d.n2() >= 4;
    families.superdiag_max_q =
        options.superdiag_max_q >= 0 ? options.superdiag_max_q : default_superdiag_max_q(d.dim());
    if (!families.max_elementwise) {
      report.warnings.push_back("max elementwise baseline skipped: needs n1, n2 >= 4");
    }
  }

  const auto observed = observe(d, families);
  const NullDistribution null =
      build_null(d, options.B, families, options.master_seed, options.workers);
  report.warnings.insert(report.warnings.end(), null.warnings.begin(), null.warnings.end());

  const auto& kyfan_obs = observed.at(Family::kKyFanGrid);
  const auto& kyfan_null = null.at(Family::kKyFanGrid);
  report.observed_kyfan = kyfan_obs;

  try {
    const auto ract =
        options.pool_observed_moments
            ? t_ract(kyfan_obs, with_observed_moments(kyfan_obs, kyfan_null), report.K)
            : t_ract(kyfan_obs, kyfan_null, report.K);
    report.t_ract = ract.observed;
    report.p_ract = permutation_p_value(ract.observed, ract.replicates);
    report.dropped_k = ract.dropped;
    for (int k : ract.dropped) {
      report.warnings.push_back("Ky-Fan(" + std::to_string(k) +
                                ") dropped from standardized max: zero null standard deviation");
    }
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError(
        "all Ky-Fan null columns are degenerate; the data carry no permutation variability");
  }

  report.kyfan_pvalues = per_index_pvalues(kyfan_obs, kyfan_null);
  report.per_k_pvalues.assign(report.kyfan_pvalues.begin(),
                              report.kyfan_pvalues.begin() + report.K);
  report.minp_observed = minp_observed(report.per_k_pvalues);
  report.p_minp = minp_p_value(report.minp_observed, minp_replicates(kyfan_null, report.K));

  auto single = [&](Family f, const std::string& name) {
    if (!null.has(f)) return;
    const auto& obs = observed.at(f);
    const auto& table = null.at(f);
    const auto col = table.replicates.col(0);
    report.baseline_observed[name] = obs.values[0];
    report.baseline_pvalues[name] = permutation_p_value(
        obs.values[0], std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  };
  single(Family::kFrobenius, "Frobenius");
  single(Family::kMaxElementwise, "CLX");
  single(Family::kTrace, "SY");
  if (null.has(Family::kSuperdiagGrid)) {
    const auto& obs = observed.at(Family::kSuperdiagGrid);
    const auto& table = null.at(Family::kSuperdiagGrid);
    const auto ps = per_index_pvalues(obs, table);
    const double obs_min = minp_observed(ps);
    report.baseline_observed["HC"] = obs_min;
    report.baseline_pvalues["HC"] = minp_p_value(obs_min, minp_replicates(table));
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ract
