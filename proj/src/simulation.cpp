#include "ract/simulation.hpp"

#include "ract/error.hpp"
#include "ract/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ract {

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kS1LowRank: return "S1";
    case Scenario::kS2BlockLarge: return "S2";
    case Scenario::kS3BlockSmall: return "S3";
    case Scenario::kS4OffDiagonal: return "S4";
  }
  return "?";
}

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const std::string t = upper(text);
  if (t == "S1" || t == "S1_LOWRANK" || t == "LOWRANK") return Scenario::kS1LowRank;
  if (t == "S2" || t == "S2_BLOCK_LARGE" || t == "LOWRANKBLOCKLARGE") return Scenario::kS2BlockLarge;
  if (t == "S3" || t == "S3_BLOCK_SMALL" || t == "LOWRANKBLOCKSMALL") return Scenario::kS3BlockSmall;
  if (t == "S4" || t == "S4_OFFDIAG" || t == "OFFDIAGONAL") return Scenario::kS4OffDiagonal;
  throw InvalidConfigError("unknown scenario '" + text + "'");
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.p < 2) throw InvalidConfigError("scenario needs p >= 2");
  if (cfg.n1 < 2 || cfg.n2 < 2) throw InvalidConfigError("scenario needs n1, n2 >= 2");
  if (!(cfg.tau_sq >= 0.0) || !std::isfinite(cfg.tau_sq)) {
    throw InvalidConfigError("tau_sq must be finite and non-negative");
  }
  const int half = cfg.p / 2;
  switch (cfg.scenario) {
    case Scenario::kS1LowRank:
      if (cfg.w < 1 || cfg.w > cfg.p) throw InvalidConfigError("S1 needs 1 <= w <= p");
      break;
    case Scenario::kS2BlockLarge:
      if (cfg.w < 1 || cfg.w > half) throw InvalidConfigError("S2 needs 1 <= w <= p/2");
      break;
    case Scenario::kS3BlockSmall:
      if (cfg.p <= 10) throw InvalidConfigError("S3 needs p > 10");
      if (cfg.w < 1 || cfg.w > 10) throw InvalidConfigError("S3 needs 1 <= w <= 10");
      break;
    case Scenario::kS4OffDiagonal:
      if (cfg.p % 2 != 0) throw InvalidConfigError("S4 needs an even p");
      if (cfg.p < 4) throw InvalidConfigError("S4 needs p >= 4");
      if (!(cfg.tau_sq < 1.0)) throw InvalidConfigError("S4 needs tau_sq < 1");
      break;
  }
}

Eigen::MatrixXd lowrank_factor(int dim, int w, Engine& stream) {
  if (w < 1 || w > dim) throw ParameterError("lowrank_factor needs 1 <= w <= dim");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = normal(stream);
  }
  const Eigen::MatrixXd aat = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(aat);
  // Eigenvalues ascend; the top-w vectors are the last w columns.
  Eigen::MatrixXd out(dim, w);
  for (int j = 0; j < w; ++j) out.col(j) = solver.eigenvectors().col(dim - 1 - j);
  return out;
}

namespace {

Eigen::MatrixXd outer(const Eigen::MatrixXd& u) { return u * u.transpose(); }

CovariancePair block_pair(const ScenarioConfig& cfg, int block, Engine& stream) {
  const int rest = cfg.p - block;
  const Eigen::MatrixXd u1 = lowrank_factor(block, cfg.w, stream);
  const Eigen::MatrixXd u2 = lowrank_factor(rest, std::min(cfg.w, rest), stream);
  const Eigen::MatrixXd v1 = lowrank_factor(block, cfg.w, stream);
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Identity(cfg.p, cfg.p);
  Eigen::MatrixXd s2 = s1;
  s1.topLeftCorner(block, block) += cfg.tau_sq * outer(u1);
  s2.topLeftCorner(block, block) += cfg.tau_sq * outer(v1);
  const Eigen::MatrixXd shared = outer(u2);
  s1.bottomRightCorner(rest, rest) += shared;
  s2.bottomRightCorner(rest, rest) += shared;
  return {SymmetricMatrix(s1), SymmetricMatrix(s2)};
}

}  // namespace

CovariancePair build_scenario(const ScenarioConfig& cfg, Engine& stream) {
  validate(cfg);
  const int p = cfg.p;
  switch (cfg.scenario) {
    case Scenario::kS1LowRank: {
      const Eigen::MatrixXd u1 = lowrank_factor(p, cfg.w, stream);
      const Eigen::MatrixXd v1 = lowrank_factor(p, cfg.w, stream);
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
      return {SymmetricMatrix(id + cfg.tau_sq * outer(u1)),
              SymmetricMatrix(id + cfg.tau_sq * outer(v1))};
    }
    case Scenario::kS2BlockLarge:
      return block_pair(cfg, p / 2, stream);
    case Scenario::kS3BlockSmall:
      return block_pair(cfg, 10, stream);
    case Scenario::kS4OffDiagonal: {
      const int half = p / 2;
      Eigen::MatrixXd a1 = Eigen::MatrixXd::Constant(half, half, cfg.tau_sq);
      a1.diagonal().setOnes();
      // 1-based index sets (1..ceil(p/4)-1) and (ceil(p/4)..p/2).
      const int split = (p + 3) / 4 - 1;
      Eigen::MatrixXd a2 = a1;
      for (int i = 0; i < split; ++i) {
        for (int j = split; j < half; ++j) {
          a2(i, j) = -cfg.tau_sq;
          a2(j, i) = -cfg.tau_sq;
        }
      }
      Eigen::MatrixXd s1 = Eigen::MatrixXd::Identity(p, p);
      Eigen::MatrixXd s2 = s1;
      s1.topLeftCorner(half, half) = a1;
      s2.topLeftCorner(half, half) = a2;
      return {SymmetricMatrix(s1), SymmetricMatrix(s2)};
    }
  }
  throw InvalidConfigError("unhandled scenario");
}

CovariancePair build_scenario(const ScenarioConfig& cfg) {
  Engine stream = make_stream(cfg.seed, {kScenarioStream});
  return build_scenario(cfg, stream);
}

GaussianSampler::GaussianSampler(const SymmetricMatrix& sigma) {
  if (!sigma.all_finite()) throw DataError("covariance has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma.entries());
  Eigen::VectorXd values = solver.eigenvalues();
  if (values.minCoeff() < -1e-8) {
    throw DataError("covariance is indefinite (min eigenvalue " +
                    std::to_string(values.minCoeff()) + ")");
  }
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (values(j) < 0.0) {
      values(j) = 0.0;
      clipped_ = true;
    }
  }
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  root_ = vecs * values.cwiseSqrt().asDiagonal() * vecs.transpose();
}

Eigen::MatrixXd GaussianSampler::draw(Eigen::Index n, Engine& stream) const {
  std::normal_distribution<double> normal;
  const Eigen::Index p = root_.rows();
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = normal(stream);
  }
  return z * root_;
}

Eigen::MatrixXd sample_gaussian(const SymmetricMatrix& sigma, Eigen::Index n, Engine& stream) {
  return GaussianSampler(sigma).draw(n, stream);
}

// -- methods -----------------------------------------------------------------

std::string Method::name() const {
  switch (kind) {
    case MethodKind::kRactMinP: return "RACT";
    case MethodKind::kRactMax: return "RACT-max";
    case MethodKind::kKyFan: return "KyFan-" + std::to_string(k);
    case MethodKind::kFrobenius: return "Frobenius";
    case MethodKind::kClx: return "CLX";
    case MethodKind::kHc: return "HC";
    case MethodKind::kSy: return "SY";
  }
  return "?";
}

Method Method::parse(const std::string& text) {
  const std::string t = upper(text);
  if (t == "RACT" || t == "RACT-MINP") return {MethodKind::kRactMinP, 0};
  if (t == "RACT-MAX") return {MethodKind::kRactMax, 0};
  if (t == "FROBENIUS" || t == "LC") return {MethodKind::kFrobenius, 0};
  if (t == "CLX") return {MethodKind::kClx, 0};
  if (t == "HC") return {MethodKind::kHc, 0};
  if (t == "SY") return {MethodKind::kSy, 0};
  for (const std::string prefix : {"KYFAN-", "KYFAN"}) {
    if (t.rfind(prefix, 0) == 0 && t.size() > prefix.size()) {
      const std::string digits = t.substr(prefix.size());
      if (std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
        const int k = std::stoi(digits);
        if (k >= 1) return {MethodKind::kKyFan, k};
      }
    }
  }
  throw InvalidConfigError("unknown method '" + text + "'");
}

bool Method::needs_baselines() const {
  return kind == MethodKind::kFrobenius || kind == MethodKind::kClx || kind == MethodKind::kHc ||
         kind == MethodKind::kSy;
}

double Method::p_value(const TestReport& report) const {
  switch (kind) {
    case MethodKind::kRactMinP: return report.p_minp;
    case MethodKind::kRactMax: return report.p_ract;
    case MethodKind::kKyFan: {
      const auto idx = static_cast<std::size_t>(std::min<int>(k, static_cast<int>(report.kyfan_pvalues.size())) - 1);
      return report.kyfan_pvalues.at(idx);
    }
    default: {
      const auto it = report.baseline_pvalues.find(name());
      if (it == report.baseline_pvalues.end()) {
        throw ParameterError("report lacks baseline '" + name() + "'");
      }
      return it->second;
    }
  }
}

std::vector<Method> parse_methods(const std::string& comma_separated) {
  std::vector<Method> out;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(Method::parse(item));
  }
  if (out.empty()) throw InvalidConfigError("method list is empty");
  return out;
}

const ExperimentRow& ExperimentResult::find(const std::string& method, double grid_value) const {
  for (const auto& row : rows) {
    if (row.method == method && std::abs(row.grid_value - grid_value) < 1e-12) return row;
  }
  throw ParameterError("no experiment row for " + method);
}

// -- experiment drivers ------------------------------------------------------

namespace {

struct Outcome {
  int K = 0;
  std::vector<double> pvalues;  // one per method
};

TestOptions test_options_for(const ExperimentOptions& options, std::uint64_t seed) {
  TestOptions t;
  t.B = options.B;
  t.master_seed = seed;
  t.k_cutoff = options.k_cutoff;
  t.workers = 1;
  t.baselines = std::any_of(options.methods.begin(), options.methods.end(),
                            [](const Method& m) { return m.needs_baselines(); });
  for (const auto& m : options.methods) {
    if (m.kind == MethodKind::kKyFan) t.extra_k.push_back(m.k);
  }
  return t;
}

Outcome score(const TwoSampleDataset& d, const ExperimentOptions& options, std::uint64_t seed,
              double k_cutoff) {
  TestOptions t = test_options_for(options, seed);
  t.k_cutoff = k_cutoff;
  const TestReport report = run_test(d, t);
  Outcome out;
  out.K = report.K;
  for (const auto& m : options.methods) out.pvalues.push_back(m.p_value(report));
  return out;
}

void summarize(const std::vector<Outcome>& outcomes, const ExperimentOptions& options,
               const std::string& scenario, double grid_value, ExperimentResult& result) {
  const auto reps = static_cast<int>(outcomes.size());
  double mean_K = 0.0;
  for (const auto& o : outcomes) mean_K += o.K;
  mean_K /= std::max(1, reps);
  for (std::size_t m = 0; m < options.methods.size(); ++m) {
    int rejections = 0;
    for (const auto& o : outcomes) {
      if (o.pvalues[m] <= options.alpha) ++rejections;
    }
    ExperimentRow row;
    row.scenario = scenario;
    row.method = options.methods[m].name();
    row.grid_value = grid_value;
    row.reps = reps;
    row.rate = reps > 0 ? static_cast<double>(rejections) / reps : 0.0;
    row.se = reps > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / reps) : 0.0;
    row.mean_K = mean_K;
    result.rows.push_back(row);
  }
}

void check_options(const ExperimentOptions& options) {
  if (options.B < 2) throw InvalidConfigError("B must be >= 2");
  if (options.n_datasets < 1) throw InvalidConfigError("need at least one dataset");
  if (!(options.alpha >= 0.0 && options.alpha < 1.0)) throw InvalidConfigError("alpha must lie in [0,1)");
  if (options.methods.empty()) throw InvalidConfigError("method list is empty");
}

// Draws dataset `rep` of a scenario. Seeds depend only on (cfg.seed, rep), so
// the same underlying normals are reused across grid points.
TwoSampleDataset scenario_dataset(const ScenarioConfig& cfg, std::uint64_t rep, bool null_case) {
  Engine cov_stream = cfg.fixed_pair ? make_stream(cfg.seed, {kScenarioStream})
                                     : make_stream(cfg.seed, {kScenarioStream, rep});
  const CovariancePair pair = build_scenario(cfg, cov_stream);
  Engine sample_stream = make_stream(cfg.seed, {kSampleStream, rep});
  const GaussianSampler s1(pair.sigma1);
  Eigen::MatrixXd g1 = s1.draw(cfg.n1, sample_stream);
  Eigen::MatrixXd g2 = null_case ? s1.draw(cfg.n2, sample_stream)
                                 : GaussianSampler(pair.sigma2).draw(cfg.n2, sample_stream);
  return TwoSampleDataset(std::move(g1), std::move(g2));
}

std::vector<Outcome> run_scenario_point(const ScenarioConfig& cfg, const ExperimentOptions& options,
                                        bool null_case, double k_cutoff) {
  std::vector<Outcome> outcomes(static_cast<std::size_t>(options.n_datasets));
  parallel_for(outcomes.size(), options.workers, [&](std::size_t r) {
    const auto rep = static_cast<std::uint64_t>(r);
    const TwoSampleDataset d = scenario_dataset(cfg, rep, null_case);
    outcomes[r] = score(d, options, derive_seed(cfg.seed, {kDatasetSeed, rep}), k_cutoff);
  });
  return outcomes;
}

}  // namespace

ExperimentResult run_type1(const ScenarioConfig& cfg, const ExperimentOptions& options) {
  validate(cfg);
  check_options(options);
  ExperimentResult result;
  result.grid_name = "tau_sq";
  summarize(run_scenario_point(cfg, options, true, options.k_cutoff), options,
            scenario_name(cfg.scenario), cfg.tau_sq, result);
  return result;
}

ExperimentResult run_power(const ScenarioConfig& cfg, const std::vector<double>& tau_grid,
                           const ExperimentOptions& options) {
  check_options(options);
  if (tau_grid.empty()) throw InvalidConfigError("tau grid is empty");
  ExperimentResult result;
  result.grid_name = "tau_sq";
  for (double tau : tau_grid) {
    ScenarioConfig point = cfg;
    point.tau_sq = tau;
    validate(point);
    summarize(run_scenario_point(point, options, false, options.k_cutoff), options,
              scenario_name(cfg.scenario), tau, result);
  }
  return result;
}

ExperimentResult run_cutoff_sensitivity(const ScenarioConfig& cfg,
                                        const std::vector<double>& cutoffs,
                                        const ExperimentOptions& options) {
  validate(cfg);
  check_options(options);
  if (cutoffs.empty()) throw InvalidConfigError("cutoff grid is empty");
  ExperimentResult result;
  result.grid_name = "k_cutoff";
  for (double cutoff : cutoffs) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw InvalidConfigError("cutoffs must lie in (0,1)");
    summarize(run_scenario_point(cfg, options, false, cutoff), options,
              scenario_name(cfg.scenario), cutoff, result);
  }
  return result;
}

ExperimentResult run_subsample_power(const TwoSampleDataset& data, const std::vector<int>& sizes,
                                     std::uint64_t seed, const ExperimentOptions& options) {
  check_options(options);
  if (sizes.empty()) throw InvalidConfigError("subsample grid is empty");
  ExperimentResult result;
  result.grid_name = "subsample";
  for (int size : sizes) {
    if (size < 2 || size > data.n1() || size > data.n2()) {
      throw InvalidConfigError("subsample size " + std::to_string(size) +
                               " must lie in [2, min(n1, n2)]");
    }
    std::vector<Outcome> outcomes(static_cast<std::size_t>(options.n_datasets));
    parallel_for(outcomes.size(), options.workers, [&](std::size_t r) {
      const auto rep = static_cast<std::uint64_t>(r);
      Engine stream = make_stream(seed, {kSubsampleStream, static_cast<std::uint64_t>(size), rep});
      auto pick = [&](const Eigen::MatrixXd& group) {
        std::vector<int> idx(static_cast<std::size_t>(group.rows()));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < size; ++i) {
          std::uniform_int_distribution<int> u(i, static_cast<int>(idx.size()) - 1);
          std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(u(stream))]);
        }
        Eigen::MatrixXd out(size, group.cols());
        for (int i = 0; i < size; ++i) out.row(i) = group.row(idx[static_cast<std::size_t>(i)]);
        return out;
      };
      Eigen::MatrixXd g1 = pick(data.group1());
      Eigen::MatrixXd g2 = pick(data.group2());
      const TwoSampleDataset sub(std::move(g1), std::move(g2));
      outcomes[r] = score(sub, options,
                          derive_seed(seed, {kDatasetSeed, static_cast<std::uint64_t>(size), rep}),
                          options.k_cutoff);
    });
    summarize(outcomes, options, "data", size, result);
  }
  return result;
}

// -- null shape --------------------------------------------------------------

std::string null_covariance_name(NullCovariance c) {
  switch (c) {
    case NullCovariance::kIid: return "IID";
    case NullCovariance::kLowRank2: return "LOWRANK2";
    case NullCovariance::kLowRank5: return "LOWRANK5";
    case NullCovariance::kOffDiagonal: return "OFFDIAG";
    case NullCovariance::kAr: return "AR";
  }
  return "?";
}

NullCovariance parse_null_covariance(const std::string& text) {
  const std::string t = upper(text);
  if (t == "IID") return NullCovariance::kIid;
  if (t == "LOWRANK2") return NullCovariance::kLowRank2;
  if (t == "LOWRANK5") return NullCovariance::kLowRank5;
  if (t == "OFFDIAG" || t == "OFFDIAGONAL") return NullCovariance::kOffDiagonal;
  if (t == "AR") return NullCovariance::kAr;
  throw InvalidConfigError("unknown null covariance '" + text + "'");
}

SymmetricMatrix null_covariance(NullCovariance c, int p, Engine& stream) {
  ScenarioConfig cfg;
  cfg.p = p;
  cfg.tau_sq = 0.5;
  switch (c) {
    case NullCovariance::kIid: return SymmetricMatrix::identity(p);
    case NullCovariance::kLowRank2:
      cfg.w = 2;
      return build_scenario(cfg, stream).sigma1;
    case NullCovariance::kLowRank5:
      cfg.w = 5;
      return build_scenario(cfg, stream).sigma1;
    case NullCovariance::kOffDiagonal:
      cfg.scenario = Scenario::kS4OffDiagonal;
      return build_scenario(cfg, stream).sigma1;
    case NullCovariance::kAr: {
      Eigen::MatrixXd m(p, p);
      for (int r = 0; r < p; ++r) {
        for (int s = 0; s < p; ++s) m(r, s) = std::pow(0.8, std::abs(r - s));
      }
      return SymmetricMatrix(m);
    }
  }
  throw InvalidConfigError("unhandled null covariance");
}

NullShapeResult run_nullshape(NullCovariance covariance, const std::vector<int>& k_list, int n,
                              int p, int n_datasets, std::uint64_t seed, int workers) {
  if (k_list.empty()) throw InvalidConfigError("k list is empty");
  if (n < 4) throw InvalidConfigError("nullshape needs n >= 4");
  if (n_datasets < 2) throw InvalidConfigError("nullshape needs at least 2 datasets");
  const int n1 = n / 2;
  const int n2 = n - n1;
  const int cap = std::min(n, p);
  for (int k : k_list) {
    if (k < 1 || k > cap) {
      throw InvalidConfigError("k=" + std::to_string(k) + " outside [1, min(n, p)]");
    }
  }
  Engine cov_stream = make_stream(seed, {kScenarioStream});
  const GaussianSampler sampler(null_covariance(covariance, p, cov_stream));
  const int kmax = *std::max_element(k_list.begin(), k_list.end());

  NullShapeResult out;
  out.k_list = k_list;
  out.raw.resize(n_datasets, static_cast<Eigen::Index>(k_list.size()));
  parallel_for(static_cast<std::size_t>(n_datasets), workers, [&](std::size_t r) {
    Engine stream = make_stream(seed, {kSampleStream, static_cast<std::uint64_t>(r)});
    Eigen::MatrixXd g1 = sampler.draw(n1, stream);
    Eigen::MatrixXd g2 = sampler.draw(n2, stream);
    const auto grid = t_k_grid(TwoSampleDataset(std::move(g1), std::move(g2)), kmax);
    for (std::size_t j = 0; j < k_list.size(); ++j) {
      out.raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = grid.at(k_list[j]);
    }
  });
  out.means = out.raw.colwise().mean().transpose();
  out.sds.resize(out.raw.cols());
  out.standardized.resize(out.raw.rows(), out.raw.cols());
  for (Eigen::Index c = 0; c < out.raw.cols(); ++c) {
    const double ss = (out.raw.col(c).array() - out.means(c)).square().sum();
    out.sds(c) = std::sqrt(ss / static_cast<double>(out.raw.rows() - 1));
    if (!(out.sds(c) > 0.0)) throw DegenerateInputError("nullshape column has zero spread");
    out.standardized.col(c) = (out.raw.col(c).array() - out.means(c)) / out.sds(c);
  }
  return out;
}

}  // namespace ract
