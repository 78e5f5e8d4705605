#include "ract/cli.hpp"

#include "ract/csv_io.hpp"
#include "ract/error.hpp"
#include "ract/permutation.hpp"
#include "ract/report.hpp"
#include "ract/simulation.hpp"
#include "ract/theory.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ract::cli {

void RunConfig::validate() const {
  if (B < 19) throw InvalidConfigError("B must be >= 19");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfigError("alpha must lie in (0,1)");
  if (!(k_cutoff > 0.0 && k_cutoff < 1.0)) throw InvalidConfigError("k-cutoff must lie in (0,1)");
  if (workers < 1) throw InvalidConfigError("workers must be >= 1");
}

int resolve_workers(int flag_value) {
  if (const char* env = std::getenv("RACT_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return flag_value;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidConfigError("bad grid value '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InvalidConfigError("grid must be start:stop:count");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double count_d = number(parts[2]);
    const int count = static_cast<int>(count_d);
    if (count < 1 || count != count_d) throw InvalidConfigError("grid count must be a positive integer");
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i) {
      out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(number(item));
  }
  if (out.empty()) throw InvalidConfigError("empty grid");
  return out;
}

namespace {

std::vector<int> to_ints(const std::vector<double>& values) {
  std::vector<int> out;
  for (double v : values) {
    if (v != std::floor(v)) throw InvalidConfigError("expected integer grid values");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidConfigError("cannot write '" + path + "'");
  file << content;
}

struct InputFlags {
  std::string group1;
  std::string group2;
  std::string data;
  std::string group_col;
  std::vector<std::string> covariates;
  bool no_intercept = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--group1", f.group1, "CSV file with group 1 observations");
  cmd->add_option("--group2", f.group2, "CSV file with group 2 observations");
  cmd->add_option("--data", f.data, "single CSV file with a group-label column");
  cmd->add_option("--group-col", f.group_col, "group-label column of --data");
  cmd->add_option("--covariates", f.covariates, "covariate columns to regress out per group")
      ->delimiter(',');
  cmd->add_flag("--no-intercept", f.no_intercept, "do not add an intercept to the covariates");
}

// Loads the data and regresses out covariates within each group.
TwoSampleDataset load_input(const InputFlags& f) {
  LoadedData loaded = [&] {
    if (!f.data.empty()) {
      if (f.group_col.empty()) throw InvalidConfigError("--data requires --group-col");
      return load_labeled_file(f.data, f.group_col, f.covariates, !f.no_intercept);
    }
    if (f.group1.empty() || f.group2.empty()) {
      throw InvalidConfigError("provide --group1 and --group2, or --data with --group-col");
    }
    return load_two_files(f.group1, f.group2, f.covariates, !f.no_intercept);
  }();
  if (!loaded.covariates1) return loaded.dataset;
  return TwoSampleDataset(residualize(loaded.dataset.group1(), *loaded.covariates1),
                          residualize(loaded.dataset.group2(), *loaded.covariates2),
                          loaded.dataset.feature_names());
}

nlohmann::json input_json(const InputFlags& f) {
  return {{"group1", f.group1}, {"group2", f.group2},         {"data", f.data},
          {"group_col", f.group_col}, {"covariates", f.covariates}, {"intercept", !f.no_intercept}};
}

struct ScenarioFlags {
  std::string scenario = "S1";
  int p = 100;
  int n1 = 25;
  int n2 = 25;
  double tau_sq = 0.0;
  int w = 2;
  bool fixed_pair = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--scenario", f.scenario, "S1, S2, S3 or S4")->capture_default_str();
  cmd->add_option("--p", f.p, "dimension")->capture_default_str();
  cmd->add_option("--n1", f.n1, "group 1 size")->capture_default_str();
  cmd->add_option("--n2", f.n2, "group 2 size")->capture_default_str();
  cmd->add_option("--tau-sq", f.tau_sq, "signal scale tau^2")->capture_default_str();
  cmd->add_option("--w", f.w, "rank of the low-rank factors (S1-S3)")->capture_default_str();
  cmd->add_flag("--fixed-pair", f.fixed_pair, "draw one covariance pair for all replicates");
}

ScenarioConfig to_config(const ScenarioFlags& f, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.scenario = parse_scenario(f.scenario);
  cfg.p = f.p;
  cfg.n1 = f.n1;
  cfg.n2 = f.n2;
  cfg.tau_sq = f.tau_sq;
  cfg.w = f.w;
  cfg.seed = seed;
  cfg.fixed_pair = f.fixed_pair;
  return cfg;
}

nlohmann::json scenario_json(const ScenarioFlags& f) {
  return {{"scenario", f.scenario}, {"p", f.p},   {"n1", f.n1},
          {"n2", f.n2},             {"tau_sq", f.tau_sq}, {"w", f.w},
          {"fixed_pair", f.fixed_pair}};
}

struct CommonFlags {
  int B = 1000;
  double alpha = 0.05;
  double k_cutoff = 0.8;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  std::string methods = "RACT";
  int reps = 500;
  std::string json;
};

void add_run_flags(CLI::App* cmd, CommonFlags& f, int default_B) {
  f.B = default_B;
  cmd->add_option("--B", f.B, "number of permutations")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "significance level")->capture_default_str();
  cmd->add_option("--k-cutoff", f.k_cutoff, "spectral-mass cutoff used to select K")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
  cmd->add_option("--workers", f.workers, "worker threads (RACT_WORKERS overrides)")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "output file (stdout when omitted)");
}

void add_experiment_flags(CLI::App* cmd, CommonFlags& f) {
  f.B = 199;
  cmd->add_option("--methods", f.methods,
                  "comma list: RACT, RACT-max, KyFan-<k>, Frobenius, CLX, HC, SY")
      ->capture_default_str();
  cmd->add_option("--reps", f.reps, "simulated datasets per grid point")->capture_default_str();
  cmd->add_option("--json", f.json, "also write a JSON summary to this file");
}

RunConfig run_config(const std::string& command, const CommonFlags& f) {
  RunConfig cfg;
  cfg.command = command;
  cfg.B = f.B;
  cfg.alpha = f.alpha;
  cfg.k_cutoff = f.k_cutoff;
  cfg.master_seed = f.seed;
  cfg.workers = resolve_workers(f.workers);
  cfg.output = f.out;
  cfg.validate();
  return cfg;
}

ExperimentOptions experiment_options(const RunConfig& cfg, const CommonFlags& f) {
  if (f.reps < 1) throw InvalidConfigError("--reps must be >= 1");
  ExperimentOptions opt;
  opt.B = cfg.B;
  opt.n_datasets = f.reps;
  opt.alpha = cfg.alpha;
  opt.methods = parse_methods(f.methods);
  opt.k_cutoff = cfg.k_cutoff;
  opt.workers = cfg.workers;
  return opt;
}

nlohmann::json common_json(const CommonFlags& f) {
  return {{"B", f.B},       {"alpha", f.alpha}, {"k_cutoff", f.k_cutoff},
          {"seed", f.seed}, {"methods", f.methods}, {"reps", f.reps}};
}

void emit_experiment(const ExperimentResult& result, const RunMetadata& meta,
                     const CommonFlags& f, std::ostream& out) {
  std::ostringstream csv;
  write_experiment_csv(csv, result, meta);
  emit(f.out, csv.str(), out);
  if (!f.json.empty()) emit(f.json, experiment_json(result, meta).dump(2) + "\n", out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-adaptive two-sample covariance testing", "ract"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(RACT_VERSION));

  // test
  auto* test_cmd = app.add_subcommand("test", "permutation test of equal covariance");
  InputFlags test_in;
  CommonFlags test_flags;
  bool scripting = false;
  bool timing = false;
  bool no_baselines = false;
  std::string decision = "minp";
  std::optional<int> K_override;
  std::vector<int> extra_k;
  int hc_max_q = -1;
  std::string centering = "per-group";
  bool center_groups = false;
  add_input_flags(test_cmd, test_in);
  add_run_flags(test_cmd, test_flags, 1000);
  test_cmd->add_flag("--scripting", scripting, "exit with code 2 when the test rejects at alpha");
  test_cmd->add_option("--decision", decision, "statistic behind --scripting: minp or max")
      ->check(CLI::IsMember({"minp", "max"}))
      ->capture_default_str();
  test_cmd->add_flag("--timing", timing, "include wall-clock runtime in the report");
  test_cmd->add_flag("--no-baselines", no_baselines, "skip Frobenius, CLX, HC and SY");
  test_cmd->add_option("--K", K_override, "fix the Ky-Fan grid size instead of selecting it");
  test_cmd->add_option("--extra-k", extra_k, "extra single Ky-Fan(k) tests to report")
      ->delimiter(',');
  test_cmd->add_option("--hc-max-q", hc_max_q, "largest superdiagonal for HC (default floor(p^0.7))");
  test_cmd->add_flag("--center-groups", center_groups,
                     "subtract group means before permuting (not exact under the null)");
  test_cmd->add_option("--pooled-centering", centering, "per-group or global")
      ->check(CLI::IsMember({"per-group", "global"}))
      ->capture_default_str();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Type I error of the permutation tests");
  ScenarioFlags sim_scn;
  CommonFlags sim_flags;
  add_scenario_flags(sim_cmd, sim_scn);
  add_run_flags(sim_cmd, sim_flags, 199);
  add_experiment_flags(sim_cmd, sim_flags);

  // power
  auto* power_cmd = app.add_subcommand("power", "power curves over tau^2, K cutoff or subsample size");
  ScenarioFlags pow_scn;
  CommonFlags pow_flags;
  InputFlags pow_in;
  std::string tau_grid, cutoff_grid, subsample_grid;
  add_scenario_flags(power_cmd, pow_scn);
  add_run_flags(power_cmd, pow_flags, 199);
  add_experiment_flags(power_cmd, pow_flags);
  add_input_flags(power_cmd, pow_in);
  power_cmd->add_option("--tau-grid", tau_grid, "tau^2 grid, start:stop:count or a,b,c");
  power_cmd->add_option("--cutoff-grid", cutoff_grid, "K cutoff grid for sensitivity analysis");
  power_cmd->add_option("--subsample-grid", subsample_grid,
                        "per-group subsample sizes drawn from the input data");

  // nullshape
  auto* ns_cmd = app.add_subcommand("nullshape", "standardized null draws of T_k");
  std::string ns_cov = "IID";
  std::vector<int> ns_k = {1, 5, 10, 50};
  int ns_n = 1000, ns_p = 250, ns_reps = 1000, ns_workers = 1;
  std::uint64_t ns_seed = 0;
  std::string ns_out;
  bool ns_raw = false;
  ns_cmd->add_option("--covariance", ns_cov, "IID, LOWRANK2, LOWRANK5, OFFDIAG or AR")
      ->capture_default_str();
  ns_cmd->add_option("--k-list", ns_k, "Ky-Fan indices")->delimiter(',');
  ns_cmd->add_option("--n", ns_n, "total sample size (split evenly)")->capture_default_str();
  ns_cmd->add_option("--p", ns_p, "dimension")->capture_default_str();
  ns_cmd->add_option("--reps", ns_reps, "number of null datasets")->capture_default_str();
  ns_cmd->add_option("--seed", ns_seed, "master seed")->capture_default_str();
  ns_cmd->add_option("--workers", ns_workers, "worker threads")->capture_default_str();
  ns_cmd->add_option("--out", ns_out, "output CSV (stdout when omitted)");
  ns_cmd->add_flag("--raw", ns_raw, "append unstandardized columns");

  // diagnose
  auto* dg_cmd = app.add_subcommand("diagnose", "population SNR_k, omega^2 and increments");
  bool prop2 = false;
  double dg_c = 1.0;
  int dg_p = 6, dg_kmax = 0;
  std::string dg_s1, dg_s2, dg_out;
  long dg_n1 = 1, dg_n2 = 1;
  dg_cmd->add_flag("--prop2", prop2, "use Sigma1 = cI, Sigma2 = Sigma1 + diag(4,1,0,...)");
  dg_cmd->add_option("--c", dg_c, "scale c of the crossover example")->capture_default_str();
  dg_cmd->add_option("--p", dg_p, "dimension of the crossover example")->capture_default_str();
  dg_cmd->add_option("--sigma1", dg_s1, "CSV file with Sigma1 (header row, p x p)");
  dg_cmd->add_option("--sigma2", dg_s2, "CSV file with Sigma2 (header row, p x p)");
  dg_cmd->add_option("--n1", dg_n1, "group 1 size (sets r1 = n/n1)")->capture_default_str();
  dg_cmd->add_option("--n2", dg_n2, "group 2 size (sets r2 = n/n2)")->capture_default_str();
  dg_cmd->add_option("--kmax", dg_kmax, "largest k (default rank of the difference)");
  dg_cmd->add_option("--out", dg_out, "output CSV (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*test_cmd) {
      const RunConfig cfg = run_config("test", test_flags);
      const TwoSampleDataset data = load_input(test_in);
      if (data.n1() < 3 || data.n2() < 3) {
        throw InsufficientDataError("test needs at least 3 observations per group");
      }
      TestOptions opt;
      opt.B = cfg.B;
      opt.master_seed = cfg.master_seed;
      opt.k_cutoff = cfg.k_cutoff;
      opt.K_override = K_override;
      opt.extra_k = extra_k;
      opt.baselines = !no_baselines;
      opt.superdiag_max_q = hc_max_q;
      opt.centering = centering == "global" ? PooledCentering::kGlobal : PooledCentering::kPerGroup;
      opt.center_groups = center_groups;
      opt.workers = cfg.workers;
      const TestReport report = run_test(data, opt);

      nlohmann::json config = input_json(test_in);
      config["B"] = cfg.B;
      config["alpha"] = cfg.alpha;
      config["k_cutoff"] = cfg.k_cutoff;
      config["seed"] = cfg.master_seed;
      config["K"] = K_override ? nlohmann::json(*K_override) : nlohmann::json();
      config["extra_k"] = extra_k;
      config["baselines"] = !no_baselines;
      config["hc_max_q"] = hc_max_q;
      config["pooled_centering"] = centering;
      config["center_groups"] = center_groups;
      RunMetadata meta{RACT_VERSION, "test", cfg.master_seed, cfg.B, config_hash(config)};
      nlohmann::json j = report_json(report, meta, timing);
      j["alpha"] = cfg.alpha;
      j["reject_minp"] = report.p_minp <= cfg.alpha;
      j["reject_max"] = report.p_ract <= cfg.alpha;
      emit(cfg.output, j.dump(2) + "\n", out);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      const double decisive = decision == "max" ? report.p_ract : report.p_minp;
      return (scripting && decisive <= cfg.alpha) ? kReject : kOk;
    }

    if (*sim_cmd) {
      const RunConfig cfg = run_config("simulate", sim_flags);
      const ExperimentOptions opt = experiment_options(cfg, sim_flags);
      const ScenarioConfig scn = to_config(sim_scn, cfg.master_seed);
      nlohmann::json config = scenario_json(sim_scn);
      config.update(common_json(sim_flags));
      RunMetadata meta{RACT_VERSION, "simulate", cfg.master_seed, cfg.B, config_hash(config)};
      emit_experiment(run_type1(scn, opt), meta, sim_flags, out);
      return kOk;
    }

    if (*power_cmd) {
      const RunConfig cfg = run_config("power", pow_flags);
      const ExperimentOptions opt = experiment_options(cfg, pow_flags);
      const int modes = !tau_grid.empty() + !cutoff_grid.empty() + !subsample_grid.empty();
      if (modes != 1) {
        throw InvalidConfigError("give exactly one of --tau-grid, --cutoff-grid, --subsample-grid");
      }
      nlohmann::json config = scenario_json(pow_scn);
      config.update(common_json(pow_flags));
      config["tau_grid"] = tau_grid;
      config["cutoff_grid"] = cutoff_grid;
      config["subsample_grid"] = subsample_grid;
      ExperimentResult result;
      if (!subsample_grid.empty()) {
        config["input"] = input_json(pow_in);
        const TwoSampleDataset data = load_input(pow_in);
        result = run_subsample_power(data, to_ints(parse_grid(subsample_grid)), cfg.master_seed, opt);
      } else if (!tau_grid.empty()) {
        result = run_power(to_config(pow_scn, cfg.master_seed), parse_grid(tau_grid), opt);
      } else {
        result = run_cutoff_sensitivity(to_config(pow_scn, cfg.master_seed), parse_grid(cutoff_grid), opt);
      }
      RunMetadata meta{RACT_VERSION, "power", cfg.master_seed, cfg.B, config_hash(config)};
      emit_experiment(result, meta, pow_flags, out);
      return kOk;
    }

    if (*ns_cmd) {
      const NullCovariance cov = parse_null_covariance(ns_cov);
      if (ns_reps < 2) throw InvalidConfigError("--reps must be >= 2");
      const auto result =
          run_nullshape(cov, ns_k, ns_n, ns_p, ns_reps, ns_seed, resolve_workers(ns_workers));
      nlohmann::json config = {{"covariance", ns_cov}, {"k_list", ns_k}, {"n", ns_n},
                               {"p", ns_p},           {"reps", ns_reps}, {"seed", ns_seed}};
      RunMetadata meta{RACT_VERSION, "nullshape", ns_seed, 0, config_hash(config)};
      std::ostringstream csv;
      write_nullshape_csv(csv, result, meta, ns_raw);
      emit(ns_out, csv.str(), out);
      return kOk;
    }

    if (*dg_cmd) {
      std::optional<PopulationPair> pop;
      nlohmann::json config;
      if (prop2) {
        pop = crossover_example(dg_c, dg_p);
        config = {{"prop2", true}, {"c", dg_c}, {"p", dg_p}};
      } else {
        if (dg_s1.empty() || dg_s2.empty()) {
          throw InvalidConfigError("diagnose needs --prop2 or both --sigma1 and --sigma2");
        }
        SymmetricMatrix s1(numeric_columns(read_csv_file(dg_s1), {}));
        SymmetricMatrix s2(numeric_columns(read_csv_file(dg_s2), {}));
        pop = PopulationPair::from_sizes(std::move(s1), std::move(s2), dg_n1, dg_n2);
        config = {{"sigma1", dg_s1}, {"sigma2", dg_s2}, {"n1", dg_n1}, {"n2", dg_n2}};
      }
      config["kmax"] = dg_kmax;
      const auto rows = diagnose_table(*pop, dg_kmax);
      RunMetadata meta{RACT_VERSION, "diagnose", 0, 0, config_hash(config)};
      std::ostringstream csv;
      write_diagnose_csv(csv, rows, meta);
      emit(dg_out, csv.str(), out);
      if (rows.size() >= 2) {
        const auto& inc = rows[1].increment;
        err << "beta_1_2=" << format_double(inc.beta) << " gamma_1_2=" << format_double(inc.gamma)
            << " verdict=" << (inc.snr_k2_at_least_k1 ? "SNR2>=SNR1" : "SNR2<SNR1") << '\n';
      }
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace ract::cli
