#include "ract/report.hpp"

#include "ract/error.hpp"

#include <array>
#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ract {

std::string config_hash(const nlohmann::json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

nlohmann::json metadata_json(const RunMetadata& meta) {
  return {{"version", meta.version},
          {"command", meta.command},
          {"master_seed", meta.master_seed},
          {"B", meta.B},
          {"config_hash", meta.config_hash}};
}

nlohmann::json report_json(const TestReport& r, const RunMetadata& meta, bool include_timing) {
  nlohmann::json j;
  j["metadata"] = metadata_json(meta);
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  j["p"] = r.p;
  j["K"] = r.K;
  j["k_cutoff"] = r.k_cutoff;
  j["B"] = r.B;
  j["master_seed"] = r.master_seed;
  j["pooled_spectrum_head"] = r.pooled_spectrum_head;
  j["observed_kyfan"] = r.observed_kyfan.values;
  j["t_ract"] = r.t_ract;
  j["p_ract"] = r.p_ract;
  j["minp_observed"] = r.minp_observed;
  j["p_minp"] = r.p_minp;
  j["per_k_pvalues"] = r.per_k_pvalues;
  j["kyfan_pvalues"] = r.kyfan_pvalues;
  j["baseline_observed"] = r.baseline_observed;
  j["baseline_pvalues"] = r.baseline_pvalues;
  j["dropped_k"] = r.dropped_k;
  j["warnings"] = r.warnings;
  if (include_timing) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

std::string metadata_comment(const RunMetadata& meta) {
  return "# ract version=" + meta.version + " command=" + meta.command +
         " seed=" + std::to_string(meta.master_seed) + " B=" + std::to_string(meta.B) +
         " config_hash=" + meta.config_hash;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result,
                          const RunMetadata& meta) {
  out << metadata_comment(meta) << '\n';
  out << "scenario,method," << result.grid_name << ",rate,se,reps,mean_K\n";
  for (const auto& row : result.rows) {
    out << row.scenario << ',' << row.method << ',' << format_double(row.grid_value) << ','
        << format_double(row.rate) << ',' << format_double(row.se) << ',' << row.reps << ','
        << format_double(row.mean_K) << '\n';
  }
}

nlohmann::json experiment_json(const ExperimentResult& result, const RunMetadata& meta) {
  nlohmann::json j;
  j["metadata"] = metadata_json(meta);
  j["grid"] = result.grid_name;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : result.rows) {
    j["rows"].push_back({{"scenario", row.scenario},
                         {"method", row.method},
                         {"grid_value", row.grid_value},
                         {"rate", row.rate},
                         {"se", row.se},
                         {"reps", row.reps},
                         {"mean_K", row.mean_K}});
  }
  return j;
}

void write_nullshape_csv(std::ostream& out, const NullShapeResult& result,
                         const RunMetadata& meta, bool include_raw) {
  out << metadata_comment(meta) << '\n';
  out << "dataset";
  for (int k : result.k_list) out << ",T" << k << "_std";
  if (include_raw) {
    for (int k : result.k_list) out << ",T" << k;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < result.standardized.rows(); ++r) {
    out << r + 1;
    for (Eigen::Index c = 0; c < result.standardized.cols(); ++c) {
      out << ',' << format_double(result.standardized(r, c));
    }
    if (include_raw) {
      for (Eigen::Index c = 0; c < result.raw.cols(); ++c) out << ',' << format_double(result.raw(r, c));
    }
    out << '\n';
  }
}

std::vector<DiagnoseRow> diagnose_table(const PopulationPair& pop, int kmax) {
  const int rank = difference_rank(pop);
  if (rank < 1) throw DegenerateInputError("population covariances are equal; nothing to diagnose");
  if (kmax < 1 || kmax > rank) kmax = rank;
  std::vector<DiagnoseRow> rows;
  for (int k = 1; k <= kmax; ++k) {
    DiagnoseRow row;
    row.profile = snr_k(pop, k);
    if (k >= 2) {
      row.has_increment = true;
      row.increment = increments(pop, k - 1, k);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_diagnose_csv(std::ostream& out, const std::vector<DiagnoseRow>& rows,
                        const RunMetadata& meta) {
  out << metadata_comment(meta) << '\n';
  out << "k,signal,omega_sq,snr,beta,gamma,threshold,snr_ge_prev\n";
  for (const auto& row : rows) {
    out << row.profile.k << ',' << format_double(row.profile.kyfan_signal) << ','
        << format_double(row.profile.omega_sq) << ',' << format_double(row.profile.snr);
    if (row.has_increment) {
      out << ',' << format_double(row.increment.beta) << ',' << format_double(row.increment.gamma)
          << ',' << format_double(row.increment.threshold()) << ','
          << (row.increment.snr_k2_at_least_k1 ? "true" : "false");
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

}  // namespace ract
