#pragma once

// Serialization of test reports (JSON) and experiment grids (CSV + JSON).
// Every artifact carries the run metadata needed to reproduce it.

#include "ract/permutation.hpp"
#include "ract/simulation.hpp"
#include "ract/theory.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ract {

struct RunMetadata {
  std::string version = RACT_VERSION;
  std::string command;
  std::uint64_t master_seed = 0;
  int B = 0;
  std::string config_hash;
};

/// 64-bit FNV-1a of the compact dump of `config`, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

nlohmann::json metadata_json(const RunMetadata& meta);

nlohmann::json report_json(const TestReport& report, const RunMetadata& meta,
                           bool include_timing = false);

/// "# ract version=... command=... seed=... B=... config_hash=..."
std::string metadata_comment(const RunMetadata& meta);

/// Long format: scenario,method,<grid>,rate,se,reps,mean_K.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result,
                          const RunMetadata& meta);
nlohmann::json experiment_json(const ExperimentResult& result, const RunMetadata& meta);

void write_nullshape_csv(std::ostream& out, const NullShapeResult& result,
                         const RunMetadata& meta, bool include_raw = false);

struct DiagnoseRow {
  SNRProfile profile;
  bool has_increment = false;  // rows k >= 2 carry increments from k-1
  Increments increment;
};

std::vector<DiagnoseRow> diagnose_table(const PopulationPair& pop, int kmax);

/// k,signal,omega_sq,snr,beta,gamma,threshold,snr_ge_prev
void write_diagnose_csv(std::ostream& out, const std::vector<DiagnoseRow>& rows,
                        const RunMetadata& meta);

}  // namespace ract
