#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ract::cli {

/// Exit codes of the `ract` executable.
enum ExitCode : int {
  kOk = 0,
  kReject = 2,      // `test --scripting` only: the test rejects at alpha
  kUsage = 64,      // bad flags, malformed CSV, invalid scenario or grid
  kDataError = 65,  // degenerate or invalid data
  kInternal = 70,
};

/// Validated flag surface shared by the subcommands.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  int B = 1000;
  double alpha = 0.05;
  double k_cutoff = 0.8;
  std::vector<std::string> methods;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string output;

  /// Throws InvalidConfigError unless B >= 19, alpha in (0,1), k_cutoff in (0,1), workers >= 1.
  void validate() const;
};

/// Worker budget: RACT_WORKERS overrides `flag_value` when set to a positive integer.
int resolve_workers(int flag_value);

/// Parses "start:stop:count" (inclusive linspace) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// Entry point; args[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ract::cli
