#pragma once

// Batch commands behind the eprsim executable. Each command parses and
// validates its whole configuration before computing anything, then returns
// the full output in memory so nothing is written on failure.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace eprsim::cli {

struct RunOptions {
  int workers = 1;
  std::optional<int> n_max_override;
  // Needed only by outputs that are always written to files (density dump).
  bool has_out_path = false;
};

struct Sidecar {
  std::string suffix;  // appended to the --out path, e.g. ".summary.json"
  std::string content;
};

struct CommandOutput {
  std::string primary;  // CSV or JSON text
  std::vector<Sidecar> sidecars;
};

const std::vector<std::string>& command_names();

// Throws ConfigError on invalid input, NumericalFailure when a solver fails.
CommandOutput run_command(std::string_view verb, const nlohmann::json& config, const RunOptions& options);

// Runs fn(i) for i in [0, count) on up to `workers` threads. If any call
// throws, the exception from the lowest index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn);

}  // namespace eprsim::cli

#include "eprsim/cli/parallel.ipp"
