#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace harness {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "harness-lab";
std::string_view tool_version();
std::string_view build_tag();

/// Names accepted as the experiment field.
const std::vector<std::string>& experiment_names();

/// Defaults for one experiment. "seed" is deliberately absent.
json default_config(std::string_view experiment);

/// defaults <- file <- overrides, then validation. Throws ConfigParse for
/// unknown fields and Validation (naming the field) for bad values.
json resolve_config(const json& file, const json& overrides);

/// FNV-1a 64 of the canonical dump without "out" and "workers", as 16 hex digits.
std::string config_hash(const json& resolved);

struct Check {
  std::string name;
  double value = 0.0;
  std::string band;
  bool pass = false;
};

struct ExperimentResult {
  json records = json::array();  // {statistic, value, stderr, params}
  std::string detail_csv;        // body without the provenance comments
  std::vector<Check> checks;
  bool all_pass() const;
};

/// Runs the experiment named in `resolved`; pure apart from threads.
ExperimentResult run_experiment(const json& resolved);

struct OutputOptions {
  std::filesystem::path out_dir;
  bool record_timing = true;
};

/// Writes summary.json, detail.csv and config.resolved.json.
void write_outputs(const json& resolved, const ExperimentResult& result, double elapsed_seconds,
                   const OutputOptions& options);

/// Entry point of the harness-lab binary. Exit codes: 0 ok, 1 config error,
/// 2 budget error, 3 acceptance failure under --check.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace harness
