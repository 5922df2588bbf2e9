#pragma once

// Scenario files and machine-readable reports behind the command-line tool.
//
// A scenario is one JSON document with a "kind" of verify, oneill, reduce,
// integrate, catalog or scan. Running it produces a report (JSON, keys in a
// fixed order) and, for integrate and scan, a CSV table.

#include "warpcheck/curvature.hpp"
#include "warpcheck/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace warpcheck {

/// Usage, schema or parse problems; maps to exit status 2.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

const char* library_version();

/// Command-line overrides applied on top of the scenario's own fields.
struct RunOptions {
  std::optional<double> tolerance;
  std::optional<DerivativeMode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> csv;
  /// Kind implied by the subcommand; fills in a missing "kind" and rejects a
  /// different one.
  std::optional<std::string> kind;
  Execution exec = Execution::parallel;
};

struct RunResult {
  nlohmann::ordered_json report;
  /// Trajectory (integrate) or table (scan); empty otherwise.
  std::string csv;
  int status = kExitPass;
};

/// Evaluates a parsed scenario. Schema problems are reported in the result
/// with status 2 rather than thrown.
RunResult run_scenario(const nlohmann::json& scenario, const RunOptions& options = {});
/// Parses then evaluates; parse errors carry line and column.
RunResult run_scenario_text(std::string_view text, const RunOptions& options = {});

/// Runs a scenario file and writes its outputs: the report to the output path
/// (or `out` when none is given), CSV to the csv path. Scan scenarios write
/// their table to the output path (or `out`). Returns the exit status.
int run_file(const std::filesystem::path& path, const RunOptions& options, std::ostream& out);
/// Same, for a scenario assembled in memory (used by the catalog and integrate
/// subcommands).
int run_and_write(const nlohmann::json& scenario, const RunOptions& options, std::ostream& out);

/// Table of admissible G roots over a parameter grid; one row per combination.
std::string scan_csv(const nlohmann::json& ranges, double tolerance);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view content);

DerivativeMode parse_mode(std::string_view text);
/// Accepts a JSON number or a decimal string.
double parse_number(const nlohmann::json& value, std::string_view field);

}  // namespace warpcheck
