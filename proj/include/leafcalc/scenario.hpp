#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leafcalc/distribution.hpp"
#include "leafcalc/hodge.hpp"
#include "leafcalc/json_fwd.hpp"

namespace leafcalc {

inline constexpr const char* kVersion = "0.1.0";

/// One verification scenario: a model, optionally a flow, numeric parameters
/// and the list of named checks to run. Round-trips through JSON losslessly.
struct ScenarioConfig {
  std::string name;
  nlohmann::json model;  // torus or suspension description
  nlohmann::json flow;   // empty when the scenario is static
  SpectralTruncation truncation{50, 1e-9};
  double t_max = 5.0;
  int t_samples = 512;
  std::vector<double> nu_sequence{4.0, 8.0, 16.0, 32.0};
  int grid_resolution = 256;
  int quad_per_axis = 256;
  std::uint64_t seed = 2024;
  std::vector<std::string> checks;
  nlohmann::json params;  // per-check expectations and knobs

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct CheckResult {
  std::string name;
  std::string status;  // PASS | FAIL | PARTIAL
  nlohmann::json computed;
  nlohmann::json oracle;
  double max_deviation = 0.0;
  std::string detail;
  nlohmann::json to_json() const;
};

struct ReportDocument {
  std::string scenario;
  nlohmann::json environment;
  std::vector<CheckResult> checks;
  std::string status;  // worst check status
  std::optional<DistributionOnRPlus> distribution;  // for CSV export

  nlohmann::json to_json() const;
  /// 0 all pass, 1 any failure, 3 hypothesis-violation partials only.
  int exit_code() const;
};

/// Names of every check run_scenario understands.
const std::vector<std::string>& known_checks();

/// Executes the configured checks; deterministic given the config.
ReportDocument run_scenario(const ScenarioConfig& config);

const std::vector<std::string>& bundled_scenario_names();
ScenarioConfig bundled_scenario(const std::string& name);

/// Writes <name>_report.json and/or the CSV tables under out_dir;
/// format is "json", "csv" or "both". Files are written atomically.
std::vector<std::string> emit_report(const ReportDocument& report, const std::string& out_dir,
                                     const std::string& format);

}  // namespace leafcalc
