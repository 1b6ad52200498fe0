// Scenario-driven command line front end: runs bundled or user-supplied
// verification scenarios and writes machine-readable reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "leafcalc/scenario.hpp"

namespace {

using leafcalc::ReportDocument;
using leafcalc::ScenarioConfig;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "reports";
  std::string format = "json";
  int truncation = 0;    // 0 = keep scenario default
  double t_max = 0.0;    // 0 = keep scenario default
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON scenario config (object or array)");
  cmd->add_option("--out", opt.out_dir, "output directory for reports");
  cmd->add_option("--format", opt.format, "report format: json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));
  cmd->add_option("--truncation", opt.truncation, "override spectral truncation M_max");
  cmd->add_option("--tmax", opt.t_max, "override the time horizon");
}

std::vector<ScenarioConfig> load_scenarios(const CommonOptions& opt,
                                           const std::vector<std::string>& bundled) {
  std::vector<ScenarioConfig> configs;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + opt.config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.is_array())
      for (const auto& entry : j) configs.push_back(ScenarioConfig::from_json(entry));
    else
      configs.push_back(ScenarioConfig::from_json(j));
  } else {
    for (const auto& name : bundled) configs.push_back(leafcalc::bundled_scenario(name));
  }
  for (auto& c : configs) {
    if (opt.truncation > 0) c.truncation.m_max = opt.truncation;
    if (opt.t_max > 0) c.t_max = opt.t_max;
  }
  return configs;
}

int run_group(const CommonOptions& opt, const std::vector<std::string>& bundled) {
  std::vector<ScenarioConfig> configs;
  try {
    configs = load_scenarios(opt, bundled);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  bool any_fail = false, any_partial = false;
  for (const auto& config : configs) {
    auto start = std::chrono::steady_clock::now();
    ReportDocument report;
    try {
      report = leafcalc::run_scenario(config);
    } catch (const std::exception& e) {
      std::cerr << "config error in scenario '" << config.name << "': " << e.what() << "\n";
      return 2;
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    leafcalc::emit_report(report, opt.out_dir, opt.format);

    std::printf("%-24s %-7s (%.2fs)\n", config.name.c_str(), report.status.c_str(),
                elapsed.count());
    for (const auto& check : report.checks)
      std::printf("  %-28s %s%s%s\n", check.name.c_str(), check.status.c_str(),
                  check.detail.empty() ? "" : " - ", check.detail.c_str());

    if (report.status == "FAIL") any_fail = true;
    if (report.status == "PARTIAL") any_partial = true;
  }
  if (any_fail) return 1;
  if (any_partial) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tangential calculus and dynamical Lefschetz verification on flat foliated tori"};
  app.require_subcommand(1);

  struct Group {
    const char* command;
    const char* help;
    std::vector<std::string> scenarios;
  };
  const std::vector<Group> groups = {
      {"cohomology", "harmonic bases, Kuenneth and duality checks",
       {"kronecker_cohomology", "oneleaf_cohomology", "product_kunneth"}},
      {"lefschetz", "dynamical Lefschetz checks for flows",
       {"morse_flow", "kronecker_translation"}},
      {"classical", "classical Lefschetz trace formula", {"classical_cat"}},
      {"suspension", "suspension orbit atoms against the integer oracle", {"cat_suspension"}},
      {"intersect", "intersection products against the closed form", {"intersection_products"}},
      {"regularize", "smoothing operator convergence", {"rprime_convergence"}},
      {"all", "every bundled scenario", {}},
  };

  std::vector<std::pair<CommonOptions, std::vector<std::string>>> plans(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto* cmd = app.add_subcommand(groups[i].command, groups[i].help);
    plans[i].second = groups[i].scenarios;
    if (std::string(groups[i].command) == "all")
      plans[i].second = leafcalc::bundled_scenario_names();
    add_common(cmd, plans[i].first);
    cmd->callback([&plans, i] {
      std::exit(run_group(plans[i].first, plans[i].second));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}
