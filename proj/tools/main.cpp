// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// vaxsim CLI.
//   vaxsim run    --config cfg.json [--workers N] [--out DIR]
//   vaxsim hazard --from-csv counts.csv --population P [--window 7]
//                 [--horizon T] [--out hazard.csv]
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vaxsim/experiment.hpp"
#include "vaxsim/hazard.hpp"

namespace {

int run_command(const std::string& config_path, int workers, const std::string& out_override) {
  std::ifstream in(config_path);
  if (!in) throw vaxsim::ConfigError("cannot open config file '" + config_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw vaxsim::ConfigError("config file '" + config_path + "' is not valid JSON: " + e.what());
  }
  vaxsim::ExperimentConfig cfg = vaxsim::ExperimentConfig::from_json(j);
  if (!out_override.empty()) cfg.out_dir = out_override;

  const vaxsim::ExperimentOutput out = vaxsim::run_experiment(cfg, workers);
  vaxsim::emit_outputs(out, cfg.out_dir);

  const vaxsim::AggregateSummary& s = out.summary;
  std::cout << "policy " << cfg.policy.name << ", " << s.replications << " replications\n"
            << "  ISR " << vaxsim::round_sig(s.isr.mean) << " (se " << vaxsim::round_sig(s.isr.se)
            << ")\n"
            << "  BIP " << vaxsim::round_sig(s.bip.mean) << " (se " << vaxsim::round_sig(s.bip.se)
            << ")\n"
            << "  EPR " << vaxsim::round_sig(s.epr.mean) << " (se " << vaxsim::round_sig(s.epr.se)
            << ")\n"
            << "outputs written to " << std::filesystem::absolute(cfg.out_dir).string() << '\n';
  return 0;
}

int hazard_command(const std::string& csv_path, double population, int window, int horizon,
                   const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw vaxsim::ConfigError("cannot open counts file '" + csv_path + "'");
  const auto rows = vaxsim::parse_counts_csv(in);
  vaxsim::BaselineHazard hazard = vaxsim::load_daily_counts(rows, population, window);
  if (horizon > 0) hazard = hazard.truncated(horizon + 1);

  const auto& v = hazard.values();
  double min_v = v[0], max_v = v[0];
  int argmax = 0;
  for (int t = 0; t < hazard.days(); ++t) {
    min_v = std::min(min_v, v[static_cast<std::size_t>(t)]);
    if (v[static_cast<std::size_t>(t)] > max_v) {
      max_v = v[static_cast<std::size_t>(t)];
      argmax = t;
    }
  }
  std::cout << "rows " << rows.size() << ", hazard days " << hazard.days() << " (window " << window
            << ", population " << population << ")\n"
            << "  min " << min_v << ", max " << max_v << " at day " << argmax << '\n'
            << "  valid: all values finite, >= 0 and < 1\n";

  if (!out_path.empty()) {
    std::ofstream stream(out_path);
    if (!stream) throw vaxsim::ComputeError("cannot write to '" + out_path + "'");
    stream << "t,hazard\n";
    for (int t = 0; t < hazard.days(); ++t)
      stream << t << ',' << vaxsim::format_full(hazard.at(t)) << '\n';
    std::cout << "hazard written to " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive vaccine-trial simulator under a proportional hazards infection model"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int workers = 1;
  CLI::App* run = app.add_subcommand("run", "Run seeded replications of a configured experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  run->add_option("--out", out_override, "Output directory (overrides the config)");

  std::string csv_path, hazard_out;
  double population = 0.0;
  int window = 7, horizon = 0;
  CLI::App* hz = app.add_subcommand("hazard", "Preview and validate a baseline hazard from daily counts");
  hz->add_option("--from-csv", csv_path, "CSV with header 'date,count'")->required();
  hz->add_option("--population", population, "Population the counts are divided by")->required();
  hz->add_option("--window", window, "Moving-average window in days");
  hz->add_option("--horizon", horizon, "Require and truncate to horizon+1 days");
  hz->add_option("--out", hazard_out, "Write the resulting hazard series to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_command(config_path, workers, out_override);
    return hazard_command(csv_path, population, window, horizon, hazard_out);
  } catch (const vaxsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
