// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: build the configured baseline hazard, run B seeded
// replications (optionally across worker threads), aggregate the metrics,
// and write the summary/CSV outputs. Replication b always consumes the
// stream derived from (master seed, b), so results are byte-identical for
// any worker count and completion order.
#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vaxsim/errors.hpp"
#include "vaxsim/hazard.hpp"
#include "vaxsim/metrics.hpp"
#include "vaxsim/policies.hpp"
#include "vaxsim/random.hpp"
#include "vaxsim/serialize.hpp"
#include "vaxsim/trial.hpp"

namespace vaxsim {

struct HazardConfig {
  enum class Kind { synthetic, csv };
  Kind kind = Kind::synthetic;
  TwoWaveParams synthetic;  // used when kind == synthetic
  std::string csv_path;     // used when kind == csv
  double population = 0.0;
  int window = 7;
};

struct ExperimentConfig {
  int horizon = 200;                  // T
  std::int64_t participants = 60000;  // M
  std::vector<double> thetas;         // length K, thetas[0] = 0
  HazardConfig hazard;
  PolicySpec policy;
  int replications = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  int arm_count() const { return static_cast<int>(thetas.size()); }

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.horizon = detail::require_field<int>(j, "T");
  cfg.participants = detail::require_field<std::int64_t>(j, "M");
  cfg.thetas = detail::require_field<std::vector<double>>(j, "thetas");
  cfg.replications = detail::require_field<int>(j, "replications");
  cfg.seed = detail::require_field<std::uint64_t>(j, "seed");
  cfg.out_dir = detail::optional_field<std::string>(j, "out_dir", "out");
  if (j.contains("K") && detail::require_field<int>(j, "K") != cfg.arm_count())
    throw ConfigError("config: K does not match the length of thetas");

  const auto hj = j.contains("hazard") ? j.at("hazard") : nlohmann::json{{"type", "synthetic"}};
  const auto kind = detail::optional_field<std::string>(hj, "type", "synthetic");
  if (kind == "synthetic") {
    cfg.hazard.kind = HazardConfig::Kind::synthetic;
    TwoWaveParams defaults;
    cfg.hazard.synthetic.peak1 = detail::optional_field<double>(hj, "peak1", defaults.peak1);
    cfg.hazard.synthetic.day1 = detail::optional_field<int>(hj, "day1", defaults.day1);
    cfg.hazard.synthetic.width1 = detail::optional_field<double>(hj, "width1", defaults.width1);
    cfg.hazard.synthetic.peak2 = detail::optional_field<double>(hj, "peak2", defaults.peak2);
    cfg.hazard.synthetic.day2 = detail::optional_field<int>(hj, "day2", defaults.day2);
    cfg.hazard.synthetic.width2 = detail::optional_field<double>(hj, "width2", defaults.width2);
  } else if (kind == "csv") {
    cfg.hazard.kind = HazardConfig::Kind::csv;
    cfg.hazard.csv_path = detail::require_field<std::string>(hj, "path");
    cfg.hazard.population = detail::require_field<double>(hj, "population");
    cfg.hazard.window = detail::optional_field<int>(hj, "window", 7);
  } else {
    throw ConfigError("config: hazard.type must be 'synthetic' or 'csv'");
  }

  const auto pj = j.contains("policy") ? j.at("policy") : nlohmann::json{{"name", "rct"}};
  cfg.policy.name = detail::require_field<std::string>(pj, "name");
  cfg.policy.eta = detail::optional_field<double>(pj, "eta", cfg.policy.eta);
  cfg.policy.beta = detail::optional_field<double>(pj, "beta", cfg.policy.beta);
  cfg.policy.prior_precision =
      detail::optional_field<double>(pj, "lambda", cfg.policy.prior_precision);
  return cfg;
}

inline nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json hj;
  if (hazard.kind == HazardConfig::Kind::synthetic) {
    hj = {{"type", "synthetic"},       {"peak1", hazard.synthetic.peak1},
          {"day1", hazard.synthetic.day1}, {"width1", hazard.synthetic.width1},
          {"peak2", hazard.synthetic.peak2}, {"day2", hazard.synthetic.day2},
          {"width2", hazard.synthetic.width2}};
  } else {
    hj = {{"type", "csv"},
          {"path", hazard.csv_path},
          {"population", hazard.population},
          {"window", hazard.window}};
  }
  nlohmann::json pj{{"name", policy.name}};
  if (policy.name == "dew") pj["eta"] = policy.eta;
  if (policy.name == "ttplts") pj["beta"] = policy.beta;
  if (policy.name == "plts" || policy.name == "ttplts") pj["lambda"] = policy.prior_precision;
  return nlohmann::json{{"T", horizon},           {"M", participants},
                        {"K", arm_count()},       {"thetas", thetas},
                        {"hazard", std::move(hj)}, {"policy", std::move(pj)},
                        {"replications", replications}, {"seed", seed}};
}

inline BaselineHazard build_hazard(const HazardConfig& hc, int horizon) {
  if (hc.kind == HazardConfig::Kind::synthetic)
    return synthetic_two_wave(hc.synthetic, horizon);
  std::ifstream in(hc.csv_path);
  if (!in) throw ConfigError("hazard: cannot open '" + hc.csv_path + "'");
  const auto rows = parse_counts_csv(in);
  return load_daily_counts(rows, hc.population, hc.window).truncated(horizon + 1);
}

struct ExperimentOutput {
  ExperimentConfig config;
  BaselineHazard hazard;
  std::vector<ReplicationResult> replications;
  AggregateSummary summary;
};

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, int workers = 1) {
  if (cfg.replications < 1) throw ConfigError("config: replications must be >= 1");
  if (cfg.thetas.empty()) throw ConfigError("config: thetas must be provided");

  const ArmModel arms{std::vector<double>(cfg.thetas)};
  const BaselineHazard hazard = build_hazard(cfg.hazard, cfg.horizon);
  const TrialConfig trial_cfg{cfg.horizon, cfg.participants, arms, hazard, {}};
  (void)trial_cfg.arrival_schedule();  // fail fast on bad T/M combinations
  (void)make_policy(cfg.policy, cfg.arm_count());  // fail fast on bad policy spec

  const int b_total = cfg.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(b_total));

  auto run_one = [&](int b) {
    Rng rng = Rng::for_stream(cfg.seed, static_cast<std::uint64_t>(b));
    const auto policy = make_policy(cfg.policy, cfg.arm_count());
    const TrialResult trial = run_trial(trial_cfg, *policy, rng);
    results[static_cast<std::size_t>(b)] = replication_from_trial(
        trial, cfg.thetas, std::string(policy->name()),
        stream_seed(cfg.seed, static_cast<std::uint64_t>(b)));
  };

  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, b_total));
  if (workers == 1) {
    for (int b = 0; b < b_total; ++b) run_one(b);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto loop = [&] {
      for (;;) {
        const int b = next.fetch_add(1);
        if (b >= b_total) return;
        try {
          run_one(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentOutput out{cfg, hazard, std::move(results), {}};
  out.summary = aggregate(out.replications, cfg.thetas);
  return out;
}

// Writes summary.json, replications.csv, trajectories.csv and hazard.csv.
// Summary metrics are rounded to 4 significant digits; CSVs carry full
// precision.
inline void emit_outputs(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* file_name) {
    std::ofstream stream(dir / file_name);
    if (!stream) throw ComputeError("cannot write to '" + (dir / file_name).string() + "'");
    return stream;
  };

  {
    const AggregateSummary& s = out.summary;
    nlohmann::json j{
        {"config", out.config.to_json()},
        {"best_arm", s.best_arm},
        {"replications", s.replications},
        {"metrics",
         {{"isr", {{"mean", round_sig(s.isr.mean)}, {"se", round_sig(s.isr.se)}}},
          {"bip", {{"mean", round_sig(s.bip.mean)}, {"se", round_sig(s.bip.se)}}},
          {"epr", {{"mean", round_sig(s.epr.mean)}, {"se", round_sig(s.epr.se)}}}}}};
    auto stream = open("summary.json");
    stream << j.dump(2) << '\n';
  }

  {
    auto stream = open("replications.csv");
    stream << "rep,seed,isr,recommended_arm,total_infections\n";
    for (std::size_t b = 0; b < out.replications.size(); ++b) {
      const ReplicationResult& r = out.replications[b];
      stream << b << ',' << r.seed << ',' << format_full(r.isr) << ',' << r.recommended_arm << ','
             << r.total_infections << '\n';
    }
  }

  {
    auto stream = open("trajectories.csv");
    const std::size_t k_arms = out.config.thetas.size();
    stream << "t";
    for (std::size_t k = 0; k < k_arms; ++k) stream << ",share_" << k;
    stream << ",cum_infections\n";
    for (std::size_t t = 0; t < out.summary.mean_assignment_dist.size(); ++t) {
      stream << t;
      for (std::size_t k = 0; k < k_arms; ++k)
        stream << ',' << format_full(out.summary.mean_assignment_dist[t][k]);
      stream << ',' << format_full(out.summary.mean_cumulative_infections[t]) << '\n';
    }
  }

  {
    auto stream = open("hazard.csv");
    stream << "t,hazard\n";
    for (int t = 0; t < out.hazard.days(); ++t)
      stream << t << ',' << format_full(out.hazard.at(t)) << '\n';
  }
}

}  // namespace vaxsim
