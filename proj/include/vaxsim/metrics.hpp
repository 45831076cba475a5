// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics over replicated trials: in-sample regret (ISR), best-arm
// identification probability (BIP) and expected policy regret (EPR), plus the
// round-by-round trajectories used for plotting.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vaxsim/errors.hpp"
#include "vaxsim/trial.hpp"
#include "vaxsim/types.hpp"

namespace vaxsim {

struct ReplicationResult {
  double isr = 0.0;
  int recommended_arm = 0;
  std::int64_t total_infections = 0;
  std::vector<std::int64_t> infections_by_round;                // length T+1, index 0 is 0
  std::vector<std::vector<std::int64_t>> assignments_by_round;  // [T+1][K], row T all zero
  std::vector<std::vector<double>> assignment_dist_by_round;    // [T+1][K], row T carried forward
  std::string policy;
  std::uint64_t seed = 0;
};

// Batch in-sample regret: (1/T) sum_t sum_k a_{t,k} (theta* - theta_k), the
// per-round regret of the whole arriving batch averaged over rounds.
inline double in_sample_regret(const std::vector<std::vector<std::int64_t>>& assignments_by_round,
                               std::span<const double> thetas, int horizon) {
  if (horizon < 1) throw ConfigError("in_sample_regret: horizon must be >= 1");
  const double theta_best = thetas[static_cast<std::size_t>(argmax_index(thetas))];
  double total = 0.0;
  for (const auto& row : assignments_by_round) {
    if (row.size() != thetas.size()) throw ConfigError("in_sample_regret: arm count mismatch");
    for (std::size_t k = 0; k < row.size(); ++k)
      total += static_cast<double>(row[k]) * (theta_best - thetas[k]);
  }
  return total / static_cast<double>(horizon);
}

inline ReplicationResult replication_from_trial(const TrialResult& trial,
                                                std::span<const double> thetas,
                                                std::string policy_name, std::uint64_t seed) {
  const int horizon = static_cast<int>(trial.assignments.size());
  const std::size_t k_arms = thetas.size();
  ReplicationResult rep;
  rep.policy = std::move(policy_name);
  rep.seed = seed;
  rep.recommended_arm = trial.recommended_arm;

  rep.infections_by_round.assign(static_cast<std::size_t>(horizon) + 1, 0);
  for (const RoundRecord& r : trial.rounds) {
    rep.infections_by_round[static_cast<std::size_t>(r.t)] = r.total_infections();
    rep.total_infections += r.total_infections();
  }

  rep.assignments_by_round = trial.assignments;
  rep.assignments_by_round.emplace_back(k_arms, 0);  // no arrivals at t = T
  rep.assignment_dist_by_round = trial.assignment_dist;
  rep.assignment_dist_by_round.push_back(trial.assignment_dist.back());  // carry forward

  rep.isr = in_sample_regret(rep.assignments_by_round, thetas, horizon);
  return rep;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

namespace detail {

inline MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe out;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace detail

// Fraction of replications recommending the best arm, with the binomial
// standard error sqrt(p(1-p)/B).
inline MeanSe best_arm_probability(std::span<const ReplicationResult> results, int best_arm) {
  if (results.empty()) throw ConfigError("best_arm_probability: need at least one replication");
  double hits = 0.0;
  for (const ReplicationResult& r : results) hits += (r.recommended_arm == best_arm) ? 1.0 : 0.0;
  const auto b = static_cast<double>(results.size());
  const double p = hits / b;
  return {p, std::sqrt(p * (1.0 - p) / b)};
}

// Mean recommendation gap Delta_recommended = theta* - theta_recommended,
// equal to the recommendation-frequency-weighted sum of gaps.
inline MeanSe expected_policy_regret(std::span<const ReplicationResult> results,
                                     std::span<const double> thetas) {
  if (results.empty()) throw ConfigError("expected_policy_regret: need at least one replication");
  const double theta_best = thetas[static_cast<std::size_t>(argmax_index(thetas))];
  std::vector<double> gaps;
  gaps.reserve(results.size());
  for (const ReplicationResult& r : results) {
    if (r.recommended_arm < 0 || r.recommended_arm >= static_cast<int>(thetas.size()))
      throw ConfigError("expected_policy_regret: recommendation out of range");
    gaps.push_back(theta_best - thetas[static_cast<std::size_t>(r.recommended_arm)]);
  }
  return detail::mean_and_se(gaps);
}

struct AggregateSummary {
  MeanSe isr;
  MeanSe bip;
  MeanSe epr;
  int best_arm = 0;
  int replications = 0;
  std::vector<std::vector<double>> mean_assignment_dist;  // [T+1][K]
  std::vector<double> mean_cumulative_infections;         // [T+1]
};

inline AggregateSummary aggregate(std::span<const ReplicationResult> results,
                                  std::span<const double> thetas) {
  if (results.empty()) throw ConfigError("aggregate: need at least one replication");
  AggregateSummary summary;
  summary.best_arm = argmax_index(thetas);
  summary.replications = static_cast<int>(results.size());

  std::vector<double> isrs;
  isrs.reserve(results.size());
  for (const ReplicationResult& r : results) isrs.push_back(r.isr);
  summary.isr = detail::mean_and_se(isrs);
  summary.bip = best_arm_probability(results, summary.best_arm);
  summary.epr = expected_policy_regret(results, thetas);

  const std::size_t rows = results.front().assignment_dist_by_round.size();
  const std::size_t k_arms = thetas.size();
  summary.mean_assignment_dist.assign(rows, std::vector<double>(k_arms, 0.0));
  summary.mean_cumulative_infections.assign(rows, 0.0);
  const double inv_b = 1.0 / static_cast<double>(results.size());
  for (const ReplicationResult& r : results) {
    if (r.assignment_dist_by_round.size() != rows || r.infections_by_round.size() != rows)
      throw ConfigError("aggregate: replications have mismatched horizons");
    double cumulative = 0.0;
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t k = 0; k < k_arms; ++k)
        summary.mean_assignment_dist[t][k] += r.assignment_dist_by_round[t][k] * inv_b;
      cumulative += static_cast<double>(r.infections_by_round[t]);
      summary.mean_cumulative_infections[t] += cumulative * inv_b;
    }
  }
  return summary;
}

}  // namespace vaxsim
