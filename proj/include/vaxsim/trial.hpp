// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Discrete-time vaccine trial engine. Each round t = 0..T-1 enrolls a batch
// of arriving participants via the policy; each round t = 1..T draws
// infections arm by arm as Binomial(o_{t,k}, 1 - exp(-h(t) e^{-theta_k})),
// removes the infected (chosen uniformly without replacement within the
// arm), records the round, and notifies the policy. Participants enrolled at
// round t are first at risk at round t+1.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vaxsim/errors.hpp"
#include "vaxsim/hazard.hpp"
#include "vaxsim/policies.hpp"
#include "vaxsim/random.hpp"
#include "vaxsim/types.hpp"

namespace vaxsim {

struct TrialConfig {
  int horizon;                          // T
  std::int64_t participants;            // M
  ArmModel arms;
  BaselineHazard hazard;                // length horizon + 1
  std::vector<std::int64_t> arrivals;   // per-round, size horizon; empty => constant M/T

  // Resolved arrival schedule for rounds 0..T-1; validates the config.
  std::vector<std::int64_t> arrival_schedule() const {
    if (horizon < 1) throw ConfigError("trial: horizon must be >= 1");
    if (participants < 1) throw ConfigError("trial: participant count must be >= 1");
    if (hazard.days() != horizon + 1)
      throw ConfigError("trial: hazard has " + std::to_string(hazard.days()) +
                        " days but the horizon needs " + std::to_string(horizon + 1));
    if (arrivals.empty()) {
      if (participants % horizon != 0)
        throw ConfigError("trial: participant count must be divisible by the horizon "
                          "when using the constant arrival schedule");
      return std::vector<std::int64_t>(static_cast<std::size_t>(horizon), participants / horizon);
    }
    if (static_cast<int>(arrivals.size()) != horizon)
      throw ConfigError("trial: arrival schedule must have one entry per round");
    std::int64_t total = 0;
    for (std::int64_t m : arrivals) {
      if (m < 0) throw ConfigError("trial: arrival counts must be non-negative");
      total += m;
    }
    if (total != participants)
      throw ConfigError("trial: arrival schedule must sum to the participant count");
    return arrivals;
  }
};

struct TrialResult {
  std::vector<RoundRecord> rounds;                        // t = 1..T
  std::vector<std::vector<std::int64_t>> assignments;     // [t][k], t = 0..T-1
  std::vector<std::vector<double>> assignment_dist;       // [t][k], t = 0..T-1
  std::vector<ParticipantRecord> participants;
  std::vector<std::int64_t> total_assigned;               // M_{T,k}
  std::vector<std::int64_t> total_infected;               // N_{T,k}
  int recommended_arm = 0;
};

// Infection counts for one round: n_k ~ Binomial(o_k, 1 - exp(-h e^{-theta_k})),
// independent across arms.
inline std::vector<std::int64_t> draw_infection_counts(std::span<const std::int64_t> at_risk,
                                                       double baseline_hazard,
                                                       const ArmModel& arms, Rng& rng) {
  std::vector<std::int64_t> counts(at_risk.size(), 0);
  for (std::size_t k = 0; k < at_risk.size(); ++k) {
    const double p = -std::expm1(-baseline_hazard * std::exp(-arms.thetas[k]));
    counts[k] = rng.next_binomial(at_risk[k], p);
  }
  return counts;
}

inline TrialResult run_trial(const TrialConfig& cfg, Policy& policy, Rng& rng) {
  const std::vector<std::int64_t> schedule = cfg.arrival_schedule();
  const int k_arms = cfg.arms.arm_count();
  const int horizon = cfg.horizon;

  TrialResult result;
  result.rounds.reserve(static_cast<std::size_t>(horizon));
  result.assignments.assign(static_cast<std::size_t>(horizon),
                            std::vector<std::int64_t>(static_cast<std::size_t>(k_arms), 0));
  result.assignment_dist.assign(static_cast<std::size_t>(horizon),
                                std::vector<double>(static_cast<std::size_t>(k_arms), 1.0 / k_arms));
  result.participants.reserve(static_cast<std::size_t>(cfg.participants));
  result.total_assigned.assign(static_cast<std::size_t>(k_arms), 0);
  result.total_infected.assign(static_cast<std::size_t>(k_arms), 0);

  // Exposed-and-uninfected participant ids per arm; arrivals sit in `pending`
  // until the round's draw is done, so they are first at risk next round.
  std::vector<std::vector<std::uint32_t>> active(static_cast<std::size_t>(k_arms));
  std::vector<std::vector<std::uint32_t>> pending(static_cast<std::size_t>(k_arms));
  std::vector<InfectionEvent> events;
  // Rounds without arrivals carry the last consulted distribution forward
  // (uniform before the policy is first consulted).
  std::vector<double> current_dist(static_cast<std::size_t>(k_arms), 1.0 / k_arms);

  for (int t = 0; t <= horizon; ++t) {
    if (t < horizon) {
      if (schedule[static_cast<std::size_t>(t)] > 0) {
        const std::int64_t m = schedule[static_cast<std::size_t>(t)];
        BatchAssignment batch = policy.assign_batch(m, t, rng);
        if (static_cast<std::int64_t>(batch.picks.size()) != m)
          throw ComputeError("trial: policy returned wrong batch size at round " + std::to_string(t));
        if (static_cast<int>(batch.distribution.size()) != k_arms)
          throw ComputeError("trial: policy distribution has wrong arm count at round " +
                             std::to_string(t));
        current_dist = std::move(batch.distribution);
        for (const ArmChoice& pick : batch.picks) {
          if (pick.arm < 0 || pick.arm >= k_arms)
            throw ComputeError("trial: policy chose an arm out of range");
          const auto id = static_cast<std::uint32_t>(result.participants.size());
          result.participants.push_back(
              {static_cast<std::int32_t>(t), static_cast<std::int32_t>(pick.arm), pick.prob, -1});
          pending[static_cast<std::size_t>(pick.arm)].push_back(id);
          ++result.assignments[static_cast<std::size_t>(t)][static_cast<std::size_t>(pick.arm)];
          ++result.total_assigned[static_cast<std::size_t>(pick.arm)];
        }
      }
      result.assignment_dist[static_cast<std::size_t>(t)] = current_dist;
    }

    if (t >= 1) {
      RoundRecord record;
      record.t = t;
      record.at_risk.resize(static_cast<std::size_t>(k_arms));
      for (int k = 0; k < k_arms; ++k)
        record.at_risk[static_cast<std::size_t>(k)] =
            static_cast<std::int64_t>(active[static_cast<std::size_t>(k)].size());
      record.infections =
          draw_infection_counts(record.at_risk, cfg.hazard.at(t), cfg.arms, rng);

      events.clear();
      for (int k = 0; k < k_arms; ++k) {
        auto& pool = active[static_cast<std::size_t>(k)];
        for (std::int64_t j = 0; j < record.infections[static_cast<std::size_t>(k)]; ++j) {
          const int pick = rng.next_below(static_cast<int>(pool.size()));
          const std::uint32_t id = pool[static_cast<std::size_t>(pick)];
          pool[static_cast<std::size_t>(pick)] = pool.back();
          pool.pop_back();
          ParticipantRecord& person = result.participants[id];
          person.infected_round = t;
          events.push_back({person.enroll_round, person.arm, person.assign_prob});
          ++result.total_infected[static_cast<std::size_t>(k)];
        }
      }
      policy.observe(record, events);
      result.rounds.push_back(std::move(record));
    }

    for (int k = 0; k < k_arms; ++k) {
      auto& pend = pending[static_cast<std::size_t>(k)];
      auto& act = active[static_cast<std::size_t>(k)];
      act.insert(act.end(), pend.begin(), pend.end());
      pend.clear();
    }
  }

  result.recommended_arm = policy.recommend();
  return result;
}

}  // namespace vaxsim
