// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "json.hpp"
#include "vaxsim/trial.hpp"

namespace vaxsim {

// Shortest representation that round-trips a double exactly.
inline std::string format_full(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Round to `digits` significant digits (used for summary output).
inline double round_sig(double x, int digits = 4) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

inline nlohmann::json trial_to_json(const TrialResult& result, bool include_ledger = false) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RoundRecord& r : result.rounds)
    rounds.push_back({{"t", r.t}, {"at_risk", r.at_risk}, {"infections", r.infections}});
  nlohmann::json j{{"rounds", std::move(rounds)},
                   {"assignments", result.assignments},
                   {"assignment_dist", result.assignment_dist},
                   {"total_assigned", result.total_assigned},
                   {"total_infected", result.total_infected},
                   {"recommended_arm", result.recommended_arm}};
  if (include_ledger) {
    nlohmann::json ledger = nlohmann::json::array();
    for (const ParticipantRecord& p : result.participants)
      ledger.push_back({{"enroll_round", p.enroll_round},
                        {"arm", p.arm},
                        {"assign_prob", p.assign_prob},
                        {"infected_round", p.infected_round}});
    j["participants"] = std::move(ledger);
  }
  return j;
}

}  // namespace vaxsim
