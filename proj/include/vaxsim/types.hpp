// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace vaxsim {

// Arms are 0-indexed throughout; arm 0 is the placebo.

// Per-round sufficient statistics: the risk set at the moment infections were
// drawn, and the infection counts that were drawn. This is all the partial
// likelihood ever sees.
struct RoundRecord {
  int t = 0;
  std::vector<std::int64_t> at_risk;     // o_{t,k}
  std::vector<std::int64_t> infections;  // n_{t,k}

  std::int64_t total_infections() const {
    return std::accumulate(infections.begin(), infections.end(), std::int64_t{0});
  }
};

struct ParticipantRecord {
  std::int32_t enroll_round = 0;
  std::int32_t arm = 0;
  double assign_prob = 1.0;        // probability of the arm actually chosen
  std::int32_t infected_round = -1;  // -1 while active

  bool active() const { return infected_round < 0; }
};

// Delivered to policies for each newly infected participant.
struct InfectionEvent {
  std::int32_t enroll_round = 0;
  std::int32_t arm = 0;
  double assign_prob = 1.0;
};

// Lowest index attaining the maximum.
inline int argmax_index(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace vaxsim
