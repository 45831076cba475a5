// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Shared test utilities: random instance generators and independent oracles.
// The oracles deliberately use naive direct evaluation (no log-sum-exp, no
// shared code paths with the implementation they check).
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vaxsim/likelihood.hpp"
#include "vaxsim/random.hpp"
#include "vaxsim/types.hpp"

namespace testutil {

// |a - b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline std::vector<double> random_theta(vaxsim::Rng& rng, int arm_count, double lo = -2.0,
                                        double hi = 3.0) {
  std::vector<double> theta(static_cast<std::size_t>(arm_count), 0.0);
  for (int k = 1; k < arm_count; ++k)
    theta[static_cast<std::size_t>(k)] = lo + (hi - lo) * rng.next_double();
  return theta;
}

struct HistoryOptions {
  int arm_count = 3;
  int rounds = 6;
  int max_risk = 40;
  bool tie_free = false;
  bool every_arm_hit = false;  // guarantee >= 1 infection per arm (for flat-prior fits)
};

inline vaxsim::EventHistory random_history(vaxsim::Rng& rng, const HistoryOptions& opt) {
  vaxsim::EventHistory history(opt.arm_count);
  for (int round = 0; round < opt.rounds; ++round) {
    vaxsim::RoundRecord rec;
    rec.t = round + 1;
    rec.at_risk.resize(static_cast<std::size_t>(opt.arm_count));
    rec.infections.assign(static_cast<std::size_t>(opt.arm_count), 0);
    for (int k = 0; k < opt.arm_count; ++k)
      rec.at_risk[static_cast<std::size_t>(k)] = 1 + rng.next_below(opt.max_risk);
    if (opt.tie_free) {
      rec.infections[static_cast<std::size_t>(rng.next_below(opt.arm_count))] = 1;
    } else {
      std::int64_t total = 0;
      for (int k = 0; k < opt.arm_count; ++k) {
        const auto n = std::min<std::int64_t>(rec.at_risk[static_cast<std::size_t>(k)],
                                              rng.next_below(3));
        rec.infections[static_cast<std::size_t>(k)] = n;
        total += n;
      }
      if (total == 0) rec.infections[static_cast<std::size_t>(rng.next_below(opt.arm_count))] = 1;
    }
    history.add(rec);
  }
  if (opt.every_arm_hit) {
    vaxsim::RoundRecord rec;
    rec.t = opt.rounds + 1;
    rec.at_risk.assign(static_cast<std::size_t>(opt.arm_count), 20);
    rec.infections.assign(static_cast<std::size_t>(opt.arm_count), 1);
    history.add(rec);
  }
  return history;
}

// Oracle for the tie-free partial likelihood: the direct product of
// per-event conditional probabilities e^{-theta_j} / sum_k o_k e^{-theta_k}.
inline double log_partial_likelihood_tie_free(const vaxsim::EventHistory& h,
                                              std::span<const double> theta) {
  double total = 0.0;
  for (const vaxsim::RoundRecord& r : h.rounds()) {
    int event_arm = -1;
    for (std::size_t k = 0; k < theta.size(); ++k)
      if (r.infections[k] == 1) event_arm = static_cast<int>(k);
    double denom = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k)
      denom += static_cast<double>(r.at_risk[k]) * std::exp(-theta[k]);
    total += -theta[static_cast<std::size_t>(event_arm)] - std::log(denom);
  }
  return total;
}

// Oracle for the exact discrete-tie likelihood: enumerate every subset of
// n_t labeled individuals from the round's risk set and sum e^{-theta(subset)}
// for the denominator. Exponential cost; only for tiny instances.
inline double log_exact_ties_bruteforce(const vaxsim::EventHistory& h,
                                        std::span<const double> theta) {
  double total = 0.0;
  for (const vaxsim::RoundRecord& r : h.rounds()) {
    std::vector<int> labels;
    for (std::size_t k = 0; k < theta.size(); ++k)
      for (std::int64_t c = 0; c < r.at_risk[k]; ++c) labels.push_back(static_cast<int>(k));
    std::int64_t n_total = r.total_infections();

    double denom = 0.0;
    std::function<void(std::size_t, std::int64_t, double)> enumerate =
        [&](std::size_t next, std::int64_t remaining, double sum_theta) {
          if (remaining == 0) {
            denom += std::exp(-sum_theta);
            return;
          }
          if (next + static_cast<std::size_t>(remaining) > labels.size()) return;
          enumerate(next + 1, remaining - 1, sum_theta + theta[static_cast<std::size_t>(labels[next])]);
          enumerate(next + 1, remaining, sum_theta);
        };
    enumerate(0, n_total, 0.0);

    double numerator = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k)
      numerator -= static_cast<double>(r.infections[k]) * theta[k];
    total += numerator - std::log(denom);
  }
  return total;
}

// Central finite differences of f with respect to theta_1..theta_{K-1}
// (theta_0 stays pinned).
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> theta, double step = 1e-5) {
  std::vector<double> grad(theta.size() - 1, 0.0);
  for (std::size_t k = 1; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + step;
    const double up = f(theta);
    theta[k] = saved - step;
    const double down = f(theta);
    theta[k] = saved;
    grad[k - 1] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace testutil
