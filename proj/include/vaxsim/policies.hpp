// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Allocation policies behind one interface: uniform randomization (rct),
// partial-likelihood Thompson sampling (plts), its top-two variant (ttplts),
// and delayed exponential weights (dew). A policy assigns arriving
// participants, observes each round's infections, and recommends an arm at
// the end of the trial.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vaxsim/errors.hpp"
#include "vaxsim/likelihood.hpp"
#include "vaxsim/random.hpp"
#include "vaxsim/types.hpp"

namespace vaxsim {

struct ArmChoice {
  int arm = 0;
  double prob = 1.0;  // the policy's probability of this arm at this round
};

struct BatchAssignment {
  std::vector<ArmChoice> picks;      // one per arriving participant
  std::vector<double> distribution;  // the per-participant distribution used this round
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual BatchAssignment assign_batch(std::int64_t m, int t, Rng& rng) = 0;
  virtual void observe(const RoundRecord& round, std::span<const InfectionEvent> infections) = 0;
  virtual int recommend() = 0;
  virtual std::string_view name() const = 0;
};

namespace detail {

inline BatchAssignment uniform_batch(int arm_count, std::int64_t m, Rng& rng) {
  BatchAssignment out;
  const double p = 1.0 / arm_count;
  out.distribution.assign(static_cast<std::size_t>(arm_count), p);
  out.picks.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) out.picks.push_back({rng.next_below(arm_count), p});
  return out;
}

// Index of the second-largest coordinate (the best arm excluded).
inline int second_largest_index(std::span<const double> v) {
  const int best = argmax_index(v);
  int second = best == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (i != best && v[i] > v[second]) second = i;
  return second;
}

}  // namespace detail

// Uniformly randomized trial. Recommends the arm with the lowest observed
// infection rate; ties go to the lowest index.
class RctPolicy final : public Policy {
 public:
  explicit RctPolicy(int arm_count)
      : arm_count_(arm_count), assigned_(arm_count, 0), infected_(arm_count, 0) {
    if (arm_count < 2) throw ConfigError("rct: need at least 2 arms");
  }

  BatchAssignment assign_batch(std::int64_t m, int /*t*/, Rng& rng) override {
    BatchAssignment out = detail::uniform_batch(arm_count_, m, rng);
    for (const ArmChoice& c : out.picks) ++assigned_[static_cast<std::size_t>(c.arm)];
    return out;
  }

  void observe(const RoundRecord& round, std::span<const InfectionEvent>) override {
    for (int k = 0; k < arm_count_; ++k)
      infected_[static_cast<std::size_t>(k)] += round.infections[static_cast<std::size_t>(k)];
  }

  int recommend() override {
    int best = -1;
    double best_rate = std::numeric_limits<double>::infinity();
    for (int k = 0; k < arm_count_; ++k) {
      if (assigned_[static_cast<std::size_t>(k)] == 0) continue;
      const double rate = static_cast<double>(infected_[static_cast<std::size_t>(k)]) /
                          static_cast<double>(assigned_[static_cast<std::size_t>(k)]);
      if (rate < best_rate) {
        best_rate = rate;
        best = k;
      }
    }
    if (best < 0) throw ComputeError("rct: cannot recommend, no arm ever enrolled a participant");
    return best;
  }

  std::string_view name() const override { return "rct"; }

 private:
  int arm_count_;
  std::vector<std::int64_t> assigned_;
  std::vector<std::int64_t> infected_;
};

// Shared machinery for the Thompson-sampling policies: event-round history,
// a once-per-round Laplace refresh warm-started at the previous mode, and an
// argmax-frequency estimate from auxiliary posterior draws. The frequency
// estimate is add-one smoothed so every recorded assignment probability is
// strictly positive; it is diagnostic only and never feeds back into the
// arm draws.
class PosteriorPolicyBase : public Policy {
 public:
  PosteriorPolicyBase(int arm_count, double prior_precision, int aux_draws = 1000)
      : arm_count_(arm_count),
        prior_precision_(prior_precision),
        aux_draws_(aux_draws),
        history_(arm_count),
        warm_mode_(static_cast<std::size_t>(arm_count) - 1, 0.0) {
    if (prior_precision < 0.0) throw ConfigError("thompson policy: prior precision must be >= 0");
    if (aux_draws < 1) throw ConfigError("thompson policy: aux draw count must be >= 1");
  }

  void observe(const RoundRecord& round, std::span<const InfectionEvent>) override {
    if (round.total_infections() > 0) {
      history_.add(round);
      any_infection_ = true;
    }
  }

  // Largest coordinate of the final MAP, the placebo's pinned zero included.
  // With no events ever observed this falls back to the placebo by the
  // lowest-index tie rule.
  int recommend() override {
    if (history_.empty()) return 0;
    const NewtonResult nm = newton_map(history_, prior_precision_, warm_mode_);
    const std::vector<double> full = detail::with_placebo(nm.mode);
    return argmax_index(full);
  }

 protected:
  void refresh_round_state(Rng& rng) {
    posterior_ = laplace(history_, prior_precision_, warm_mode_);
    warm_mode_ = posterior_->mode;
    argmax_freq_.assign(static_cast<std::size_t>(arm_count_), 0.0);
    for (int d = 0; d < aux_draws_; ++d) {
      sample_posterior(*posterior_, rng, normals_, theta_);
      argmax_freq_[static_cast<std::size_t>(argmax_index(theta_))] += 1.0;
    }
    const double denom = static_cast<double>(aux_draws_ + arm_count_);
    for (double& f : argmax_freq_) f = (f + 1.0) / denom;
  }

  int arm_count_;
  double prior_precision_;
  int aux_draws_;
  EventHistory history_;
  std::vector<double> warm_mode_;
  std::optional<PosteriorApprox> posterior_;
  std::vector<double> argmax_freq_;
  bool any_infection_ = false;
  std::vector<double> normals_, theta_;  // sampling scratch
};

// Thompson sampling on the partial-likelihood posterior: uniform until the
// first infection anywhere, then one Laplace refresh per round and an
// independent posterior draw per participant, assigned to the draw's argmax.
class PltsPolicy final : public PosteriorPolicyBase {
 public:
  PltsPolicy(int arm_count, double prior_precision, int aux_draws = 1000)
      : PosteriorPolicyBase(arm_count, prior_precision, aux_draws) {}

  BatchAssignment assign_batch(std::int64_t m, int /*t*/, Rng& rng) override {
    if (!any_infection_) return detail::uniform_batch(arm_count_, m, rng);
    refresh_round_state(rng);
    BatchAssignment out;
    out.distribution = argmax_freq_;
    out.picks.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
      sample_posterior(*posterior_, rng, normals_, theta_);
      const int arm = argmax_index(theta_);
      out.picks.push_back({arm, argmax_freq_[static_cast<std::size_t>(arm)]});
    }
    return out;
  }

  std::string_view name() const override { return "plts"; }
};

// Top-two variant: keep the draw's argmax with probability beta, otherwise
// redraw until a different argmax appears (capped, with a deterministic
// fallback to the last draw's runner-up).
class TtpltsPolicy final : public PosteriorPolicyBase {
 public:
  static constexpr int kRedrawCap = 1000;

  TtpltsPolicy(int arm_count, double beta, double prior_precision, int aux_draws = 1000)
      : PosteriorPolicyBase(arm_count, prior_precision, aux_draws), beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0) && beta != 1.0)
      throw ConfigError("ttplts: beta must lie in (0, 1]");
  }

  BatchAssignment assign_batch(std::int64_t m, int /*t*/, Rng& rng) override {
    if (!any_infection_) return detail::uniform_batch(arm_count_, m, rng);
    refresh_round_state(rng);
    BatchAssignment out;
    out.distribution = top_two_distribution();
    out.picks.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
      sample_posterior(*posterior_, rng, normals_, theta_);
      const int first = argmax_index(theta_);
      int arm = first;
      if (!rng.next_bernoulli(beta_)) {
        arm = -1;
        for (int attempt = 0; attempt < kRedrawCap; ++attempt) {
          sample_posterior(*posterior_, rng, normals_, theta_);
          const int challenger = argmax_index(theta_);
          if (challenger != first) {
            arm = challenger;
            break;
          }
        }
        if (arm < 0) {  // near-degenerate posterior; not an error
          ++redraw_cap_hits_;
          arm = detail::second_largest_index(theta_);
        }
      }
      out.picks.push_back({arm, out.distribution[static_cast<std::size_t>(arm)]});
    }
    return out;
  }

  std::string_view name() const override { return "ttplts"; }

  std::int64_t redraw_cap_hits() const { return redraw_cap_hits_; }

 private:
  // Assignment distribution implied by the top-two rule when the argmax
  // distribution is q: p_a = beta q_a + (1-beta) q_a sum_{i != a} q_i/(1-q_i).
  // Uses the smoothed q, so every term is well-defined.
  std::vector<double> top_two_distribution() const {
    const std::vector<double>& q = argmax_freq_;
    std::vector<double> p(q.size(), 0.0);
    for (std::size_t a = 0; a < q.size(); ++a) {
      double redirected = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (i != a) redirected += q[i] / (1.0 - q[i]);
      p[a] = beta_ * q[a] + (1.0 - beta_) * q[a] * redirected;
    }
    return p;
  }

  double beta_;
  std::int64_t redraw_cap_hits_ = 0;
};

// Delayed exponential weights: assign proportionally to weights, and on each
// observed infection decay the weight of that participant's arm by
// exp(-eta / p), where p was the assignment probability at enrollment.
// Weights are kept in log space to survive long runs of updates.
class DewPolicy final : public Policy {
 public:
  DewPolicy(int arm_count, double eta) : arm_count_(arm_count), eta_(eta), log_weights_(arm_count, 0.0) {
    if (arm_count < 2) throw ConfigError("dew: need at least 2 arms");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("dew: eta must be finite and >= 0");
  }

  BatchAssignment assign_batch(std::int64_t m, int /*t*/, Rng& rng) override {
    BatchAssignment out;
    out.distribution = probabilities();
    out.picks.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) {
      const int arm = rng.next_categorical(out.distribution);
      out.picks.push_back({arm, out.distribution[static_cast<std::size_t>(arm)]});
    }
    return out;
  }

  void observe(const RoundRecord&, std::span<const InfectionEvent> infections) override {
    for (const InfectionEvent& ev : infections)
      log_weights_[static_cast<std::size_t>(ev.arm)] -= eta_ / ev.assign_prob;
  }

  // Largest weight wins; an arm never infected keeps the maximal weight.
  int recommend() override { return argmax_index(log_weights_); }

  std::string_view name() const override { return "dew"; }

  const std::vector<double>& log_weights() const { return log_weights_; }

  std::vector<double> probabilities() const {
    double shift = log_weights_[0];
    for (double lw : log_weights_) shift = std::max(shift, lw);
    std::vector<double> p(log_weights_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = std::exp(log_weights_[k] - shift);
      total += p[k];
    }
    for (double& v : p) v /= total;
    return p;
  }

 private:
  int arm_count_;
  double eta_;
  std::vector<double> log_weights_;
};

struct PolicySpec {
  std::string name;                // rct | plts | ttplts | dew
  double eta = 0.1;                // dew learning rate
  double beta = 0.5;               // ttplts top-two probability
  double prior_precision = 0.01;   // plts/ttplts ridge ("lambda")
};

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int arm_count) {
  if (spec.name == "rct") return std::make_unique<RctPolicy>(arm_count);
  if (spec.name == "plts") return std::make_unique<PltsPolicy>(arm_count, spec.prior_precision);
  if (spec.name == "ttplts")
    return std::make_unique<TtpltsPolicy>(arm_count, spec.beta, spec.prior_precision);
  if (spec.name == "dew") return std::make_unique<DewPolicy>(arm_count, spec.eta);
  throw ConfigError("unknown policy '" + spec.name + "' (expected rct, plts, ttplts or dew)");
}

}  // namespace vaxsim
