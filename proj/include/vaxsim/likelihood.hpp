// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
//
// Partial likelihood for the proportional hazards model on grouped per-round
// data, with the Breslow correction for tied events:
//
//   log L(theta) = sum_t [ -sum_k n_{t,k} theta_k
//                          - n_t * log( sum_i o_{t,i} e^{-theta_i} ) ]
//
// plus its gradient/Hessian, a damped-Newton MAP solver with an optional
// Gaussian ridge prior, and the Gaussian (Laplace) posterior approximation
// used for sampling. theta_0 (placebo) is pinned at zero; derivatives are
// taken with respect to theta_1..theta_{K-1}.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vaxsim/errors.hpp"
#include "vaxsim/linalg.hpp"
#include "vaxsim/random.hpp"
#include "vaxsim/types.hpp"

namespace vaxsim {

// The event rounds of a trial: rounds with at least one infection, in the
// order observed. Zero-event rounds contribute nothing to the partial
// likelihood and are dropped on insertion.
class EventHistory {
 public:
  explicit EventHistory(int arm_count) : arm_count_(arm_count), totals_(arm_count, 0) {
    if (arm_count < 2) throw ConfigError("event history: need at least 2 arms");
  }

  void add(const RoundRecord& r) {
    if (static_cast<int>(r.at_risk.size()) != arm_count_ ||
        static_cast<int>(r.infections.size()) != arm_count_)
      throw ConfigError("event history: record arm count mismatch");
    std::int64_t total = 0;
    for (int k = 0; k < arm_count_; ++k) {
      const auto o = r.at_risk[static_cast<std::size_t>(k)];
      const auto n = r.infections[static_cast<std::size_t>(k)];
      if (o < 0 || n < 0 || n > o)
        throw ConfigError("event history: need 0 <= n_{t,k} <= o_{t,k} at round " +
                          std::to_string(r.t));
      total += n;
    }
    if (total == 0) return;
    for (int k = 0; k < arm_count_; ++k)
      totals_[static_cast<std::size_t>(k)] += r.infections[static_cast<std::size_t>(k)];
    rounds_.push_back(r);
  }

  int arm_count() const { return arm_count_; }
  bool empty() const { return rounds_.empty(); }
  std::size_t event_round_count() const { return rounds_.size(); }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::int64_t total_infections(int k) const { return totals_[static_cast<std::size_t>(k)]; }

 private:
  int arm_count_;
  std::vector<std::int64_t> totals_;
  std::vector<RoundRecord> rounds_;
};

namespace detail {

// log sum_{k: o_k > 0} o_k e^{-theta_k}, max-shifted for overflow safety.
inline double log_risk_mass(std::span<const std::int64_t> at_risk, std::span<const double> thetas) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < at_risk.size(); ++k) {
    if (at_risk[k] <= 0) continue;
    shift = std::max(shift, std::log(static_cast<double>(at_risk[k])) - thetas[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < at_risk.size(); ++k) {
    if (at_risk[k] <= 0) continue;
    sum += std::exp(std::log(static_cast<double>(at_risk[k])) - thetas[k] - shift);
  }
  return shift + std::log(sum);
}

// w_k = o_k e^{-theta_k} / sum_i o_i e^{-theta_i}; zero where o_k = 0.
inline void risk_weights(std::span<const std::int64_t> at_risk, std::span<const double> thetas,
                         std::span<double> w) {
  const double lse = log_risk_mass(at_risk, thetas);
  for (std::size_t k = 0; k < at_risk.size(); ++k)
    w[k] = at_risk[k] > 0 ? std::exp(std::log(static_cast<double>(at_risk[k])) - thetas[k] - lse)
                          : 0.0;
}

inline void check_theta(const EventHistory& h, std::span<const double> thetas) {
  if (static_cast<int>(thetas.size()) != h.arm_count())
    throw ConfigError("likelihood: theta length does not match arm count");
  for (double t : thetas)
    if (!std::isfinite(t)) throw ConfigError("likelihood: non-finite theta");
}

}  // namespace detail

// Log Breslow partial likelihood. Empty history -> 0 (log of an empty
// product).
inline double log_breslow(const EventHistory& h, std::span<const double> thetas) {
  detail::check_theta(h, thetas);
  double total = 0.0;
  for (const RoundRecord& r : h.rounds()) {
    const double lse = detail::log_risk_mass(r.at_risk, thetas);
    double round_term = 0.0;
    std::int64_t n_total = 0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      round_term -= static_cast<double>(r.infections[k]) * thetas[k];
      n_total += r.infections[k];
    }
    total += round_term - static_cast<double>(n_total) * lse;
  }
  return total;
}

// Log of the exact discrete-tie partial likelihood. The denominator sums
// e^{-theta(l)} over every subset l of n_t individuals from the round's risk
// set; individuals within an arm are exchangeable, so the sum collapses to a
// convolution over per-arm selection counts weighted by binomial
// coefficients. Combinatorial guard: per-round n_t <= 12 and total risk set
// <= 30. Intended as a small-instance oracle.
inline double log_exact_ties(const EventHistory& h, std::span<const double> thetas) {
  detail::check_theta(h, thetas);
  double total = 0.0;
  for (const RoundRecord& r : h.rounds()) {
    std::int64_t n_total = 0, o_total = 0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      n_total += r.infections[k];
      o_total += r.at_risk[k];
    }
    if (n_total > 12 || o_total > 30)
      throw ComputeError("log_exact_ties: instance exceeds size guard (n_t <= 12, sum o <= 30)");

    // poly[c] = sum over ways to pick c individuals, weighted by e^{-theta}.
    std::vector<double> poly(static_cast<std::size_t>(n_total) + 1, 0.0);
    poly[0] = 1.0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      const std::int64_t o = r.at_risk[k];
      if (o <= 0) continue;
      const double decay = std::exp(-thetas[k]);
      std::vector<double> arm_poly(static_cast<std::size_t>(std::min<std::int64_t>(o, n_total)) + 1);
      double coeff = 1.0;  // C(o, c) * decay^c
      arm_poly[0] = 1.0;
      for (std::size_t c = 1; c < arm_poly.size(); ++c) {
        coeff *= static_cast<double>(o - static_cast<std::int64_t>(c) + 1) /
                 static_cast<double>(c) * decay;
        arm_poly[c] = coeff;
      }
      std::vector<double> next(poly.size(), 0.0);
      for (std::size_t a = 0; a < poly.size(); ++a) {
        if (poly[a] == 0.0) continue;
        for (std::size_t b = 0; b < arm_poly.size() && a + b < next.size(); ++b)
          next[a + b] += poly[a] * arm_poly[b];
      }
      poly.swap(next);
    }
    double numerator = 0.0;
    for (std::size_t k = 0; k < thetas.size(); ++k)
      numerator -= static_cast<double>(r.infections[k]) * thetas[k];
    total += numerator - std::log(poly[static_cast<std::size_t>(n_total)]);
  }
  return total;
}

// Gradient of log_breslow with respect to theta_1..theta_{K-1}:
// d/dtheta_k = -sum_t n_{t,k} + sum_t n_t w_{t,k}.
inline std::vector<double> grad_log_breslow(const EventHistory& h, std::span<const double> thetas) {
  detail::check_theta(h, thetas);
  const int k_arms = h.arm_count();
  std::vector<double> grad(static_cast<std::size_t>(k_arms) - 1, 0.0);
  std::vector<double> w(static_cast<std::size_t>(k_arms));
  for (const RoundRecord& r : h.rounds()) {
    detail::risk_weights(r.at_risk, thetas, w);
    const auto n_total = static_cast<double>(r.total_infections());
    for (int k = 1; k < k_arms; ++k)
      grad[static_cast<std::size_t>(k) - 1] +=
          -static_cast<double>(r.infections[static_cast<std::size_t>(k)]) +
          n_total * w[static_cast<std::size_t>(k)];
  }
  return grad;
}

// Hessian of log_breslow over theta_1..theta_{K-1}:
// H_{jk} = -sum_t n_t (delta_{jk} w_{t,j} - w_{t,j} w_{t,k}).
// Symmetric negative semi-definite.
inline SquareMatrix hessian_log_breslow(const EventHistory& h, std::span<const double> thetas) {
  detail::check_theta(h, thetas);
  const int dim = h.arm_count() - 1;
  SquareMatrix hess(dim);
  std::vector<double> w(static_cast<std::size_t>(h.arm_count()));
  for (const RoundRecord& r : h.rounds()) {
    detail::risk_weights(r.at_risk, thetas, w);
    const auto n_total = static_cast<double>(r.total_infections());
    for (int j = 0; j < dim; ++j) {
      const double wj = w[static_cast<std::size_t>(j) + 1];
      for (int k = 0; k < dim; ++k) {
        const double wk = w[static_cast<std::size_t>(k) + 1];
        hess(j, k) -= n_total * ((j == k ? wj : 0.0) - wj * wk);
      }
    }
  }
  return hess;
}

struct NewtonResult {
  std::vector<double> mode;  // theta_1..theta_{K-1}
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline std::vector<double> with_placebo(std::span<const double> tail) {
  std::vector<double> full(tail.size() + 1, 0.0);
  for (std::size_t i = 0; i < tail.size(); ++i) full[i + 1] = tail[i];
  return full;
}

}  // namespace detail

// MAP of the ridge-penalized log partial likelihood
//   f(theta) = log_breslow(theta) - (lambda/2) ||theta||^2
// by damped Newton with step halving. Terminates when the penalized gradient
// infinity-norm drops below 1e-8, or flags non-convergence after 100
// iterations. With lambda = 0 the problem is unbounded whenever a
// non-placebo arm has positive risk sets but no events, so that case is
// rejected up front.
inline NewtonResult newton_map(const EventHistory& h, double prior_precision,
                               std::vector<double> init = {}) {
  const int dim = h.arm_count() - 1;
  if (prior_precision < 0.0 || !std::isfinite(prior_precision))
    throw ConfigError("newton_map: prior precision must be finite and >= 0");
  if (init.empty()) init.assign(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(init.size()) != dim)
    throw ConfigError("newton_map: init length does not match arm count");
  if (prior_precision == 0.0) {
    for (int k = 1; k < h.arm_count(); ++k)
      if (h.total_infections(k) == 0)
        throw ComputeError(
            "newton_map: flat prior with an event-free arm makes the MAP unbounded; "
            "use a prior precision > 0");
  }

  auto objective = [&](std::span<const double> tail) {
    double penalty = 0.0;
    for (double v : tail) penalty += v * v;
    return log_breslow(h, detail::with_placebo(tail)) - 0.5 * prior_precision * penalty;
  };

  NewtonResult result;
  result.mode = std::move(init);
  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIter = 100;
  double f_current = objective(result.mode);

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    const std::vector<double> full = detail::with_placebo(result.mode);
    std::vector<double> grad = grad_log_breslow(h, full);
    for (int i = 0; i < dim; ++i) grad[static_cast<std::size_t>(i)] -= prior_precision * result.mode[static_cast<std::size_t>(i)];
    double grad_norm = 0.0;
    for (double g : grad) grad_norm = std::max(grad_norm, std::fabs(g));
    if (grad_norm < kGradTol) {
      result.converged = true;
      result.iterations = iter - 1;
      return result;
    }

    SquareMatrix penalized = hessian_log_breslow(h, full);
    for (int i = 0; i < dim; ++i) penalized(i, i) = prior_precision - penalized(i, i);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (i != j) penalized(i, j) = -penalized(i, j);
    const auto chol = cholesky(penalized);
    if (!chol)
      throw ComputeError(
          "newton_map: curvature matrix is not positive definite (flat likelihood "
          "direction); use a prior precision > 0");
    const std::vector<double> direction = cholesky_solve(*chol, grad);

    // Backtrack until the objective is not worse; the slack admits full steps
    // near the optimum where improvements fall below summation noise.
    const double accept_at = f_current - 1e-12 * (1.0 + std::fabs(f_current));
    double step = 1.0;
    bool accepted = false;
    std::vector<double> candidate(static_cast<std::size_t>(dim));
    for (int halving = 0; halving < 60; ++halving) {
      for (int i = 0; i < dim; ++i)
        candidate[static_cast<std::size_t>(i)] =
            result.mode[static_cast<std::size_t>(i)] + step * direction[static_cast<std::size_t>(i)];
      const double f_candidate = objective(candidate);
      if (f_candidate >= accept_at) {
        result.mode = candidate;
        f_current = f_candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    result.iterations = iter;
    if (!accepted) return result;  // numerically stuck; non-converged
  }
  return result;
}

// Gaussian posterior approximation at the MAP: mode theta-hat and covariance
// (-H(theta-hat) + lambda I)^{-1}, with the lower Cholesky factor of the
// covariance kept for sampling. Construction certifies the covariance is
// symmetric positive definite.
struct PosteriorApprox {
  std::vector<double> mode;  // theta_1..theta_{K-1}
  SquareMatrix covariance;
  SquareMatrix chol;  // lower factor, covariance = chol * chol^T
  double prior_precision = 0.0;
  bool converged = true;

  int arm_count() const { return static_cast<int>(mode.size()) + 1; }
};

inline PosteriorApprox laplace(const EventHistory& h, double prior_precision,
                               std::vector<double> init = {}) {
  NewtonResult nm = newton_map(h, prior_precision, std::move(init));
  const int dim = static_cast<int>(nm.mode.size());
  SquareMatrix precision = hessian_log_breslow(h, detail::with_placebo(nm.mode));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) precision(i, j) = (i == j ? prior_precision : 0.0) - precision(i, j);
  const auto prec_chol = cholesky(precision);
  if (!prec_chol)
    throw ComputeError("laplace: observed information is not positive definite; use a prior precision > 0");
  PosteriorApprox approx;
  approx.mode = std::move(nm.mode);
  approx.covariance = cholesky_inverse(*prec_chol);
  const auto cov_chol = cholesky(approx.covariance);
  if (!cov_chol) throw ComputeError("laplace: covariance factorization failed");
  approx.chol = *cov_chol;
  approx.prior_precision = prior_precision;
  approx.converged = nm.converged;
  return approx;
}

// One posterior draw written into `theta` (length K, theta[0] = 0), using
// `normals` as scratch. Split out so hot loops can reuse buffers.
inline void sample_posterior(const PosteriorApprox& p, Rng& rng, std::vector<double>& normals,
                             std::vector<double>& theta) {
  const int dim = static_cast<int>(p.mode.size());
  normals.resize(static_cast<std::size_t>(dim));
  theta.resize(static_cast<std::size_t>(dim) + 1);
  for (int i = 0; i < dim; ++i) normals[static_cast<std::size_t>(i)] = rng.next_normal();
  theta[0] = 0.0;
  for (int i = 0; i < dim; ++i) {
    double value = p.mode[static_cast<std::size_t>(i)];
    for (int j = 0; j <= i; ++j) value += p.chol(i, j) * normals[static_cast<std::size_t>(j)];
    theta[static_cast<std::size_t>(i) + 1] = value;
  }
}

inline std::vector<double> sample_posterior(const PosteriorApprox& p, Rng& rng) {
  std::vector<double> normals, theta;
  sample_posterior(p, rng, normals, theta);
  return theta;
}

}  // namespace vaxsim
