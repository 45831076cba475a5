// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "vaxsim/random.hpp"

using namespace vaxsim;

TEST_CASE("Rng: equal seeds replay, different streams differ") {
  Rng a(42), b(42), c(43);
  bool saw_difference = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) saw_difference = true;
  }
  CHECK(saw_difference);

  CHECK(stream_seed(7, 0) != stream_seed(7, 1));
  CHECK(stream_seed(7, 0) != stream_seed(8, 0));
  CHECK(stream_seed(7, 3) == stream_seed(7, 3));
}

TEST_CASE("Rng: next_double stays in [0, 1) and looks uniform") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("Rng: next_below is in range and roughly balanced") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const int v = rng.next_below(7);
    CHECK(v >= 0);
    CHECK(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) CHECK(std::fabs(c - 10000.0) < 4.0 * std::sqrt(10000.0 * 6.0 / 7.0));
}

TEST_CASE("Rng: normal moments") {
  Rng rng(3);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("Rng: binomial edge cases and moments") {
  Rng rng(4);
  CHECK(rng.next_binomial(0, 0.5) == 0);
  CHECK(rng.next_binomial(10, 0.0) == 0);
  CHECK(rng.next_binomial(10, 1.0) == 10);
  for (int i = 0; i < 100; ++i) {
    const auto v = rng.next_binomial(5, 0.3);
    CHECK(v >= 0);
    CHECK(v <= 5);
  }

  // moments at a mid p (complement path) and a small p (waiting-time path)
  for (const auto& [n_trials, p] : std::vector<std::pair<int, double>>{{40, 0.7}, {1000, 0.002}}) {
    const int reps = 60000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < reps; ++i) {
      const auto v = static_cast<double>(rng.next_binomial(n_trials, p));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / reps;
    const double var = sum_sq / reps - mean * mean;
    const double expect_mean = n_trials * p;
    const double expect_var = n_trials * p * (1.0 - p);
    CHECK(std::fabs(mean - expect_mean) < 5.0 * std::sqrt(expect_var / reps));
    CHECK(std::fabs(var - expect_var) / expect_var < 0.05);
  }
}

TEST_CASE("Rng: categorical respects the distribution") {
  Rng rng(5);
  const std::vector<double> probs{0.1, 0.6, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.next_categorical(probs))];
  for (int k = 0; k < 3; ++k) {
    const double expect = probs[static_cast<std::size_t>(k)] * n;
    const double sigma = std::sqrt(expect * (1.0 - probs[static_cast<std::size_t>(k)]));
    CHECK(std::fabs(counts[static_cast<std::size_t>(k)] - expect) < 4.0 * sigma);
  }
}
