// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "vaxsim/hazard.hpp"

using namespace vaxsim;

namespace {

std::vector<DailyCount> contiguous_counts(std::vector<double> counts, std::int64_t first_day = 18330) {
  std::vector<DailyCount> rows;
  for (std::size_t i = 0; i < counts.size(); ++i)
    rows.push_back({first_day + static_cast<std::int64_t>(i), counts[i]});
  return rows;
}

}  // namespace

TEST_CASE("BaselineHazard: construction validates the per-day range") {
  CHECK_NOTHROW(BaselineHazard({0.0, 0.5, 0.999}, HazardSource::synthetic));
  CHECK_THROWS_AS(BaselineHazard({0.1, 1.0}, HazardSource::synthetic), ConfigError);
  CHECK_THROWS_AS(BaselineHazard({-0.1}, HazardSource::synthetic), ConfigError);
  CHECK_THROWS_AS(BaselineHazard({std::nan("")}, HazardSource::synthetic), ConfigError);
  CHECK_THROWS_AS(BaselineHazard({}, HazardSource::synthetic), ConfigError);
}

TEST_CASE("load_daily_counts: zero counts give a zero hazard") {
  const auto rows = contiguous_counts(std::vector<double>(30, 0.0));
  const BaselineHazard h = load_daily_counts(rows, 1e6);
  for (double v : h.values()) CHECK(v == 0.0);
}

TEST_CASE("load_daily_counts: a constant series is its own moving average") {
  const auto rows = contiguous_counts(std::vector<double>(30, 1000.0));
  const BaselineHazard h = load_daily_counts(rows, 1e6, 7);
  for (double v : h.values()) CHECK(v == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("load_daily_counts: matches a direct-loop moving-average oracle") {
  // 207-day ramp with a kink, recomputed windowed-mean by brute force.
  std::vector<double> counts;
  for (int i = 0; i < 207; ++i) counts.push_back(100.0 + 3.0 * i + (i % 11) * 17.0);
  const auto rows = contiguous_counts(counts);
  const double population = 5e6;
  const int window = 7;
  const BaselineHazard h = load_daily_counts(rows, population, window);
  REQUIRE(h.days() == 207);
  for (int t = 0; t < 207; ++t) {
    double sum = 0.0;
    int used = 0;
    for (int s = std::max(0, t - window + 1); s <= t; ++s) {
      sum += counts[static_cast<std::size_t>(s)];
      ++used;
    }
    CHECK(h.at(t) == doctest::Approx(sum / used / population).epsilon(1e-12));
  }
}

TEST_CASE("load_daily_counts: rejects bad input") {
  auto rows = contiguous_counts({10.0, 20.0, 30.0});
  rows[2].day += 1;  // gap
  CHECK_THROWS_AS((void)load_daily_counts(rows, 1e6), ConfigError);

  CHECK_THROWS_AS((void)load_daily_counts(contiguous_counts({10.0, -1.0}), 1e6), ConfigError);
  CHECK_THROWS_AS((void)load_daily_counts(contiguous_counts({10.0, 20.0}), 15.0), ConfigError);
  CHECK_THROWS_AS((void)load_daily_counts({}, 1e6), ConfigError);
}

TEST_CASE("load_daily_counts: invariant to scaling counts and population together") {
  std::vector<double> counts;
  for (int i = 0; i < 40; ++i) counts.push_back(50.0 + 10.0 * (i % 5));
  const BaselineHazard a = load_daily_counts(contiguous_counts(counts), 1e6);
  for (double& c : counts) c *= 2.0;
  const BaselineHazard b = load_daily_counts(contiguous_counts(counts), 2e6);
  for (int t = 0; t < a.days(); ++t) CHECK(a.at(t) == doctest::Approx(b.at(t)).epsilon(1e-13));
}

TEST_CASE("load_daily_counts: series shorter than the horizon fails at truncation") {
  const BaselineHazard h = load_daily_counts(contiguous_counts(std::vector<double>(50, 5.0)), 1e6);
  CHECK_NOTHROW((void)h.truncated(50));
  CHECK_THROWS_AS((void)h.truncated(51), ConfigError);
}

TEST_CASE("parse_counts_csv: happy path and failure modes") {
  {
    std::istringstream in("date,count\n2020-03-09,100\n2020-03-10,150\n");
    const auto rows = parse_counts_csv(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].day == rows[0].day + 1);
    CHECK(rows[0].count == 100.0);
  }
  {
    std::istringstream in("day,count\n2020-03-09,100\n");
    CHECK_THROWS_AS((void)parse_counts_csv(in), ConfigError);
  }
  {
    std::istringstream in("date,count\n2020/03/09,100\n");
    CHECK_THROWS_AS((void)parse_counts_csv(in), ConfigError);
  }
  {
    std::istringstream in("date,count\n2020-03-09,abc\n");
    CHECK_THROWS_AS((void)parse_counts_csv(in), ConfigError);
  }
}

TEST_CASE("synthetic_two_wave: single bump when the second peak is zero") {
  const BaselineHazard h = synthetic_two_wave(3e-4, 40, 10.0, 0.0, 150, 20.0, 200);
  REQUIRE(h.days() == 201);
  int argmax = 0;
  for (int t = 0; t <= 200; ++t)
    if (h.at(t) > h.at(argmax)) argmax = t;
  CHECK(argmax == 40);
  CHECK(h.at(40) == doctest::Approx(3e-4).epsilon(1e-12));
}

TEST_CASE("synthetic_two_wave: symmetric parameters give equal wave heights") {
  const BaselineHazard h = synthetic_two_wave(2e-4, 50, 15.0, 2e-4, 150, 15.0, 200);
  CHECK(h.at(50) == doctest::Approx(h.at(150)).epsilon(1e-12));
}

TEST_CASE("synthetic_two_wave: default parameters peak at day 140 (grid oracle)") {
  const TwoWaveParams defaults;
  const BaselineHazard h = synthetic_two_wave(defaults, 200);
  int argmax = 0;
  double best = -1.0;
  for (int t = 0; t <= 200; ++t) {
    // independent closed-form evaluation
    const double v = 2e-4 * std::exp(-(t - 35.0) * (t - 35.0) / (2.0 * 144.0)) +
                     6e-4 * std::exp(-(t - 140.0) * (t - 140.0) / (2.0 * 400.0));
    CHECK(h.at(t) == doctest::Approx(v).epsilon(1e-12));
    if (v > best) {
      best = v;
      argmax = t;
    }
  }
  CHECK(argmax == 140);
}

TEST_CASE("synthetic_two_wave: rejects domain violations") {
  CHECK_THROWS_AS((void)synthetic_two_wave(1.0, 10, 5.0, 0.1, 50, 5.0, 100), ConfigError);
  CHECK_THROWS_AS((void)synthetic_two_wave(-0.1, 10, 5.0, 0.1, 50, 5.0, 100), ConfigError);
  CHECK_THROWS_AS((void)synthetic_two_wave(0.1, 10, 0.0, 0.1, 50, 5.0, 100), ConfigError);
  CHECK_THROWS_AS((void)synthetic_two_wave(0.1, 50, 5.0, 0.1, 10, 5.0, 100), ConfigError);
  CHECK_THROWS_AS((void)synthetic_two_wave(0.1, 10, 5.0, 0.1, 120, 5.0, 100), ConfigError);
}

TEST_CASE("arm_hazard: frozen scalar evaluations") {
  const BaselineHazard b({0.001, 0.001}, HazardSource::synthetic);
  const ArmModel arms{{0.0, 1.2, 3.0}};
  CHECK(arm_hazard(b, arms, 0, 0) == 0.001);  // placebo passes the baseline through
  CHECK(arm_hazard(b, arms, 1, 2) == doctest::Approx(4.9787068367863944e-05).epsilon(1e-12));
  CHECK(arm_hazard(b, arms, 0, 1) == doctest::Approx(3.0119421191220214e-04).epsilon(1e-12));
  CHECK_THROWS_AS((void)arm_hazard(b, arms, 2, 0), std::out_of_range);
  CHECK_THROWS_AS((void)arm_hazard(b, arms, 0, 3), std::out_of_range);
}

TEST_CASE("arm_hazard: hazard ratios are constant in time") {
  const TwoWaveParams defaults;
  const BaselineHazard b = synthetic_two_wave(defaults, 200);
  const ArmModel arms{{0.0, 0.7, 2.5}};
  for (int t = 0; t <= 200; ++t) {
    if (b.at(t) <= 0.0) continue;
    for (int k = 1; k < 3; ++k) {
      const double ratio = arm_hazard(b, arms, t, k) / arm_hazard(b, arms, t, 0);
      CHECK(ratio == doctest::Approx(std::exp(-arms.thetas[static_cast<std::size_t>(k)]))
                         .epsilon(1e-12));
    }
  }
}

TEST_CASE("vaccine_efficiency: values and shape") {
  CHECK(vaccine_efficiency(0.0) == 0.0);
  CHECK(vaccine_efficiency(3.0) == doctest::Approx(0.950212931632136).epsilon(1e-12));
  CHECK(vaccine_efficiency(1.2) == doctest::Approx(0.698805788087798).epsilon(1e-12));

  double previous = -1e9;
  for (double theta = -2.0; theta <= 10.0; theta += 0.25) {
    const double ve = vaccine_efficiency(theta);
    CHECK(ve > previous);  // strictly increasing
    previous = ve;
  }
  CHECK(vaccine_efficiency(745.0) == doctest::Approx(1.0));
}

TEST_CASE("ArmModel: placebo pinning is enforced") {
  CHECK_THROWS_AS((ArmModel{{0.5, 1.0}}), ConfigError);
  CHECK_THROWS_AS((ArmModel{{0.0}}), ConfigError);
  CHECK_NOTHROW((ArmModel{{0.0, -0.5, 2.0}}));
}
