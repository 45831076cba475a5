// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vaxsim/errors.hpp"

namespace vaxsim {

enum class HazardSource { file, synthetic };

// Per-day baseline hazard series h(t), t = 0..T. Values are validated at
// construction: finite, >= 0 and strictly < 1, since they double as per-day
// infection probabilities downstream.
class BaselineHazard {
 public:
  BaselineHazard(std::vector<double> values, HazardSource source)
      : values_(std::move(values)), source_(source) {
    if (values_.empty()) throw ConfigError("baseline hazard: series is empty");
    for (std::size_t t = 0; t < values_.size(); ++t) {
      const double h = values_[t];
      if (!std::isfinite(h) || h < 0.0 || h >= 1.0)
        throw ConfigError("baseline hazard: value at day " + std::to_string(t) + " is " +
                          std::to_string(h) + "; need finite values in [0, 1)");
    }
  }

  double at(int t) const {
    if (t < 0 || t >= static_cast<int>(values_.size()))
      throw std::out_of_range("baseline hazard: day " + std::to_string(t) + " out of range");
    return values_[static_cast<std::size_t>(t)];
  }

  int days() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  HazardSource source() const { return source_; }

  // First `days` entries; errors when the series is shorter.
  BaselineHazard truncated(int days) const {
    if (days < 1 || days > this->days())
      throw ConfigError("baseline hazard: series has " + std::to_string(this->days()) +
                        " days, need " + std::to_string(days));
    return BaselineHazard(std::vector<double>(values_.begin(), values_.begin() + days), source_);
  }

 private:
  std::vector<double> values_;
  HazardSource source_;
};

// Log hazard-ratio efficiency parameters, one per arm. Arm 0 is the placebo
// and its entry is pinned at zero.
struct ArmModel {
  std::vector<double> thetas;

  explicit ArmModel(std::vector<double> th) : thetas(std::move(th)) {
    if (thetas.size() < 2) throw ConfigError("arm model: need at least 2 arms");
    if (thetas[0] != 0.0) throw ConfigError("arm model: placebo efficiency (thetas[0]) must be 0");
    for (double t : thetas)
      if (!std::isfinite(t)) throw ConfigError("arm model: non-finite efficiency parameter");
  }

  int arm_count() const { return static_cast<int>(thetas.size()); }
};

struct DailyCount {
  std::int64_t day = 0;  // days since 1970-01-01
  double count = 0.0;
};

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::int64_t parse_iso_date(std::string_view s) {
  auto fail = [&] { throw ConfigError("expected ISO-8601 date (YYYY-MM-DD), got '" + std::string(s) + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  auto num = [&](std::string_view part) {
    int value = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || p != part.data() + part.size()) fail();
    return value;
  };
  const int y = num(s.substr(0, 4));
  const int m = num(s.substr(5, 2));
  const int d = num(s.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31) fail();
  return days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Parse the `date,count` ingestion format (header row required, ISO dates,
// one row per day).
inline std::vector<DailyCount> parse_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "date,count")
    throw ConfigError("counts csv: expected header 'date,count'");
  std::vector<DailyCount> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    const auto comma = sv.find(',');
    if (comma == std::string_view::npos)
      throw ConfigError("counts csv: line " + std::to_string(lineno) + ": missing comma");
    const std::int64_t day = detail::parse_iso_date(detail::trim(sv.substr(0, comma)));
    const std::string_view count_sv = detail::trim(sv.substr(comma + 1));
    double count = 0.0;
    auto [p, ec] = std::from_chars(count_sv.data(), count_sv.data() + count_sv.size(), count);
    if (ec != std::errc{} || p != count_sv.data() + count_sv.size())
      throw ConfigError("counts csv: line " + std::to_string(lineno) + ": bad count '" +
                        std::string(count_sv) + "'");
    rows.push_back({day, count});
  }
  return rows;
}

// Baseline hazard from daily case counts: trailing moving average over
// `window` days divided by the population. The first window-1 days average
// the available prefix. The output covers the full input range; callers
// truncate to the trial horizon.
inline BaselineHazard load_daily_counts(std::span<const DailyCount> rows, double population,
                                        int window = 7) {
  if (rows.empty()) throw ConfigError("daily counts: empty series");
  if (window < 1) throw ConfigError("daily counts: window must be positive");
  if (!(population > 0.0)) throw ConfigError("daily counts: population must be positive");
  double max_count = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].count >= 0.0) || !std::isfinite(rows[i].count))
      throw ConfigError("daily counts: negative or non-finite count at row " + std::to_string(i));
    if (i > 0 && rows[i].day != rows[i - 1].day + 1)
      throw ConfigError("daily counts: dates not contiguous at row " + std::to_string(i));
    max_count = std::max(max_count, rows[i].count);
  }
  if (!(population > max_count))
    throw ConfigError("daily counts: population must exceed the largest daily count");

  std::vector<double> hazard(rows.size());
  double running = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    running += rows[t].count;
    if (t >= static_cast<std::size_t>(window)) running -= rows[t - window].count;
    const auto width = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
    hazard[t] = running / static_cast<double>(width) / population;
  }
  return BaselineHazard(std::move(hazard), HazardSource::file);
}

struct TwoWaveParams {
  double peak1 = 2e-4;
  int day1 = 35;
  double width1 = 12.0;
  double peak2 = 6e-4;
  int day2 = 140;
  double width2 = 20.0;
};

// Synthetic baseline with two Gaussian infection waves, h(t) =
// peak1*exp(-(t-day1)^2/(2 width1^2)) + peak2*exp(-(t-day2)^2/(2 width2^2)),
// clipped into [0, 1). Peaks of exactly zero switch a wave off.
inline BaselineHazard synthetic_two_wave(double peak1, int day1, double width1, double peak2,
                                         int day2, double width2, int horizon) {
  if (horizon < 1) throw ConfigError("two-wave hazard: horizon must be >= 1");
  if (!(peak1 >= 0.0 && peak1 < 1.0) || !(peak2 >= 0.0 && peak2 < 1.0))
    throw ConfigError("two-wave hazard: peaks must lie in [0, 1)");
  if (!(width1 > 0.0) || !(width2 > 0.0)) throw ConfigError("two-wave hazard: widths must be positive");
  if (!(0 <= day1 && day1 < day2 && day2 <= horizon))
    throw ConfigError("two-wave hazard: need 0 <= day1 < day2 <= horizon");

  const double below_one = std::nextafter(1.0, 0.0);
  std::vector<double> values(static_cast<std::size_t>(horizon) + 1);
  for (int t = 0; t <= horizon; ++t) {
    const double z1 = (t - day1) / width1;
    const double z2 = (t - day2) / width2;
    const double h = peak1 * std::exp(-0.5 * z1 * z1) + peak2 * std::exp(-0.5 * z2 * z2);
    values[static_cast<std::size_t>(t)] = std::min(h, below_one);
  }
  return BaselineHazard(std::move(values), HazardSource::synthetic);
}

inline BaselineHazard synthetic_two_wave(const TwoWaveParams& p, int horizon) {
  return synthetic_two_wave(p.peak1, p.day1, p.width1, p.peak2, p.day2, p.width2, horizon);
}

// h_k(t) = h(t) * exp(-theta_k).
inline double arm_hazard(const BaselineHazard& b, const ArmModel& arms, int t, int k) {
  if (k < 0 || k >= arms.arm_count())
    throw std::out_of_range("arm_hazard: arm " + std::to_string(k) + " out of range");
  return b.at(t) * std::exp(-arms.thetas[static_cast<std::size_t>(k)]);
}

// Vaccine efficiency 1 - e^{-theta}: zero for the placebo, approaching 1 as
// theta grows.
inline double vaccine_efficiency(double theta) { return -std::expm1(-theta); }

}  // namespace vaxsim
