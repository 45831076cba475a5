// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>

namespace vaxsim {

// One splitmix64 step. Used to expand seeds into generator state and to
// derive per-replication stream seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for one replication stream, derived from the master seed by counter.
// Replications can then run in any order on any worker and still consume
// exactly the same stream.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ULL * (stream_index + 1));
  splitmix64_next(s);
  return splitmix64_next(s);
}

// xoshiro256++ with hand-rolled distributions. Distributions live here rather
// than in <random> so equal seeds give bit-equal streams on every standard
// library build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return Rng(stream_seed(master_seed, stream_index));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); rejects the (2^-53 probability) exact zero.
  double next_double_open() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  // Standard normal via Box-Muller (cosine branch only).
  double next_normal() {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Unbiased integer in [0, n) (Lemire's multiply-with-rejection).
  int next_below(int n) {
    assert(n > 0);
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t cutoff = (0 - bound) % bound;
      while (lo < cutoff) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<int>(m >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Binomial(n, p) by counting geometric waiting times between successes.
  // Exact for any n and p, costs O(n*p + 1) draws, and never underflows.
  std::int64_t next_binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - next_binomial(n, 1.0 - p);
    const double log_q = std::log1p(-p);
    std::int64_t successes = 0;
    double trials = 0.0;
    for (;;) {
      const double u = next_double_open();
      trials += std::floor(std::log(u) / log_q) + 1.0;
      if (trials > static_cast<double>(n)) break;
      ++successes;
    }
    return successes;
  }

  // Draw an index according to `probs` (assumed non-negative, summing to ~1).
  int next_categorical(std::span<const double> probs) {
    assert(!probs.empty());
    const double u = next_double();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace vaxsim
