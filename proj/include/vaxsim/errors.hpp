// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace vaxsim {

// Invalid configuration or input data. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical or run-time failure (unbounded MAP, factorization failure,
// combinatorial guard tripped). The CLI maps this to exit code 2.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vaxsim
