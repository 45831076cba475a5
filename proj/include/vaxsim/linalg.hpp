// Copyright 2026 vaxsim developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vaxsim {

// Dense square matrix, row-major. Sized for the small posterior dimensions
// used here (arm count minus one), so no effort is spent on blocking.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }

  double& operator()(int i, int j) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  bool operator==(const SquareMatrix& other) const = default;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor L with A = L L^T, or nullopt when A is not
// (numerically) symmetric positive definite.
inline std::optional<SquareMatrix> cholesky(const SquareMatrix& a) {
  const int n = a.size();
  SquareMatrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a(i, j);
      for (int k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(sum > 0.0) || !std::isfinite(sum)) return std::nullopt;
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  return l;
}

// Solve A x = b given the lower Cholesky factor of A.
inline std::vector<double> cholesky_solve(const SquareMatrix& l, std::span<const double> b) {
  const int n = l.size();
  assert(static_cast<int>(b.size()) == n);
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {  // forward: L y = b
    double sum = x[i];
    for (int k = 0; k < i; ++k) sum -= l(i, k) * x[k];
    x[i] = sum / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {  // backward: L^T x = y
    double sum = x[i];
    for (int k = i + 1; k < n; ++k) sum -= l(k, i) * x[k];
    x[i] = sum / l(i, i);
  }
  return x;
}

// A^{-1} from the lower Cholesky factor of A; exactly symmetric by
// construction (computed as Linv^T Linv).
inline SquareMatrix cholesky_inverse(const SquareMatrix& l) {
  const int n = l.size();
  SquareMatrix linv(n);
  for (int j = 0; j < n; ++j) {  // columns of L^{-1} by forward substitution
    linv(j, j) = 1.0 / l(j, j);
    for (int i = j + 1; i < n; ++i) {
      double sum = 0.0;
      for (int k = j; k < i; ++k) sum -= l(i, k) * linv(k, j);
      linv(i, j) = sum / l(i, i);
    }
  }
  SquareMatrix inv(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (int k = i; k < n; ++k) sum += linv(k, i) * linv(k, j);
      inv(i, j) = sum;
      inv(j, i) = sum;
    }
  }
  return inv;
}

// y = L z for lower-triangular L.
inline std::vector<double> lower_tri_times(const SquareMatrix& l, std::span<const double> z) {
  const int n = l.size();
  assert(static_cast<int>(z.size()) == n);
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j <= i; ++j) sum += l(i, j) * z[j];
    y[i] = sum;
  }
  return y;
}

inline double quadratic_form(const SquareMatrix& a, std::span<const double> x) {
  const int n = a.size();
  assert(static_cast<int>(x.size()) == n);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += x[i] * a(i, j) * x[j];
  return total;
}

}  // namespace vaxsim
