// Copyright 2026 The gruscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/matrix.hpp"
#include "gruscreen/nn/random.hpp"

namespace gruscreen::nn {

/// Entries i.i.d. uniform on [-L, L], L = sqrt(6 / (rows + cols)).
template <typename T>
Matrix<T> glorot_uniform_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::kInvalidArgument, "glorot shape must be positive");
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  Matrix<T> m(rows, cols);
  for (auto& v : m.flat()) v = static_cast<T>(rng.uniform(-limit, limit));
  return m;
}

template <typename T>
Matrix<T> uniform_init(std::size_t rows, std::size_t cols, double limit, std::uint64_t seed) {
  Rng rng(seed);
  Matrix<T> m(rows, cols);
  for (auto& v : m.flat()) v = static_cast<T>(rng.uniform(-limit, limit));
  return m;
}

/// Orthogonal matrix from the QR factor of a seeded Gaussian matrix, signs
/// fixed so that diag(R) > 0. Columns are orthonormal when rows >= cols,
/// rows are orthonormal otherwise. QR is Gram-Schmidt with
/// reorthogonalization, in double precision.
template <typename T>
Matrix<T> orthogonal_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::kInvalidArgument, "orthogonal shape must be positive");
  const std::size_t n = std::max(rows, cols);
  const std::size_t k = std::min(rows, cols);
  Rng rng(seed);
  // q[j] is the j-th column (length n) of the tall factor.
  std::vector<std::vector<double>> q(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) q[j][i] = rng.normal();
  }
  for (std::size_t j = 0; j < k; ++j) {
    auto& v = q[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < j; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[p][i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[p][i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (rows >= cols) {
        m(i, j) = static_cast<T>(q[j][i]);
      } else {
        m(j, i) = static_cast<T>(q[j][i]);
      }
    }
  }
  return m;
}

}  // namespace gruscreen::nn
