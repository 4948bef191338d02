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
#include <span>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/matrix.hpp"

namespace gruscreen::nn {

/// Probabilities are clipped to [kProbClip, 1 - kProbClip] inside the loss.
inline constexpr double kProbClip = 1e-7;

template <typename T>
void softmax_inplace(std::span<T> v) {
  const T peak = *std::max_element(v.begin(), v.end());
  T sum = T(0);
  for (auto& x : v) {
    x = std::exp(x - peak);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

template <typename T>
T clip_probability(T p) {
  return std::clamp(p, static_cast<T>(kProbClip), static_cast<T>(1.0 - kProbClip));
}

/// -mean ln p(true class) over rows.
template <typename T>
T categorical_cross_entropy(const Matrix<T>& probs, const Matrix<T>& onehot) {
  if (probs.rows() != onehot.rows() || probs.cols() != onehot.cols() || probs.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "probabilities and labels differ in shape");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      if (onehot(i, c) != T(0)) {
        total -= static_cast<double>(onehot(i, c)) * std::log(static_cast<double>(clip_probability(probs(i, c))));
      }
    }
  }
  return static_cast<T>(total / static_cast<double>(probs.rows()));
}

template <typename T>
Matrix<T> one_hot(std::span<const int> labels, std::size_t num_classes) {
  Matrix<T> m(labels.size(), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(ErrorCode::kBadLabel, "label outside [0, num_classes)");
    }
    m(i, static_cast<std::size_t>(labels[i])) = T(1);
  }
  return m;
}

}  // namespace gruscreen::nn
