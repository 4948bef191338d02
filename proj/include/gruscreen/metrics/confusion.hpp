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

#include <array>
#include <cstdint>
#include <span>

#include "gruscreen/error.hpp"

namespace gruscreen::metrics {

/// 2x2 counts; rows are the true class (0 suicide, 1 non-suicide), columns
/// the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t n() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
  std::uint64_t operator()(int truth, int pred) const { return counts[truth][pred]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix build_confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "label vectors must be non-empty and of equal length");
  }
  ConfusionMatrix cm;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const int t = truth[k];
    const int p = predicted[k];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
    ++cm.counts[t][p];
  }
  return cm;
}

}  // namespace gruscreen::metrics
