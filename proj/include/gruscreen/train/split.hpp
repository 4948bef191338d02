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

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/random.hpp"
#include "json.hpp"

namespace gruscreen::train {

struct SplitSpec {
  double train_frac = 0.50;
  double val_frac = 0.20;
  double test_frac = 0.30;
  std::uint64_t shuffle_seed = 42;

  void validate() const {
    if (!(train_frac > 0.0 && val_frac > 0.0 && test_frac > 0.0) ||
        std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
      throw Error(ErrorCode::kBadFractions, "split fractions must be positive and sum to 1");
    }
  }
};

inline void to_json(nlohmann::json& j, const SplitSpec& s) {
  j = {{"train_frac", s.train_frac}, {"val_frac", s.val_frac}, {"test_frac", s.test_frac},
       {"shuffle_seed", s.shuffle_seed}};
}

inline void from_json(const nlohmann::json& j, SplitSpec& s) {
  s.train_frac = j.value("train_frac", s.train_frac);
  s.val_frac = j.value("val_frac", s.val_frac);
  s.test_frac = j.value("test_frac", s.test_frac);
  s.shuffle_seed = j.value("shuffle_seed", s.shuffle_seed);
}

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Seeded Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

/// |train| = floor(train_frac n), |val| = floor(val_frac n), test takes the
/// remainder, all drawn from one seeded shuffle.
inline SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 10) throw Error(ErrorCode::kInvalidArgument, "need at least 10 samples to split");
  auto floor_of = [n](double frac) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_train = floor_of(spec.train_frac);
  const std::size_t n_val = floor_of(spec.val_frac);
  auto order = shuffled_indices(n, spec.shuffle_seed);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return out;
}

template <typename Sample>
struct Partition {
  std::vector<Sample> samples;
  std::vector<int> labels;
};

template <typename Sample>
struct SplitResult {
  Partition<Sample> train;
  Partition<Sample> val;
  Partition<Sample> test;
};

template <typename Sample>
SplitResult<Sample> split_dataset(const std::vector<Sample>& samples, const std::vector<int>& labels,
                                  const SplitSpec& spec) {
  if (samples.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "samples vs labels");
  auto idx = split_indices(samples.size(), spec);
  auto take = [&](const std::vector<std::size_t>& ids) {
    Partition<Sample> p;
    p.samples.reserve(ids.size());
    p.labels.reserve(ids.size());
    for (auto i : ids) {
      p.samples.push_back(samples[i]);
      p.labels.push_back(labels[i]);
    }
    return p;
  };
  return {take(idx.train), take(idx.val), take(idx.test)};
}

}  // namespace gruscreen::train
