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

#include <cstddef>

#include "gruscreen/nn/config.hpp"

namespace gruscreen::nn {

struct ParamCount {
  std::size_t embedding = 0;
  std::size_t gru1 = 0;
  std::size_t gru2 = 0;
  std::size_t gru3 = 0;
  std::size_t dense = 0;
  std::size_t total = 0;
  std::size_t trainable = 0;
  std::size_t non_trainable = 0;
};

/// Reset-after GRU: input kernel, recurrent kernel and two bias vectors,
/// each over the three gate groups.
constexpr std::size_t gru_param_count(std::size_t input_dim, std::size_t units) {
  return 3 * (input_dim * units + units * units + 2 * units);
}

inline ParamCount param_count(const ModelConfig& c) {
  ParamCount p;
  p.embedding = c.vocab_size * c.embed_dim;
  p.gru1 = gru_param_count(c.embed_dim, c.gru_units);
  p.gru2 = gru_param_count(c.gru_units, c.gru_units);
  p.gru3 = gru_param_count(c.gru_units, c.gru_units);
  p.dense = c.gru_units * c.num_classes + c.num_classes;
  p.total = p.embedding + p.gru1 + p.gru2 + p.gru3 + p.dense;
  p.non_trainable = c.embedding_trainable ? 0 : p.embedding;
  p.trainable = p.total - p.non_trainable;
  return p;
}

}  // namespace gruscreen::nn
