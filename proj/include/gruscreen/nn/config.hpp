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

#include "gruscreen/error.hpp"
#include "json.hpp"

namespace gruscreen::nn {

/// Architecture of the embedding -> 3 x GRU -> softmax classifier.
/// Defaults give 1,053,502 parameters, 1,000,000 of them in the frozen
/// embedding table.
struct ModelConfig {
  std::size_t vocab_size = 10000;
  std::size_t embed_dim = 100;
  std::size_t seq_len = 50;
  std::size_t gru_units = 50;
  std::size_t num_classes = 2;
  double dropout_rate = 0.20;
  bool embedding_trainable = false;

  void validate() const {
    if (vocab_size == 0 || embed_dim == 0 || seq_len == 0 || gru_units == 0 || num_classes == 0) {
      throw Error(ErrorCode::kInvalidArgument, "model dimensions must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "dropout_rate must be in [0, 1)");
    }
    if (embedding_trainable) {
      throw Error(ErrorCode::kInvalidArgument, "trainable embeddings are not supported");
    }
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"vocab_size", c.vocab_size},   {"embed_dim", c.embed_dim},
                     {"seq_len", c.seq_len},         {"gru_units", c.gru_units},
                     {"num_classes", c.num_classes}, {"dropout_rate", c.dropout_rate},
                     {"embedding_trainable", c.embedding_trainable}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.seq_len = j.value("seq_len", c.seq_len);
  c.gru_units = j.value("gru_units", c.gru_units);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
  c.embedding_trainable = j.value("embedding_trainable", c.embedding_trainable);
}

}  // namespace gruscreen::nn
