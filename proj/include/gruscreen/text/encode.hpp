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

#include <cstdint>
#include <string_view>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/text/vocabulary.hpp"

namespace gruscreen::text {

/// Fixed-length index sequence; padding zeros form a suffix.
using EncodedSequence = std::vector<std::uint32_t>;

/// Out-of-vocabulary words are dropped. Keeps the first seq_len indices and
/// pads the tail with zeros.
inline EncodedSequence encode(std::string_view cleaned, const Vocabulary& vocab, std::size_t seq_len) {
  if (seq_len < 1) throw Error(ErrorCode::kInvalidArgument, "seq_len must be >= 1");
  EncodedSequence out;
  out.reserve(seq_len);
  for (auto word : split_words(cleaned)) {
    if (out.size() == seq_len) break;
    if (auto idx = vocab.index_of(word); idx != 0) out.push_back(idx);
  }
  out.resize(seq_len, 0);
  return out;
}

}  // namespace gruscreen::text
