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

// Loads external word vectors ("word v1 ... vN" per line) into the frozen
// embedding rows of the words present in a vocabulary. Rows of absent words
// keep their seeded initialization.

#include <fstream>
#include <sstream>
#include <string>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/model.hpp"
#include "gruscreen/text/vocabulary.hpp"

namespace gruscreen::nn {

/// Returns the number of vocabulary words that received a vector.
template <typename T>
std::size_t load_pretrained_embedding(std::istream& in, const text::Vocabulary& vocab, GruStackModel<T>& model) {
  const std::size_t dim = model.config.embed_dim;
  std::size_t loaded = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    auto idx = vocab.index_of(word);
    if (idx == 0 || idx >= model.config.vocab_size) continue;
    std::vector<T> values;
    double v = 0.0;
    while (fields >> v) values.push_back(static_cast<T>(v));
    if (values.size() != dim) {
      throw Error(ErrorCode::kShapeMismatch, "pretrained vector on line " + std::to_string(line_no) +
                                                 " has " + std::to_string(values.size()) + " values");
    }
    std::copy(values.begin(), values.end(), model.embedding.row(idx).begin());
    ++loaded;
  }
  return loaded;
}

template <typename T>
std::size_t load_pretrained_embedding(const std::string& path, const text::Vocabulary& vocab,
                                      GruStackModel<T>& model) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return load_pretrained_embedding(in, vocab, model);
}

}  // namespace gruscreen::nn
