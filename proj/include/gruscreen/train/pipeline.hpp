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
#include <fstream>
#include <string>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/config.hpp"
#include "gruscreen/text/clean.hpp"
#include "gruscreen/text/corpus.hpp"
#include "gruscreen/text/encode.hpp"
#include "gruscreen/text/vocabulary.hpp"
#include "gruscreen/train/split.hpp"
#include "gruscreen/train/trainer.hpp"
#include "json.hpp"

namespace gruscreen::train {

/// Everything a training run needs; mirrors the JSON config file.
struct ExperimentConfig {
  nn::ModelConfig model;
  TrainConfig train;
  SplitSpec split;
  std::size_t max_words = 10000;
  std::uint64_t model_seed = 1;

  void validate() const {
    model.validate();
    train.validate();
    split.validate();
    if (max_words < 2 || max_words > model.vocab_size) {
      throw Error(ErrorCode::kInvalidArgument, "max_words must be in [2, vocab_size]");
    }
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"model", c.model}, {"train", c.train}, {"split", c.split}, {"max_words", c.max_words},
       {"model_seed", c.model_seed}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("model")) j.at("model").get_to(c.model);
  if (j.contains("train")) j.at("train").get_to(c.train);
  if (j.contains("split")) j.at("split").get_to(c.split);
  c.max_words = j.value("max_words", c.max_words);
  c.model_seed = j.value("model_seed", c.model_seed);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  try {
    auto cfg = nlohmann::json::parse(in).get<ExperimentConfig>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, path + ": " + e.what());
  }
}

struct PreparedData {
  text::Vocabulary vocab;
  Dataset train;
  Dataset val;
  Dataset test;
  // cleaned texts, aligned with the datasets above
  std::vector<std::string> train_text;
  std::vector<std::string> val_text;
  std::vector<std::string> test_text;
};

inline Dataset encode_dataset(const std::vector<std::string>& cleaned, const std::vector<int>& labels,
                              const text::Vocabulary& vocab, std::size_t seq_len) {
  Dataset d;
  d.x.reserve(cleaned.size());
  for (const auto& t : cleaned) d.x.push_back(text::encode(t, vocab, seq_len));
  d.y = labels;
  return d;
}

/// Clean -> split -> fit vocabulary on the training part -> encode.
inline PreparedData prepare_data(const text::LabeledCorpus& corpus, const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> cleaned;
  cleaned.reserve(corpus.size());
  const auto rules = text::CleanRules::defaults();
  for (const auto& t : corpus.texts) cleaned.push_back(text::clean_text(t, rules));
  auto parts = split_dataset(cleaned, corpus.labels, cfg.split);
  PreparedData out;
  out.vocab = text::fit_vocabulary(parts.train.samples, cfg.max_words);
  const auto seq = cfg.model.seq_len;
  out.train = encode_dataset(parts.train.samples, parts.train.labels, out.vocab, seq);
  out.val = encode_dataset(parts.val.samples, parts.val.labels, out.vocab, seq);
  out.test = encode_dataset(parts.test.samples, parts.test.labels, out.vocab, seq);
  out.train_text = std::move(parts.train.samples);
  out.val_text = std::move(parts.val.samples);
  out.test_text = std::move(parts.test.samples);
  return out;
}

}  // namespace gruscreen::train
