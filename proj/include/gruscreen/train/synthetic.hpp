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

// Desk-scale separable corpus: class 0 documents draw every word from one
// 30-word lexicon, class 1 documents from a disjoint one.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "gruscreen/nn/random.hpp"
#include "gruscreen/text/corpus.hpp"

namespace gruscreen::train {

inline constexpr std::array<std::string_view, 30> kLexiconClass0{
    "river",  "forest", "meadow", "valley", "canyon", "glacier", "prairie", "harbor", "lagoon", "summit",
    "orchard", "willow", "pebble", "breeze", "thunder", "blossom", "marsh",  "tundra", "cedar",  "dune",
    "fjord",  "grove",  "island", "lake",   "moss",   "oasis",   "pine",    "reef",   "spring", "brook"};

inline constexpr std::array<std::string_view, 30> kLexiconClass1{
    "engine", "bridge",  "subway",  "factory", "laptop", "server",  "tower",   "garage", "circuit", "rocket",
    "tunnel", "highway", "station", "printer", "cable",  "battery", "monitor", "router", "piston",  "turbine",
    "plaza",  "avenue",  "market",  "office",  "bakery", "museum",  "stadium", "depot",  "kiosk",   "tram"};

struct SynthSpec {
  std::size_t n = 2000;
  std::uint64_t seed = 7;
  std::size_t min_words = 8;
  std::size_t max_words = 60;
};

/// Labels are balanced in expectation; word counts are uniform on
/// [min_words, max_words].
inline text::LabeledCorpus make_synthetic_corpus(const SynthSpec& spec) {
  nn::Rng rng(nn::derive_seed(spec.seed, {0x5E7}));
  auto draw = [&](std::size_t bound) { return static_cast<std::size_t>(rng.next_u64() % bound); };
  text::LabeledCorpus corpus;
  corpus.texts.reserve(spec.n);
  corpus.labels.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const int label = static_cast<int>(draw(2));
    const auto& lexicon = label == text::kSuicide ? kLexiconClass0 : kLexiconClass1;
    const std::size_t words = spec.min_words + draw(spec.max_words - spec.min_words + 1);
    std::string doc;
    for (std::size_t w = 0; w < words; ++w) {
      if (w) doc.push_back(' ');
      doc.append(lexicon[draw(lexicon.size())]);
    }
    corpus.texts.push_back(std::move(doc));
    corpus.labels.push_back(label);
  }
  return corpus;
}

}  // namespace gruscreen::train
