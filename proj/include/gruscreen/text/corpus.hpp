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
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/text/csv.hpp"

namespace gruscreen::text {

/// Class coding: suicide is class 0, non-suicide is class 1.
inline constexpr int kSuicide = 0;
inline constexpr int kNonSuicide = 1;

inline std::string_view class_name(int label) {
  return label == kSuicide ? "suicide" : "non-suicide";
}

inline int parse_class(std::string_view name) {
  if (name == "suicide") return kSuicide;
  if (name == "non-suicide") return kNonSuicide;
  throw Error(ErrorCode::kBadLabel, "unknown class '" + std::string(name) + "'");
}

struct LabeledCorpus {
  std::vector<std::string> texts;
  std::vector<int> labels;

  std::size_t size() const { return texts.size(); }
};

/// CSV with a header holding `text` and `class` columns; other columns
/// (such as an unnamed row index) are ignored.
inline LabeledCorpus parse_corpus_csv(std::string_view data) {
  auto rows = parse_csv(data);
  if (rows.empty()) throw Error(ErrorCode::kFormatError, "corpus CSV has no header");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::kFormatError, "corpus CSV lacks a '" + std::string(name) + "' column");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t text_col = column("text");
  std::size_t class_col = column("class");
  LabeledCorpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= std::max(text_col, class_col)) {
      throw Error(ErrorCode::kFormatError, "corpus row " + std::to_string(r) + " is short");
    }
    corpus.labels.push_back(parse_class(row[class_col]));
    corpus.texts.push_back(row[text_col]);
  }
  return corpus;
}

inline LabeledCorpus load_corpus_csv(const std::string& path) {
  return parse_corpus_csv(read_file(path));
}

inline void save_corpus_csv(const std::string& path, const LabeledCorpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_csv_row(out, {"text", "class"});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    write_csv_row(out, {corpus.texts[i], std::string(class_name(corpus.labels[i]))});
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace gruscreen::text
