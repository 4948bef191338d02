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
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/text/clean.hpp"

namespace gruscreen::text {

/// Frequency-ranked word index. Index 0 is padding; words take 1..size().
/// Ranking: descending corpus count, ties by earlier first occurrence.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from words already in rank order (words[0] gets index 1).
  Vocabulary(std::vector<std::string> ranked_words, std::size_t max_words)
      : words_(std::move(ranked_words)), max_words_(max_words) {
    if (max_words_ < 2) throw Error(ErrorCode::kInvalidArgument, "max_words must be >= 2");
    if (words_.size() > max_words_ - 1) {
      throw Error(ErrorCode::kInvalidArgument, "more words than max_words - 1");
    }
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto [it, inserted] = index_.emplace(words_[i], static_cast<std::uint32_t>(i + 1));
      if (!inserted || words_[i].empty()) {
        throw Error(ErrorCode::kFormatError, "duplicate or empty vocabulary word");
      }
    }
  }

  /// 0 when the word is not in the vocabulary.
  std::uint32_t index_of(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? 0 : it->second;
  }

  const std::string& word_at(std::uint32_t index) const { return words_.at(index - 1); }

  std::size_t size() const { return words_.size(); }
  std::size_t max_words() const { return max_words_; }
  const std::vector<std::string>& words() const { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.max_words_ == b.max_words_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::size_t max_words_ = 2;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Counts words (split on spaces) across cleaned documents and keeps the
/// top max_words - 1.
inline Vocabulary fit_vocabulary(const std::vector<std::string>& corpus, std::size_t max_words) {
  if (max_words < 2) throw Error(ErrorCode::kInvalidArgument, "max_words must be >= 2");
  struct Entry {
    std::string word;
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<Entry> entries;
  for (const auto& doc : corpus) {
    for (auto word : split_words(doc)) {
      auto [it, inserted] = slot.try_emplace(std::string(word), entries.size());
      if (inserted) entries.push_back({std::string(word), 0, entries.size()});
      ++entries[it->second].count;
    }
  }
  if (entries.empty()) throw Error(ErrorCode::kEmptyCorpus, "every document is empty");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.count > b.count; });
  std::size_t keep = std::min(entries.size(), max_words - 1);
  std::vector<std::string> ranked;
  ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) ranked.push_back(std::move(entries[i].word));
  return Vocabulary(std::move(ranked), max_words);
}

/// Vocabulary file: "word<TAB>index" lines sorted by index, LF endings.
/// A leading "#max_words<TAB>N" line records the cap.
inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  out << "#max_words\t" << vocab.max_words() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.words()[i] << '\t' << (i + 1) << '\n';
}

inline Vocabulary read_vocabulary(std::istream& in) {
  std::string line;
  std::size_t max_words = 0;
  std::vector<std::string> words;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kFormatError, "vocabulary line without tab");
    std::string key = line.substr(0, tab);
    std::size_t value = 0;
    try {
      value = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormatError, "bad vocabulary index: " + line);
    }
    if (key == "#max_words") {
      max_words = value;
      continue;
    }
    if (value != words.size() + 1) throw Error(ErrorCode::kFormatError, "vocabulary indices not dense");
    words.push_back(std::move(key));
  }
  if (max_words == 0) max_words = words.size() + 1;
  return Vocabulary(std::move(words), std::max<std::size_t>(max_words, 2));
}

inline void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_vocabulary(out, vocab);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return read_vocabulary(in);
}

}  // namespace gruscreen::text
