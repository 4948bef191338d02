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

// Text cleaning. Rules run in a fixed order:
//   HTML tag strip -> email strip -> accent fold -> lowercase
//   -> punctuation/special-char strip -> whitespace collapse -> stopwords
// Output of the default rules is lowercase ASCII [a-z0-9] words joined by
// single spaces. clean_text is idempotent.

#include <algorithm>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gruscreen/text/accent_table.hpp"
#include "gruscreen/text/stopwords.hpp"

namespace gruscreen::text {

/// Email pattern applied to whitespace-delimited tokens.
inline constexpr std::string_view kEmailPattern = R"([^\s]+@[^\s]+\.[^\s]+)";

struct CleanRules {
  std::set<std::string, std::less<>> stopwords;
  bool strip_html = true;
  bool strip_emails = true;
  bool strip_punctuation = true;
  bool fold_accents = true;

  /// The shipped stopword list with every rule enabled.
  static CleanRules defaults() {
    CleanRules rules;
    for (auto w : kStopwords) rules.stopwords.emplace(w);
    return rules;
  }
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// A tag is '<' followed by a letter, '/' or '!' and closed by the next '>'.
inline std::string strip_html(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] == '<' && i + 1 < in.size()) {
      char next = in[i + 1];
      bool opens = (next >= 'a' && next <= 'z') || (next >= 'A' && next <= 'Z') ||
                   next == '/' || next == '!';
      auto close = opens ? in.find('>', i + 1) : std::string_view::npos;
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    if (in[i] == '&') {
      // character entities: &name; or &#123;
      std::size_t j = i + 1;
      if (j < in.size() && in[j] == '#') ++j;
      std::size_t start = j;
      while (j < in.size() && j - start < 10 && is_ascii_alnum(in[j])) ++j;
      if (j > start && j < in.size() && in[j] == ';') {
        out.push_back(' ');
        i = j + 1;
        continue;
      }
    }
    out.push_back(in[i]);
    ++i;
  }
  return out;
}

inline std::string strip_emails(std::string_view in) {
  static const std::regex email{std::string(kEmailPattern)};
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (is_space(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < in.size() && !is_space(in[j])) ++j;
    std::string_view token = in.substr(i, j - i);
    if (token.find('@') != std::string_view::npos &&
        std::regex_match(token.begin(), token.end(), email)) {
      out.push_back(' ');
    } else {
      out.append(token);
    }
    i = j;
  }
  return out;
}

inline char fold_code_point(char32_t cp) {
  auto it = std::lower_bound(
      kAccentFold.begin(), kAccentFold.end(), cp,
      [](const std::pair<char32_t, char>& e, char32_t v) { return e.first < v; });
  if (it != kAccentFold.end() && it->first == cp) return it->second;
  return ' ';
}

// Decodes UTF-8; folds accented Latin letters to their ASCII base letter and
// turns every other non-ASCII code point (or malformed byte) into a space.
inline std::string fold_accents(std::string_view in, bool fold) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    auto b0 = static_cast<unsigned char>(in[i]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      out.push_back(' ');
      ++i;
      continue;
    }
    bool ok = i + static_cast<std::size_t>(extra) < in.size();
    for (int k = 1; ok && k <= extra; ++k) {
      auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(' ');
      ++i;
      continue;
    }
    out.push_back(fold ? fold_code_point(cp) : ' ');
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

}  // namespace detail

/// Splits on runs of ASCII whitespace.
inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && detail::is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !detail::is_space(s[j])) ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

inline std::string clean_text(std::string_view raw, const CleanRules& rules) {
  std::string s(raw);
  if (rules.strip_html) s = detail::strip_html(s);
  if (rules.strip_emails) s = detail::strip_emails(s);
  s = detail::fold_accents(s, rules.fold_accents);
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  if (rules.strip_punctuation) {
    for (auto& c : s) {
      if (!detail::is_ascii_alnum(c)) c = ' ';
    }
  }
  std::string out;
  out.reserve(s.size());
  for (auto word : split_words(s)) {
    if (rules.stopwords.find(word) != rules.stopwords.end()) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(word);
  }
  return out;
}

inline std::string clean_text(std::string_view raw) {
  static const CleanRules rules = CleanRules::defaults();
  return clean_text(raw, rules);
}

}  // namespace gruscreen::text
