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
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gruscreen/error.hpp"
#include "json.hpp"

namespace gruscreen::service {

struct Question {
  int id = 0;
  std::string text;
  std::vector<std::string> topic_keywords;
  // cleaned keyword -> id of the question to ask next
  std::map<std::string, int> followups;
  int priority = 0;
  bool opener = false;
};

inline void from_json(const nlohmann::json& j, Question& q) {
  j.at("id").get_to(q.id);
  j.at("text").get_to(q.text);
  q.topic_keywords = j.value("topic_keywords", std::vector<std::string>{});
  q.followups = j.value("followups", std::map<std::string, int>{});
  q.priority = j.value("priority", 0);
  q.opener = j.value("opener", false);
}

inline void to_json(nlohmann::json& j, const Question& q) {
  j = {{"id", q.id},
       {"text", q.text},
       {"topic_keywords", q.topic_keywords},
       {"followups", q.followups},
       {"priority", q.priority},
       {"opener", q.opener}};
}

inline constexpr std::string_view kDefaultClosingPrompt =
    "Thank you for talking with me. This conversation is now complete.";

class QuestionBank {
 public:
  QuestionBank() = default;
  QuestionBank(std::vector<Question> questions, std::string closing_prompt = std::string(kDefaultClosingPrompt))
      : questions_(std::move(questions)), closing_prompt_(std::move(closing_prompt)) {
    std::sort(questions_.begin(), questions_.end(), [](const Question& a, const Question& b) { return a.id < b.id; });
  }

  /// Ids unique, every followup target exists, at least one opener.
  void validate() const {
    if (questions_.empty()) throw Error(ErrorCode::kBankInvalid, "question bank is empty");
    std::set<int> ids;
    for (const auto& q : questions_) {
      if (!ids.insert(q.id).second) throw Error(ErrorCode::kBankInvalid, "duplicate question id " + std::to_string(q.id));
    }
    bool has_opener = false;
    for (const auto& q : questions_) {
      has_opener = has_opener || q.opener;
      for (const auto& [keyword, target] : q.followups) {
        if (!ids.count(target)) {
          throw Error(ErrorCode::kBankInvalid,
                      "question " + std::to_string(q.id) + " follows up to missing id " + std::to_string(target));
        }
      }
    }
    if (!has_opener) throw Error(ErrorCode::kBankInvalid, "no question is marked as opener");
  }

  const Question* find(int id) const {
    auto it = std::lower_bound(questions_.begin(), questions_.end(), id,
                               [](const Question& q, int v) { return q.id < v; });
    return it != questions_.end() && it->id == id ? &*it : nullptr;
  }

  /// Highest-priority opener, lowest id on ties.
  const Question& opener() const {
    const Question* best = nullptr;
    for (const auto& q : questions_) {
      if (q.opener && (!best || q.priority > best->priority)) best = &q;
    }
    if (!best) throw Error(ErrorCode::kBankInvalid, "no question is marked as opener");
    return *best;
  }

  const std::vector<Question>& questions() const { return questions_; }
  const std::string& closing_prompt() const { return closing_prompt_; }

 private:
  std::vector<Question> questions_;  // sorted by id
  std::string closing_prompt_ = std::string(kDefaultClosingPrompt);
};

inline QuestionBank parse_question_bank(const nlohmann::json& j) {
  try {
    auto qs = j.at("questions").get<std::vector<Question>>();
    QuestionBank bank(std::move(qs), j.value("closing_prompt", std::string(kDefaultClosingPrompt)));
    bank.validate();
    return bank;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBankInvalid, e.what());
  }
}

inline QuestionBank load_question_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  try {
    return parse_question_bank(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kBankInvalid, path + ": " + e.what());
  }
}

}  // namespace gruscreen::service
