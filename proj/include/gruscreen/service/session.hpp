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

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/service/question_bank.hpp"
#include "gruscreen/service/risk.hpp"
#include "gruscreen/text/clean.hpp"
#include "json.hpp"

namespace gruscreen::service {

enum class Role { kBot, kUser };
enum class SessionState { kActive, kClosed };

inline std::string_view to_string(Role r) { return r == Role::kBot ? "bot" : "user"; }
inline std::string_view to_string(SessionState s) { return s == SessionState::kActive ? "active" : "closed"; }

struct Turn {
  Role role = Role::kBot;
  std::string text;
  std::string timestamp;
};

struct ChatSession {
  std::string id;
  std::string created_at;
  std::vector<Turn> transcript;
  std::vector<double> scores;              // one per user turn
  std::vector<std::size_t> user_turns;     // transcript index of each user turn
  std::set<int> asked;
  std::optional<int> last_question;
  SessionState state = SessionState::kActive;
  RiskAggregate aggregate;
  nlohmann::json other_findings = nlohmann::json::object();
};

/// Unit of session change; also the line format of the session event log.
struct SessionEvent {
  enum class Kind { kCreated, kUser, kBot, kClosed };
  Kind kind = Kind::kCreated;
  std::string session_id;
  std::string timestamp;
  std::string text;
  std::optional<int> question_id;
  double score = 0.0;
  nlohmann::json findings;  // kUser only

  static SessionEvent make(Kind kind, std::string session_id, std::string timestamp, std::string text = {},
                           std::optional<int> question_id = std::nullopt) {
    SessionEvent e;
    e.kind = kind;
    e.session_id = std::move(session_id);
    e.timestamp = std::move(timestamp);
    e.text = std::move(text);
    e.question_id = question_id;
    return e;
  }
};

inline std::string_view to_string(SessionEvent::Kind k) {
  switch (k) {
    case SessionEvent::Kind::kCreated: return "created";
    case SessionEvent::Kind::kUser: return "user";
    case SessionEvent::Kind::kBot: return "bot";
    case SessionEvent::Kind::kClosed: return "closed";
  }
  return "created";
}

inline nlohmann::json event_to_json(const SessionEvent& e) {
  nlohmann::json j = {{"event", std::string(to_string(e.kind))}, {"session_id", e.session_id}, {"ts", e.timestamp}};
  if (e.kind != SessionEvent::Kind::kClosed) j["text"] = e.text;
  if (e.question_id) j["question_id"] = *e.question_id;
  if (e.kind == SessionEvent::Kind::kUser) {
    j["score"] = e.score;
    if (!e.findings.is_null() && !e.findings.empty()) j["findings"] = e.findings;
  }
  return j;
}

inline SessionEvent event_from_json(const nlohmann::json& j) {
  SessionEvent e;
  const auto kind = j.at("event").get<std::string>();
  if (kind == "created") {
    e.kind = SessionEvent::Kind::kCreated;
  } else if (kind == "user") {
    e.kind = SessionEvent::Kind::kUser;
  } else if (kind == "bot") {
    e.kind = SessionEvent::Kind::kBot;
  } else if (kind == "closed") {
    e.kind = SessionEvent::Kind::kClosed;
  } else {
    throw Error(ErrorCode::kFormatError, "unknown session event '" + kind + "'");
  }
  e.session_id = j.at("session_id").get<std::string>();
  e.timestamp = j.value("ts", std::string{});
  e.text = j.value("text", std::string{});
  if (j.contains("question_id")) e.question_id = j.at("question_id").get<int>();
  e.score = j.value("score", 0.0);
  e.findings = j.value("findings", nlohmann::json::object());
  return e;
}

inline void apply_event(ChatSession& s, const SessionEvent& e, const RiskPolicy& policy) {
  switch (e.kind) {
    case SessionEvent::Kind::kCreated:
      s.id = e.session_id;
      s.created_at = e.timestamp;
      [[fallthrough]];
    case SessionEvent::Kind::kBot:
      s.transcript.push_back({Role::kBot, e.text, e.timestamp});
      if (e.question_id) {
        s.asked.insert(*e.question_id);
        s.last_question = e.question_id;
      }
      break;
    case SessionEvent::Kind::kUser:
      s.user_turns.push_back(s.transcript.size());
      s.transcript.push_back({Role::kUser, e.text, e.timestamp});
      s.scores.push_back(e.score);
      accumulate(s.aggregate, e.score, policy);
      if (e.findings.is_object()) {
        for (const auto& [key, value] : e.findings.items()) s.other_findings[key] = value;
      }
      break;
    case SessionEvent::Kind::kClosed:
      s.state = SessionState::kClosed;
      break;
  }
}

/// Keyword-driven choice of the next question. A cleaned token that matches
/// a followup keyword of the last asked question selects that followup
/// (highest priority, then lowest id, unasked only). Otherwise the
/// highest-priority unasked question is chosen, lowest id on ties.
/// nullptr means every question has been asked.
inline const Question* select_next_question(const ChatSession& session, std::string_view cleaned_text,
                                            const QuestionBank& bank) {
  auto better = [](const Question* cand, const Question* best) {
    return !best || cand->priority > best->priority || (cand->priority == best->priority && cand->id < best->id);
  };
  const Question* best = nullptr;
  if (session.last_question) {
    if (const Question* last = bank.find(*session.last_question)) {
      for (auto token : text::split_words(cleaned_text)) {
        auto it = last->followups.find(std::string(token));
        if (it == last->followups.end() || session.asked.count(it->second)) continue;
        const Question* cand = bank.find(it->second);
        if (cand && better(cand, best)) best = cand;
      }
    }
  }
  if (best) return best;
  for (const auto& q : bank.questions()) {
    if (!session.asked.count(q.id) && better(&q, best)) best = &q;
  }
  return best;
}

struct FlaggedMessage {
  std::size_t message_index = 0;  // among user messages, 0-based
  std::string text;
  double score = 0.0;
};

/// Findings for one session, for the responsible authority.
struct RiskReport {
  std::string session_id;
  std::string generated_at;
  SessionState state = SessionState::kActive;
  std::vector<Turn> transcript;
  std::vector<double> scores;
  std::vector<FlaggedMessage> flagged;
  RiskAggregate aggregate;
  std::string recommended_action;
  std::string model_checksum;
  nlohmann::json other_findings = nlohmann::json::object();
};

inline RiskReport build_report(const ChatSession& s, const RiskPolicy& policy, std::string generated_at,
                               std::string model_checksum) {
  RiskReport r;
  r.session_id = s.id;
  r.generated_at = std::move(generated_at);
  r.state = s.state;
  r.transcript = s.transcript;
  r.scores = s.scores;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.scores[i] >= policy.flag_threshold) r.flagged.push_back({i, s.transcript[s.user_turns[i]].text, s.scores[i]});
  }
  r.aggregate = s.aggregate;
  r.recommended_action = std::string(recommended_action(s.aggregate.level));
  r.model_checksum = std::move(model_checksum);
  r.other_findings = s.other_findings;
  return r;
}

inline nlohmann::json report_to_json(const RiskReport& r) {
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& t : r.transcript) {
    transcript.push_back({{"role", std::string(to_string(t.role))}, {"text", t.text}, {"timestamp", t.timestamp}});
  }
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& f : r.flagged) {
    flagged.push_back({{"message_index", f.message_index}, {"text", f.text}, {"score", f.score}});
  }
  return {{"session_id", r.session_id},
          {"generated_at", r.generated_at},
          {"state", std::string(to_string(r.state))},
          {"transcript", transcript},
          {"message_scores", r.scores},
          {"flagged_messages", flagged},
          {"aggregate", r.aggregate},
          {"recommended_action", r.recommended_action},
          {"model_checksum", r.model_checksum},
          {"other_findings", r.other_findings}};
}

inline std::string report_to_text(const RiskReport& r) {
  std::ostringstream out;
  char num[32];
  auto f4 = [&](double v) {
    std::snprintf(num, sizeof num, "%.4f", v);
    return std::string(num);
  };
  out << "Screening report for session " << r.session_id << "\n";
  out << "Generated: " << r.generated_at << "\n";
  out << "Session state: " << to_string(r.state) << "\n";
  out << "Risk level: " << to_string(r.aggregate.level) << " (max " << f4(r.aggregate.max_prob) << ", ewma "
      << f4(r.aggregate.ewma_prob) << ", flagged " << r.aggregate.flagged_count << ")\n";
  out << "Recommended action: " << r.recommended_action << "\n";
  out << "Model checksum: " << (r.model_checksum.empty() ? "n/a" : r.model_checksum) << "\n\n";
  out << "Flagged messages:\n";
  if (r.flagged.empty()) out << "  (none)\n";
  for (const auto& f : r.flagged) out << "  #" << f.message_index << " [" << f4(f.score) << "] " << f.text << "\n";
  out << "\nTranscript:\n";
  std::size_t user = 0;
  for (const auto& t : r.transcript) {
    out << "  " << t.timestamp << " " << to_string(t.role);
    if (t.role == Role::kUser && user < r.scores.size()) out << " [" << f4(r.scores[user++]) << "]";
    out << ": " << t.text << "\n";
  }
  return out.str();
}

}  // namespace gruscreen::service
