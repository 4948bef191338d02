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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/service/detector.hpp"
#include "gruscreen/service/question_bank.hpp"
#include "gruscreen/service/risk.hpp"
#include "gruscreen/service/session.hpp"
#include "gruscreen/text/clean.hpp"
#include "json.hpp"

namespace gruscreen::service {

/// 128-bit random session token as 32 hex digits.
inline std::string random_session_id() {
  static thread_local std::random_device rd;
  char buf[33];
  std::uint32_t words[4];
  for (auto& w : words) w = rd();
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", words[0], words[1], words[2], words[3]);
  return buf;
}

/// UTC ISO-8601 with milliseconds.
inline std::string utc_now_iso8601() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t secs = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

struct ServiceOptions {
  RiskPolicy policy;
  // Session event logs (one JSON-lines file per session) go here when set.
  std::optional<std::filesystem::path> data_dir;
  std::function<std::string()> make_id = random_session_id;
  std::function<std::string()> clock = utc_now_iso8601;
};

struct NextQuestion {
  std::optional<int> id;  // empty for the closing prompt
  std::string text;
  bool closing = false;
};

struct CreateResult {
  std::string session_id;
  NextQuestion question;
};

struct PostResult {
  double score = 0.0;
  NextQuestion next_question;
  RiskAggregate aggregate;
  SessionState state = SessionState::kActive;
};

inline nlohmann::json to_json_value(const NextQuestion& q) {
  return {{"id", q.id ? nlohmann::json(*q.id) : nlohmann::json(nullptr)}, {"text", q.text}, {"closing", q.closing}};
}

/// Screening chat sessions. Each session processes one message at a time;
/// different sessions run concurrently against the shared read-only
/// detector.
class ChatService {
 public:
  ChatService(QuestionBank bank, std::shared_ptr<const IdeationDetector> detector, ServiceOptions options = {},
              std::shared_ptr<const OtherIssuesDetector> other = std::make_shared<NoOtherIssuesDetector>())
      : bank_(std::move(bank)),
        detector_(std::move(detector)),
        other_(std::move(other)),
        options_(std::move(options)) {
    bank_.validate();
    if (options_.data_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*options_.data_dir, ec);
      if (ec) throw Error(ErrorCode::kIoError, "cannot create " + options_.data_dir->string());
    }
  }

  CreateResult create_session() {
    const Question& opener = bank_.opener();
    auto slot = std::make_shared<Slot>();
    std::string id;
    {
      std::unique_lock lock(sessions_mutex_);
      do {
        id = options_.make_id();
      } while (sessions_.count(id));
      sessions_.emplace(id, slot);
    }
    std::lock_guard session_lock(slot->mutex);
    commit(*slot, id, {SessionEvent::make(SessionEvent::Kind::kCreated, id, options_.clock(), opener.text, opener.id)});
    return {id, {opener.id, opener.text, false}};
  }

  /// Scores the message, updates the aggregate and picks the next question.
  PostResult post_message(const std::string& session_id, std::string_view raw_text) {
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    if (slot->session.state == SessionState::kClosed) {
      throw Error(ErrorCode::kSessionClosed, "session " + session_id + " is closed");
    }
    if (!detector_) throw Error(ErrorCode::kModelNotLoaded, "no detector is loaded");
    const std::string cleaned = text::clean_text(raw_text);
    const double score = detector_->suicide_probability(cleaned);

    std::vector<SessionEvent> events;
    auto user = SessionEvent::make(SessionEvent::Kind::kUser, session_id, options_.clock(), std::string(raw_text));
    user.score = score;
    user.findings = other_->analyze(cleaned);
    events.push_back(std::move(user));
    NextQuestion next;
    if (const Question* q = select_next_question(slot->session, cleaned, bank_)) {
      next = {q->id, q->text, false};
      events.push_back(SessionEvent::make(SessionEvent::Kind::kBot, session_id, options_.clock(), q->text, q->id));
    } else {
      next = {std::nullopt, bank_.closing_prompt(), true};
      const auto ts = options_.clock();
      events.push_back(SessionEvent::make(SessionEvent::Kind::kBot, session_id, ts, bank_.closing_prompt()));
      events.push_back(SessionEvent::make(SessionEvent::Kind::kClosed, session_id, ts));
    }
    commit(*slot, session_id, events);
    return {score, next, slot->session.aggregate, slot->session.state};
  }

  RiskReport generate_report(const std::string& session_id) const {
    auto slot = find(session_id);
    ChatSession snapshot;
    {
      std::lock_guard lock(slot->mutex);
      snapshot = slot->session;
    }
    return build_report(snapshot, options_.policy, options_.clock(), model_checksum());
  }

  /// Consistent copy of one session.
  ChatSession snapshot(const std::string& session_id) const {
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    return slot->session;
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, slot] : sessions_) ids.push_back(id);
    return ids;
  }

  std::string model_checksum() const { return detector_ ? detector_->model_checksum() : std::string{}; }
  bool model_loaded() const { return detector_ != nullptr; }
  const QuestionBank& bank() const { return bank_; }
  const RiskPolicy& policy() const { return options_.policy; }

  /// Rebuilds sessions from the event logs in the data directory. Returns
  /// the number of sessions restored.
  std::size_t replay() {
    if (!options_.data_dir) return 0;
    std::size_t restored = 0;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*options_.data_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      auto slot = std::make_shared<Slot>();
      std::ifstream in(path);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
          apply_event(slot->session, event_from_json(nlohmann::json::parse(line)), options_.policy);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kFormatError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
      }
      if (slot->session.id.empty()) continue;
      std::unique_lock lock(sessions_mutex_);
      if (sessions_.emplace(slot->session.id, slot).second) ++restored;
    }
    return restored;
  }

 private:
  struct Slot {
    mutable std::mutex mutex;
    ChatSession session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::kSessionNotFound, "no session " + id);
    return it->second;
  }

  // Caller holds slot.mutex. Events are logged before they are applied.
  void commit(Slot& slot, const std::string& id, const std::vector<SessionEvent>& events) {
    if (options_.data_dir) {
      std::ofstream log(*options_.data_dir / (id + ".jsonl"), std::ios::app | std::ios::binary);
      std::string lines;
      for (const auto& e : events) lines += event_to_json(e).dump() + "\n";
      log << lines << std::flush;
      if (!log) throw Error(ErrorCode::kIoError, "cannot append to the log of session " + id);
    }
    for (const auto& e : events) apply_event(slot.session, e, options_.policy);
  }

  QuestionBank bank_;
  std::shared_ptr<const IdeationDetector> detector_;
  std::shared_ptr<const OtherIssuesDetector> other_;
  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace gruscreen::service
