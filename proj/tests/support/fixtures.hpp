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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gruscreen/service/chat_service.hpp"
#include "gruscreen/service/detector.hpp"
#include "gruscreen/service/question_bank.hpp"
#include "gruscreen/text/clean.hpp"

namespace fixtures {

/// Scores a message by its first all-digit token: "85" -> 0.85. No digits
/// scores 0.
class DigitDetector final : public gruscreen::service::IdeationDetector {
 public:
  double suicide_probability(std::string_view cleaned) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    for (auto token : gruscreen::text::split_words(cleaned)) {
      if (!token.empty() && token.find_first_not_of("0123456789") == std::string_view::npos) {
        return std::stod(std::string(token)) / 100.0;
      }
    }
    return 0.0;
  }
  std::string model_checksum() const override { return "stub0001"; }
  std::size_t calls() const { return calls_.load(); }

 private:
  mutable std::atomic<std::size_t> calls_{0};
};

class ConstantDetector final : public gruscreen::service::IdeationDetector {
 public:
  explicit ConstantDetector(double p) : p_(p) {}
  double suicide_probability(std::string_view) const override { return p_; }

 private:
  double p_;
};

/// `n` (>= 10) neutral questions; q1 is the opener and follows up
/// "hopeless" -> q7. Priorities: q1 100, q2..q5 10, the rest 5.
inline gruscreen::service::QuestionBank sample_bank(int n = 10) {
  using gruscreen::service::Question;
  std::vector<Question> qs;
  for (int id = 1; id <= n; ++id) {
    Question q;
    q.id = id;
    q.text = "question " + std::to_string(id);
    q.priority = id == 1 ? 100 : (id <= 5 ? 10 : 5);
    q.opener = id == 1;
    qs.push_back(q);
  }
  qs[0].followups = {{"hopeless", 7}, {"tired", 8}};
  qs[6].followups = {{"alone", 9}};
  return gruscreen::service::QuestionBank(qs);
}

/// Deterministic ids and timestamps.
inline gruscreen::service::ServiceOptions scripted_options() {
  gruscreen::service::ServiceOptions o;
  auto ids = std::make_shared<std::atomic<int>>(0);
  o.make_id = [ids] {
    char buf[40];
    std::snprintf(buf, sizeof buf, "s%031d", ids->fetch_add(1));
    return std::string(buf);
  };
  o.clock = [] { return std::string("2026-01-01T00:00:00.000Z"); };
  return o;
}

/// Score of message `k` in concurrent session `s`, in hundredths.
inline int scripted_percent(int s, int k) { return (s * 37 + k * 53 + (k * k) % 11) % 101; }

/// Expected aggregate by direct recurrence over the scripted scores.
inline gruscreen::service::RiskAggregate expected_aggregate(int s, int messages) {
  gruscreen::service::RiskAggregate a;
  for (int k = 0; k < messages; ++k) {
    const double p = scripted_percent(s, k) / 100.0;
    if (k == 0) {
      a.max_prob = p;
      a.ewma_prob = p;
    } else {
      a.max_prob = std::max(a.max_prob, p);
      a.ewma_prob = 0.7 * a.ewma_prob + 0.3 * p;
    }
    a.flagged_count += p >= 0.8 ? 1 : 0;
  }
  a.messages = static_cast<std::size_t>(messages);
  a.level = a.max_prob >= 0.8 || a.ewma_prob >= 0.6 ? gruscreen::service::RiskLevel::kHigh
            : a.max_prob >= 0.5                    ? gruscreen::service::RiskLevel::kElevated
                                                   : gruscreen::service::RiskLevel::kNone;
  return a;
}

/// 16 sessions, one thread each, 20 interleaved messages per session. Returns
/// an empty string when every transcript and aggregate is exact, otherwise a
/// description of the first problem.
inline std::string run_concurrent_sessions(int sessions = 16, int messages = 20) {
  using namespace gruscreen::service;
  auto detector = std::make_shared<DigitDetector>();
  ChatService service(sample_bank(messages + 5), detector, scripted_options());
  std::vector<std::string> ids;
  for (int s = 0; s < sessions; ++s) ids.push_back(service.create_session().session_id);
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};
  for (int s = 0; s < sessions; ++s) {
    threads.emplace_back([&, s] {
      for (int k = 0; k < messages; ++k) {
        const std::string text = "session s" + std::to_string(s) + " message m" + std::to_string(k) + " " +
                                 std::to_string(scripted_percent(s, k));
        try {
          service.post_message(ids[static_cast<std::size_t>(s)], text);
        } catch (...) {
          failures.fetch_add(1);
        }
        std::this_thread::yield();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failures.load() != 0) return std::to_string(failures.load()) + " posts failed";
  for (int s = 0; s < sessions; ++s) {
    const auto snap = service.snapshot(ids[static_cast<std::size_t>(s)]);
    const auto want = expected_aggregate(s, messages);
    if (snap.scores.size() != static_cast<std::size_t>(messages)) return "score count differs in session " + std::to_string(s);
    std::size_t user = 0;
    for (const auto& turn : snap.transcript) {
      if (turn.role != Role::kUser) continue;
      const std::string want_text = "session s" + std::to_string(s) + " message m" + std::to_string(user) + " " +
                                    std::to_string(scripted_percent(s, static_cast<int>(user)));
      if (turn.text != want_text) return "session " + std::to_string(s) + " holds '" + turn.text + "'";
      if (snap.scores[user] != scripted_percent(s, static_cast<int>(user)) / 100.0) {
        return "score mismatch in session " + std::to_string(s);
      }
      ++user;
    }
    if (user != static_cast<std::size_t>(messages)) return "user turn count differs in session " + std::to_string(s);
    if (snap.transcript.size() != static_cast<std::size_t>(2 * messages + 1)) {
      return "transcript length differs in session " + std::to_string(s);
    }
    const auto& got = snap.aggregate;
    if (got.max_prob != want.max_prob || std::abs(got.ewma_prob - want.ewma_prob) > 1e-12 ||
        got.flagged_count != want.flagged_count || got.level != want.level || got.messages != want.messages) {
      return "aggregate mismatch in session " + std::to_string(s);
    }
  }
  if (detector->calls() != static_cast<std::size_t>(sessions * messages)) return "detector call count differs";
  return {};
}

/// Ten scripted messages through one session; returns
/// "<id>|<opener> <next>:<score> ...|<report json>".
inline std::string run_script(gruscreen::service::ChatService& service) {
  auto created = service.create_session();
  std::string trace = std::to_string(*created.question.id);
  const std::vector<std::string> messages = {"I feel hopeless",  "85 and alone", "fine", "okay 40",
                                             "work", "sleep 95", "friends", "family 20",
                                             "music", "done"};
  for (const auto& m : messages) {
    auto r = service.post_message(created.session_id, m);
    trace += " " + (r.next_question.id ? std::to_string(*r.next_question.id) : std::string("end"));
    trace += ":" + std::to_string(r.score);
  }
  return created.session_id + "|" + trace + "|" +
         gruscreen::service::report_to_json(service.generate_report(created.session_id)).dump();
}

}  // namespace fixtures
