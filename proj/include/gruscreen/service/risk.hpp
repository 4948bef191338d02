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
#include <string>
#include <string_view>

#include "gruscreen/error.hpp"
#include "json.hpp"

namespace gruscreen::service {

/// Session-level aggregation constants. Overridable from the service config.
struct RiskPolicy {
  double flag_threshold = 0.8;  // per-message flag
  double high_max = 0.8;        // high if max >= high_max ...
  double high_ewma = 0.6;       // ... or ewma >= high_ewma
  double elevated_max = 0.5;    // elevated if max >= elevated_max
  double ewma_decay = 0.7;      // weight of the previous average
};

inline void from_json(const nlohmann::json& j, RiskPolicy& p) {
  p.flag_threshold = j.value("flag_threshold", p.flag_threshold);
  p.high_max = j.value("high_max", p.high_max);
  p.high_ewma = j.value("high_ewma", p.high_ewma);
  p.elevated_max = j.value("elevated_max", p.elevated_max);
  p.ewma_decay = j.value("ewma_decay", p.ewma_decay);
}

inline void to_json(nlohmann::json& j, const RiskPolicy& p) {
  j = {{"flag_threshold", p.flag_threshold}, {"high_max", p.high_max}, {"high_ewma", p.high_ewma},
       {"elevated_max", p.elevated_max},     {"ewma_decay", p.ewma_decay}};
}

enum class RiskLevel { kNone, kElevated, kHigh };

inline std::string_view to_string(RiskLevel level) {
  switch (level) {
    case RiskLevel::kNone: return "none";
    case RiskLevel::kElevated: return "elevated";
    case RiskLevel::kHigh: return "high";
  }
  return "none";
}

inline std::string_view recommended_action(RiskLevel level) {
  switch (level) {
    case RiskLevel::kNone: return "no action indicated";
    case RiskLevel::kElevated: return "review transcript";
    case RiskLevel::kHigh: return "immediate professional referral";
  }
  return "no action indicated";
}

inline RiskLevel risk_level(double max_prob, double ewma_prob, const RiskPolicy& p) {
  if (max_prob >= p.high_max || ewma_prob >= p.high_ewma) return RiskLevel::kHigh;
  if (max_prob >= p.elevated_max) return RiskLevel::kElevated;
  return RiskLevel::kNone;
}

struct RiskAggregate {
  double max_prob = 0.0;
  double ewma_prob = 0.0;
  std::size_t flagged_count = 0;
  std::size_t messages = 0;
  RiskLevel level = RiskLevel::kNone;
};

/// Folds one message probability into the aggregate. The first message
/// seeds the EWMA; later ones give ewma = decay * ewma + (1 - decay) * p.
inline void accumulate(RiskAggregate& agg, double prob, const RiskPolicy& p) {
  agg.max_prob = agg.messages == 0 ? prob : std::max(agg.max_prob, prob);
  agg.ewma_prob = agg.messages == 0 ? prob : p.ewma_decay * agg.ewma_prob + (1.0 - p.ewma_decay) * prob;
  ++agg.messages;
  if (prob >= p.flag_threshold) ++agg.flagged_count;
  agg.level = risk_level(agg.max_prob, agg.ewma_prob, p);
}

inline void to_json(nlohmann::json& j, const RiskAggregate& a) {
  j = {{"max_prob", a.max_prob},
       {"ewma_prob", a.ewma_prob},
       {"flagged_count", a.flagged_count},
       {"level", std::string(to_string(a.level))}};
}

}  // namespace gruscreen::service
