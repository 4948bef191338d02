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

#include <memory>
#include <string>
#include <string_view>

#include "gruscreen/nn/model.hpp"
#include "gruscreen/store/archive.hpp"
#include "gruscreen/text/clean.hpp"
#include "gruscreen/text/encode.hpp"
#include "json.hpp"

namespace gruscreen::service {

/// Scores one cleaned user message. Implementations must be safe to call
/// concurrently.
class IdeationDetector {
 public:
  virtual ~IdeationDetector() = default;
  /// Probability of class 0 (suicide).
  virtual double suicide_probability(std::string_view cleaned_text) const = 0;
  virtual std::string model_checksum() const { return {}; }
};

/// Hook for detectors of other conditions. Findings land in the report's
/// "other_findings" section.
class OtherIssuesDetector {
 public:
  virtual ~OtherIssuesDetector() = default;
  virtual nlohmann::json analyze(std::string_view cleaned_text) const = 0;
};

class NoOtherIssuesDetector final : public OtherIssuesDetector {
 public:
  nlohmann::json analyze(std::string_view) const override { return nlohmann::json::object(); }
};

/// Scores with a loaded model archive; the model is shared read-only.
class ModelDetector final : public IdeationDetector {
 public:
  explicit ModelDetector(store::LoadedArchive<float> archive) : archive_(std::move(archive)) {}

  static std::shared_ptr<ModelDetector> from_file(const std::string& path) {
    return std::make_shared<ModelDetector>(store::load<float>(path));
  }

  double suicide_probability(std::string_view cleaned_text) const override {
    auto seq = text::encode(cleaned_text, archive_.vocab, archive_.model.config.seq_len);
    auto trace = nn::forward_sample(archive_.model, seq, nullptr, false);
    return static_cast<double>(trace.probs[0]);
  }

  std::string model_checksum() const override { return store::checksum_hex(archive_.checksum); }

  const store::LoadedArchive<float>& archive() const { return archive_; }

 private:
  store::LoadedArchive<float> archive_;
};

}  // namespace gruscreen::service
