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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/text/csv.hpp"

namespace gruscreen::train {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

/// Per-epoch curves of a training run.
struct TrainingHistory {
  std::vector<EpochRecord> records;
  std::size_t stopped_epoch = 0;
  std::size_t best_epoch = 0;
};

inline std::string format_history_csv(const TrainingHistory& history) {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char buf[160];
  for (const auto& r : history.records) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f\n", r.epoch, r.train_loss, r.train_accuracy,
                  r.val_loss, r.val_accuracy);
    out += buf;
  }
  return out;
}

inline void export_history(const TrainingHistory& history, const std::string& path) {
  if (history.records.empty()) throw Error(ErrorCode::kInvalidArgument, "history is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << format_history_csv(history);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

inline TrainingHistory parse_history_csv(std::string_view data) {
  auto rows = text::parse_csv(data);
  if (rows.empty() || rows[0].size() != 5 || rows[0][0] != "epoch") {
    throw Error(ErrorCode::kFormatError, "not a history CSV");
  }
  TrainingHistory h;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 5) throw Error(ErrorCode::kFormatError, "history row width");
    h.records.push_back({std::stoull(r[0]), std::stod(r[1]), std::stod(r[2]), std::stod(r[3]), std::stod(r[4])});
  }
  h.stopped_epoch = h.records.size();
  return h;
}

}  // namespace gruscreen::train
