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

// Plain-text and CSV renderings of the overall statistics, the per-class
// statistics and the confusion matrix. Numbers use 5-decimal fixed format;
// undefined values print as "undefined".

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/metrics/confusion.hpp"
#include "gruscreen/metrics/stats.hpp"
#include "gruscreen/text/csv.hpp"

namespace gruscreen::metrics {

inline std::string fmt5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}

inline std::string fmt5(const Value& v) { return v ? fmt5(*v) : std::string("undefined"); }

struct MetricsReport {
  ConfusionMatrix cm;
  std::array<ClassStats, 2> classes;
  OverallStats overall;
  std::optional<double> train_accuracy;
};

inline MetricsReport make_report(const ConfusionMatrix& cm, std::optional<double> train_accuracy = std::nullopt) {
  return {cm, class_stats(cm), overall_stats(cm), train_accuracy};
}

using MeritRow = std::pair<std::string, std::string>;

/// The fourteen overall merits in table order.
inline std::vector<MeritRow> overall_rows(const MetricsReport& r) {
  const auto& o = r.overall;
  return {
      {"95% CI", "(" + fmt5(o.ci95.first) + "," + fmt5(o.ci95.second) + ")"},
      {"Train Accuracy", fmt5(r.train_accuracy)},
      {"Test Accuracy", fmt5(o.accuracy)},
      {"F1 Macro", fmt5(o.f1_macro)},
      {"F1 Micro", fmt5(o.f1_micro)},
      {"Hamming Loss", fmt5(o.hamming_loss)},
      {"Reference Entropy", fmt5(o.reference_entropy)},
      {"Response Entropy", fmt5(o.response_entropy)},
      {"Standard Error", fmt5(o.standard_error)},
      {"Kappa", fmt5(o.kappa)},
      {"Kappa Standard Error", fmt5(o.kappa_se)},
      {"SOA1(Landis & Koch)", o.soa1_landis_koch},
      {"SOA2(Fleiss)", o.soa2_fleiss},
      {"SOA3(Altman)", o.soa3_altman},
  };
}

struct ClassRow {
  std::string merit;
  std::string suicide;
  std::string non_suicide;
};

/// The nine per-class merits in table order.
inline std::vector<ClassRow> class_rows(const MetricsReport& r) {
  const auto& a = r.classes[0];
  const auto& b = r.classes[1];
  return {
      {"AGF(Adjusted F-score)", fmt5(a.agf), fmt5(b.agf)},
      {"AUC(Area under the ROC curve)", fmt5(a.auc), fmt5(b.auc)},
      {"ERR(Error rate)", fmt5(a.err), fmt5(b.err)},
      {"FNR", fmt5(a.fnr), fmt5(b.fnr)},
      {"FPR", fmt5(a.fpr), fmt5(b.fpr)},
      {"Sensitivity", fmt5(a.sensitivity), fmt5(b.sensitivity)},
      {"Specificity", fmt5(a.specificity), fmt5(b.specificity)},
      {"Precision", fmt5(a.precision), fmt5(b.precision)},
      {"F1-Score", fmt5(a.f1), fmt5(b.f1)},
  };
}

struct RenderedReport {
  std::string overall_csv;
  std::string class_csv;
  std::string confusion_csv;
  std::string text;
};

inline RenderedReport render_report(const MetricsReport& r) {
  RenderedReport out;
  std::ostringstream overall;
  text::write_csv_row(overall, {"merit", "value"});
  for (const auto& [merit, value] : overall_rows(r)) text::write_csv_row(overall, {merit, value});
  out.overall_csv = overall.str();

  std::ostringstream cls;
  text::write_csv_row(cls, {"merit", "suicide", "non-suicide"});
  for (const auto& row : class_rows(r)) text::write_csv_row(cls, {row.merit, row.suicide, row.non_suicide});
  out.class_csv = cls.str();

  std::ostringstream cm;
  text::write_csv_row(cm, {"true\\predicted", "suicide", "non-suicide"});
  for (int t = 0; t < 2; ++t) {
    text::write_csv_row(cm, {t == 0 ? "suicide" : "non-suicide", std::to_string(r.cm(t, 0)),
                             std::to_string(r.cm(t, 1))});
  }
  out.confusion_csv = cm.str();

  std::ostringstream txt;
  char line[160];
  txt << "Overall statistics (n = " << r.cm.n() << ")\n";
  for (const auto& [merit, value] : overall_rows(r)) {
    std::snprintf(line, sizeof line, "  %-24s %s\n", merit.c_str(), value.c_str());
    txt << line;
  }
  txt << "\nClass statistics\n";
  std::snprintf(line, sizeof line, "  %-32s %12s %12s\n", "", "suicide", "non-suicide");
  txt << line;
  for (const auto& row : class_rows(r)) {
    std::snprintf(line, sizeof line, "  %-32s %12s %12s\n", row.merit.c_str(), row.suicide.c_str(),
                  row.non_suicide.c_str());
    txt << line;
  }
  txt << "\nConfusion matrix (rows: true, columns: predicted)\n";
  std::snprintf(line, sizeof line, "  %-12s %12s %12s\n", "", "suicide", "non-suicide");
  txt << line;
  for (int t = 0; t < 2; ++t) {
    std::snprintf(line, sizeof line, "  %-12s %12llu %12llu\n", t == 0 ? "suicide" : "non-suicide",
                  static_cast<unsigned long long>(r.cm(t, 0)), static_cast<unsigned long long>(r.cm(t, 1)));
    txt << line;
  }
  out.text = txt.str();
  return out;
}

/// Writes overall_stats.csv, class_stats.csv, confusion_matrix.csv and
/// report.txt into `dir`, creating it if needed.
inline void write_report(const RenderedReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    out << body;
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + (dir / name).string());
  };
  put("overall_stats.csv", report.overall_csv);
  put("class_stats.csv", report.class_csv);
  put("confusion_matrix.csv", report.confusion_csv);
  put("report.txt", report.text);
}

}  // namespace gruscreen::metrics
