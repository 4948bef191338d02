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

// Binary classification statistics. Ratios with a zero denominator are
// std::nullopt ("undefined"), never 0.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "gruscreen/error.hpp"
#include "gruscreen/metrics/confusion.hpp"

namespace gruscreen::metrics {

using Value = std::optional<double>;

inline constexpr double kZ95 = 1.96;

inline Value ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

/// F-beta from precision and recall.
inline Value f_beta(Value precision, Value recall, double beta) {
  if (!precision || !recall) return std::nullopt;
  const double b2 = beta * beta;
  return ratio((1.0 + b2) * *precision * *recall, b2 * *precision + *recall);
}

/// Balanced accuracy; the single-threshold AUC of a hard classifier.
inline Value auc_from_rates(Value tpr, Value tnr) {
  if (!tpr || !tnr) return std::nullopt;
  return (*tpr + *tnr) / 2.0;
}

/// Adjusted F-score: sqrt(F2 * InvF0.5), InvF0.5 being the F0.5 score of the
/// label-swapped problem (precision -> NPV, recall -> TNR).
inline Value agf_from_rates(Value precision, Value recall, Value npv, Value tnr) {
  auto f2 = f_beta(precision, recall, 2.0);
  auto inv_f05 = f_beta(npv, tnr, 0.5);
  if (!f2 || !inv_f05) return std::nullopt;
  return std::sqrt(*f2 * *inv_f05);
}

inline std::pair<double, double> ci95(double accuracy, double standard_error) {
  return {accuracy - kZ95 * standard_error, accuracy + kZ95 * standard_error};
}

inline std::string soa_landis_koch(double kappa) {
  if (kappa < 0.0) return "Poor";
  if (kappa <= 0.20) return "Slight";
  if (kappa <= 0.40) return "Fair";
  if (kappa <= 0.60) return "Moderate";
  if (kappa <= 0.80) return "Substantial";
  return "Almost Perfect";
}

inline std::string soa_fleiss(double kappa) {
  if (kappa < 0.40) return "Poor";
  if (kappa <= 0.75) return "Intermediate to Good";
  return "Excellent";
}

inline std::string soa_altman(double kappa) {
  if (kappa < 0.20) return "Poor";
  if (kappa <= 0.40) return "Fair";
  if (kappa <= 0.60) return "Moderate";
  if (kappa <= 0.80) return "Good";
  return "Very Good";
}

/// Statistics of one class treated as the positive class.
struct ClassStats {
  Value sensitivity;  // TPR, recall
  Value specificity;  // TNR
  Value precision;    // PPV
  Value npv;
  Value f1;
  Value fnr;
  Value fpr;
  Value err;
  Value auc;
  Value agf;
};

struct OverallStats {
  double accuracy = 0.0;
  Value f1_macro;
  Value f1_micro;
  double hamming_loss = 0.0;
  Value kappa;
  Value kappa_se;
  double standard_error = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
  double reference_entropy = 0.0;
  double response_entropy = 0.0;
  std::string soa1_landis_koch;
  std::string soa2_fleiss;
  std::string soa3_altman;
};

inline ClassStats class_stats(const ConfusionMatrix& cm, int cls) {
  if (cls != 0 && cls != 1) throw Error(ErrorCode::kBadLabel, "class must be 0 or 1");
  if (cm.n() == 0) throw Error(ErrorCode::kDegenerateClass, "empty confusion matrix");
  const int other = 1 - cls;
  const auto tp = static_cast<double>(cm(cls, cls));
  const auto fn = static_cast<double>(cm(cls, other));
  const auto fp = static_cast<double>(cm(other, cls));
  const auto tn = static_cast<double>(cm(other, other));
  ClassStats s;
  s.sensitivity = ratio(tp, tp + fn);
  s.specificity = ratio(tn, tn + fp);
  s.precision = ratio(tp, tp + fp);
  s.npv = ratio(tn, tn + fn);
  s.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  if (s.sensitivity) s.fnr = 1.0 - *s.sensitivity;
  if (s.specificity) s.fpr = 1.0 - *s.specificity;
  s.err = (fp + fn) / static_cast<double>(cm.n());
  s.auc = auc_from_rates(s.sensitivity, s.specificity);
  auto f2 = ratio(5.0 * tp, 5.0 * tp + 4.0 * fn + fp);
  auto inv_f05 = ratio(1.25 * tn, 1.25 * tn + 0.25 * fp + fn);
  if (f2 && inv_f05) s.agf = std::sqrt(*f2 * *inv_f05);
  return s;
}

inline std::array<ClassStats, 2> class_stats(const ConfusionMatrix& cm) {
  return {class_stats(cm, 0), class_stats(cm, 1)};
}

namespace detail {

inline double binary_entropy_bits(double p0) {
  double h = 0.0;
  for (double p : {p0, 1.0 - p0}) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

inline OverallStats overall_stats(const ConfusionMatrix& cm) {
  const auto n = static_cast<double>(cm.n());
  if (cm.n() == 0) throw Error(ErrorCode::kDegenerateClass, "empty confusion matrix");
  const double correct = static_cast<double>(cm(0, 0) + cm(1, 1));
  const double row0 = static_cast<double>(cm(0, 0) + cm(0, 1));
  const double col0 = static_cast<double>(cm(0, 0) + cm(1, 0));
  const double row1 = n - row0;
  const double col1 = n - col0;

  OverallStats o;
  o.accuracy = correct / n;
  o.hamming_loss = (n - correct) / n;
  // micro-averaged F1 pools TP, FP and FN over both classes
  o.f1_micro = ratio(2.0 * correct, 2.0 * correct + 2.0 * (n - correct));
  auto classes = class_stats(cm);
  if (classes[0].f1 && classes[1].f1) o.f1_macro = (*classes[0].f1 + *classes[1].f1) / 2.0;
  o.standard_error = std::sqrt(o.accuracy * (1.0 - o.accuracy) / n);
  o.ci95 = ci95(o.accuracy, o.standard_error);

  const double po = o.accuracy;
  const double pe = (row0 * col0 + row1 * col1) / (n * n);
  if (pe != 1.0) {
    o.kappa = (po - pe) / (1.0 - pe);
    o.kappa_se = std::sqrt(po * (1.0 - po) / (n * (1.0 - pe) * (1.0 - pe)));
  }
  o.reference_entropy = detail::binary_entropy_bits(row0 / n);
  o.response_entropy = detail::binary_entropy_bits(col0 / n);
  if (o.kappa) {
    o.soa1_landis_koch = soa_landis_koch(*o.kappa);
    o.soa2_fleiss = soa_fleiss(*o.kappa);
    o.soa3_altman = soa_altman(*o.kappa);
  } else {
    o.soa1_landis_koch = o.soa2_fleiss = o.soa3_altman = "undefined";
  }
  return o;
}

}  // namespace gruscreen::metrics
