// Copyright 2026 The mlmia Authors
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

#ifndef MLMIA_METRICS_H_
#define MLMIA_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "mlmia/attack.h"

namespace mlmia {

struct LabeledValue {
  double value = 0.0;
  bool member = false;
};

std::vector<LabeledValue> ToLabeledValues(const AttackResult& result);

struct RocPoint {
  double threshold = 0.0;  // +-infinity at the two sentinel points
  double fpr = 0.0;
  double tpr = 0.0;
  std::optional<double> precision;  // unset when nothing is flagged
  double recall = 0.0;
};

// One point per distinct value (member iff value <= t), plus the -inf and
// +inf sentinels, in ascending threshold order.
absl::StatusOr<std::vector<RocPoint>> RocCurve(
    std::span<const LabeledValue> values);

// P(member < nonmember) + 0.5 P(tie) over all member x nonmember pairs,
// counted exactly with sorted ranks.
absl::StatusOr<double> Auc(std::span<const LabeledValue> values);

// Area under a ROC polyline by the trapezoid rule.
double TrapezoidArea(std::span<const RocPoint> roc);

struct PrecisionRecall {
  std::optional<double> precision;  // unset when TP + FP = 0
  double recall = 0.0;
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;
};

PrecisionRecall PrecisionRecallAt(std::span<const LabeledValue> values,
                                  const Threshold& threshold);

// Recall at the threshold calibrated on the nonmember values at `alpha`.
absl::StatusOr<double> TprAtFpr(std::span<const LabeledValue> values,
                                double alpha);

struct AttackReport {
  StatisticKind kind = StatisticKind::kLikelihoodRatio;
  AttackLevel level = AttackLevel::kSample;
  double alpha = 0.0;
  double auc = 0.0;
  std::vector<RocPoint> roc;
  Threshold threshold;
  std::optional<double> precision;
  double recall = 0.0;
  int64_t flagged = 0;
  double calibration_fpr = 0.0;
  int members = 0;
  int nonmembers = 0;

  bool operator==(const AttackReport& other) const;
};

absl::StatusOr<AttackReport> BuildReport(const AttackResult& result);

nlohmann::json ReportJson(const AttackReport& report, bool include_roc = true);
// CSV: threshold,fpr,tpr,precision,recall.
std::string RocCsv(std::span<const RocPoint> roc);

}  // namespace mlmia

#endif  // MLMIA_METRICS_H_
