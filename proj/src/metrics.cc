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

#include "mlmia/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "mlmia/io.h"
#include "mlmia/status_macros.h"

namespace mlmia {

using json = nlohmann::json;

namespace {

struct Split {
  std::vector<double> members;
  std::vector<double> nonmembers;
};

absl::StatusOr<Split> SplitByClass(std::span<const LabeledValue> values) {
  Split split;
  for (const LabeledValue& v : values) {
    if (!std::isfinite(v.value)) {
      return absl::InvalidArgumentError("non-finite statistic");
    }
    (v.member ? split.members : split.nonmembers).push_back(v.value);
  }
  if (split.members.empty() || split.nonmembers.empty()) {
    return absl::FailedPreconditionError(
        "metrics need at least one member and one nonmember");
  }
  std::sort(split.members.begin(), split.members.end());
  std::sort(split.nonmembers.begin(), split.nonmembers.end());
  return split;
}

std::optional<double> Ratio(int64_t num, int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

json Nullable(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

json ThresholdJson(double t) {
  if (t == -std::numeric_limits<double>::infinity()) return "-inf";
  if (t == std::numeric_limits<double>::infinity()) return "inf";
  return t;
}

std::string CsvOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "";
}

std::string CsvThreshold(double t) {
  if (std::isinf(t)) return t < 0 ? "-inf" : "inf";
  return FormatDouble(t);
}

}  // namespace

std::vector<LabeledValue> ToLabeledValues(const AttackResult& result) {
  std::vector<LabeledValue> out;
  out.reserve(result.outcomes.size());
  for (const AttackOutcome& o : result.outcomes) {
    out.push_back({o.statistic.value, o.truth == Membership::kMember});
  }
  return out;
}

absl::StatusOr<std::vector<RocPoint>> RocCurve(
    std::span<const LabeledValue> values) {
  MLMIA_ASSIGN_OR_RETURN(const Split split, SplitByClass(values));
  const int64_t n_members = static_cast<int64_t>(split.members.size());
  const int64_t n_nonmembers = static_cast<int64_t>(split.nonmembers.size());
  std::vector<double> thresholds;
  std::merge(split.members.begin(), split.members.end(),
             split.nonmembers.begin(), split.nonmembers.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  auto point = [&](double t, int64_t tp, int64_t fp) {
    RocPoint p;
    p.threshold = t;
    p.fpr = static_cast<double>(fp) / static_cast<double>(n_nonmembers);
    p.tpr = static_cast<double>(tp) / static_cast<double>(n_members);
    p.precision = Ratio(tp, tp + fp);
    p.recall = p.tpr;
    return p;
  };
  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size() + 2);
  roc.push_back(point(-std::numeric_limits<double>::infinity(), 0, 0));
  size_t m = 0;
  size_t n = 0;
  for (double t : thresholds) {
    while (m < split.members.size() && split.members[m] <= t) ++m;
    while (n < split.nonmembers.size() && split.nonmembers[n] <= t) ++n;
    roc.push_back(point(t, static_cast<int64_t>(m), static_cast<int64_t>(n)));
  }
  roc.push_back(
      point(std::numeric_limits<double>::infinity(), n_members, n_nonmembers));
  return roc;
}

absl::StatusOr<double> Auc(std::span<const LabeledValue> values) {
  MLMIA_ASSIGN_OR_RETURN(const Split split, SplitByClass(values));
  // Twice the Mann-Whitney count: 2 per strictly ordered pair, 1 per tie.
  int64_t doubled = 0;
  for (double m : split.members) {
    const auto lo =
        std::lower_bound(split.nonmembers.begin(), split.nonmembers.end(), m);
    const auto hi = std::upper_bound(lo, split.nonmembers.end(), m);
    doubled += 2 * (split.nonmembers.end() - hi) + (hi - lo);
  }
  const double pairs = static_cast<double>(split.members.size()) *
                       static_cast<double>(split.nonmembers.size());
  return static_cast<double>(doubled) / (2.0 * pairs);
}

double TrapezoidArea(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2;
  }
  return area;
}

PrecisionRecall PrecisionRecallAt(std::span<const LabeledValue> values,
                                  const Threshold& threshold) {
  PrecisionRecall pr;
  for (const LabeledValue& v : values) {
    const bool flagged = Classify(v.value, threshold) == Membership::kMember;
    if (v.member) {
      (flagged ? pr.tp : pr.fn) += 1;
    } else {
      (flagged ? pr.fp : pr.tn) += 1;
    }
  }
  pr.precision = Ratio(pr.tp, pr.tp + pr.fp);
  pr.recall = Ratio(pr.tp, pr.tp + pr.fn).value_or(0.0);
  return pr;
}

absl::StatusOr<double> TprAtFpr(std::span<const LabeledValue> values,
                                double alpha) {
  MLMIA_ASSIGN_OR_RETURN(const Split split, SplitByClass(values));
  MLMIA_ASSIGN_OR_RETURN(const Threshold t,
                         CalibrateThreshold(split.nonmembers, alpha));
  return PrecisionRecallAt(values, t).recall;
}

bool AttackReport::operator==(const AttackReport& o) const {
  auto same_roc = [](const std::vector<RocPoint>& a,
                     const std::vector<RocPoint>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].threshold != b[i].threshold || a[i].fpr != b[i].fpr ||
          a[i].tpr != b[i].tpr || a[i].precision != b[i].precision ||
          a[i].recall != b[i].recall) {
        return false;
      }
    }
    return true;
  };
  return kind == o.kind && level == o.level && alpha == o.alpha &&
         auc == o.auc && same_roc(roc, o.roc) &&
         threshold.value == o.threshold.value &&
         threshold.alpha == o.threshold.alpha &&
         threshold.source == o.threshold.source && precision == o.precision &&
         recall == o.recall && flagged == o.flagged &&
         calibration_fpr == o.calibration_fpr && members == o.members &&
         nonmembers == o.nonmembers;
}

absl::StatusOr<AttackReport> BuildReport(const AttackResult& result) {
  const std::vector<LabeledValue> values = ToLabeledValues(result);
  AttackReport report;
  report.kind = result.options.kind;
  report.level = result.options.level;
  report.alpha = result.options.alpha;
  MLMIA_ASSIGN_OR_RETURN(report.auc, Auc(values));
  MLMIA_ASSIGN_OR_RETURN(report.roc, RocCurve(values));
  report.threshold = result.threshold;
  const PrecisionRecall pr = PrecisionRecallAt(values, result.threshold);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.flagged = pr.tp + pr.fp;
  report.calibration_fpr = result.calibration_fpr;
  report.members = result.num_members;
  report.nonmembers = result.num_nonmembers;
  return report;
}

json ReportJson(const AttackReport& report, bool include_roc) {
  json doc;
  doc["auc"] = report.auc;
  doc["alpha"] = report.alpha;
  doc["precision"] = Nullable(report.precision);
  doc["recall"] = report.recall;
  doc["level"] = AttackLevelName(report.level);
  doc["kind"] = StatisticKindName(report.kind);
  doc["threshold"] = ThresholdJson(report.threshold.value);
  doc["threshold_source"] =
      report.threshold.source == ThresholdSource::kMu ? "mu" : "population";
  doc["flagged"] = report.flagged;
  doc["calibration_fpr"] = report.calibration_fpr;
  doc["counts"] = {{"members", report.members},
                   {"nonmembers", report.nonmembers}};
  if (include_roc) {
    json roc = json::array();
    for (const RocPoint& p : report.roc) {
      roc.push_back(
          {{"t", ThresholdJson(p.threshold)}, {"fpr", p.fpr}, {"tpr", p.tpr}});
    }
    doc["roc"] = std::move(roc);
  }
  return doc;
}

std::string RocCsv(std::span<const RocPoint> roc) {
  std::string out = "threshold,fpr,tpr,precision,recall\n";
  for (const RocPoint& p : roc) {
    absl::StrAppend(&out, CsvThreshold(p.threshold), ",", FormatDouble(p.fpr),
                    ",", FormatDouble(p.tpr), ",", CsvOptional(p.precision),
                    ",", FormatDouble(p.recall), "\n");
  }
  return out;
}

}  // namespace mlmia
