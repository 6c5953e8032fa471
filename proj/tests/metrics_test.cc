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

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mlmia/attack.h"
#include "mlmia/rng.h"

namespace mlmia {
namespace {

using ::testing::HasSubstr;

std::vector<LabeledValue> Labeled(const std::vector<double>& members,
                                  const std::vector<double>& nonmembers) {
  std::vector<LabeledValue> out;
  for (double v : members) out.push_back({v, true});
  for (double v : nonmembers) out.push_back({v, false});
  return out;
}

double PairwiseAuc(std::span<const LabeledValue> values) {
  double score = 0.0;
  int64_t pairs = 0;
  for (const LabeledValue& m : values) {
    if (!m.member) continue;
    for (const LabeledValue& n : values) {
      if (n.member) continue;
      score += m.value < n.value ? 1.0 : m.value == n.value ? 0.5 : 0.0;
      ++pairs;
    }
  }
  return score / pairs;
}

Threshold At(double value) {
  Threshold t;
  t.value = value;
  return t;
}

TEST(AucTest, Examples) {
  EXPECT_EQ(*Auc(Labeled({1, 2}, {3, 4})), 1.0);
  EXPECT_EQ(*Auc(Labeled({3, 4}, {1, 2})), 0.0);
  EXPECT_EQ(*Auc(Labeled({1, 2}, {1, 3})), 0.625);
  EXPECT_EQ(*Auc(Labeled({5, 5, 5}, {5, 5})), 0.5);
}

TEST(AucTest, SingleClassIsAnError) {
  EXPECT_EQ(Auc(Labeled({1, 2}, {})).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(RocCurve(Labeled({}, {1})).ok());
  EXPECT_FALSE(Auc(Labeled({std::nan("")}, {1})).ok());
}

TEST(RocCurveTest, PerfectSeparation) {
  const auto roc = RocCurve(Labeled({1, 2}, {3, 4}));
  ASSERT_TRUE(roc.ok());
  ASSERT_EQ(roc->size(), 6u);
  EXPECT_EQ(roc->front().threshold, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(roc->back().threshold, std::numeric_limits<double>::infinity());
  EXPECT_FALSE(roc->front().precision.has_value());
  const RocPoint& at2 = (*roc)[2];
  EXPECT_EQ(at2.threshold, 2.0);
  EXPECT_EQ(at2.fpr, 0.0);
  EXPECT_EQ(at2.tpr, 1.0);
  EXPECT_EQ(at2.precision, 1.0);
  EXPECT_EQ(roc->back().fpr, 1.0);
  EXPECT_EQ(roc->back().tpr, 1.0);
}

TEST(RocCurveTest, InvertedSeparation) {
  const auto roc = RocCurve(Labeled({3, 4}, {1, 2}));
  ASSERT_TRUE(roc.ok());
  for (const RocPoint& p : *roc) EXPECT_LE(p.tpr, p.fpr);
  EXPECT_EQ(TrapezoidArea(*roc), 0.0);
}

TEST(RocCurveTest, TiedExampleMatchesPairwiseAuc) {
  const auto values = Labeled({1, 2}, {1, 3});
  EXPECT_NEAR(TrapezoidArea(*RocCurve(values)), 0.625, 1e-12);
}

TEST(MetricsPropertyTest, AucMatchesTrapezoidAndPairwise) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.UniformInt(2, 200));
    const int levels = static_cast<int>(rng.UniformInt(1, 20));
    std::vector<LabeledValue> values;
    for (int i = 0; i < n; ++i) {
      values.push_back({static_cast<double>(rng.UniformInt(0, levels)),
                        i == 0   ? true
                        : i == 1 ? false
                                 : rng.Bernoulli(0.5)});
    }
    const double auc = *Auc(values);
    const auto roc = *RocCurve(values);
    ASSERT_NEAR(auc, TrapezoidArea(roc), 1e-9);
    ASSERT_NEAR(auc, PairwiseAuc(values), 1e-12);
    for (size_t i = 1; i < roc.size(); ++i) {
      ASSERT_GE(roc[i].fpr, roc[i - 1].fpr);
      ASSERT_GE(roc[i].tpr, roc[i - 1].tpr);
      ASSERT_GT(roc[i].threshold, roc[i - 1].threshold);
    }
  }
}

TEST(MetricsPropertyTest, MonotoneInvarianceAndComplementSymmetry) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledValue> values;
    const int n = static_cast<int>(rng.UniformInt(2, 100));
    for (int i = 0; i < n; ++i) {
      values.push_back(
          {static_cast<double>(rng.UniformInt(-10, 10)), i % 2 == 0});
    }
    const double auc = *Auc(values);
    std::vector<LabeledValue> transformed = values;
    std::vector<LabeledValue> negated = values;
    for (LabeledValue& v : transformed) v.value = std::exp(v.value / 3) + 2;
    for (LabeledValue& v : negated) v.value = -v.value;
    ASSERT_EQ(*Auc(transformed), auc);
    ASSERT_NEAR(*Auc(negated), 1.0 - auc, 1e-12);
  }
}

TEST(PrecisionRecallTest, Examples) {
  const auto all = PrecisionRecallAt(Labeled({1, 2}, {3, 4}), At(2));
  EXPECT_EQ(all.precision, 1.0);
  EXPECT_EQ(all.recall, 1.0);
  const auto nothing = PrecisionRecallAt(Labeled({1, 2}, {3, 4}), Threshold{});
  EXPECT_FALSE(nothing.precision.has_value());
  EXPECT_EQ(nothing.recall, 0.0);
  const auto mixed =
      PrecisionRecallAt(Labeled({1, 1, 1, 1, 9}, {1, 9, 9}), At(1));
  EXPECT_EQ(mixed.tp, 4);
  EXPECT_EQ(mixed.fp, 1);
  EXPECT_EQ(mixed.fn, 1);
  EXPECT_EQ(mixed.tn, 2);
  EXPECT_NEAR(*mixed.precision, 0.8, 1e-15);
  EXPECT_NEAR(mixed.recall, 0.8, 1e-15);
}

TEST(TprAtFprTest, Examples) {
  std::vector<double> members;
  std::vector<double> nonmembers;
  for (int i = 0; i < 20; ++i) {
    members.push_back(i);
    nonmembers.push_back(100 + i);
  }
  EXPECT_EQ(*TprAtFpr(Labeled(members, nonmembers), 0.10), 1.0);
  EXPECT_EQ(*TprAtFpr(Labeled(nonmembers, members), 0.10), 0.0);
  EXPECT_FALSE(TprAtFpr(Labeled(members, {}), 0.1).ok());
}

TEST(TprAtFprTest, UninformativeStatisticGivesAlpha) {
  Rng rng(3);
  std::vector<LabeledValue> values;
  for (int i = 0; i < 20000; ++i) {
    values.push_back({rng.UniformDouble(), i % 2 == 0});
  }
  // Bin(10000, 0.1) has sd 30; six sd bounds the realized recall.
  EXPECT_NEAR(*TprAtFpr(values, 0.10), 0.10, 0.018);
}

AttackResult MakeResult() {
  AttackResult r;
  r.options.kind = StatisticKind::kLoss;
  r.options.alpha = 0.5;
  r.threshold = At(2.0);
  r.threshold.alpha = 0.5;
  const std::vector<std::pair<double, Membership>> rows = {
      {1, Membership::kMember},
      {2, Membership::kMember},
      {1, Membership::kNonmember},
      {3, Membership::kNonmember}};
  for (size_t i = 0; i < rows.size(); ++i) {
    AttackOutcome o;
    o.id = "s" + std::to_string(i);
    o.group_id = o.id;
    o.statistic = {o.id, rows[i].first, StatisticKind::kLoss};
    o.truth = rows[i].second;
    o.decision = Classify(rows[i].first, r.threshold);
    r.outcomes.push_back(o);
  }
  r.num_members = 2;
  r.num_nonmembers = 2;
  r.calibration_fpr = 0.5;
  return r;
}

TEST(AttackReportTest, BuildsFromResult) {
  const absl::StatusOr<AttackReport> report = BuildReport(MakeResult());
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->auc, 0.625);
  EXPECT_NEAR(report->auc, TrapezoidArea(report->roc), 1e-9);
  EXPECT_EQ(report->flagged, 3);
  EXPECT_NEAR(*report->precision, 2.0 / 3, 1e-15);
  EXPECT_EQ(report->recall, 1.0);
  EXPECT_EQ(report->members, 2);
  EXPECT_EQ(report->nonmembers, 2);
  EXPECT_EQ(*report, *BuildReport(MakeResult()));
}

TEST(AttackReportTest, JsonSchema) {
  const AttackReport report = *BuildReport(MakeResult());
  const nlohmann::json doc = ReportJson(report);
  for (const char* key : {"auc", "alpha", "precision", "recall", "roc", "level",
                          "kind", "threshold", "counts"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["level"], "sample");
  EXPECT_EQ(doc["auc"].get<double>(), 0.625);
  EXPECT_EQ(doc["roc"].size(), report.roc.size());
  EXPECT_EQ(doc["roc"][0]["t"], "-inf");
  EXPECT_FALSE(ReportJson(report, false).contains("roc"));

  AttackResult none = MakeResult();
  none.threshold = Threshold{};
  for (AttackOutcome& o : none.outcomes) o.decision = Membership::kNonmember;
  const nlohmann::json empty = ReportJson(*BuildReport(none));
  EXPECT_TRUE(empty["precision"].is_null());
  EXPECT_EQ(empty["threshold"], "-inf");
}

TEST(AttackReportTest, RocCsv) {
  const std::string csv = RocCsv(*RocCurve(Labeled({1}, {2})));
  EXPECT_EQ(csv,
            "threshold,fpr,tpr,precision,recall\n"
            "-inf,0,0,,0\n"
            "1,0,1,1,1\n"
            "2,1,1,0.5,1\n"
            "inf,1,1,0.5,1\n");
}

}  // namespace
}  // namespace mlmia
