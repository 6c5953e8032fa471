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

#ifndef MLMIA_ATTACK_H_
#define MLMIA_ATTACK_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/corpus.h"
#include "mlmia/energy.h"
#include "mlmia/scorer.h"

namespace mlmia {

// kLikelihoodRatio: E(s; target) - E(s; reference). kLoss: E(s; target).
// Low values are evidence of membership for both.
enum class StatisticKind { kLikelihoodRatio, kLoss };

absl::string_view StatisticKindName(StatisticKind kind);  // lr | loss
absl::StatusOr<StatisticKind> ParseStatisticKind(absl::string_view name);

struct Statistic {
  std::string id;
  double value = 0.0;
  StatisticKind kind = StatisticKind::kLikelihoodRatio;
};

enum class ThresholdSource { kPopulation, kMu };

struct Threshold {
  // -infinity means "flag nothing".
  double value = -std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  ThresholdSource source = ThresholdSource::kPopulation;

  bool flags_nothing() const {
    return value == -std::numeric_limits<double>::infinity();
  }
};

enum class Membership { kMember, kNonmember };
absl::string_view MembershipName(Membership m);  // member | nonmember

enum class AttackLevel { kSample, kPatient };
absl::string_view AttackLevelName(AttackLevel level);  // sample | patient
absl::StatusOr<AttackLevel> ParseAttackLevel(absl::string_view name);

enum class Aggregator { kMean, kMedian, kMin };
absl::StatusOr<Aggregator> ParseAggregator(absl::string_view name);

struct AttackOutcome {
  // seq_id at sample level, group key at patient level.
  std::string id;
  std::string group_id;
  Statistic statistic;
  Membership decision = Membership::kNonmember;
  Membership truth = Membership::kNonmember;
};

absl::StatusOr<Statistic> LrStatistic(const EnergyEstimate& target,
                                      const EnergyEstimate& reference);
Statistic LossStatistic(const EnergyEstimate& target);

// The largest population value v with #{x <= v} / N <= alpha, or the
// -infinity sentinel when even the smallest value exceeds the budget.
absl::StatusOr<Threshold> CalibrateThreshold(std::span<const double> population,
                                             double alpha);

// Mean of the training losses, as the loss baseline's oracle threshold.
absl::StatusOr<Threshold> MuThreshold(std::span<const double> train_losses);

// Member iff value <= threshold; ties flag membership.
Membership Classify(double value, const Threshold& threshold);

absl::StatusOr<Statistic> PatientStatistic(std::span<const Statistic> stats,
                                           Aggregator aggregator,
                                           std::string id = "");

// Seq_id + group key per role; the form both the toy path and the
// score-file path feed into the attack.
struct PoolEntry {
  std::string seq_id;
  std::string group_id;
  int length = 0;
};

struct LabeledPool {
  std::vector<PoolEntry> members;
  std::vector<PoolEntry> nonmembers;
  std::vector<PoolEntry> population;
};

LabeledPool ToLabeledPool(const TargetPool& pool);

using EnergyTable = absl::flat_hash_map<std::string, EnergyEstimate>;
EnergyTable IndexEnergies(std::vector<EnergyEstimate> energies);

struct AttackOptions {
  StatisticKind kind = StatisticKind::kLikelihoodRatio;
  double alpha = 0.10;
  AttackLevel level = AttackLevel::kSample;
  Aggregator aggregator = Aggregator::kMean;
};

struct AttackResult {
  AttackOptions options;
  Threshold threshold;
  // Target outcomes: members first, then nonmembers, each in pool order.
  std::vector<AttackOutcome> outcomes;
  std::vector<Statistic> population;
  // Fraction of the calibration population flagged by `threshold`.
  double calibration_fpr = 0.0;
  int num_members = 0;
  int num_nonmembers = 0;
};

// Statistics for every entry of `entries` at sample level.
absl::StatusOr<std::vector<Statistic>> StatisticsFor(
    std::span<const PoolEntry> entries, const EnergyTable& target,
    const EnergyTable* reference, StatisticKind kind);

// Groups per-sample statistics by group key (first-appearance order).
absl::StatusOr<std::vector<Statistic>> AggregateByGroup(
    std::span<const PoolEntry> entries, std::span<const Statistic> stats,
    Aggregator aggregator);

// Calibrates on the population, then classifies members and nonmembers.
// `reference` is required iff options.kind is kLikelihoodRatio.
absl::StatusOr<AttackResult> RunAttackOnEnergies(const LabeledPool& pool,
                                                 const EnergyTable& target,
                                                 const EnergyTable* reference,
                                                 const AttackOptions& options);

// Same, with an explicit threshold instead of population calibration.
absl::StatusOr<AttackResult> RunAttackWithThreshold(
    const LabeledPool& pool, const EnergyTable& target,
    const EnergyTable* reference, const AttackOptions& options,
    const Threshold& threshold);

// Computes energies for every pool sequence with shared per-seq_id pattern
// seeds across both scorers, then runs the attack.
absl::StatusOr<AttackResult> RunAttack(const TargetPool& pool,
                                       const MaskedScorer& target,
                                       const MaskedScorer* reference,
                                       const AttackOptions& options,
                                       const EnergyOptions& energy);

// CSV: seq_id,group_id,kind,statistic,threshold,decision,truth.
std::string OutcomeCsv(const AttackResult& result);

}  // namespace mlmia

#endif  // MLMIA_ATTACK_H_
