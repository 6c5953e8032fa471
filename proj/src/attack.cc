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

#include "mlmia/attack.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "mlmia/io.h"
#include "mlmia/status_macros.h"

namespace mlmia {

absl::string_view StatisticKindName(StatisticKind kind) {
  return kind == StatisticKind::kLikelihoodRatio ? "lr" : "loss";
}

absl::StatusOr<StatisticKind> ParseStatisticKind(absl::string_view name) {
  if (name == "lr") return StatisticKind::kLikelihoodRatio;
  if (name == "loss") return StatisticKind::kLoss;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown statistic kind \"", name, "\""));
}

absl::string_view MembershipName(Membership m) {
  return m == Membership::kMember ? "member" : "nonmember";
}

absl::string_view AttackLevelName(AttackLevel level) {
  return level == AttackLevel::kSample ? "sample" : "patient";
}

absl::StatusOr<AttackLevel> ParseAttackLevel(absl::string_view name) {
  if (name == "sample") return AttackLevel::kSample;
  if (name == "patient") return AttackLevel::kPatient;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown attack level \"", name, "\""));
}

absl::StatusOr<Aggregator> ParseAggregator(absl::string_view name) {
  if (name == "mean") return Aggregator::kMean;
  if (name == "median") return Aggregator::kMedian;
  if (name == "min") return Aggregator::kMin;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown aggregator \"", name, "\""));
}

absl::StatusOr<Statistic> LrStatistic(const EnergyEstimate& target,
                                      const EnergyEstimate& reference) {
  if (target.seq_id != reference.seq_id) {
    return absl::FailedPreconditionError(absl::StrCat(
        "seq_id mismatch: ", target.seq_id, " vs ", reference.seq_id));
  }
  if (target.mode != reference.mode) {
    return absl::FailedPreconditionError(absl::StrCat(
        "energy mode mismatch for ", target.seq_id, ": ",
        EnergyModeName(target.mode), " vs ", EnergyModeName(reference.mode)));
  }
  return Statistic{target.seq_id, target.value - reference.value,
                   StatisticKind::kLikelihoodRatio};
}

Statistic LossStatistic(const EnergyEstimate& target) {
  return Statistic{target.seq_id, target.value, StatisticKind::kLoss};
}

absl::StatusOr<Threshold> CalibrateThreshold(std::span<const double> population,
                                             double alpha) {
  if (population.empty()) {
    return absl::FailedPreconditionError("calibration population is empty");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    return absl::InvalidArgumentError("alpha must be in [0, 1]");
  }
  std::vector<double> sorted(population.begin(), population.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite population statistic");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  Threshold t;
  t.alpha = alpha;
  t.source = ThresholdSource::kPopulation;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    // j values are <= sorted[i].
    if (static_cast<double>(j) / n > alpha) break;
    t.value = sorted[i];
    i = j;
  }
  return t;
}

absl::StatusOr<Threshold> MuThreshold(std::span<const double> train_losses) {
  if (train_losses.empty()) {
    return absl::FailedPreconditionError("no training losses for mu");
  }
  Threshold t;
  t.value = MeanLoss(train_losses);
  t.source = ThresholdSource::kMu;
  return t;
}

Membership Classify(double value, const Threshold& threshold) {
  if (threshold.flags_nothing()) return Membership::kNonmember;
  return value <= threshold.value ? Membership::kMember
                                  : Membership::kNonmember;
}

absl::StatusOr<Statistic> PatientStatistic(std::span<const Statistic> stats,
                                           Aggregator aggregator,
                                           std::string id) {
  if (stats.empty()) {
    return absl::FailedPreconditionError("patient has no statistics");
  }
  std::vector<double> values;
  values.reserve(stats.size());
  for (const Statistic& s : stats) {
    if (s.kind != stats.front().kind) {
      return absl::FailedPreconditionError(
          "patient statistics mix statistic kinds");
    }
    values.push_back(s.value);
  }
  double value = 0.0;
  switch (aggregator) {
    case Aggregator::kMean:
      value = MeanLoss(values);
      break;
    case Aggregator::kMedian: {
      std::sort(values.begin(), values.end());
      const size_t n = values.size();
      value = n % 2 == 1 ? values[n / 2]
                         : 0.5 * (values[n / 2 - 1] + values[n / 2]);
      break;
    }
    case Aggregator::kMin:
      value = *std::min_element(values.begin(), values.end());
      break;
  }
  return Statistic{std::move(id), value, stats.front().kind};
}

LabeledPool ToLabeledPool(const TargetPool& pool) {
  auto convert = [](const std::vector<Sequence>& seqs) {
    std::vector<PoolEntry> out;
    out.reserve(seqs.size());
    for (const Sequence& s : seqs) {
      out.push_back(PoolEntry{s.seq_id, s.GroupKey(), s.length()});
    }
    return out;
  };
  return LabeledPool{convert(pool.members), convert(pool.nonmembers),
                     convert(pool.population)};
}

EnergyTable IndexEnergies(std::vector<EnergyEstimate> energies) {
  EnergyTable table;
  table.reserve(energies.size());
  for (EnergyEstimate& e : energies) {
    std::string key = e.seq_id;
    table.insert_or_assign(std::move(key), std::move(e));
  }
  return table;
}

absl::StatusOr<std::vector<Statistic>> StatisticsFor(
    std::span<const PoolEntry> entries, const EnergyTable& target,
    const EnergyTable* reference, StatisticKind kind) {
  std::vector<Statistic> out;
  out.reserve(entries.size());
  std::vector<std::string> missing;
  for (const PoolEntry& entry : entries) {
    auto t = target.find(entry.seq_id);
    if (t == target.end()) {
      missing.push_back(absl::StrCat(entry.seq_id, " (target)"));
      continue;
    }
    if (kind == StatisticKind::kLoss) {
      out.push_back(LossStatistic(t->second));
      continue;
    }
    auto r = reference->find(entry.seq_id);
    if (r == reference->end()) {
      missing.push_back(absl::StrCat(entry.seq_id, " (reference)"));
      continue;
    }
    MLMIA_ASSIGN_OR_RETURN(Statistic s, LrStatistic(t->second, r->second));
    out.push_back(std::move(s));
  }
  if (!missing.empty()) {
    std::string list;
    for (size_t i = 0; i < missing.size() && i < 20; ++i) {
      absl::StrAppend(&list, i == 0 ? "" : ", ", missing[i]);
    }
    if (missing.size() > 20) absl::StrAppend(&list, ", ...");
    return absl::NotFoundError(
        absl::StrCat("no energy for ", missing.size(), " sequence(s): ", list));
  }
  return out;
}

absl::StatusOr<std::vector<Statistic>> AggregateByGroup(
    std::span<const PoolEntry> entries, std::span<const Statistic> stats,
    Aggregator aggregator) {
  if (entries.size() != stats.size()) {
    return absl::InternalError("entries and statistics differ in size");
  }
  std::vector<std::string> order;
  absl::flat_hash_map<std::string, std::vector<Statistic>> groups;
  for (size_t i = 0; i < entries.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(entries[i].group_id);
    if (inserted) order.push_back(entries[i].group_id);
    it->second.push_back(stats[i]);
  }
  std::vector<Statistic> out;
  out.reserve(order.size());
  for (const std::string& group : order) {
    MLMIA_ASSIGN_OR_RETURN(Statistic s,
                           PatientStatistic(groups[group], aggregator, group));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct LevelStatistics {
  std::vector<Statistic> stats;
  std::vector<std::string> groups;
};

absl::StatusOr<LevelStatistics> LevelStats(std::span<const PoolEntry> entries,
                                           const EnergyTable& target,
                                           const EnergyTable* reference,
                                           const AttackOptions& options) {
  MLMIA_ASSIGN_OR_RETURN(
      std::vector<Statistic> stats,
      StatisticsFor(entries, target, reference, options.kind));
  LevelStatistics out;
  if (options.level == AttackLevel::kSample) {
    for (const PoolEntry& e : entries) out.groups.push_back(e.group_id);
    out.stats = std::move(stats);
    return out;
  }
  MLMIA_ASSIGN_OR_RETURN(out.stats,
                         AggregateByGroup(entries, stats, options.aggregator));
  for (const Statistic& s : out.stats) out.groups.push_back(s.id);
  return out;
}

absl::Status CheckInputs(const LabeledPool& pool, const EnergyTable* reference,
                         const AttackOptions& options) {
  if (options.kind == StatisticKind::kLikelihoodRatio && reference == nullptr) {
    return absl::FailedPreconditionError(
        "the likelihood-ratio attack needs reference energies");
  }
  if (options.kind == StatisticKind::kLoss && reference != nullptr) {
    return absl::FailedPreconditionError(
        "the loss attack takes no reference model");
  }
  if (pool.members.empty() || pool.nonmembers.empty()) {
    return absl::FailedPreconditionError(
        "the target pool needs members and nonmembers");
  }
  return absl::OkStatus();
}

absl::StatusOr<AttackResult> ClassifyPool(const LabeledPool& pool,
                                          const EnergyTable& target,
                                          const EnergyTable* reference,
                                          const AttackOptions& options,
                                          const Threshold* fixed) {
  MLMIA_RETURN_IF_ERROR(CheckInputs(pool, reference, options));
  AttackResult result;
  result.options = options;
  if (!pool.population.empty()) {
    MLMIA_ASSIGN_OR_RETURN(
        LevelStatistics population,
        LevelStats(pool.population, target, reference, options));
    result.population = std::move(population.stats);
  }
  if (fixed != nullptr) {
    result.threshold = *fixed;
  } else {
    std::vector<double> values;
    for (const Statistic& s : result.population) values.push_back(s.value);
    MLMIA_ASSIGN_OR_RETURN(result.threshold,
                           CalibrateThreshold(values, options.alpha));
  }
  if (!result.population.empty()) {
    int flagged = 0;
    for (const Statistic& s : result.population) {
      flagged += Classify(s.value, result.threshold) == Membership::kMember;
    }
    result.calibration_fpr =
        static_cast<double>(flagged) / result.population.size();
  }
  for (const auto& [entries, truth] :
       {std::pair{&pool.members, Membership::kMember},
        std::pair{&pool.nonmembers, Membership::kNonmember}}) {
    MLMIA_ASSIGN_OR_RETURN(LevelStatistics level,
                           LevelStats(*entries, target, reference, options));
    for (size_t i = 0; i < level.stats.size(); ++i) {
      AttackOutcome outcome;
      outcome.id = level.stats[i].id;
      outcome.group_id = level.groups[i];
      outcome.decision = Classify(level.stats[i].value, result.threshold);
      outcome.truth = truth;
      outcome.statistic = std::move(level.stats[i]);
      result.outcomes.push_back(std::move(outcome));
    }
    (truth == Membership::kMember ? result.num_members
                                  : result.num_nonmembers) =
        static_cast<int>(level.stats.size());
  }
  return result;
}

}  // namespace

absl::StatusOr<AttackResult> RunAttackOnEnergies(const LabeledPool& pool,
                                                 const EnergyTable& target,
                                                 const EnergyTable* reference,
                                                 const AttackOptions& options) {
  if (pool.population.empty()) {
    return absl::FailedPreconditionError(
        "threshold calibration needs a population");
  }
  return ClassifyPool(pool, target, reference, options, nullptr);
}

absl::StatusOr<AttackResult> RunAttackWithThreshold(
    const LabeledPool& pool, const EnergyTable& target,
    const EnergyTable* reference, const AttackOptions& options,
    const Threshold& threshold) {
  return ClassifyPool(pool, target, reference, options, &threshold);
}

absl::StatusOr<AttackResult> RunAttack(const TargetPool& pool,
                                       const MaskedScorer& target,
                                       const MaskedScorer* reference,
                                       const AttackOptions& options,
                                       const EnergyOptions& energy) {
  if ((options.kind == StatisticKind::kLikelihoodRatio) !=
      (reference != nullptr)) {
    return absl::FailedPreconditionError(
        "a reference scorer is required iff the statistic is lr");
  }
  if (reference != nullptr && target.vocab_size() != reference->vocab_size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "target and reference vocabularies differ (", target.vocab_size(),
        " vs ", reference->vocab_size(), ")"));
  }
  auto score_all =
      [&](const MaskedScorer& scorer) -> absl::StatusOr<EnergyTable> {
    std::vector<EnergyEstimate> all;
    for (const auto* side :
         {&pool.members, &pool.nonmembers, &pool.population}) {
      MLMIA_ASSIGN_OR_RETURN(std::vector<EnergyEstimate> part,
                             ComputeEnergies(scorer, *side, energy));
      for (auto& e : part) all.push_back(std::move(e));
    }
    return IndexEnergies(std::move(all));
  };
  MLMIA_ASSIGN_OR_RETURN(const EnergyTable target_energies, score_all(target));
  EnergyTable reference_energies;
  if (reference != nullptr) {
    MLMIA_ASSIGN_OR_RETURN(reference_energies, score_all(*reference));
  }
  return RunAttackOnEnergies(
      ToLabeledPool(pool), target_energies,
      reference != nullptr ? &reference_energies : nullptr, options);
}

std::string OutcomeCsv(const AttackResult& result) {
  std::string out = "seq_id,group_id,kind,statistic,threshold,decision,truth\n";
  const std::string threshold = result.threshold.flags_nothing()
                                    ? "-inf"
                                    : FormatDouble(result.threshold.value);
  for (const AttackOutcome& o : result.outcomes) {
    absl::StrAppend(&out, CsvField(o.id), ",", CsvField(o.group_id), ",",
                    StatisticKindName(o.statistic.kind), ",",
                    FormatDouble(o.statistic.value), ",", threshold, ",",
                    MembershipName(o.decision), ",", MembershipName(o.truth),
                    "\n");
  }
  return out;
}

}  // namespace mlmia
