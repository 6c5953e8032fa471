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

#ifndef MLMIA_ENERGY_H_
#define MLMIA_ENERGY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/corpus.h"
#include "mlmia/score_file.h"
#include "mlmia/scorer.h"

namespace mlmia {

// Energies are in nats. The intractable log-normalizer of each model is never
// computed: it is constant per model and cancels in the likelihood ratio.
enum class EnergyMode { kExact, kMonteCarlo, kPll };

absl::string_view EnergyModeName(EnergyMode mode);  // exact | mc | pll
absl::StatusOr<EnergyMode> ParseEnergyMode(absl::string_view name);

struct EnergyEstimate {
  std::string seq_id;
  std::string model;
  EnergyMode mode = EnergyMode::kMonteCarlo;
  // Patterns averaged over (K); equals C(T, l) for kExact and T for kPll.
  int64_t num_terms = 0;
  std::optional<uint64_t> seed;
  double value = 0.0;
  // Pattern losses (kExact, kMonteCarlo) or per-token losses (kPll), in
  // evaluation order. `value` is MeanLoss(terms).
  std::vector<double> terms;
};

inline constexpr int64_t kDefaultEnumerationBudget = 10000;
inline constexpr int kDefaultNumPatterns = 10;

// ceil(0.15 * length), computed in integers.
int MaskSize(int length);

// Sum in order divided by the count. Every energy, toy or ingested, is
// reduced through this function so exported and re-ingested energies agree
// bit for bit.
double MeanLoss(std::span<const double> losses);

// -sum_{i in pattern} log p(s_i | s without pattern).
absl::StatusOr<double> PatternLoss(const MaskedScorer& scorer,
                                   const Sequence& seq,
                                   const MaskPattern& pattern);

// Mean pattern loss over all C(T, l) size-l patterns. Fails with
// ResourceExhausted when C(T, l) exceeds `budget`; use MonteCarloEnergy then.
absl::StatusOr<EnergyEstimate> ExactEnergy(
    const MaskedScorer& scorer, const Sequence& seq,
    int64_t budget = kDefaultEnumerationBudget);

// min(K, C(T, l)) distinct size-l patterns, uniform without replacement,
// seeded by (seed, seq_id) only. Two scorers evaluated with the same seed see
// the same patterns.
std::vector<MaskPattern> SamplePatterns(int length, int num_patterns,
                                        uint64_t seed,
                                        absl::string_view seq_id);

absl::StatusOr<EnergyEstimate> MonteCarloEnergy(const MaskedScorer& scorer,
                                                const Sequence& seq,
                                                int num_patterns,
                                                uint64_t seed);

// -(1/T) sum_i log p(s_i | s without i).
absl::StatusOr<EnergyEstimate> PllEnergy(const MaskedScorer& scorer,
                                         const Sequence& seq);

struct EnergyOptions {
  EnergyMode mode = EnergyMode::kMonteCarlo;
  int num_patterns = kDefaultNumPatterns;
  uint64_t seed = 0;
  int64_t enumeration_budget = kDefaultEnumerationBudget;
  // Worker threads for ComputeEnergies. Results do not depend on it.
  int jobs = 1;
};

absl::StatusOr<EnergyEstimate> ComputeEnergy(const MaskedScorer& scorer,
                                             const Sequence& seq,
                                             const EnergyOptions& options);

// Energies in input order.
absl::StatusOr<std::vector<EnergyEstimate>> ComputeEnergies(
    const MaskedScorer& scorer, std::span<const Sequence> seqs,
    const EnergyOptions& options);

// Score-exchange conversions. Exact and Monte-Carlo energies become
// "patterns" records; pll energies become "pll" records.
absl::StatusOr<ScoreRecord> ToScoreRecord(const EnergyEstimate& energy,
                                          int length, std::string model_label);
EnergyEstimate EnergyFromRecord(const ScoreRecord& record);

// CSV: seq_id,model,mode,K,seed,value.
std::string EnergyCsv(std::span<const EnergyEstimate> energies);

}  // namespace mlmia

#endif  // MLMIA_ENERGY_H_
