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

#ifndef MLMIA_EXPERIMENTS_H_
#define MLMIA_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "mlmia/analysis.h"
#include "mlmia/attack.h"
#include "mlmia/energy.h"
#include "mlmia/metrics.h"
#include "mlmia/score_file.h"
#include "mlmia/split.h"
#include "mlmia/synth.h"
#include "mlmia/toy_mlm.h"

namespace mlmia {

struct LengthStrata {
  // Short is [short_min, short_max]; long is (short_max, long_max].
  int short_min = 10;
  int short_max = 20;
  int long_max = 60;
};

struct ExperimentConfig {
  SynthConfig corpus;
  SplitFractions split;
  ToyMlmOptions mlm;
  // Size of each reference corpus (in-domain and out-of-domain).
  int reference_sequences = 300;
  EnergyMode energy_mode = EnergyMode::kMonteCarlo;
  int num_patterns = kDefaultNumPatterns;
  std::vector<double> alphas = {0.10, 0.01};
  Aggregator aggregator = Aggregator::kMean;
  // Member draws per seed; thresholds are recalibrated for each.
  int resamples = 10;
  LengthStrata strata;
  bool name_study = true;
  StudyOptions study;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

  static ExperimentConfig Default();
};

absl::Status ValidateExperimentConfig(const ExperimentConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    absl::string_view contents);
nlohmann::json ExperimentConfigJson(const ExperimentConfig& config);

// Values across member resamples, never collapsed to the mean alone.
struct Series {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;

  static Series Of(std::vector<double> values);
};

// One attack configuration evaluated on every member resample of a seed.
struct AttackSummary {
  std::string method;  // lr-in | lr-out | lr-self | loss | loss-mu
  AttackLevel level = AttackLevel::kSample;
  double alpha = 0.10;
  Series auc;
  Series recall;
  std::vector<std::optional<double>> precision;
  std::optional<double> precision_mean;  // over resamples where defined
  std::vector<int64_t> flagged;
  std::vector<double> threshold;
  std::vector<RocPoint> roc;  // resample 0
};

struct LengthRow {
  std::string method;   // lr-in | loss
  std::string stratum;  // short | long
  int members = 0;      // resample 0
  int nonmembers = 0;
  bool omitted = false;
  std::string flag;
  Series auc;
};

struct NameRow {
  std::string method;   // lr | loss
  std::string variant;  // base | named
  Series auc;
  Series recall;
};

struct NameStudyResult {
  std::vector<NameRow> rows;
  double mean_member_loss_base = 0.0;
  double mean_member_loss_named = 0.0;
  // Nonmember sequences and their reference energies are byte-identical
  // between the two variants.
  bool nonmember_inputs_identical = false;
};

struct SeedRun {
  uint64_t seed = 0;
  int train_size = 0;
  int member_count = 0;
  int nonmember_count = 0;
  int population_count = 0;
  std::vector<AttackSummary> attacks;
  std::vector<LengthRow> length;
  std::optional<NameStudyResult> names;
  std::vector<StudyRow> memorization;
  int exposed = 0;

  const AttackSummary* Find(absl::string_view method, AttackLevel level,
                            double alpha) const;
  const LengthRow* FindLength(absl::string_view method,
                              absl::string_view stratum) const;
  const NameRow* FindName(absl::string_view method,
                          absl::string_view variant) const;
  const StudyRow* FindStudy(absl::string_view feature_set) const;
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::vector<SeedRun> runs;
};

// Every table of the benchmark for one seed.
absl::StatusOr<SeedRun> RunSeed(const ExperimentConfig& config, uint64_t seed,
                                int jobs = 1);
absl::StatusOr<BenchmarkReport> RunBenchmark(const ExperimentConfig& config,
                                             int jobs = 1);

// AUC per length stratum for each pool, one row per (method, stratum).
// Strata missing either class in some pool are flagged and omitted.
std::vector<LengthRow> LengthStudy(std::span<const LabeledPool> pools,
                                   const EnergyTable& target,
                                   const EnergyTable& reference,
                                   const LengthStrata& strata);

nlohmann::json BenchmarkJson(const BenchmarkReport& report);
std::string SerializeBenchmark(const BenchmarkReport& report);
// File name -> CSV contents; one file per table plus a long-format dump.
std::map<std::string, std::string> BenchmarkTables(
    const BenchmarkReport& report);

// Pool manifest: {"members": [{"seq_id", "group_id", "T"}], "nonmembers":
// [...], "population": [...]}.
nlohmann::json PoolManifestJson(const LabeledPool& pool);
absl::StatusOr<LabeledPool> ParsePoolManifest(absl::string_view contents);

// Energies for every pool entry; fails listing every absent seq_id and every
// length mismatch.
absl::StatusOr<EnergyTable> EnergiesFromScores(const PrecomputedScorer& scores,
                                               const LabeledPool& pool,
                                               ScoreMode mode);

// Attack over precomputed scores; no scorer is trained.
absl::StatusOr<AttackResult> IngestAndAudit(const PrecomputedScorer& target,
                                            const PrecomputedScorer* reference,
                                            const LabeledPool& pool,
                                            const AttackOptions& options,
                                            ScoreMode mode);
absl::StatusOr<AttackReport> IngestAndAudit(const std::string& target_path,
                                            const std::string& reference_path,
                                            const std::string& pool_path,
                                            const AttackOptions& options,
                                            ScoreMode mode);

// JSON Lines score file for every energy of `pool`, in pool order.
absl::StatusOr<std::string> ExportScores(const EnergyTable& energies,
                                         const LabeledPool& pool,
                                         const std::string& model_label);

}  // namespace mlmia

#endif  // MLMIA_EXPERIMENTS_H_
