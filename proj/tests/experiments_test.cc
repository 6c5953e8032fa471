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

#include "mlmia/experiments.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mlmia/attack.h"
#include "mlmia/energy.h"
#include "mlmia/io.h"
#include "mlmia/metrics.h"
#include "mlmia/rng.h"
#include "mlmia/score_file.h"
#include "mlmia/split.h"
#include "mlmia/synth.h"
#include "mlmia/toy_mlm.h"
#include "test_util.h"

namespace mlmia {
namespace {

using ::testing::HasSubstr;

TEST(ExperimentConfigTest, Defaults) {
  const ExperimentConfig c = ExperimentConfig::Default();
  EXPECT_EQ(c.corpus.vocab_size, 200);
  EXPECT_EQ(c.corpus.num_sequences, 900);
  EXPECT_EQ(c.corpus.min_length, 10);
  EXPECT_EQ(c.corpus.max_length, 60);
  EXPECT_EQ(c.seeds, (std::vector<uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.alphas, (std::vector<double>{0.10, 0.01}));
  EXPECT_EQ(c.resamples, 10);
  EXPECT_EQ(c.mlm.window, 2);
  EXPECT_DOUBLE_EQ(c.mlm.smoothing, 0.1);
  EXPECT_NEAR(c.split.train * c.corpus.num_sequences, 300, 1e-9);
  EXPECT_TRUE(ValidateExperimentConfig(c).ok());
}

TEST(ExperimentConfigTest, ParseKeepsDefaultsAndRejectsUnknownKeys) {
  const absl::StatusOr<ExperimentConfig> c =
      ParseExperimentConfig(R"({"corpus": {"num_sequences": 120},
                                "seeds": [7], "resamples": 2})");
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->corpus.num_sequences, 120);
  EXPECT_EQ(c->corpus.vocab_size, 200);
  EXPECT_EQ(c->seeds, (std::vector<uint64_t>{7}));
  EXPECT_EQ(c->resamples, 2);

  const absl::StatusOr<ExperimentConfig> bad =
      ParseExperimentConfig(R"({"corpus": {"vocab": 3}})");
  EXPECT_EQ(bad.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(bad.status().message(), HasSubstr("vocab"));
  EXPECT_FALSE(ParseExperimentConfig("[").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"resamples": "x"})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"seeds": []})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"alphas": [1.5]})").ok());
}

TEST(ExperimentConfigTest, JsonRoundTrip) {
  ExperimentConfig c = ExperimentConfig::Default();
  c.num_patterns = 4;
  c.energy_mode = EnergyMode::kPll;
  c.aggregator = Aggregator::kMedian;
  const absl::StatusOr<ExperimentConfig> back =
      ParseExperimentConfig(ExperimentConfigJson(c).dump());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ExperimentConfigJson(*back), ExperimentConfigJson(c));
}

TEST(SeriesTest, Moments) {
  const Series s = Series::Of({1, 2, 3, 6});
  EXPECT_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.sd, std::sqrt(14.0 / 3), 1e-12);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 6.0);
  EXPECT_EQ(s.values.size(), 4u);
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c = ExperimentConfig::Default();
  c.seeds = {1, 2};
  c.resamples = 3;
  return c;
}

TEST(BenchmarkTest, ByteIdenticalAcrossRuns) {
  const ExperimentConfig c = SmallConfig();
  const absl::StatusOr<BenchmarkReport> a = RunBenchmark(c);
  const absl::StatusOr<BenchmarkReport> b = RunBenchmark(c, /*jobs=*/3);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_EQ(SerializeBenchmark(*a), SerializeBenchmark(*b));
  EXPECT_EQ(BenchmarkTables(*a), BenchmarkTables(*b));
}

TEST(BenchmarkTest, ReportShape) {
  const BenchmarkReport report = *RunBenchmark(SmallConfig());
  ASSERT_EQ(report.runs.size(), 2u);
  const SeedRun& run = report.runs[0];
  EXPECT_EQ(run.seed, 1u);
  EXPECT_EQ(run.train_size, 300);
  for (const char* method : {"lr-in", "lr-out", "lr-self", "loss", "loss-mu"}) {
    for (AttackLevel level : {AttackLevel::kSample, AttackLevel::kPatient}) {
      for (double alpha : {0.10, 0.01}) {
        const AttackSummary* a = run.Find(method, level, alpha);
        ASSERT_NE(a, nullptr) << method;
        EXPECT_EQ(a->auc.values.size(), 3u);
        EXPECT_EQ(a->recall.values.size(), 3u);
      }
    }
  }
  // The self-referenced attack has a constant statistic.
  EXPECT_EQ(run.Find("lr-self", AttackLevel::kSample, 0.10)->auc.mean, 0.5);
  EXPECT_GT(run.Find("lr-in", AttackLevel::kSample, 0.10)->auc.mean, 0.5);
  for (const AttackSummary& a : run.attacks) {
    if (a.alpha != 0.01) continue;
    const AttackSummary* wide = run.Find(a.method, a.level, 0.10);
    for (size_t r = 0; r < a.flagged.size(); ++r) {
      EXPECT_LE(a.flagged[r], wide->flagged[r]) << a.method;
    }
  }
  ASSERT_TRUE(run.names.has_value());
  EXPECT_TRUE(run.names->nonmember_inputs_identical);
  EXPECT_NE(run.FindName("lr", "named"), nullptr);
  EXPECT_NE(run.FindLength("lr-in", "long"), nullptr);

  const auto tables = BenchmarkTables(report);
  for (const char* name :
       {"overview.csv", "low_fpr.csv", "length.csv", "reference.csv",
        "names.csv", "correlations.csv", "per_seed.csv", "roc.csv"}) {
    EXPECT_TRUE(tables.contains(name)) << name;
  }
  EXPECT_THAT(tables.at("overview.csv"),
              HasSubstr("metric,loss-mu/sample,loss-mu/patient,loss/sample,"
                        "loss/patient,lr-in/sample,lr-in/patient\nAUC,"));
}

std::vector<PoolEntry> Entries(const std::string& prefix,
                               const std::vector<int>& lengths) {
  std::vector<PoolEntry> out;
  for (size_t i = 0; i < lengths.size(); ++i) {
    const std::string id = absl::StrCat(prefix, i);
    out.push_back({id, id, lengths[i]});
  }
  return out;
}

EnergyEstimate Energy(const std::string& id, double value) {
  EnergyEstimate e;
  e.seq_id = id;
  e.value = value;
  e.terms = {value};
  e.num_terms = 1;
  return e;
}

TEST(LengthStudyTest, StrataPartitionThePool) {
  LabeledPool pool;
  pool.members = Entries("m", {10, 15, 20, 21, 40, 60});
  pool.nonmembers = Entries("n", {12, 20, 25, 59});
  EnergyTable target;
  EnergyTable reference;
  for (const auto* side : {&pool.members, &pool.nonmembers}) {
    for (const PoolEntry& e : *side) {
      target.emplace(e.seq_id, Energy(e.seq_id, e.seq_id[0] == 'm' ? 1 : 2));
      reference.emplace(e.seq_id, Energy(e.seq_id, 0));
    }
  }
  const std::vector<LabeledPool> pools = {pool};
  const std::vector<LengthRow> rows =
      LengthStudy(pools, target, reference, LengthStrata{});
  ASSERT_EQ(rows.size(), 4u);
  for (const LengthRow& row : rows) {
    EXPECT_FALSE(row.omitted);
    EXPECT_EQ(row.auc.mean, 1.0);
  }
  EXPECT_EQ(rows[0].members + rows[1].members, 6);
  EXPECT_EQ(rows[0].nonmembers + rows[1].nonmembers, 4);
  EXPECT_EQ(rows[0].members, 3);
  EXPECT_EQ(rows[0].nonmembers, 2);
}

TEST(LengthStudyTest, AllShortPoolOmitsTheLongRow) {
  LabeledPool pool;
  pool.members = Entries("m", {10, 11});
  pool.nonmembers = Entries("n", {12, 13});
  EnergyTable target;
  for (const auto* side : {&pool.members, &pool.nonmembers}) {
    for (const PoolEntry& e : *side)
      target.emplace(e.seq_id, Energy(e.seq_id, 1));
  }
  const std::vector<LabeledPool> pools = {pool};
  const std::vector<LengthRow> rows =
      LengthStudy(pools, target, target, LengthStrata{});
  for (const LengthRow& row : rows) {
    EXPECT_EQ(row.omitted, row.stratum == "long") << row.stratum;
    if (row.omitted) EXPECT_THAT(row.flag, HasSubstr("empty stratum"));
  }
}

std::string Records(const std::vector<std::pair<std::string, double>>& rows,
                    const std::string& model) {
  std::string out;
  for (const auto& [id, loss] : rows) {
    ScoreRecord r{id, model, ScoreMode::kPatterns, 5, {loss}};
    absl::StrAppend(&out, *SerializeScoreRecord(r), "\n");
  }
  return out;
}

struct Constructed {
  LabeledPool pool;
  std::vector<std::pair<std::string, double>> target;
  std::vector<std::pair<std::string, double>> reference;
};

Constructed Separated() {
  Constructed c;
  c.pool.members = Entries("m", {5, 5, 5});
  c.pool.nonmembers = Entries("n", {5, 5, 5});
  c.pool.population = Entries("p", {5, 5, 5, 5, 5, 5, 5, 5, 5, 5});
  for (const PoolEntry& e : c.pool.members) {
    c.target.push_back({e.seq_id, 2.0});
    c.reference.push_back({e.seq_id, 3.0});
  }
  for (const PoolEntry& e : c.pool.nonmembers) {
    c.target.push_back({e.seq_id, 4.0});
    c.reference.push_back({e.seq_id, 3.0});
  }
  for (size_t i = 0; i < c.pool.population.size(); ++i) {
    const std::string& id = c.pool.population[i].seq_id;
    c.target.push_back({id, 3.0 + 0.1 * static_cast<double>(i)});
    c.reference.push_back({id, 3.0});
  }
  return c;
}

TEST(IngestTest, ConstructedSeparationGivesPerfectAuc) {
  const Constructed c = Separated();
  const PrecomputedScorer target = *ParseScoreFile(Records(c.target, "target"));
  const PrecomputedScorer reference =
      *ParseScoreFile(Records(c.reference, "reference"));
  const absl::StatusOr<AttackResult> result = IngestAndAudit(
      target, &reference, c.pool, AttackOptions{}, ScoreMode::kPatterns);
  ASSERT_TRUE(result.ok()) << result.status();
  for (const AttackOutcome& o : result->outcomes) {
    EXPECT_EQ(o.statistic.value, o.truth == Membership::kMember ? -1.0 : 1.0);
  }
  EXPECT_EQ(BuildReport(*result)->auc, 1.0);
}

TEST(IngestTest, MissingSeqIdIsNamed) {
  Constructed c = Separated();
  c.reference.erase(c.reference.begin() + 1);  // m1
  const PrecomputedScorer target = *ParseScoreFile(Records(c.target, "target"));
  const PrecomputedScorer reference =
      *ParseScoreFile(Records(c.reference, "reference"));
  const absl::StatusOr<AttackResult> result = IngestAndAudit(
      target, &reference, c.pool, AttackOptions{}, ScoreMode::kPatterns);
  EXPECT_EQ(result.status().code(), absl::StatusCode::kNotFound);
  EXPECT_THAT(result.status().message(), HasSubstr("m1"));
  EXPECT_THAT(result.status().message(), HasSubstr("reference"));
}

TEST(IngestTest, LengthMismatchIsReported) {
  Constructed c = Separated();
  c.pool.members[0].length = 7;
  const PrecomputedScorer target = *ParseScoreFile(Records(c.target, "target"));
  const absl::StatusOr<AttackResult> result =
      IngestAndAudit(target, nullptr, c.pool,
                     AttackOptions{StatisticKind::kLoss, 0.1,
                                   AttackLevel::kSample, Aggregator::kMean},
                     ScoreMode::kPatterns);
  EXPECT_FALSE(result.ok());
  EXPECT_THAT(result.status().message(), HasSubstr("m0"));
}

TEST(IngestTest, PoolManifestRoundTrip) {
  LabeledPool pool = Separated().pool;
  pool.members[0].group_id = "patient,1";
  const absl::StatusOr<LabeledPool> back =
      ParsePoolManifest(PoolManifestJson(pool).dump());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(PoolManifestJson(*back), PoolManifestJson(pool));
  EXPECT_FALSE(ParsePoolManifest("[]").ok());
  EXPECT_FALSE(ParsePoolManifest(R"({"members": [{"T": 3}]})").ok());
}

struct ToyPipeline {
  LabeledPool pool;
  EnergyTable target;
  EnergyTable reference;
};

ToyPipeline BuildToyPipeline(EnergyMode mode) {
  SynthConfig config;
  config.num_sequences = 300;
  config.max_group_size = 3;
  const Corpus corpus = *SynthCorpus(config);
  const SplitResult split =
      *SplitPool(corpus, SplitFractions{1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3}, 5);
  SynthConfig ref_config = config;
  ref_config.seed = 77;
  ref_config.chain_seed = config.seed;
  ref_config.num_sequences = 150;
  ref_config.id_prefix = "r";
  const ToyMlm target = *ToyMlm::Train(split.train, ToyMlmOptions{});
  const ToyMlm reference =
      *ToyMlm::Train(*SynthCorpus(ref_config), ToyMlmOptions{});
  EnergyOptions energy;
  energy.mode = mode;
  energy.seed = 3;
  ToyPipeline p;
  p.pool = ToLabeledPool(split.pool);
  std::vector<Sequence> all;
  for (const auto* side :
       {&split.pool.members, &split.pool.nonmembers, &split.pool.population}) {
    all.insert(all.end(), side->begin(), side->end());
  }
  p.target = IndexEnergies(*ComputeEnergies(target, all, energy));
  p.reference = IndexEnergies(*ComputeEnergies(reference, all, energy));
  return p;
}

TEST(IngestTest, ExportThenIngestReproducesTheReport) {
  for (EnergyMode mode : {EnergyMode::kMonteCarlo, EnergyMode::kPll}) {
    const ToyPipeline p = BuildToyPipeline(mode);
    const ScoreMode score_mode =
        mode == EnergyMode::kPll ? ScoreMode::kPll : ScoreMode::kPatterns;
    for (AttackLevel level : {AttackLevel::kSample, AttackLevel::kPatient}) {
      AttackOptions options;
      options.level = level;
      const AttackReport direct = *BuildReport(
          *RunAttackOnEnergies(p.pool, p.target, &p.reference, options));
      testing::TempDir dir;
      ASSERT_TRUE(WriteFileAtomic(dir.File("t.jsonl"),
                                  *ExportScores(p.target, p.pool, "target"))
                      .ok());
      ASSERT_TRUE(
          WriteFileAtomic(dir.File("r.jsonl"),
                          *ExportScores(p.reference, p.pool, "reference"))
              .ok());
      ASSERT_TRUE(WriteFileAtomic(dir.File("pool.json"),
                                  PoolManifestJson(p.pool).dump())
                      .ok());
      const absl::StatusOr<AttackReport> ingested =
          IngestAndAudit(dir.File("t.jsonl"), dir.File("r.jsonl"),
                         dir.File("pool.json"), options, score_mode);
      ASSERT_TRUE(ingested.ok()) << ingested.status();
      EXPECT_TRUE(*ingested == direct);
      EXPECT_EQ(ReportJson(*ingested).dump(), ReportJson(direct).dump());
    }
  }
}

TEST(ReferenceStudyTest, UniformReferenceMatchesTheLossAttack) {
  const ToyPipeline p = BuildToyPipeline(EnergyMode::kPll);
  EnergyTable uniform;
  for (const auto& [id, e] : p.target) {
    EnergyEstimate u = e;
    u.value = std::log(200.0 + 2);
    uniform.emplace(id, std::move(u));
  }
  AttackOptions lr;
  AttackOptions loss;
  loss.kind = StatisticKind::kLoss;
  const double auc_lr =
      BuildReport(*RunAttackOnEnergies(p.pool, p.target, &uniform, lr))->auc;
  const double auc_loss =
      BuildReport(*RunAttackOnEnergies(p.pool, p.target, nullptr, loss))->auc;
  EXPECT_EQ(auc_lr, auc_loss);
}

TEST(ReferenceStudyTest, SelfReferenceIsNull) {
  const ToyPipeline p = BuildToyPipeline(EnergyMode::kMonteCarlo);
  const AttackReport report = *BuildReport(
      *RunAttackOnEnergies(p.pool, p.target, &p.target, AttackOptions{}));
  EXPECT_EQ(report.auc, 0.5);
  EXPECT_EQ(report.flagged, 0);
}

TEST(ReferenceStudyTest, MembersHaveLowerMeanStatistic) {
  const ToyPipeline p = BuildToyPipeline(EnergyMode::kMonteCarlo);
  const AttackResult r =
      *RunAttackOnEnergies(p.pool, p.target, &p.reference, AttackOptions{});
  double m = 0.0;
  double n = 0.0;
  for (const AttackOutcome& o : r.outcomes) {
    (o.truth == Membership::kMember ? m : n) += o.statistic.value;
  }
  EXPECT_LT(m / r.num_members, n / r.num_nonmembers);
}

TEST(NullExperimentTest, ShuffledLabelsGiveChanceAuc) {
  SynthConfig config;
  config.num_sequences = 1300;
  const Corpus corpus = *SynthCorpus(config);
  Corpus train = corpus;
  train.sequences.resize(300);
  const ToyMlm model = *ToyMlm::Train(train, ToyMlmOptions{});
  const std::vector<Sequence> pool(corpus.sequences.begin(),
                                   corpus.sequences.end());
  EnergyOptions energy;
  energy.seed = 1;
  const std::vector<EnergyEstimate> energies =
      *ComputeEnergies(model, pool, energy);
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> order(energies.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.Shuffle(order);
    std::vector<LabeledValue> values;
    for (size_t i = 0; i < order.size(); ++i) {
      values.push_back({energies[order[i]].value, i < order.size() / 2});
    }
    const double auc = *Auc(values);
    EXPECT_GE(auc, 0.45) << "trial " << trial;
    EXPECT_LE(auc, 0.55) << "trial " << trial;
  }
}

}  // namespace
}  // namespace mlmia
