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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <utility>

#include "CLI11.hpp"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "mlmia/analysis.h"
#include "mlmia/attack.h"
#include "mlmia/corpus.h"
#include "mlmia/energy.h"
#include "mlmia/experiments.h"
#include "mlmia/io.h"
#include "mlmia/metrics.h"
#include "mlmia/rng.h"
#include "mlmia/score_file.h"
#include "mlmia/split.h"
#include "mlmia/status_macros.h"
#include "mlmia/synth.h"
#include "mlmia/toy_mlm.h"
#include "mlmia/vocabulary.h"

namespace mlmia::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Artifact {
  std::string path;
  std::string data;
};

// Flags every command shares.
struct Common {
  uint64_t seed = 1;
  std::string out;
  int jobs = 1;
};

void AddCommon(CLI::App* cmd, Common& common, bool out_required) {
  cmd->add_option("--seed", common.seed, "Root seed")->capture_default_str();
  auto* out = cmd->add_option("--out", common.out, "Output path");
  if (out_required) out->required();
  cmd->add_option("--jobs", common.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

std::string Sibling(const std::string& path, const std::string& name) {
  return (fs::path(path).parent_path() / name).string();
}

// Writes every artifact atomically, then a manifest (inputs, seed, version,
// hashes) at `manifest_path`. The manifest holds no timestamps, so reruns
// reproduce it byte for byte.
absl::Status Publish(absl::string_view command,
                     const std::vector<std::string>& args, uint64_t seed,
                     const std::vector<std::string>& inputs,
                     const std::vector<Artifact>& outputs,
                     const std::string& manifest_path) {
  json input_list = json::array();
  for (const std::string& path : inputs) {
    MLMIA_ASSIGN_OR_RETURN(const std::string data, ReadFile(path));
    input_list.push_back({{"path", path}, {"sha256", Sha256Hex(data)}});
  }
  json output_list = json::array();
  for (const Artifact& a : outputs) {
    MLMIA_RETURN_IF_ERROR(WriteFileAtomic(a.path, a.data));
    output_list.push_back({{"path", a.path},
                           {"sha256", Sha256Hex(a.data)},
                           {"bytes", a.data.size()}});
  }
  const json manifest = {{"tool", "mlmia"},
                         {"version", kToolVersion},
                         {"command", std::string(command)},
                         {"args", args},
                         {"seed", seed},
                         {"inputs", input_list},
                         {"outputs", output_list}};
  return WriteFileAtomic(manifest_path, manifest.dump(2) + "\n");
}

std::string ManifestFor(const std::string& path) {
  return path + ".manifest.json";
}

absl::StatusOr<std::vector<uint64_t>> ParseSeeds(absl::string_view text) {
  std::vector<uint64_t> seeds;
  const size_t range = text.find("..");
  if (range != absl::string_view::npos) {
    uint64_t lo = 0;
    uint64_t hi = 0;
    if (!absl::SimpleAtoi(text.substr(0, range), &lo) ||
        !absl::SimpleAtoi(text.substr(range + 2), &hi) || lo > hi ||
        hi - lo >= 10000) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad seed range '", text, "'"));
    }
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    uint64_t s = 0;
    if (!absl::SimpleAtoi(part, &s)) {
      return absl::InvalidArgumentError(absl::StrCat("bad seed '", part, "'"));
    }
    seeds.push_back(s);
  }
  return seeds;
}

absl::StatusOr<Corpus> LoadCorpus(const std::string& path,
                                  std::shared_ptr<Vocabulary> vocab,
                                  bool grow_vocab) {
  MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(path));
  absl::StatusOr<std::vector<Sequence>> seqs =
      ParseCorpus(contents, *vocab, grow_vocab);
  if (!seqs.ok()) {
    return absl::Status(seqs.status().code(),
                        absl::StrCat(path, ": ", seqs.status().message()));
  }
  Corpus corpus{fs::path(path).stem().string(), std::move(vocab),
                *std::move(seqs)};
  MLMIA_RETURN_IF_ERROR(ValidateCorpus(corpus));
  return corpus;
}

absl::StatusOr<std::shared_ptr<Vocabulary>> LoadVocabulary(
    const std::string& path) {
  MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(path));
  MLMIA_ASSIGN_OR_RETURN(Vocabulary vocab, ParseVocabulary(contents));
  return std::make_shared<Vocabulary>(std::move(vocab));
}

Corpus CorpusOf(const std::string& name, const Corpus& source,
                std::vector<Sequence> seqs) {
  return Corpus{name, source.vocab, std::move(seqs)};
}

// ---- gen-corpus ----

struct GenCorpusArgs {
  Common common;
  SynthConfig synth;
  std::optional<uint64_t> chain_seed;
  bool split = false;
  SplitFractions fractions;
};

void AddGenCorpus(CLI::App& app, GenCorpusArgs& a) {
  auto* cmd = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--vocab-size", a.synth.vocab_size)->capture_default_str();
  cmd->add_option("--num-sequences", a.synth.num_sequences)
      ->capture_default_str();
  cmd->add_option("--min-length", a.synth.min_length)->capture_default_str();
  cmd->add_option("--max-length", a.synth.max_length)->capture_default_str();
  cmd->add_option("--rare-prob", a.synth.rare_prob)->capture_default_str();
  cmd->add_option("--rare-fraction", a.synth.rare_fraction)
      ->capture_default_str();
  cmd->add_option("--min-group-size", a.synth.min_group_size)
      ->capture_default_str();
  cmd->add_option("--max-group-size", a.synth.max_group_size)
      ->capture_default_str();
  cmd->add_option("--chain-seed", a.chain_seed,
                  "Transition-matrix seed (defaults to --seed)");
  cmd->add_option("--prefix", a.synth.id_prefix)->capture_default_str();
  cmd->add_flag("--split", a.split,
                "Also write train/members/nonmembers/population and pool.json");
  cmd->add_option("--train-fraction", a.fractions.train)->capture_default_str();
  cmd->add_option("--member-fraction", a.fractions.member_eval)
      ->capture_default_str();
  cmd->add_option("--nonmember-fraction", a.fractions.nonmember)
      ->capture_default_str();
  cmd->add_option("--population-fraction", a.fractions.population)
      ->capture_default_str();
}

absl::Status RunGenCorpus(const GenCorpusArgs& a,
                          const std::vector<std::string>& args,
                          std::ostream& out) {
  SynthConfig config = a.synth;
  config.seed = a.common.seed;
  config.chain_seed = a.chain_seed;
  MLMIA_ASSIGN_OR_RETURN(const Corpus corpus, SynthCorpus(config));
  const std::string dir = a.common.out;
  std::vector<Artifact> outputs = {
      {(fs::path(dir) / "vocab.json").string(),
       SerializeVocabulary(*corpus.vocab)},
      {(fs::path(dir) / "corpus.jsonl").string(), SerializeCorpus(corpus)}};
  if (a.split) {
    MLMIA_ASSIGN_OR_RETURN(
        const SplitResult split,
        SplitPool(corpus, a.fractions, DeriveSeed(a.common.seed, "split")));
    MLMIA_RETURN_IF_ERROR(ValidateSplit(split.train, split.pool));
    const auto file = [&](const char* name) {
      return (fs::path(dir) / name).string();
    };
    outputs.push_back({file("train.jsonl"), SerializeCorpus(split.train)});
    outputs.push_back(
        {file("members.jsonl"),
         SerializeCorpus(CorpusOf("members", corpus, split.pool.members))});
    outputs.push_back({file("nonmembers.jsonl"),
                       SerializeCorpus(CorpusOf("nonmembers", corpus,
                                                split.pool.nonmembers))});
    outputs.push_back({file("population.jsonl"),
                       SerializeCorpus(CorpusOf("population", corpus,
                                                split.pool.population))});
    outputs.push_back(
        {file("pool.json"),
         PoolManifestJson(ToLabeledPool(split.pool)).dump(2) + "\n"});
    out << "train " << split.train.size() << ", members "
        << split.pool.members.size() << ", nonmembers "
        << split.pool.nonmembers.size() << ", population "
        << split.pool.population.size() << "\n";
  }
  out << "wrote " << corpus.size() << " sequences to " << dir << "\n";
  return Publish("gen-corpus", args, a.common.seed, {}, outputs,
                 (fs::path(dir) / "manifest.json").string());
}

// ---- train-mlm ----

struct TrainArgs {
  Common common;
  std::string corpus;
  std::string vocab_from;
  ToyMlmOptions options;
  bool exclude_unk = false;
  std::string name = "toy-mlm";
};

void AddTrain(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train-mlm", "Train the count-based MLM");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--corpus", a.corpus, "Training corpus (JSON Lines)")
      ->required();
  cmd->add_option("--vocab-from", a.vocab_from,
                  "Vocabulary file; without it the corpus defines the vocab");
  cmd->add_option("--window", a.options.window)->capture_default_str();
  cmd->add_option("--smoothing", a.options.smoothing)->capture_default_str();
  cmd->add_flag("--exclude-unk", a.exclude_unk,
                "Keep UNK out of the smoothing support");
  cmd->add_option("--name", a.name)->capture_default_str();
}

absl::Status RunTrain(const TrainArgs& a, const std::vector<std::string>& args,
                      std::ostream& out) {
  std::shared_ptr<Vocabulary> vocab = std::make_shared<Vocabulary>();
  std::vector<std::string> inputs = {a.corpus};
  if (!a.vocab_from.empty()) {
    MLMIA_ASSIGN_OR_RETURN(vocab, LoadVocabulary(a.vocab_from));
    inputs.push_back(a.vocab_from);
  }
  MLMIA_ASSIGN_OR_RETURN(const Corpus corpus,
                         LoadCorpus(a.corpus, vocab, a.vocab_from.empty()));
  ToyMlmOptions options = a.options;
  options.unk_in_support = !a.exclude_unk;
  MLMIA_ASSIGN_OR_RETURN(const ToyMlm model,
                         ToyMlm::Train(corpus, options, a.name));
  out << "trained " << a.name << " on " << corpus.size() << " sequences ("
      << model.num_contexts() << " contexts, vocab " << model.vocab_size()
      << ")\n";
  return Publish("train-mlm", args, a.common.seed, inputs,
                 {{a.common.out, model.Serialize()}},
                 ManifestFor(a.common.out));
}

// ---- score ----

struct ScoreArgs {
  Common common;
  std::string model;
  std::vector<std::string> corpora;
  std::string mode = "mc";
  int num_patterns = kDefaultNumPatterns;
  int64_t budget = kDefaultEnumerationBudget;
  std::string label;
};

void AddScore(CLI::App& app, ScoreArgs& a) {
  auto* cmd = app.add_subcommand(
      "score", "Compute energies and export a score file (JSON Lines)");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--model", a.model, "Trained model (JSON)")->required();
  cmd->add_option("--corpus", a.corpora, "Corpus files to score")->required();
  cmd->add_option("--mode", a.mode, "exact | mc | pll")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "mc", "patterns", "pll"}));
  cmd->add_option("--num-patterns,-K", a.num_patterns)->capture_default_str();
  cmd->add_option("--budget", a.budget, "Exact-mode enumeration budget")
      ->capture_default_str();
  cmd->add_option("--label", a.label,
                  "Model label in the records (defaults to the model name)");
}

absl::Status RunScore(const ScoreArgs& a, const std::vector<std::string>& args,
                      std::ostream& out) {
  MLMIA_ASSIGN_OR_RETURN(const std::string model_json, ReadFile(a.model));
  MLMIA_ASSIGN_OR_RETURN(const ToyMlm model, ToyMlm::Parse(model_json));
  EnergyOptions options;
  MLMIA_ASSIGN_OR_RETURN(options.mode, ParseEnergyMode(a.mode));
  options.num_patterns = a.num_patterns;
  options.enumeration_budget = a.budget;
  options.seed = a.common.seed;
  options.jobs = a.common.jobs;
  const std::string label =
      a.label.empty() ? std::string(model.name()) : a.label;

  std::string contents;
  std::vector<std::string> inputs = {a.model};
  absl::flat_hash_set<std::string> seen;
  int records = 0;
  for (const std::string& path : a.corpora) {
    inputs.push_back(path);
    auto vocab = std::make_shared<Vocabulary>(model.vocab());
    MLMIA_ASSIGN_OR_RETURN(const Corpus corpus,
                           LoadCorpus(path, vocab, /*grow_vocab=*/false));
    MLMIA_ASSIGN_OR_RETURN(const std::vector<EnergyEstimate> energies,
                           ComputeEnergies(model, corpus.sequences, options));
    for (size_t i = 0; i < energies.size(); ++i) {
      const Sequence& seq = corpus.sequences[i];
      if (!seen.insert(seq.seq_id).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate seq_id '", seq.seq_id, "' in ", path));
      }
      MLMIA_ASSIGN_OR_RETURN(const ScoreRecord record,
                             ToScoreRecord(energies[i], seq.length(), label));
      MLMIA_ASSIGN_OR_RETURN(const std::string line,
                             SerializeScoreRecord(record));
      absl::StrAppend(&contents, line, "\n");
      ++records;
    }
  }
  out << "scored " << records << " sequences with " << label << " ("
      << EnergyModeName(options.mode) << ")\n";
  return Publish("score", args, a.common.seed, inputs,
                 {{a.common.out, contents}}, ManifestFor(a.common.out));
}

// ---- attack ----

struct AttackArgs {
  Common common;
  std::string target;
  std::string reference;
  std::string pool;
  double alpha = 0.10;
  std::string kind = "lr";
  std::string level = "sample";
  std::string aggregator = "mean";
  std::string mode = "patterns";
};

void AddAttack(CLI::App& app, AttackArgs& a) {
  auto* cmd =
      app.add_subcommand("attack", "Run a calibrated attack over score files");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--target", a.target, "Target score file")->required();
  cmd->add_option("--reference", a.reference,
                  "Reference score file (required for --kind lr)");
  cmd->add_option("--pool", a.pool, "Pool manifest (JSON)")->required();
  cmd->add_option("--alpha", a.alpha, "False-positive tolerance")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--kind", a.kind, "lr | loss")
      ->capture_default_str()
      ->check(CLI::IsMember({"lr", "loss"}));
  cmd->add_option("--level", a.level, "sample | patient")
      ->capture_default_str()
      ->check(CLI::IsMember({"sample", "patient"}));
  cmd->add_option("--aggregator", a.aggregator, "mean | median | min")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "median", "min"}));
  cmd->add_option("--mode", a.mode, "patterns | pll")
      ->capture_default_str()
      ->check(CLI::IsMember({"patterns", "pll"}));
}

absl::Status RunAttackCommand(const AttackArgs& a,
                              const std::vector<std::string>& args,
                              std::ostream& out) {
  AttackOptions options;
  MLMIA_ASSIGN_OR_RETURN(options.kind, ParseStatisticKind(a.kind));
  MLMIA_ASSIGN_OR_RETURN(options.level, ParseAttackLevel(a.level));
  MLMIA_ASSIGN_OR_RETURN(options.aggregator, ParseAggregator(a.aggregator));
  options.alpha = a.alpha;
  if ((options.kind == StatisticKind::kLikelihoodRatio) !=
      !a.reference.empty()) {
    return absl::InvalidArgumentError(
        "--reference is required for --kind lr and rejected for --kind loss");
  }
  const ScoreMode mode =
      a.mode == "pll" ? ScoreMode::kPll : ScoreMode::kPatterns;

  MLMIA_ASSIGN_OR_RETURN(const PrecomputedScorer target,
                         LoadScoreFile(a.target));
  std::optional<PrecomputedScorer> reference;
  std::vector<std::string> inputs = {a.target, a.pool};
  if (!a.reference.empty()) {
    MLMIA_ASSIGN_OR_RETURN(reference, LoadScoreFile(a.reference));
    inputs.push_back(a.reference);
  }
  MLMIA_ASSIGN_OR_RETURN(const std::string manifest, ReadFile(a.pool));
  MLMIA_ASSIGN_OR_RETURN(const LabeledPool pool, ParsePoolManifest(manifest));
  MLMIA_ASSIGN_OR_RETURN(
      const AttackResult result,
      IngestAndAudit(target, reference.has_value() ? &*reference : nullptr,
                     pool, options, mode));
  MLMIA_ASSIGN_OR_RETURN(const AttackReport report, BuildReport(result));

  out << "auc " << FormatDouble(report.auc) << ", precision "
      << (report.precision.has_value() ? FormatDouble(*report.precision)
                                       : "undefined")
      << ", recall " << FormatDouble(report.recall) << " at alpha "
      << FormatDouble(report.alpha) << " (" << report.flagged << " flagged)\n";
  return Publish("attack", args, a.common.seed, inputs,
                 {{a.common.out, ReportJson(report).dump(2) + "\n"},
                  {Sibling(a.common.out, "roc.csv"), RocCsv(report.roc)},
                  {Sibling(a.common.out, "outcomes.csv"), OutcomeCsv(result)}},
                 ManifestFor(a.common.out));
}

// ---- report ----

struct ReportArgs {
  Common common;
  std::vector<std::string> inputs;
};

void AddReport(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand(
      "report", "Tabulate attack reports (CSV to --out or stdout)");
  AddCommon(cmd, a.common, false);
  cmd->add_option("--input", a.inputs, "Attack report JSON files")->required();
}

std::string JsonCell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return FormatDouble(v.get<double>());
  if (v.is_string()) return CsvField(v.get<std::string>());
  return CsvField(v.dump());
}

absl::Status RunReport(const ReportArgs& a,
                       const std::vector<std::string>& args,
                       std::ostream& out) {
  std::string csv =
      "input,kind,level,alpha,auc,precision,recall,flagged,members,"
      "nonmembers\n";
  for (const std::string& path : a.inputs) {
    MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(path));
    const json doc = json::parse(contents, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("auc") ||
        !doc.contains("counts")) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": not an attack report"));
    }
    absl::StrAppend(&csv, CsvField(path), ",", JsonCell(doc.value("kind", "")),
                    ",", JsonCell(doc.value("level", "")), ",",
                    JsonCell(doc["alpha"]), ",", JsonCell(doc["auc"]), ",",
                    JsonCell(doc["precision"]), ",", JsonCell(doc["recall"]),
                    ",", JsonCell(doc["flagged"]), ",",
                    JsonCell(doc["counts"]["members"]), ",",
                    JsonCell(doc["counts"]["nonmembers"]), "\n");
  }
  if (a.common.out.empty()) {
    out << csv;
    return absl::OkStatus();
  }
  return Publish("report", args, a.common.seed, a.inputs, {{a.common.out, csv}},
                 ManifestFor(a.common.out));
}

// ---- benchmark ----

struct BenchmarkArgs {
  Common common;
  std::string config;
  std::string seeds;
};

void AddBenchmark(CLI::App& app, BenchmarkArgs& a) {
  auto* cmd = app.add_subcommand("benchmark", "Run the seeded toy benchmark");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--config", a.config, "Experiment config (JSON)");
  cmd->add_option("--seeds", a.seeds,
                  "Seed list, e.g. 1..5 or 1,3,7 (overrides --seed)");
}

absl::Status RunBenchmarkCommand(const BenchmarkArgs& a,
                                 const std::vector<std::string>& args,
                                 CLI::App* cmd, std::ostream& out) {
  ExperimentConfig config = ExperimentConfig::Default();
  std::vector<std::string> inputs;
  if (!a.config.empty()) {
    MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(a.config));
    MLMIA_ASSIGN_OR_RETURN(config, ParseExperimentConfig(contents));
    inputs.push_back(a.config);
  }
  if (!a.seeds.empty()) {
    MLMIA_ASSIGN_OR_RETURN(config.seeds, ParseSeeds(a.seeds));
  } else if (cmd->count("--seed") > 0) {
    config.seeds = {a.common.seed};
  }
  MLMIA_ASSIGN_OR_RETURN(const BenchmarkReport report,
                         RunBenchmark(config, a.common.jobs));
  const fs::path dir(a.common.out);
  std::vector<Artifact> outputs = {
      {(dir / "benchmark.json").string(), SerializeBenchmark(report)}};
  for (const auto& [name, csv] : BenchmarkTables(report)) {
    outputs.push_back({(dir / name).string(), csv});
  }
  for (const SeedRun& run : report.runs) {
    const AttackSummary* lr = run.Find("lr-in", AttackLevel::kSample, 0.10);
    const AttackSummary* loss = run.Find("loss", AttackLevel::kSample, 0.10);
    if (lr != nullptr && loss != nullptr) {
      out << "seed " << run.seed << ": auc lr " << FormatDouble(lr->auc.mean)
          << ", loss " << FormatDouble(loss->auc.mean) << "\n";
    }
  }
  return Publish("benchmark", args, a.common.seed, inputs, outputs,
                 (dir / "manifest.json").string());
}

// ---- validate-scores ----

struct ValidateArgs {
  Common common;
  std::string input;
};

void AddValidate(CLI::App& app, ValidateArgs& a) {
  auto* cmd = app.add_subcommand("validate-scores", "Check a score file");
  AddCommon(cmd, a.common, false);
  cmd->add_option("--input", a.input, "Score file (JSON Lines)")->required();
}

// Returns the number of issues; writes the summary to `out`.
absl::StatusOr<int> RunValidate(const ValidateArgs& a,
                                const std::vector<std::string>& args,
                                std::ostream& out) {
  MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(a.input));
  const ScoreValidation v = ValidateScoreFile(contents);
  json issues = json::array();
  for (const ScoreIssue& issue : v.issues) {
    out << "line " << issue.line << ": " << issue.kind << ": " << issue.message
        << "\n";
    issues.push_back({{"line", issue.line},
                      {"kind", issue.kind},
                      {"message", issue.message}});
  }
  out << v.records << " records (" << v.pattern_records << " patterns, "
      << v.pll_records << " pll), " << v.issues.size() << " errors\n";
  if (!a.common.out.empty()) {
    const json report = {{"input", a.input},
                         {"lines", v.lines},
                         {"records", v.records},
                         {"pattern_records", v.pattern_records},
                         {"pll_records", v.pll_records},
                         {"errors", v.issues.size()},
                         {"issues", issues}};
    MLMIA_RETURN_IF_ERROR(Publish(
        "validate-scores", args, a.common.seed, {a.input},
        {{a.common.out, report.dump(2) + "\n"}}, ManifestFor(a.common.out)));
  }
  return static_cast<int>(v.issues.size());
}

// ---- features ----

struct FeaturesArgs {
  Common common;
  std::string corpus;
  std::string train;
};

void AddFeatures(CLI::App& app, FeaturesArgs& a) {
  auto* cmd = app.add_subcommand("features",
                                 "Per-sequence memorization features (CSV)");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--corpus", a.corpus, "Sequences to featurize")->required();
  cmd->add_option("--train", a.train,
                  "Training corpus for the frequency dictionary")
      ->required();
}

absl::Status RunFeatures(const FeaturesArgs& a,
                         const std::vector<std::string>& args,
                         std::ostream& out) {
  auto vocab = std::make_shared<Vocabulary>();
  MLMIA_ASSIGN_OR_RETURN(const Corpus train, LoadCorpus(a.train, vocab, true));
  MLMIA_ASSIGN_OR_RETURN(const Corpus corpus,
                         LoadCorpus(a.corpus, vocab, true));
  MLMIA_ASSIGN_OR_RETURN(const FrequencyDict freq, FrequencyDict::Build(train));
  out << "featurized " << corpus.size() << " sequences\n";
  return Publish("features", args, a.common.seed, {a.corpus, a.train},
                 {{a.common.out, FeatureCsv(corpus.sequences, freq)}},
                 ManifestFor(a.common.out));
}

// ---- study ----

struct StudyArgs {
  Common common;
  std::string members;
  std::string train;
  std::string outcomes;
  std::vector<std::string> sets;
  StudyOptions options;
};

void AddStudy(CLI::App& app, StudyArgs& a) {
  auto* cmd = app.add_subcommand(
      "study", "Fit memorization predictors on attack outcomes");
  AddCommon(cmd, a.common, true);
  cmd->add_option("--members", a.members, "Member sequences (JSON Lines)")
      ->required();
  cmd->add_option("--train", a.train,
                  "Training corpus for the frequency dictionary")
      ->required();
  cmd->add_option("--outcomes", a.outcomes, "outcomes.csv from attack")
      ->required();
  cmd->add_option("--sets", a.sets, "Feature sets, e.g. C C&D")->delimiter(',');
  cmd->add_option("--test-fraction", a.options.test_fraction)
      ->capture_default_str();
  cmd->add_option("--cutoff", a.options.cutoff)->capture_default_str();
  cmd->add_option("--learning-rate", a.options.logreg.learning_rate)
      ->capture_default_str();
  cmd->add_option("--epochs", a.options.logreg.epochs)->capture_default_str();
  cmd->add_option("--l2", a.options.logreg.l2)->capture_default_str();
}

absl::StatusOr<std::vector<AttackOutcome>> ParseOutcomes(
    absl::string_view contents) {
  std::vector<AttackOutcome> outcomes;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    ++line_number;
    if (line.empty() || line_number == 1) continue;
    MLMIA_ASSIGN_OR_RETURN(const std::vector<std::string> f,
                           SplitCsvLine(line));
    double value = 0.0;
    if (f.size() != 7 || !absl::SimpleAtod(f[3], &value) ||
        (f[5] != "member" && f[5] != "nonmember") ||
        (f[6] != "member" && f[6] != "nonmember")) {
      return absl::InvalidArgumentError(
          absl::StrCat("outcomes: bad record at line ", line_number));
    }
    AttackOutcome o;
    o.id = f[0];
    o.group_id = f[1];
    o.statistic.id = f[0];
    o.statistic.value = value;
    o.decision =
        f[5] == "member" ? Membership::kMember : Membership::kNonmember;
    o.truth = f[6] == "member" ? Membership::kMember : Membership::kNonmember;
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

absl::Status RunStudy(const StudyArgs& a, const std::vector<std::string>& args,
                      std::ostream& out) {
  auto vocab = std::make_shared<Vocabulary>();
  MLMIA_ASSIGN_OR_RETURN(const Corpus train, LoadCorpus(a.train, vocab, true));
  MLMIA_ASSIGN_OR_RETURN(const Corpus members,
                         LoadCorpus(a.members, vocab, true));
  MLMIA_ASSIGN_OR_RETURN(const std::string csv, ReadFile(a.outcomes));
  MLMIA_ASSIGN_OR_RETURN(const std::vector<AttackOutcome> outcomes,
                         ParseOutcomes(csv));
  std::vector<FeatureSet> sets;
  if (a.sets.empty()) {
    sets = StandardFeatureSets();
  } else {
    for (const std::string& name : a.sets) {
      MLMIA_ASSIGN_OR_RETURN(FeatureSet set, ParseFeatureSet(name));
      sets.push_back(std::move(set));
    }
  }
  MLMIA_ASSIGN_OR_RETURN(const FrequencyDict freq, FrequencyDict::Build(train));
  StudyOptions options = a.options;
  options.seed = a.common.seed;
  const std::vector<ExposureLabel> labels = LabelExposed(outcomes);
  MLMIA_ASSIGN_OR_RETURN(
      const std::vector<StudyRow> rows,
      MemorizationStudy(members.sequences, labels, freq, sets, options));
  out << "fitted " << rows.size() << " predictors on " << labels.size()
      << " members\n";
  return Publish("study", args, a.common.seed, {a.members, a.train, a.outcomes},
                 {{a.common.out, StudyCsv(rows)}}, ManifestFor(a.common.out));
}

int Report(const absl::Status& status, std::ostream& err) {
  if (status.ok()) return kExitOk;
  err << "error: " << status.message() << "\n";
  return kExitDataError;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Membership-inference audits for masked language models",
               "mlmia");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenCorpusArgs gen;
  TrainArgs train;
  ScoreArgs score;
  AttackArgs attack;
  ReportArgs report;
  BenchmarkArgs benchmark;
  ValidateArgs validate;
  FeaturesArgs features;
  StudyArgs study;
  AddGenCorpus(app, gen);
  AddTrain(app, train);
  AddScore(app, score);
  AddAttack(app, attack);
  AddReport(app, report);
  AddBenchmark(app, benchmark);
  AddValidate(app, validate);
  AddFeatures(app, features);
  AddStudy(app, study);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const std::vector<CLI::App*> chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "gen-corpus") return Report(RunGenCorpus(gen, args, out), err);
    if (name == "train-mlm") return Report(RunTrain(train, args, out), err);
    if (name == "score") return Report(RunScore(score, args, out), err);
    if (name == "attack") {
      return Report(RunAttackCommand(attack, args, out), err);
    }
    if (name == "report") return Report(RunReport(report, args, out), err);
    if (name == "benchmark") {
      return Report(RunBenchmarkCommand(benchmark, args, cmd, out), err);
    }
    if (name == "validate-scores") {
      const absl::StatusOr<int> issues = RunValidate(validate, args, out);
      if (!issues.ok()) return Report(issues.status(), err);
      return *issues == 0 ? kExitOk : kExitDataError;
    }
    if (name == "features") {
      return Report(RunFeatures(features, args, out), err);
    }
    if (name == "study") return Report(RunStudy(study, args, out), err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  err << "usage error: unknown command " << name << "\n";
  return kExitUsage;
}

int Dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args, std::cout, std::cerr);
}

}  // namespace mlmia::cli
