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
#include <cmath>
#include <tuple>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "mlmia/io.h"
#include "mlmia/rng.h"
#include "mlmia/status_macros.h"

namespace mlmia {

using json = nlohmann::json;

namespace {

constexpr const char* kFirstNames[] = {
    "maria", "james",  "linda", "robert", "susan", "david",  "karen",  "joseph",
    "nancy", "thomas", "betty", "daniel", "helen", "mark",   "sandra", "paul",
    "donna", "steven", "carol", "andrew", "ruth",  "joshua", "sharon", "kevin"};
constexpr const char* kLastNames[] = {
    "smith",  "johnson", "brown",  "garcia", "miller", "davis",
    "wilson", "moore",   "taylor", "thomas", "harris", "martin",
    "clark",  "lewis",   "walker", "hall",   "allen",  "young",
    "king",   "wright",  "scott",  "green",  "baker",  "nelson"};

// Guards against typos in config files.
absl::Status CheckKeys(const json& obj, std::initializer_list<const char*> keys,
                       absl::string_view where) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config: '", where, "' must be an object"));
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) {
      return absl::InvalidArgumentError(absl::StrCat(
          "config: unknown key '", item.key(), "' in '", where, "'"));
    }
  }
  return absl::OkStatus();
}

template <typename T>
void Read(const json& obj, const char* key, T& field) {
  if (obj.contains(key)) field = obj.at(key).get<T>();
}

absl::Status ReadConfig(const json& doc, ExperimentConfig& c) {
  MLMIA_RETURN_IF_ERROR(
      CheckKeys(doc,
                {"corpus", "split", "mlm", "reference_sequences", "energy_mode",
                 "num_patterns", "alphas", "aggregator", "resamples", "strata",
                 "name_study", "study", "seeds"},
                "root"));
  if (doc.contains("corpus")) {
    const json& o = doc.at("corpus");
    MLMIA_RETURN_IF_ERROR(CheckKeys(
        o,
        {"vocab_size", "num_sequences", "min_length", "max_length", "rare_prob",
         "rare_fraction", "min_group_size", "max_group_size"},
        "corpus"));
    Read(o, "vocab_size", c.corpus.vocab_size);
    Read(o, "num_sequences", c.corpus.num_sequences);
    Read(o, "min_length", c.corpus.min_length);
    Read(o, "max_length", c.corpus.max_length);
    Read(o, "rare_prob", c.corpus.rare_prob);
    Read(o, "rare_fraction", c.corpus.rare_fraction);
    Read(o, "min_group_size", c.corpus.min_group_size);
    Read(o, "max_group_size", c.corpus.max_group_size);
  }
  if (doc.contains("split")) {
    const json& o = doc.at("split");
    MLMIA_RETURN_IF_ERROR(CheckKeys(
        o, {"train", "member_eval", "nonmember", "population"}, "split"));
    Read(o, "train", c.split.train);
    Read(o, "member_eval", c.split.member_eval);
    Read(o, "nonmember", c.split.nonmember);
    Read(o, "population", c.split.population);
  }
  if (doc.contains("mlm")) {
    const json& o = doc.at("mlm");
    MLMIA_RETURN_IF_ERROR(
        CheckKeys(o, {"window", "smoothing", "unk_in_support"}, "mlm"));
    Read(o, "window", c.mlm.window);
    Read(o, "smoothing", c.mlm.smoothing);
    Read(o, "unk_in_support", c.mlm.unk_in_support);
  }
  Read(doc, "reference_sequences", c.reference_sequences);
  if (doc.contains("energy_mode")) {
    MLMIA_ASSIGN_OR_RETURN(
        c.energy_mode,
        ParseEnergyMode(doc.at("energy_mode").get<std::string>()));
  }
  Read(doc, "num_patterns", c.num_patterns);
  Read(doc, "alphas", c.alphas);
  if (doc.contains("aggregator")) {
    MLMIA_ASSIGN_OR_RETURN(
        c.aggregator, ParseAggregator(doc.at("aggregator").get<std::string>()));
  }
  Read(doc, "resamples", c.resamples);
  if (doc.contains("strata")) {
    const json& o = doc.at("strata");
    MLMIA_RETURN_IF_ERROR(
        CheckKeys(o, {"short_min", "short_max", "long_max"}, "strata"));
    Read(o, "short_min", c.strata.short_min);
    Read(o, "short_max", c.strata.short_max);
    Read(o, "long_max", c.strata.long_max);
  }
  Read(doc, "name_study", c.name_study);
  if (doc.contains("study")) {
    const json& o = doc.at("study");
    MLMIA_RETURN_IF_ERROR(CheckKeys(
        o, {"test_fraction", "cutoff", "learning_rate", "epochs", "l2"},
        "study"));
    Read(o, "test_fraction", c.study.test_fraction);
    Read(o, "cutoff", c.study.cutoff);
    Read(o, "learning_rate", c.study.logreg.learning_rate);
    Read(o, "epochs", c.study.logreg.epochs);
    Read(o, "l2", c.study.logreg.l2);
  }
  Read(doc, "seeds", c.seeds);
  return absl::OkStatus();
}

json Nullable(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

json ThresholdJson(double t) {
  if (std::isinf(t)) return t < 0 ? json("-inf") : json("inf");
  return t;
}

json SeriesJson(const Series& s) {
  return {{"values", s.values},
          {"mean", s.mean},
          {"sd", s.sd},
          {"min", s.min},
          {"max", s.max}};
}

std::string CsvOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "";
}

std::optional<double> MeanDefined(
    const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : values) {
    if (v.has_value()) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::vector<PoolEntry> EntriesOf(std::span<const Sequence> seqs) {
  std::vector<PoolEntry> out;
  out.reserve(seqs.size());
  for (const Sequence& s : seqs) {
    out.push_back({s.seq_id, s.GroupKey(), s.length()});
  }
  return out;
}

// Everything a seed's attacks are evaluated on.
struct ScoredWorld {
  std::vector<LabeledPool> pools;  // one per member resample
  std::vector<std::vector<Sequence>> members;
  EnergyTable target;
  EnergyTable ref_in;
  EnergyTable ref_out;
  std::vector<double> train_losses;
};

absl::StatusOr<EnergyTable> ScoreAll(
    const MaskedScorer& scorer,
    std::initializer_list<std::span<const Sequence>> parts,
    const EnergyOptions& options) {
  std::vector<EnergyEstimate> all;
  for (std::span<const Sequence> part : parts) {
    MLMIA_ASSIGN_OR_RETURN(std::vector<EnergyEstimate> e,
                           ComputeEnergies(scorer, part, options));
    for (auto& x : e) all.push_back(std::move(x));
  }
  return IndexEnergies(std::move(all));
}

absl::StatusOr<AttackSummary> Summarize(const std::string& method,
                                        std::span<const LabeledPool> pools,
                                        const EnergyTable& target,
                                        const EnergyTable* reference,
                                        const AttackOptions& options,
                                        const std::optional<Threshold>& fixed,
                                        std::vector<AttackResult>* results) {
  AttackSummary summary;
  summary.method = method;
  summary.level = options.level;
  summary.alpha = options.alpha;
  std::vector<double> aucs;
  std::vector<double> recalls;
  for (size_t r = 0; r < pools.size(); ++r) {
    absl::StatusOr<AttackResult> result =
        fixed.has_value()
            ? RunAttackWithThreshold(pools[r], target, reference, options,
                                     *fixed)
            : RunAttackOnEnergies(pools[r], target, reference, options);
    if (!result.ok()) return result.status();
    MLMIA_ASSIGN_OR_RETURN(AttackReport report, BuildReport(*result));
    aucs.push_back(report.auc);
    recalls.push_back(report.recall);
    summary.precision.push_back(report.precision);
    summary.flagged.push_back(report.flagged);
    summary.threshold.push_back(report.threshold.value);
    if (r == 0) summary.roc = std::move(report.roc);
    if (results != nullptr) results->push_back(*std::move(result));
  }
  summary.auc = Series::Of(std::move(aucs));
  summary.recall = Series::Of(std::move(recalls));
  summary.precision_mean = MeanDefined(summary.precision);
  return summary;
}

absl::StatusOr<Corpus> ReferenceCorpus(const ExperimentConfig& config,
                                       uint64_t sample_seed,
                                       uint64_t chain_seed,
                                       const std::string& prefix) {
  SynthConfig c = config.corpus;
  c.num_sequences = config.reference_sequences;
  c.seed = sample_seed;
  c.chain_seed = chain_seed;
  c.min_group_size = 1;
  c.max_group_size = 1;
  c.id_prefix = prefix;
  c.name = prefix;
  return SynthCorpus(c);
}

absl::StatusOr<std::shared_ptr<const Vocabulary>> WithNames(
    const Vocabulary& base) {
  auto vocab = std::make_shared<Vocabulary>(base);
  for (const char* n : kFirstNames) vocab->Add(n);
  for (const char* n : kLastNames) vocab->Add(n);
  return std::shared_ptr<const Vocabulary>(std::move(vocab));
}

absl::StatusOr<NameStudyResult> NameInsertion(
    const ExperimentConfig& config, uint64_t seed, const Corpus& train,
    const TargetPool& split_pool, const Corpus& ref_corpus,
    std::span<const std::vector<Sequence>> resampled_members,
    const EnergyOptions& energy) {
  MLMIA_ASSIGN_OR_RETURN(std::shared_ptr<const Vocabulary> vocab,
                         WithNames(*train.vocab));
  MLMIA_ASSIGN_OR_RETURN(Corpus base_train, RebindVocabulary(train, vocab));
  MLMIA_ASSIGN_OR_RETURN(Corpus ref, RebindVocabulary(ref_corpus, vocab));

  // One surrogate name per training patient.
  Rng rng(DeriveSeed(seed, "names"));
  absl::flat_hash_map<std::string, std::vector<Token>> names;
  for (const Sequence& s : base_train.sequences) {
    if (names.contains(s.GroupKey())) continue;
    const char* first = kFirstNames[rng.Uniform(std::size(kFirstNames))];
    const char* last = kLastNames[rng.Uniform(std::size(kLastNames))];
    names[s.GroupKey()] = {{first, vocab->Lookup(first)},
                           {last, vocab->Lookup(last)}};
  }
  Corpus named_train = base_train;
  absl::flat_hash_map<std::string, std::string> named_id;
  for (Sequence& s : named_train.sequences) {
    MLMIA_ASSIGN_OR_RETURN(Sequence named,
                           PrependName(s, names.at(s.GroupKey())));
    named_id[s.seq_id] = named.seq_id;
    s = std::move(named);
  }

  MLMIA_ASSIGN_OR_RETURN(ToyMlm target_base,
                         ToyMlm::Train(base_train, config.mlm, "target"));
  MLMIA_ASSIGN_OR_RETURN(ToyMlm target_named,
                         ToyMlm::Train(named_train, config.mlm, "target"));
  MLMIA_ASSIGN_OR_RETURN(ToyMlm reference,
                         ToyMlm::Train(ref, config.mlm, "reference"));

  MLMIA_ASSIGN_OR_RETURN(
      Corpus nonmembers,
      RebindVocabulary(Corpus{"nonmember", train.vocab, split_pool.nonmembers},
                       vocab));
  MLMIA_ASSIGN_OR_RETURN(
      Corpus population,
      RebindVocabulary(Corpus{"population", train.vocab, split_pool.population},
                       vocab));
  std::span<const Sequence> non = nonmembers.sequences;
  std::span<const Sequence> pop = population.sequences;

  MLMIA_ASSIGN_OR_RETURN(
      EnergyTable base_target,
      ScoreAll(target_base, {base_train.sequences, non, pop}, energy));
  MLMIA_ASSIGN_OR_RETURN(
      EnergyTable named_target,
      ScoreAll(target_named, {named_train.sequences, non, pop}, energy));
  MLMIA_ASSIGN_OR_RETURN(
      EnergyTable base_ref,
      ScoreAll(reference, {base_train.sequences, non, pop}, energy));
  MLMIA_ASSIGN_OR_RETURN(
      EnergyTable named_ref,
      ScoreAll(reference, {named_train.sequences, non, pop}, energy));

  NameStudyResult result;
  result.nonmember_inputs_identical = true;
  for (const Sequence& s : non) {
    const EnergyEstimate& a = base_ref.at(s.seq_id);
    const EnergyEstimate& b = named_ref.at(s.seq_id);
    if (a.value != b.value || a.terms != b.terms) {
      result.nonmember_inputs_identical = false;
    }
  }

  std::vector<LabeledPool> base_pools;
  std::vector<LabeledPool> named_pools;
  double base_loss = 0.0;
  double named_loss = 0.0;
  for (size_t r = 0; r < resampled_members.size(); ++r) {
    LabeledPool base{EntriesOf(resampled_members[r]), EntriesOf(non),
                     EntriesOf(pop)};
    LabeledPool named = base;
    for (PoolEntry& e : named.members) {
      e.seq_id = named_id.at(e.seq_id);
      e.length += 2;
    }
    if (r == 0) {
      for (const PoolEntry& e : base.members) {
        base_loss += base_target.at(e.seq_id).value;
      }
      for (const PoolEntry& e : named.members) {
        named_loss += named_target.at(e.seq_id).value;
      }
      base_loss /= std::max<size_t>(1, base.members.size());
      named_loss /= std::max<size_t>(1, named.members.size());
    }
    base_pools.push_back(std::move(base));
    named_pools.push_back(std::move(named));
  }
  result.mean_member_loss_base = base_loss;
  result.mean_member_loss_named = named_loss;

  AttackOptions options;
  options.alpha = 0.10;
  options.aggregator = config.aggregator;
  for (const auto& [variant, pools, target_table, ref_table] :
       {std::tuple{"base", &base_pools, &base_target, &base_ref},
        std::tuple{"named", &named_pools, &named_target, &named_ref}}) {
    for (const StatisticKind kind :
         {StatisticKind::kLikelihoodRatio, StatisticKind::kLoss}) {
      options.kind = kind;
      const bool lr = kind == StatisticKind::kLikelihoodRatio;
      MLMIA_ASSIGN_OR_RETURN(
          AttackSummary s,
          Summarize(lr ? "lr" : "loss", *pools, *target_table,
                    lr ? ref_table : nullptr, options, std::nullopt, nullptr));
      result.rows.push_back(
          {std::string(lr ? "lr" : "loss"), variant, s.auc, s.recall});
    }
  }
  return result;
}

}  // namespace

ExperimentConfig ExperimentConfig::Default() {
  ExperimentConfig c;
  c.corpus.vocab_size = 200;
  c.corpus.num_sequences = 900;
  c.corpus.min_length = 10;
  c.corpus.max_length = 60;
  c.corpus.min_group_size = 1;
  c.corpus.max_group_size = 6;
  c.split = {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3};
  return c;
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& c) {
  MLMIA_RETURN_IF_ERROR(ValidateSynthConfig(c.corpus));
  if (c.reference_sequences <= 0) {
    return absl::InvalidArgumentError(
        "config: reference_sequences must be > 0");
  }
  if (c.num_patterns <= 0) {
    return absl::InvalidArgumentError("config: num_patterns must be > 0");
  }
  if (c.alphas.empty()) {
    return absl::InvalidArgumentError("config: alphas must be non-empty");
  }
  for (double a : c.alphas) {
    if (!(a > 0 && a < 1)) {
      return absl::InvalidArgumentError("config: alpha must be in (0, 1)");
    }
  }
  if (c.resamples <= 0) {
    return absl::InvalidArgumentError("config: resamples must be > 0");
  }
  if (!(c.strata.short_min <= c.strata.short_max &&
        c.strata.short_max < c.strata.long_max)) {
    return absl::InvalidArgumentError("config: bad length strata");
  }
  if (c.seeds.empty()) {
    return absl::InvalidArgumentError("config: seeds must be non-empty");
  }
  if (c.mlm.window < 1 || !(c.mlm.smoothing > 0)) {
    return absl::InvalidArgumentError("config: bad mlm options");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    absl::string_view contents) {
  ExperimentConfig config = ExperimentConfig::Default();
  try {
    const json doc = json::parse(contents.begin(), contents.end());
    MLMIA_RETURN_IF_ERROR(ReadConfig(doc, config));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  MLMIA_RETURN_IF_ERROR(ValidateExperimentConfig(config));
  return config;
}

json ExperimentConfigJson(const ExperimentConfig& c) {
  return {
      {"corpus",
       {{"vocab_size", c.corpus.vocab_size},
        {"num_sequences", c.corpus.num_sequences},
        {"min_length", c.corpus.min_length},
        {"max_length", c.corpus.max_length},
        {"rare_prob", c.corpus.rare_prob},
        {"rare_fraction", c.corpus.rare_fraction},
        {"min_group_size", c.corpus.min_group_size},
        {"max_group_size", c.corpus.max_group_size}}},
      {"split",
       {{"train", c.split.train},
        {"member_eval", c.split.member_eval},
        {"nonmember", c.split.nonmember},
        {"population", c.split.population}}},
      {"mlm",
       {{"window", c.mlm.window},
        {"smoothing", c.mlm.smoothing},
        {"unk_in_support", c.mlm.unk_in_support}}},
      {"reference_sequences", c.reference_sequences},
      {"energy_mode", std::string(EnergyModeName(c.energy_mode))},
      {"num_patterns", c.num_patterns},
      {"alphas", c.alphas},
      {"aggregator", c.aggregator == Aggregator::kMean     ? "mean"
                     : c.aggregator == Aggregator::kMedian ? "median"
                                                           : "min"},
      {"resamples", c.resamples},
      {"strata",
       {{"short_min", c.strata.short_min},
        {"short_max", c.strata.short_max},
        {"long_max", c.strata.long_max}}},
      {"name_study", c.name_study},
      {"study",
       {{"test_fraction", c.study.test_fraction},
        {"cutoff", c.study.cutoff},
        {"learning_rate", c.study.logreg.learning_rate},
        {"epochs", c.study.logreg.epochs},
        {"l2", c.study.logreg.l2}}},
      {"seeds", c.seeds},
  };
}

Series Series::Of(std::vector<double> values) {
  Series s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  s.mean = MeanLoss(s.values);
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.values.size() > 1 ? std::sqrt(ss / (s.values.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

const AttackSummary* SeedRun::Find(absl::string_view method, AttackLevel level,
                                   double alpha) const {
  for (const AttackSummary& a : attacks) {
    if (a.method == method && a.level == level && a.alpha == alpha) return &a;
  }
  return nullptr;
}

const LengthRow* SeedRun::FindLength(absl::string_view method,
                                     absl::string_view stratum) const {
  for (const LengthRow& r : length) {
    if (r.method == method && r.stratum == stratum && !r.omitted) return &r;
  }
  return nullptr;
}

const NameRow* SeedRun::FindName(absl::string_view method,
                                 absl::string_view variant) const {
  if (!names.has_value()) return nullptr;
  for (const NameRow& r : names->rows) {
    if (r.method == method && r.variant == variant) return &r;
  }
  return nullptr;
}

const StudyRow* SeedRun::FindStudy(absl::string_view feature_set) const {
  for (const StudyRow& r : memorization) {
    if (r.feature_set == feature_set) return &r;
  }
  return nullptr;
}

std::vector<LengthRow> LengthStudy(std::span<const LabeledPool> pools,
                                   const EnergyTable& target,
                                   const EnergyTable& reference,
                                   const LengthStrata& strata) {
  std::vector<LengthRow> rows;
  for (const StatisticKind kind :
       {StatisticKind::kLikelihoodRatio, StatisticKind::kLoss}) {
    const bool lr = kind == StatisticKind::kLikelihoodRatio;
    for (const bool is_short : {true, false}) {
      LengthRow row;
      row.method = lr ? "lr-in" : "loss";
      row.stratum = is_short ? "short" : "long";
      auto in_stratum = [&](int t) {
        return is_short ? (t >= strata.short_min && t <= strata.short_max)
                        : (t > strata.short_max && t <= strata.long_max);
      };
      std::vector<double> aucs;
      for (size_t r = 0; r < pools.size() && !row.omitted; ++r) {
        std::vector<LabeledValue> values;
        int members = 0;
        int nonmembers = 0;
        for (const auto& [entries, member] :
             {std::pair{&pools[r].members, true},
              std::pair{&pools[r].nonmembers, false}}) {
          std::vector<PoolEntry> selected;
          for (const PoolEntry& e : *entries) {
            if (in_stratum(e.length)) selected.push_back(e);
          }
          (member ? members : nonmembers) = static_cast<int>(selected.size());
          absl::StatusOr<std::vector<Statistic>> stats =
              StatisticsFor(selected, target, lr ? &reference : nullptr, kind);
          if (!stats.ok()) {
            row.omitted = true;
            row.flag = std::string(stats.status().message());
            break;
          }
          for (const Statistic& s : *stats) values.push_back({s.value, member});
        }
        if (r == 0) {
          row.members = members;
          row.nonmembers = nonmembers;
        }
        if (row.omitted) break;
        absl::StatusOr<double> auc = Auc(values);
        if (!auc.ok()) {
          row.omitted = true;
          row.flag = absl::StrCat("empty stratum (", members, " members, ",
                                  nonmembers, " nonmembers)");
          break;
        }
        aucs.push_back(*auc);
      }
      if (!row.omitted) row.auc = Series::Of(std::move(aucs));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

absl::StatusOr<SeedRun> RunSeed(const ExperimentConfig& config, uint64_t seed,
                                int jobs) {
  MLMIA_RETURN_IF_ERROR(ValidateExperimentConfig(config));
  SynthConfig corpus_config = config.corpus;
  corpus_config.seed = DeriveSeed(seed, "corpus");
  const uint64_t chain = DeriveSeed(seed, "chain");
  corpus_config.chain_seed = chain;
  MLMIA_ASSIGN_OR_RETURN(const Corpus corpus, SynthCorpus(corpus_config));
  MLMIA_ASSIGN_OR_RETURN(
      const SplitResult split,
      SplitPool(corpus, config.split, DeriveSeed(seed, "split")));
  MLMIA_RETURN_IF_ERROR(ValidateSplit(split.train, split.pool));
  MLMIA_ASSIGN_OR_RETURN(
      const Corpus ref_in_corpus,
      ReferenceCorpus(config, DeriveSeed(seed, "ref-in"), chain, "ri"));
  MLMIA_ASSIGN_OR_RETURN(const Corpus ref_out_corpus,
                         ReferenceCorpus(config, DeriveSeed(seed, "ref-out"),
                                         DeriveSeed(seed, "chain-out"), "ro"));

  MLMIA_ASSIGN_OR_RETURN(const ToyMlm target,
                         ToyMlm::Train(split.train, config.mlm, "target"));
  MLMIA_ASSIGN_OR_RETURN(
      const ToyMlm ref_in,
      ToyMlm::Train(ref_in_corpus, config.mlm, "reference-in"));
  MLMIA_ASSIGN_OR_RETURN(
      const ToyMlm ref_out,
      ToyMlm::Train(ref_out_corpus, config.mlm, "reference-out"));

  EnergyOptions energy;
  energy.mode = config.energy_mode;
  energy.num_patterns = config.num_patterns;
  energy.seed = DeriveSeed(seed, "patterns");
  energy.jobs = jobs;

  ScoredWorld world;
  const std::span<const Sequence> train = split.train.sequences;
  const std::span<const Sequence> non = split.pool.nonmembers;
  const std::span<const Sequence> pop = split.pool.population;
  MLMIA_ASSIGN_OR_RETURN(world.target,
                         ScoreAll(target, {train, non, pop}, energy));
  MLMIA_ASSIGN_OR_RETURN(world.ref_in,
                         ScoreAll(ref_in, {train, non, pop}, energy));
  MLMIA_ASSIGN_OR_RETURN(world.ref_out,
                         ScoreAll(ref_out, {train, non, pop}, energy));
  for (const Sequence& s : train) {
    world.train_losses.push_back(world.target.at(s.seq_id).value);
  }

  // Resample 0 is the split's own member draw.
  const int member_count = static_cast<int>(split.pool.members.size());
  for (int r = 0; r < config.resamples; ++r) {
    std::vector<Sequence> members;
    if (r == 0) {
      members = split.pool.members;
    } else {
      MLMIA_ASSIGN_OR_RETURN(members,
                             SampleMembers(split.train, member_count,
                                           DeriveSeed(seed, "resample", r)));
    }
    world.pools.push_back({EntriesOf(members), EntriesOf(non), EntriesOf(pop)});
    world.members.push_back(std::move(members));
  }

  SeedRun run;
  run.seed = seed;
  run.train_size = split.train.size();
  run.member_count = member_count;
  run.nonmember_count = static_cast<int>(non.size());
  run.population_count = static_cast<int>(pop.size());

  MLMIA_ASSIGN_OR_RETURN(const Threshold mu, MuThreshold(world.train_losses));
  std::vector<AttackResult> exposure_results;
  for (const AttackLevel level :
       {AttackLevel::kSample, AttackLevel::kPatient}) {
    for (const double alpha : config.alphas) {
      AttackOptions options;
      options.level = level;
      options.alpha = alpha;
      options.aggregator = config.aggregator;
      struct Method {
        const char* name;
        StatisticKind kind;
        const EnergyTable* reference;
        bool use_mu;
      };
      const Method methods[] = {
          {"lr-in", StatisticKind::kLikelihoodRatio, &world.ref_in, false},
          {"lr-out", StatisticKind::kLikelihoodRatio, &world.ref_out, false},
          {"lr-self", StatisticKind::kLikelihoodRatio, &world.target, false},
          {"loss", StatisticKind::kLoss, nullptr, false},
          {"loss-mu", StatisticKind::kLoss, nullptr, true},
      };
      for (const Method& m : methods) {
        options.kind = m.kind;
        std::optional<Threshold> fixed;
        if (m.use_mu) {
          fixed = mu;
          fixed->alpha = alpha;
        }
        const bool keep = m.name == std::string("lr-in") &&
                          level == AttackLevel::kSample && alpha == 0.10;
        MLMIA_ASSIGN_OR_RETURN(
            AttackSummary s,
            Summarize(m.name, world.pools, world.target, m.reference, options,
                      fixed, keep ? &exposure_results : nullptr));
        run.attacks.push_back(std::move(s));
      }
    }
  }

  run.length =
      LengthStudy(world.pools, world.target, world.ref_in, config.strata);

  if (config.name_study) {
    MLMIA_ASSIGN_OR_RETURN(NameStudyResult names,
                           NameInsertion(config, seed, split.train, split.pool,
                                         ref_in_corpus, world.members, energy));
    run.names = std::move(names);
  }

  if (!exposure_results.empty()) {
    const std::vector<ExposureLabel> labels =
        LabelExposed(exposure_results.front().outcomes);
    for (const ExposureLabel& l : labels) run.exposed += l.exposed;
    MLMIA_ASSIGN_OR_RETURN(const FrequencyDict freq,
                           FrequencyDict::Build(split.train));
    StudyOptions study = config.study;
    study.seed = DeriveSeed(seed, "study");
    const std::vector<FeatureSet> sets = StandardFeatureSets();
    absl::StatusOr<std::vector<StudyRow>> rows =
        MemorizationStudy(world.members.front(), labels, freq, sets, study);
    // A seed whose attack exposes all or none of the members has no study.
    if (rows.ok()) {
      run.memorization = *std::move(rows);
    } else if (rows.status().code() != absl::StatusCode::kFailedPrecondition) {
      return rows.status();
    }
  }
  return run;
}

absl::StatusOr<BenchmarkReport> RunBenchmark(const ExperimentConfig& config,
                                             int jobs) {
  MLMIA_RETURN_IF_ERROR(ValidateExperimentConfig(config));
  BenchmarkReport report;
  report.config = config;
  for (uint64_t seed : config.seeds) {
    MLMIA_ASSIGN_OR_RETURN(SeedRun run, RunSeed(config, seed, jobs));
    report.runs.push_back(std::move(run));
  }
  return report;
}

json BenchmarkJson(const BenchmarkReport& report) {
  json runs = json::array();
  for (const SeedRun& run : report.runs) {
    json attacks = json::array();
    for (const AttackSummary& a : run.attacks) {
      json precision = json::array();
      for (const auto& p : a.precision) precision.push_back(Nullable(p));
      json thresholds = json::array();
      for (double t : a.threshold) thresholds.push_back(ThresholdJson(t));
      attacks.push_back({{"method", a.method},
                         {"level", std::string(AttackLevelName(a.level))},
                         {"alpha", a.alpha},
                         {"auc", SeriesJson(a.auc)},
                         {"recall", SeriesJson(a.recall)},
                         {"precision", precision},
                         {"precision_mean", Nullable(a.precision_mean)},
                         {"flagged", a.flagged},
                         {"threshold", thresholds}});
    }
    json length = json::array();
    for (const LengthRow& r : run.length) {
      json row = {{"method", r.method},
                  {"stratum", r.stratum},
                  {"members", r.members},
                  {"nonmembers", r.nonmembers},
                  {"omitted", r.omitted}};
      if (r.omitted) {
        row["flag"] = r.flag;
      } else {
        row["auc"] = SeriesJson(r.auc);
      }
      length.push_back(std::move(row));
    }
    json names = nullptr;
    if (run.names.has_value()) {
      json rows = json::array();
      for (const NameRow& r : run.names->rows) {
        rows.push_back({{"method", r.method},
                        {"variant", r.variant},
                        {"auc", SeriesJson(r.auc)},
                        {"recall", SeriesJson(r.recall)}});
      }
      names = {{"rows", rows},
               {"mean_member_loss_base", run.names->mean_member_loss_base},
               {"mean_member_loss_named", run.names->mean_member_loss_named},
               {"nonmember_inputs_identical",
                run.names->nonmember_inputs_identical}};
    }
    json study = json::array();
    for (const StudyRow& r : run.memorization) {
      study.push_back({{"feature_set", r.feature_set},
                       {"train_precision", Nullable(r.train.precision)},
                       {"train_recall", r.train.recall},
                       {"test_precision", Nullable(r.test.precision)},
                       {"test_recall", r.test.recall}});
    }
    runs.push_back({{"seed", run.seed},
                    {"counts",
                     {{"train", run.train_size},
                      {"members", run.member_count},
                      {"nonmembers", run.nonmember_count},
                      {"population", run.population_count}}},
                    {"attacks", attacks},
                    {"length", length},
                    {"names", names},
                    {"memorization", study},
                    {"exposed", run.exposed}});
  }
  return {{"config", ExperimentConfigJson(report.config)}, {"runs", runs}};
}

std::string SerializeBenchmark(const BenchmarkReport& report) {
  return BenchmarkJson(report).dump(2) + "\n";
}

std::map<std::string, std::string> BenchmarkTables(
    const BenchmarkReport& report) {
  std::map<std::string, std::string> tables;
  const std::vector<SeedRun>& runs = report.runs;

  auto mean_over_seeds = [&](auto value_of) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const SeedRun& run : runs) {
      const std::optional<double> v = value_of(run);
      if (v.has_value()) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };

  // Metric rows, (method/variant) columns, seed-mean cells.
  auto attack_table = [&](double alpha,
                          std::initializer_list<const char*> methods) {
    std::vector<std::string> header = {"metric"};
    for (const char* m : methods) {
      for (const AttackLevel level :
           {AttackLevel::kSample, AttackLevel::kPatient}) {
        header.push_back(absl::StrCat(m, "/", AttackLevelName(level)));
      }
    }
    std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
    for (const char* metric : {"AUC", "Prec.", "Rec."}) {
      std::vector<std::string> cells = {metric};
      for (const char* m : methods) {
        for (const AttackLevel level :
             {AttackLevel::kSample, AttackLevel::kPatient}) {
          cells.push_back(CsvOptional(
              mean_over_seeds([&](const SeedRun& run) -> std::optional<double> {
                const AttackSummary* a = run.Find(m, level, alpha);
                if (a == nullptr) return std::nullopt;
                if (metric == std::string("AUC")) return a->auc.mean;
                if (metric == std::string("Rec.")) return a->recall.mean;
                return a->precision_mean;
              })));
        }
      }
      absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
    }
    return out;
  };
  tables["overview.csv"] = attack_table(0.10, {"loss-mu", "loss", "lr-in"});
  tables["low_fpr.csv"] = attack_table(0.01, {"loss-mu", "loss", "lr-in"});

  {
    std::string out = "metric,loss/short,loss/long,lr/short,lr/long\n";
    std::vector<std::string> cells = {"AUC"};
    for (const char* m : {"loss", "lr-in"}) {
      for (const char* stratum : {"short", "long"}) {
        cells.push_back(CsvOptional(
            mean_over_seeds([&](const SeedRun& run) -> std::optional<double> {
              const LengthRow* r = run.FindLength(m, stratum);
              if (r == nullptr) return std::nullopt;
              return r->auc.mean;
            })));
      }
    }
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
    tables["length.csv"] = out;
  }
  {
    std::string out =
        "metric,lr/in-domain,lr/out-of-domain,lr/target-as-reference\n";
    for (const char* metric : {"AUC", "Prec.", "Rec."}) {
      std::vector<std::string> cells = {metric};
      for (const char* m : {"lr-in", "lr-out", "lr-self"}) {
        cells.push_back(CsvOptional(
            mean_over_seeds([&](const SeedRun& run) -> std::optional<double> {
              const AttackSummary* a = run.Find(m, AttackLevel::kSample, 0.10);
              if (a == nullptr) return std::nullopt;
              if (metric == std::string("AUC")) return a->auc.mean;
              if (metric == std::string("Rec.")) return a->recall.mean;
              return a->precision_mean;
            })));
      }
      absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
    }
    tables["reference.csv"] = out;
  }
  {
    std::string out = "metric,loss/base,loss/named,lr/base,lr/named\n";
    for (const char* metric : {"AUC", "Rec."}) {
      std::vector<std::string> cells = {metric};
      for (const char* m : {"loss", "lr"}) {
        for (const char* variant : {"base", "named"}) {
          cells.push_back(CsvOptional(
              mean_over_seeds([&](const SeedRun& run) -> std::optional<double> {
                const NameRow* r = run.FindName(m, variant);
                if (r == nullptr) return std::nullopt;
                return metric == std::string("AUC") ? r->auc.mean
                                                    : r->recall.mean;
              })));
        }
      }
      absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
    }
    tables["names.csv"] = out;
  }
  if (!runs.empty()) {
    tables["correlations.csv"] = StudyCsv(runs.front().memorization);
  }

  // Long format: every per-seed cell behind the tables above.
  std::string per_seed = "seed,table,method,variant,metric,value\n";
  auto emit = [&](uint64_t seed, absl::string_view table,
                  absl::string_view method, absl::string_view variant,
                  absl::string_view metric, const std::optional<double>& v) {
    absl::StrAppend(&per_seed, seed, ",", table, ",", method, ",", variant, ",",
                    metric, ",", CsvOptional(v), "\n");
  };
  for (const SeedRun& run : runs) {
    for (const AttackSummary& a : run.attacks) {
      const std::string variant =
          absl::StrCat(AttackLevelName(a.level), "@", FormatDouble(a.alpha));
      emit(run.seed, "attack", a.method, variant, "auc", a.auc.mean);
      emit(run.seed, "attack", a.method, variant, "precision",
           a.precision_mean);
      emit(run.seed, "attack", a.method, variant, "recall", a.recall.mean);
      emit(run.seed, "attack", a.method, variant, "auc_sd", a.auc.sd);
    }
    for (const LengthRow& r : run.length) {
      emit(run.seed, "length", r.method, r.stratum, "auc",
           r.omitted ? std::nullopt : std::optional<double>(r.auc.mean));
    }
    if (run.names.has_value()) {
      for (const NameRow& r : run.names->rows) {
        emit(run.seed, "names", r.method, r.variant, "auc", r.auc.mean);
        emit(run.seed, "names", r.method, r.variant, "recall", r.recall.mean);
      }
      emit(run.seed, "names", "loss", "base", "mean_member_loss",
           run.names->mean_member_loss_base);
      emit(run.seed, "names", "loss", "named", "mean_member_loss",
           run.names->mean_member_loss_named);
    }
    for (const StudyRow& r : run.memorization) {
      emit(run.seed, "correlations", r.feature_set, "test", "recall",
           r.test.recall);
    }
  }
  tables["per_seed.csv"] = per_seed;

  std::string roc = "seed,method,level,threshold,fpr,tpr,precision,recall\n";
  for (const SeedRun& run : runs) {
    for (const AttackSummary& a : run.attacks) {
      if (a.alpha != report.config.alphas.front()) continue;
      const std::string csv = RocCsv(a.roc);
      // Skip the header line of the per-attack CSV.
      for (absl::string_view line :
           absl::StrSplit(absl::string_view(csv).substr(csv.find('\n') + 1),
                          '\n', absl::SkipEmpty())) {
        absl::StrAppend(&roc, run.seed, ",", a.method, ",",
                        AttackLevelName(a.level), ",", line, "\n");
      }
    }
  }
  tables["roc.csv"] = roc;
  return tables;
}

}  // namespace mlmia
