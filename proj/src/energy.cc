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

#include "mlmia/energy.h"

#include <cmath>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "mlmia/combinatorics.h"
#include "mlmia/io.h"
#include "mlmia/rng.h"
#include "mlmia/status_macros.h"

namespace mlmia {

absl::string_view EnergyModeName(EnergyMode mode) {
  switch (mode) {
    case EnergyMode::kExact:
      return "exact";
    case EnergyMode::kMonteCarlo:
      return "mc";
    case EnergyMode::kPll:
      return "pll";
  }
  return "mc";
}

absl::StatusOr<EnergyMode> ParseEnergyMode(absl::string_view name) {
  if (name == "exact") return EnergyMode::kExact;
  if (name == "mc" || name == "patterns") return EnergyMode::kMonteCarlo;
  if (name == "pll") return EnergyMode::kPll;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown energy mode \"", name, "\""));
}

int MaskSize(int length) { return (15 * length + 99) / 100; }

namespace {

// Neumaier compensated summation.
class Accumulator {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace

double MeanLoss(std::span<const double> losses) {
  Accumulator sum;
  for (double x : losses) sum.Add(x);
  return sum.Total() / static_cast<double>(losses.size());
}

absl::StatusOr<double> PatternLoss(const MaskedScorer& scorer,
                                   const Sequence& seq,
                                   const MaskPattern& pattern) {
  Accumulator loss;
  for (int i : pattern.positions) {
    MLMIA_ASSIGN_OR_RETURN(const double lp,
                           scorer.CondLogProb(seq, pattern, i));
    if (!std::isfinite(lp)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "non-finite log-probability at ", i, " of ", seq.seq_id));
    }
    loss.Add(-lp);
  }
  return loss.Total();
}

namespace {

absl::Status CheckLength(const Sequence& seq) {
  if (seq.length() < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sequence ", seq.seq_id, " is empty"));
  }
  return absl::OkStatus();
}

EnergyEstimate MakeEstimate(const MaskedScorer& scorer, const Sequence& seq,
                            EnergyMode mode, std::vector<double> terms,
                            std::optional<uint64_t> seed) {
  EnergyEstimate e;
  e.seq_id = seq.seq_id;
  e.model = std::string(scorer.name());
  e.mode = mode;
  e.num_terms = static_cast<int64_t>(terms.size());
  e.seed = seed;
  e.value = MeanLoss(terms);
  e.terms = std::move(terms);
  return e;
}

}  // namespace

absl::StatusOr<EnergyEstimate> ExactEnergy(const MaskedScorer& scorer,
                                           const Sequence& seq,
                                           int64_t budget) {
  MLMIA_RETURN_IF_ERROR(CheckLength(seq));
  const int length = seq.length();
  const int l = MaskSize(length);
  const auto count = Binomial(length, l);
  if (!count.has_value() || *count > static_cast<uint64_t>(budget)) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "C(", length, ", ", l, ") patterns exceed the enumeration budget of ",
        budget, " for ", seq.seq_id, "; use mc_energy"));
  }
  std::vector<double> terms;
  terms.reserve(*count);
  MaskPattern pattern;
  for (int i = 0; i < l; ++i) pattern.positions.push_back(i);
  do {
    MLMIA_ASSIGN_OR_RETURN(const double loss,
                           PatternLoss(scorer, seq, pattern));
    terms.push_back(loss);
  } while (NextCombination(pattern.positions, length));
  return MakeEstimate(scorer, seq, EnergyMode::kExact, std::move(terms),
                      std::nullopt);
}

std::vector<MaskPattern> SamplePatterns(int length, int num_patterns,
                                        uint64_t seed,
                                        absl::string_view seq_id) {
  const int l = MaskSize(length);
  Rng rng(DeriveSeed(seed, seq_id));
  std::vector<MaskPattern> patterns;
  const auto total = Binomial(length, l);
  if (total.has_value()) {
    const uint64_t k = std::min<uint64_t>(num_patterns, *total);
    for (uint64_t rank : SampleDistinct(*total, k, rng)) {
      patterns.push_back(MaskPattern{UnrankCombination(rank, length, l)});
    }
    return patterns;
  }
  // Ranks overflow 64 bits; draw position subsets directly. A repeat has
  // probability below K^2 / 2^64 and is redrawn.
  std::set<std::vector<int>> seen;
  std::vector<int> positions(length);
  while (static_cast<int>(patterns.size()) < num_patterns) {
    for (int i = 0; i < length; ++i) positions[i] = i;
    for (int i = 0; i < l; ++i) {
      const int j = i + static_cast<int>(rng.Uniform(length - i));
      std::swap(positions[i], positions[j]);
    }
    std::vector<int> chosen(positions.begin(), positions.begin() + l);
    std::sort(chosen.begin(), chosen.end());
    if (seen.insert(chosen).second) {
      patterns.push_back(MaskPattern{std::move(chosen)});
    }
  }
  std::sort(patterns.begin(), patterns.end(),
            [](const MaskPattern& a, const MaskPattern& b) {
              return a.positions < b.positions;
            });
  return patterns;
}

absl::StatusOr<EnergyEstimate> MonteCarloEnergy(const MaskedScorer& scorer,
                                                const Sequence& seq,
                                                int num_patterns,
                                                uint64_t seed) {
  MLMIA_RETURN_IF_ERROR(CheckLength(seq));
  if (num_patterns < 1) {
    return absl::InvalidArgumentError("K must be >= 1");
  }
  std::vector<double> terms;
  for (const MaskPattern& pattern :
       SamplePatterns(seq.length(), num_patterns, seed, seq.seq_id)) {
    MLMIA_ASSIGN_OR_RETURN(const double loss,
                           PatternLoss(scorer, seq, pattern));
    terms.push_back(loss);
  }
  return MakeEstimate(scorer, seq, EnergyMode::kMonteCarlo, std::move(terms),
                      seed);
}

absl::StatusOr<EnergyEstimate> PllEnergy(const MaskedScorer& scorer,
                                         const Sequence& seq) {
  MLMIA_RETURN_IF_ERROR(CheckLength(seq));
  std::vector<double> terms;
  terms.reserve(seq.length());
  for (int i = 0; i < seq.length(); ++i) {
    MLMIA_ASSIGN_OR_RETURN(const double loss,
                           PatternLoss(scorer, seq, MaskPattern{{i}}));
    terms.push_back(loss);
  }
  return MakeEstimate(scorer, seq, EnergyMode::kPll, std::move(terms),
                      std::nullopt);
}

absl::StatusOr<EnergyEstimate> ComputeEnergy(const MaskedScorer& scorer,
                                             const Sequence& seq,
                                             const EnergyOptions& options) {
  switch (options.mode) {
    case EnergyMode::kExact:
      return ExactEnergy(scorer, seq, options.enumeration_budget);
    case EnergyMode::kMonteCarlo:
      return MonteCarloEnergy(scorer, seq, options.num_patterns, options.seed);
    case EnergyMode::kPll:
      return PllEnergy(scorer, seq);
  }
  return absl::InvalidArgumentError("unknown energy mode");
}

absl::StatusOr<std::vector<EnergyEstimate>> ComputeEnergies(
    const MaskedScorer& scorer, std::span<const Sequence> seqs,
    const EnergyOptions& options) {
  std::vector<absl::StatusOr<EnergyEstimate>> results(
      seqs.size(), absl::UnknownError("not computed"));
  const size_t jobs = static_cast<size_t>(std::max(1, options.jobs));
  auto work = [&](size_t worker) {
    for (size_t i = worker; i < seqs.size(); i += jobs) {
      results[i] = ComputeEnergy(scorer, seqs[i], options);
    }
  };
  if (jobs == 1 || seqs.size() < 2) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (size_t w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
  }
  std::vector<EnergyEstimate> out;
  out.reserve(seqs.size());
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    out.push_back(*std::move(r));
  }
  return out;
}

absl::StatusOr<ScoreRecord> ToScoreRecord(const EnergyEstimate& energy,
                                          int length, std::string model_label) {
  ScoreRecord record;
  record.seq_id = energy.seq_id;
  record.model = std::move(model_label);
  record.length = length;
  if (energy.mode == EnergyMode::kPll) {
    if (static_cast<int>(energy.terms.size()) != length) {
      return absl::FailedPreconditionError(
          absl::StrCat("pll energy for ", energy.seq_id, " has ",
                       energy.terms.size(), " terms but T=", length));
    }
    record.mode = ScoreMode::kPll;
    for (double loss : energy.terms) record.values.push_back(-loss);
  } else {
    record.mode = ScoreMode::kPatterns;
    record.values = energy.terms;
  }
  return record;
}

EnergyEstimate EnergyFromRecord(const ScoreRecord& record) {
  EnergyEstimate e;
  e.seq_id = record.seq_id;
  e.model = record.model;
  if (record.mode == ScoreMode::kPll) {
    e.mode = EnergyMode::kPll;
    for (double lp : record.values) e.terms.push_back(-lp);
  } else {
    const auto total = Binomial(record.length, MaskSize(record.length));
    e.mode = total.has_value() && *total == record.values.size()
                 ? EnergyMode::kExact
                 : EnergyMode::kMonteCarlo;
    e.terms = record.values;
  }
  e.num_terms = static_cast<int64_t>(e.terms.size());
  e.value = MeanLoss(e.terms);
  return e;
}

std::string EnergyCsv(std::span<const EnergyEstimate> energies) {
  std::string out = "seq_id,model,mode,K,seed,value\n";
  for (const EnergyEstimate& e : energies) {
    absl::StrAppend(&out, CsvField(e.seq_id), ",", CsvField(e.model), ",",
                    EnergyModeName(e.mode), ",", e.num_terms, ",",
                    e.seed.has_value() ? absl::StrCat(*e.seed) : "", ",",
                    FormatDouble(e.value), "\n");
  }
  return out;
}

}  // namespace mlmia
