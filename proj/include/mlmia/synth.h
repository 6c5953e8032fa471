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

#ifndef MLMIA_SYNTH_H_
#define MLMIA_SYNTH_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mlmia/corpus.h"
#include "mlmia/rng.h"

namespace mlmia {

struct SynthConfig {
  // Number of content tokens; the vocabulary additionally holds MASK and UNK.
  int vocab_size = 200;
  int num_sequences = 900;
  int min_length = 10;
  int max_length = 60;
  // Sampling seed.
  uint64_t seed = 1;
  // Seed of the transition matrix. Defaults to `seed`. Corpora sharing a
  // chain seed come from the same domain.
  std::optional<uint64_t> chain_seed;
  // Per-position probability of emitting a token from the rare tail.
  double rare_prob = 0.1;
  // Fraction of the content vocabulary reserved for the rare tail.
  double rare_fraction = 0.3;
  // Consecutive sequences are grouped into patients of this many notes.
  int min_group_size = 1;
  int max_group_size = 1;
  std::string id_prefix = "s";
  std::string name = "synthetic";
};

absl::Status ValidateSynthConfig(const SynthConfig& config);

// Surface of the content token with index `index` (id = index + 2). Digit-
// and punctuation-bearing surfaces are interleaved with alphabetic ones, more
// densely in the rare tail.
std::string SyntheticSurface(int index, bool rare);

// The vocabulary shared by every synthetic corpus of this vocab size.
std::shared_ptr<const Vocabulary> SyntheticVocabulary(int vocab_size,
                                                      double rare_fraction);

// Order-1 Markov chain over the common part of the vocabulary, with a
// uniform rare tail mixed in at every position.
class MarkovSource {
 public:
  static absl::StatusOr<MarkovSource> Create(int vocab_size,
                                             double rare_fraction,
                                             double rare_prob,
                                             uint64_t chain_seed);

  std::vector<TokenId> Sample(int length, Rng& rng) const;

  int num_common() const { return num_common_; }
  int vocab_size() const { return vocab_size_; }

 private:
  struct Row {
    std::vector<TokenId> successors;
    std::vector<double> weights;
  };

  MarkovSource() = default;

  int vocab_size_ = 0;
  int num_common_ = 0;
  double rare_prob_ = 0.0;
  // rows_[0] is the start state; rows_[i + 1] follows content index i.
  std::vector<Row> rows_;
};

absl::StatusOr<Corpus> SynthCorpus(const SynthConfig& config);

// Returns `corpus` re-pointed at `vocab`, which must extend the corpus
// vocabulary (same surfaces at the same ids, optionally followed by more).
absl::StatusOr<Corpus> RebindVocabulary(
    Corpus corpus, std::shared_ptr<const Vocabulary> vocab);

}  // namespace mlmia

#endif  // MLMIA_SYNTH_H_
