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

#include "mlmia/synth.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "mlmia/status_macros.h"

namespace mlmia {
namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "nu", "pe", "ra",
                                      "si", "to", "ve", "za", "bo", "du",
                                      "fi", "ge", "hu", "jo"};

std::string Word(int index) {
  std::string out;
  int rest = index;
  int digits = 0;
  do {
    out += kSyllables[rest % 16];
    rest /= 16;
    ++digits;
  } while (rest > 0 || digits < 2);
  return out;
}

int NumCommon(int vocab_size, double rare_fraction) {
  const int rare = static_cast<int>(std::floor(rare_fraction * vocab_size));
  return std::max(1, vocab_size - rare);
}

}  // namespace

absl::Status ValidateSynthConfig(const SynthConfig& c) {
  if (c.vocab_size < 4) {
    return absl::InvalidArgumentError("vocab_size must be >= 4");
  }
  if (c.num_sequences <= 0) {
    return absl::InvalidArgumentError("num_sequences must be positive");
  }
  if (c.min_length < 2 || c.max_length > 512 || c.min_length > c.max_length) {
    return absl::InvalidArgumentError(
        "length range must satisfy 2 <= min <= max <= 512");
  }
  if (!(c.rare_prob >= 0.0 && c.rare_prob <= 1.0) ||
      !(c.rare_fraction >= 0.0 && c.rare_fraction < 1.0)) {
    return absl::InvalidArgumentError(
        "rare_prob must be in [0,1] and rare_fraction in [0,1)");
  }
  if (c.rare_prob > 0.0 &&
      NumCommon(c.vocab_size, c.rare_fraction) == c.vocab_size) {
    return absl::InvalidArgumentError(
        "rare_prob > 0 requires a non-empty rare tail");
  }
  if (c.min_group_size < 1 || c.min_group_size > c.max_group_size) {
    return absl::InvalidArgumentError(
        "group sizes must satisfy 1 <= min <= max");
  }
  return absl::OkStatus();
}

std::string SyntheticSurface(int index, bool rare) {
  const std::string word = Word(index);
  int kind = 0;  // 0 alphabetic, 1 digit-bearing, 2 punctuation-bearing
  if (rare) {
    kind = index % 4 == 1 ? 1 : index % 4 == 3 ? 2 : 0;
  } else {
    kind = index % 10 == 3 ? 1 : index % 10 == 7 ? 2 : 0;
  }
  if (kind == 1) {
    switch (index % 3) {
      case 0:
        return absl::StrCat(index, "mg");
      case 1:
        return absl::StrCat(100 + index, "/", index % 90 + 10);
      default:
        return absl::StrCat("t", index, ".5");
    }
  }
  if (kind == 2) {
    switch (index % 4) {
      case 0:
        return absl::StrCat("**", word);
      case 1:
        return absl::StrCat(word, ":");
      case 2:
        return absl::StrCat("(", word, ")");
      default:
        return absl::StrCat("-", word, "-");
    }
  }
  return word;
}

std::shared_ptr<const Vocabulary> SyntheticVocabulary(int vocab_size,
                                                      double rare_fraction) {
  auto vocab = std::make_shared<Vocabulary>();
  const int num_common = NumCommon(vocab_size, rare_fraction);
  for (int i = 0; i < vocab_size; ++i) {
    vocab->Add(SyntheticSurface(i, i >= num_common));
  }
  return vocab;
}

absl::StatusOr<MarkovSource> MarkovSource::Create(int vocab_size,
                                                  double rare_fraction,
                                                  double rare_prob,
                                                  uint64_t chain_seed) {
  if (vocab_size < 4) {
    return absl::InvalidArgumentError("vocab_size must be >= 4");
  }
  MarkovSource source;
  source.vocab_size_ = vocab_size;
  source.num_common_ = NumCommon(vocab_size, rare_fraction);
  source.rare_prob_ = source.num_common_ < vocab_size ? rare_prob : 0.0;
  Rng rng(DeriveSeed(chain_seed, "markov-rows"));
  source.rows_.resize(vocab_size + 1);
  for (Row& row : source.rows_) {
    const int fanout = static_cast<int>(
        std::min<int64_t>(rng.UniformInt(2, 8), source.num_common_));
    std::vector<int> candidates(source.num_common_);
    for (int i = 0; i < source.num_common_; ++i) candidates[i] = i;
    // Partial Fisher-Yates picks `fanout` distinct successors.
    for (int i = 0; i < fanout; ++i) {
      const int j = i + static_cast<int>(rng.Uniform(source.num_common_ - i));
      std::swap(candidates[i], candidates[j]);
      const double u = rng.UniformDouble();
      row.successors.push_back(static_cast<TokenId>(candidates[i] + 2));
      row.weights.push_back((u + 0.05) * (u + 0.05));
    }
  }
  return source;
}

std::vector<TokenId> MarkovSource::Sample(int length, Rng& rng) const {
  std::vector<TokenId> out;
  out.reserve(length);
  const int num_rare = vocab_size_ - num_common_;
  int state = 0;
  for (int t = 0; t < length; ++t) {
    TokenId next;
    if (num_rare > 0 && rng.Bernoulli(rare_prob_)) {
      next = static_cast<TokenId>(2 + num_common_ + rng.Uniform(num_rare));
    } else {
      const Row& row = rows_[state];
      next = row.successors[rng.Categorical(row.weights)];
    }
    out.push_back(next);
    state = next - 1;
  }
  return out;
}

absl::StatusOr<Corpus> SynthCorpus(const SynthConfig& config) {
  MLMIA_RETURN_IF_ERROR(ValidateSynthConfig(config));
  MLMIA_ASSIGN_OR_RETURN(
      MarkovSource source,
      MarkovSource::Create(config.vocab_size, config.rare_fraction,
                           config.rare_prob,
                           config.chain_seed.value_or(config.seed)));
  Corpus corpus;
  corpus.name = config.name;
  corpus.vocab = SyntheticVocabulary(config.vocab_size, config.rare_fraction);
  Rng rng(DeriveSeed(config.seed, "synth-corpus"));
  int group_index = 0;
  int remaining_in_group = 0;
  corpus.sequences.reserve(config.num_sequences);
  for (int n = 0; n < config.num_sequences; ++n) {
    if (remaining_in_group == 0) {
      remaining_in_group = static_cast<int>(
          rng.UniformInt(config.min_group_size, config.max_group_size));
      ++group_index;
    }
    --remaining_in_group;
    const int length =
        static_cast<int>(rng.UniformInt(config.min_length, config.max_length));
    Sequence seq;
    seq.seq_id = absl::StrCat(config.id_prefix, n);
    if (config.max_group_size > 1) {
      seq.group_id = absl::StrCat(config.id_prefix, "p", group_index);
    }
    for (TokenId id : source.Sample(length, rng)) {
      seq.tokens.push_back(Token{corpus.vocab->Surface(id), id});
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

absl::StatusOr<Corpus> RebindVocabulary(
    Corpus corpus, std::shared_ptr<const Vocabulary> vocab) {
  const auto& old_surfaces = corpus.vocab->surfaces();
  const auto& new_surfaces = vocab->surfaces();
  if (new_surfaces.size() < old_surfaces.size() ||
      !std::equal(old_surfaces.begin(), old_surfaces.end(),
                  new_surfaces.begin())) {
    return absl::FailedPreconditionError(
        "replacement vocabulary does not extend the corpus vocabulary");
  }
  corpus.vocab = std::move(vocab);
  return corpus;
}

}  // namespace mlmia
