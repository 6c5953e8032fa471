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

#ifndef MLMIA_CORPUS_H_
#define MLMIA_CORPUS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/vocabulary.h"

namespace mlmia {

struct Token {
  // Normalized surface as it appeared in the text, kept even when `id` is
  // kUnkId so character-level features survive out-of-vocabulary mapping.
  std::string surface;
  TokenId id = kUnkId;

  bool operator==(const Token&) const = default;
};

struct Sequence {
  std::string seq_id;
  std::vector<Token> tokens;
  // Patient key. Ungrouped sequences form their own singleton group.
  std::optional<std::string> group_id;

  int length() const { return static_cast<int>(tokens.size()); }
  const std::string& GroupKey() const {
    return group_id.has_value() ? *group_id : seq_id;
  }

  bool operator==(const Sequence&) const = default;
};

struct Corpus {
  std::string name;
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<Sequence> sequences;

  int size() const { return static_cast<int>(sequences.size()); }
};

struct TargetPool {
  std::vector<Sequence> members;
  std::vector<Sequence> nonmembers;
  std::vector<Sequence> population;
};

struct TokenizerPolicy {
  bool lowercase = true;
};

// Lowercased whitespace tokenization. Punctuation stays attached to its token.
// Unknown surfaces map to UNK.
absl::StatusOr<Sequence> Tokenize(absl::string_view text,
                                  const Vocabulary& vocab,
                                  const TokenizerPolicy& policy = {},
                                  std::string seq_id = "");

// Returns a copy of `seq` with `name_tokens` at positions 0..k-1. The new
// seq_id is `seq.seq_id + "+name"`.
absl::StatusOr<Sequence> PrependName(const Sequence& seq,
                                     const std::vector<Token>& name_tokens);

// Checks that every token id in the corpus resolves in its vocabulary, that
// every sequence is non-empty, and that seq_ids are unique.
absl::Status ValidateCorpus(const Corpus& corpus);

// JSON Lines, one {"seq_id", "group_id", "tokens"} record per sequence.
std::string SerializeCorpus(const Corpus& corpus);

// Parses a corpus file. Token ids are resolved against `vocab`; when
// `grow_vocab` is set, unseen surfaces are added to it instead of mapping to
// UNK.
absl::StatusOr<std::vector<Sequence>> ParseCorpus(absl::string_view contents,
                                                  Vocabulary& vocab,
                                                  bool grow_vocab);

}  // namespace mlmia

#endif  // MLMIA_CORPUS_H_
