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

#include "mlmia/corpus.h"

#include <cctype>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"

namespace mlmia {

using json = nlohmann::json;

absl::StatusOr<Sequence> Tokenize(absl::string_view text,
                                  const Vocabulary& vocab,
                                  const TokenizerPolicy& policy,
                                  std::string seq_id) {
  Sequence seq;
  seq.seq_id = std::move(seq_id);
  for (absl::string_view piece : absl::StrSplit(
           text, absl::ByAnyChar(" \t\r\n\f\v"), absl::SkipEmpty())) {
    Token token;
    token.surface =
        policy.lowercase ? absl::AsciiStrToLower(piece) : std::string(piece);
    token.id = vocab.Lookup(token.surface);
    seq.tokens.push_back(std::move(token));
  }
  if (seq.tokens.empty()) {
    return absl::InvalidArgumentError(
        "degenerate input: text is empty after tokenization");
  }
  return seq;
}

absl::StatusOr<Sequence> PrependName(const Sequence& seq,
                                     const std::vector<Token>& name_tokens) {
  if (name_tokens.empty()) {
    return absl::InvalidArgumentError("name token list must be non-empty");
  }
  Sequence out;
  out.seq_id = absl::StrCat(seq.seq_id, "+name");
  out.group_id = seq.group_id;
  out.tokens.reserve(name_tokens.size() + seq.tokens.size());
  out.tokens = name_tokens;
  out.tokens.insert(out.tokens.end(), seq.tokens.begin(), seq.tokens.end());
  return out;
}

absl::Status ValidateCorpus(const Corpus& corpus) {
  if (corpus.vocab == nullptr) {
    return absl::FailedPreconditionError("corpus has no vocabulary");
  }
  absl::flat_hash_set<absl::string_view> seen;
  for (const Sequence& seq : corpus.sequences) {
    if (seq.tokens.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sequence ", seq.seq_id, " is empty"));
    }
    if (!seen.insert(seq.seq_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate seq_id ", seq.seq_id));
    }
    for (const Token& t : seq.tokens) {
      if (t.id < 0 || t.id >= corpus.vocab->size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "token id ", t.id, " in ", seq.seq_id, " outside vocabulary"));
      }
    }
  }
  return absl::OkStatus();
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const Sequence& seq : corpus.sequences) {
    json record;
    record["seq_id"] = seq.seq_id;
    record["group_id"] =
        seq.group_id.has_value() ? json(*seq.group_id) : json(nullptr);
    json tokens = json::array();
    for (const Token& t : seq.tokens) tokens.push_back(t.surface);
    record["tokens"] = std::move(tokens);
    absl::StrAppend(&out, record.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<Sequence>> ParseCorpus(absl::string_view contents,
                                                  Vocabulary& vocab,
                                                  bool grow_vocab) {
  std::vector<Sequence> out;
  absl::flat_hash_set<std::string> seen;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    ++line_number;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": malformed JSON"));
    }
    if (!record.contains("seq_id") || !record["seq_id"].is_string() ||
        !record.contains("tokens") || !record["tokens"].is_array()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": expected string seq_id and tokens array"));
    }
    Sequence seq;
    seq.seq_id = record["seq_id"].get<std::string>();
    if (record.contains("group_id") && !record["group_id"].is_null()) {
      if (!record["group_id"].is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_number, ": group_id must be a string"));
      }
      seq.group_id = record["group_id"].get<std::string>();
    }
    for (const json& t : record["tokens"]) {
      if (!t.is_string() || t.get<std::string>().empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": tokens must be non-empty strings"));
      }
      Token token{t.get<std::string>(), kUnkId};
      // A literal mask surface in the data must not alias the mask id.
      if (token.surface != kMaskSurface) {
        token.id =
            grow_vocab ? vocab.Add(token.surface) : vocab.Lookup(token.surface);
      }
      seq.tokens.push_back(std::move(token));
    }
    if (seq.tokens.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": empty sequence"));
    }
    if (!seen.insert(seq.seq_id).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": duplicate seq_id ", seq.seq_id));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace mlmia
