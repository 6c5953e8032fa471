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

#ifndef MLMIA_SCORE_FILE_H_
#define MLMIA_SCORE_FILE_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/scorer.h"

namespace mlmia {

// Score-exchange records (JSON Lines):
//   {"seq_id", "model", "mode": "patterns", "T", "K", "pattern_losses": [K]}
//   {"seq_id", "model", "mode": "pll", "T", "token_logprobs": [T]}
// pattern_losses[j] = -sum_{i in I_j} log p(s_i | s without I_j).
enum class ScoreMode { kPatterns, kPll };

absl::string_view ScoreModeName(ScoreMode mode);

struct ScoreRecord {
  std::string seq_id;
  std::string model;  // "target" or "reference"
  ScoreMode mode = ScoreMode::kPatterns;
  int length = 0;
  // Pattern losses (kPatterns) or per-token conditional log-probs (kPll).
  std::vector<double> values;

  int num_patterns() const {
    return mode == ScoreMode::kPatterns ? static_cast<int>(values.size())
                                        : length;
  }
};

// One JSON line without the trailing newline. Fails on non-finite values.
absl::StatusOr<std::string> SerializeScoreRecord(const ScoreRecord& record);

struct ScoreIssue {
  int line = 0;
  // malformed | schema | k-mismatch | t-mismatch | duplicate | model-mismatch
  std::string kind;
  std::string message;
};

struct ScoreValidation {
  int lines = 0;
  int records = 0;
  int pattern_records = 0;
  int pll_records = 0;
  std::vector<ScoreIssue> issues;
  // Records that passed every check, in file order.
  std::vector<ScoreRecord> valid;

  bool ok() const { return issues.empty(); }
};

// Checks every line: JSON syntax, schema, K/T/array-length consistency,
// duplicate (seq_id, mode) keys, and a single model label per file.
ScoreValidation ValidateScoreFile(absl::string_view contents);

// Scorer over ingested records, keyed by (seq_id, mode).
class PrecomputedScorer final : public MaskedScorer {
 public:
  static absl::StatusOr<PrecomputedScorer> FromRecords(
      std::vector<ScoreRecord> records);

  // The model label shared by every record.
  absl::string_view name() const override { return model_; }
  // Score files carry no vocabulary.
  int vocab_size() const override { return 0; }

  // Answers single-position queries from pll records. Pattern records hold
  // aggregate losses only, so multi-position queries are rejected.
  absl::StatusOr<double> CondLogProb(const Sequence& seq,
                                     const MaskPattern& masked,
                                     int position) const override;

  // The record for (seq_id, mode); NotFound if absent. When
  // `expected_length` is non-negative the record's T must match it.
  absl::StatusOr<const ScoreRecord*> Lookup(absl::string_view seq_id,
                                            ScoreMode mode,
                                            int expected_length = -1) const;

  size_t size() const { return records_.size(); }
  const std::vector<ScoreRecord>& records() const { return records_; }

 private:
  PrecomputedScorer() = default;

  std::string model_;
  std::vector<ScoreRecord> records_;
  absl::flat_hash_map<std::pair<std::string, ScoreMode>, size_t> index_;
};

absl::StatusOr<PrecomputedScorer> ParseScoreFile(absl::string_view contents);
absl::StatusOr<PrecomputedScorer> LoadScoreFile(const std::string& path);

}  // namespace mlmia

#endif  // MLMIA_SCORE_FILE_H_
