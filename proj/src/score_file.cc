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

#include "mlmia/score_file.h"

#include <cmath>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "mlmia/combinatorics.h"
#include "mlmia/energy.h"
#include "mlmia/io.h"
#include "mlmia/status_macros.h"

namespace mlmia {

using json = nlohmann::json;

absl::string_view ScoreModeName(ScoreMode mode) {
  return mode == ScoreMode::kPatterns ? "patterns" : "pll";
}

absl::StatusOr<std::string> SerializeScoreRecord(const ScoreRecord& r) {
  for (double v : r.values) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite score for ", r.seq_id));
    }
  }
  json doc;
  doc["seq_id"] = r.seq_id;
  doc["model"] = r.model;
  doc["mode"] = ScoreModeName(r.mode);
  doc["T"] = r.length;
  if (r.mode == ScoreMode::kPatterns) {
    doc["K"] = r.values.size();
    doc["pattern_losses"] = r.values;
  } else {
    doc["token_logprobs"] = r.values;
  }
  return doc.dump();
}

namespace {

bool IsIntegral(const json& v) {
  return v.is_number_integer() || v.is_number_unsigned();
}

// Parses one line into `record`, or describes the first problem in `issue`.
bool ParseRecord(const json& doc, ScoreRecord& record, ScoreIssue& issue) {
  auto fail = [&](std::string kind, std::string message) {
    issue.kind = std::move(kind);
    issue.message = std::move(message);
    return false;
  };
  if (!doc.is_object()) return fail("schema", "record is not an object");
  if (!doc.contains("seq_id") || !doc["seq_id"].is_string() ||
      doc["seq_id"].get<std::string>().empty()) {
    return fail("schema", "missing or empty seq_id");
  }
  record.seq_id = doc["seq_id"].get<std::string>();
  if (!doc.contains("model") || !doc["model"].is_string() ||
      (doc["model"] != "target" && doc["model"] != "reference")) {
    return fail("schema", "model must be \"target\" or \"reference\"");
  }
  record.model = doc["model"].get<std::string>();
  if (!doc.contains("mode") || !doc["mode"].is_string()) {
    return fail("schema", "missing mode");
  }
  const std::string mode = doc["mode"].get<std::string>();
  if (!doc.contains("T") || !IsIntegral(doc["T"]) ||
      doc["T"].get<int64_t>() < 1) {
    return fail("schema", "T must be a positive integer");
  }
  record.length = doc["T"].get<int>();
  const char* array_key = nullptr;
  if (mode == "patterns") {
    record.mode = ScoreMode::kPatterns;
    array_key = "pattern_losses";
  } else if (mode == "pll") {
    record.mode = ScoreMode::kPll;
    array_key = "token_logprobs";
  } else {
    return fail("schema", absl::StrCat("unknown mode \"", mode, "\""));
  }
  if (!doc.contains(array_key) || !doc[array_key].is_array()) {
    return fail("schema", absl::StrCat("missing ", array_key, " array"));
  }
  record.values.clear();
  for (const json& v : doc[array_key]) {
    if (!v.is_number()) {
      return fail("schema", absl::StrCat(array_key, " must hold numbers"));
    }
    record.values.push_back(v.get<double>());
  }
  const int n = static_cast<int>(record.values.size());
  if (record.mode == ScoreMode::kPatterns) {
    if (!doc.contains("K") || !IsIntegral(doc["K"]) ||
        doc["K"].get<int64_t>() < 1) {
      return fail("schema", "K must be a positive integer");
    }
    const int64_t k = doc["K"].get<int64_t>();
    if (k != n) {
      return fail("k-mismatch",
                  absl::StrCat("K=", k, " but ", n, " pattern losses"));
    }
    const auto possible = Binomial(record.length, MaskSize(record.length));
    if (possible.has_value() && static_cast<uint64_t>(k) > *possible) {
      return fail("k-mismatch",
                  absl::StrCat("K=", k, " exceeds the ", *possible,
                               " distinct patterns of a length-", record.length,
                               " sequence"));
    }
  } else if (n != record.length) {
    return fail("t-mismatch", absl::StrCat("T=", record.length, " but ", n,
                                           " token log-probs"));
  }
  return true;
}

}  // namespace

ScoreValidation ValidateScoreFile(absl::string_view contents) {
  ScoreValidation report;
  absl::flat_hash_set<std::pair<std::string, ScoreMode>> seen;
  std::string file_model;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    ++line_number;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    ++report.lines;
    ScoreIssue issue;
    issue.line = line_number;
    const json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      issue.kind = "malformed";
      issue.message = "line is not valid JSON";
      report.issues.push_back(std::move(issue));
      continue;
    }
    ScoreRecord record;
    if (!ParseRecord(doc, record, issue)) {
      report.issues.push_back(std::move(issue));
      continue;
    }
    ++report.records;
    if (file_model.empty()) {
      file_model = record.model;
    } else if (record.model != file_model) {
      issue.kind = "model-mismatch";
      issue.message =
          absl::StrCat("model \"", record.model, "\" differs from earlier \"",
                       file_model, "\"");
      report.issues.push_back(std::move(issue));
      continue;
    }
    if (!seen.emplace(record.seq_id, record.mode).second) {
      issue.kind = "duplicate";
      issue.message =
          absl::StrCat("duplicate (seq_id, mode) = (", record.seq_id, ", ",
                       ScoreModeName(record.mode), ")");
      report.issues.push_back(std::move(issue));
      continue;
    }
    if (record.mode == ScoreMode::kPatterns) {
      ++report.pattern_records;
    } else {
      ++report.pll_records;
    }
    report.valid.push_back(std::move(record));
  }
  return report;
}

absl::StatusOr<PrecomputedScorer> PrecomputedScorer::FromRecords(
    std::vector<ScoreRecord> records) {
  PrecomputedScorer scorer;
  for (size_t i = 0; i < records.size(); ++i) {
    const ScoreRecord& r = records[i];
    if (scorer.model_.empty()) scorer.model_ = r.model;
    if (r.model != scorer.model_) {
      return absl::InvalidArgumentError("score records mix model labels");
    }
    if (!scorer.index_.try_emplace(std::make_pair(r.seq_id, r.mode), i)
             .second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate (seq_id, mode) = (", r.seq_id, ", ",
                       ScoreModeName(r.mode), ")"));
    }
  }
  scorer.records_ = std::move(records);
  return scorer;
}

absl::StatusOr<const ScoreRecord*> PrecomputedScorer::Lookup(
    absl::string_view seq_id, ScoreMode mode, int expected_length) const {
  auto it = index_.find(std::make_pair(std::string(seq_id), mode));
  if (it == index_.end()) {
    return absl::NotFoundError(absl::StrCat("no ", ScoreModeName(mode),
                                            " record for seq_id ", seq_id,
                                            " in ", model_, " scores"));
  }
  const ScoreRecord* record = &records_[it->second];
  if (expected_length >= 0 && record->length != expected_length) {
    return absl::FailedPreconditionError(absl::StrCat(
        "T mismatch for ", seq_id, ": record has T=", record->length,
        ", query has T=", expected_length));
  }
  return record;
}

absl::StatusOr<double> PrecomputedScorer::CondLogProb(const Sequence& seq,
                                                      const MaskPattern& masked,
                                                      int position) const {
  MLMIA_RETURN_IF_ERROR(CheckMaskQuery(seq, masked, position));
  if (masked.size() != 1) {
    return absl::UnimplementedError(
        "precomputed scores answer single-position queries only");
  }
  MLMIA_ASSIGN_OR_RETURN(const ScoreRecord* record,
                         Lookup(seq.seq_id, ScoreMode::kPll, seq.length()));
  return record->values[position];
}

absl::StatusOr<PrecomputedScorer> ParseScoreFile(absl::string_view contents) {
  ScoreValidation report = ValidateScoreFile(contents);
  if (!report.ok()) {
    const ScoreIssue& first = report.issues.front();
    const std::string message = absl::StrCat("line ", first.line, ": ",
                                             first.kind, ": ", first.message);
    if (first.kind == "malformed" || first.kind == "schema") {
      return absl::InvalidArgumentError(absl::StrCat("parse error: ", message));
    }
    return absl::InvalidArgumentError(absl::StrCat("format error: ", message));
  }
  return PrecomputedScorer::FromRecords(std::move(report.valid));
}

absl::StatusOr<PrecomputedScorer> LoadScoreFile(const std::string& path) {
  MLMIA_ASSIGN_OR_RETURN(const std::string contents, ReadFile(path));
  return ParseScoreFile(contents);
}

}  // namespace mlmia
