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

#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "mlmia/experiments.h"
#include "mlmia/io.h"
#include "mlmia/status_macros.h"

namespace mlmia {

using json = nlohmann::json;

namespace {

constexpr int kMaxListed = 20;

std::string Listed(const std::vector<std::string>& ids) {
  if (ids.size() <= kMaxListed) return absl::StrJoin(ids, ", ");
  return absl::StrCat(
      absl::StrJoin(ids.begin(), ids.begin() + kMaxListed, ", "), ", ... (",
      ids.size(), " total)");
}

absl::StatusOr<std::vector<PoolEntry>> ParseEntries(const json& doc,
                                                    const char* role) {
  if (!doc.contains(role) || !doc.at(role).is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("pool manifest: '", role, "' must be an array"));
  }
  std::vector<PoolEntry> entries;
  for (const json& item : doc.at(role)) {
    if (!item.is_object() || !item.contains("seq_id") ||
        !item.at("seq_id").is_string() || !item.contains("T") ||
        !item.at("T").is_number_integer()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "pool manifest: bad entry in '", role, "': ", item.dump()));
    }
    PoolEntry e;
    e.seq_id = item.at("seq_id").get<std::string>();
    e.length = item.at("T").get<int>();
    if (item.contains("group_id") && item.at("group_id").is_string()) {
      e.group_id = item.at("group_id").get<std::string>();
    } else {
      e.group_id = e.seq_id;
    }
    if (e.length <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("pool manifest: non-positive T for ", e.seq_id));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

json EntriesJson(const std::vector<PoolEntry>& entries) {
  json out = json::array();
  for (const PoolEntry& e : entries) {
    out.push_back(
        {{"seq_id", e.seq_id}, {"group_id", e.group_id}, {"T", e.length}});
  }
  return out;
}

}  // namespace

json PoolManifestJson(const LabeledPool& pool) {
  return {{"members", EntriesJson(pool.members)},
          {"nonmembers", EntriesJson(pool.nonmembers)},
          {"population", EntriesJson(pool.population)}};
}

absl::StatusOr<LabeledPool> ParsePoolManifest(absl::string_view contents) {
  json doc;
  try {
    doc = json::parse(contents.begin(), contents.end());
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("pool manifest: ", e.what()));
  }
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("pool manifest: expected an object");
  }
  LabeledPool pool;
  MLMIA_ASSIGN_OR_RETURN(pool.members, ParseEntries(doc, "members"));
  MLMIA_ASSIGN_OR_RETURN(pool.nonmembers, ParseEntries(doc, "nonmembers"));
  MLMIA_ASSIGN_OR_RETURN(pool.population, ParseEntries(doc, "population"));
  return pool;
}

absl::StatusOr<EnergyTable> EnergiesFromScores(const PrecomputedScorer& scores,
                                               const LabeledPool& pool,
                                               ScoreMode mode) {
  std::vector<std::string> missing;
  std::vector<std::string> mismatched;
  std::vector<EnergyEstimate> energies;
  for (const auto* side : {&pool.members, &pool.nonmembers, &pool.population}) {
    for (const PoolEntry& e : *side) {
      absl::StatusOr<const ScoreRecord*> record =
          scores.Lookup(e.seq_id, mode, e.length);
      if (absl::IsNotFound(record.status())) {
        missing.push_back(e.seq_id);
      } else if (!record.ok()) {
        mismatched.push_back(e.seq_id);
      } else {
        energies.push_back(EnergyFromRecord(**record));
      }
    }
  }
  if (!missing.empty() || !mismatched.empty()) {
    std::string message = absl::StrCat("ingestion (", scores.name(), "):");
    if (!missing.empty()) {
      absl::StrAppend(&message, " missing ", ScoreModeName(mode),
                      " records for ", Listed(missing), ";");
    }
    if (!mismatched.empty()) {
      absl::StrAppend(&message, " T mismatch for ", Listed(mismatched), ";");
    }
    message.pop_back();
    return absl::NotFoundError(message);
  }
  return IndexEnergies(std::move(energies));
}

absl::StatusOr<AttackResult> IngestAndAudit(const PrecomputedScorer& target,
                                            const PrecomputedScorer* reference,
                                            const LabeledPool& pool,
                                            const AttackOptions& options,
                                            ScoreMode mode) {
  MLMIA_ASSIGN_OR_RETURN(const EnergyTable target_energies,
                         EnergiesFromScores(target, pool, mode));
  EnergyTable reference_energies;
  if (reference != nullptr) {
    MLMIA_ASSIGN_OR_RETURN(reference_energies,
                           EnergiesFromScores(*reference, pool, mode));
  }
  return RunAttackOnEnergies(
      pool, target_energies,
      reference != nullptr ? &reference_energies : nullptr, options);
}

absl::StatusOr<AttackReport> IngestAndAudit(const std::string& target_path,
                                            const std::string& reference_path,
                                            const std::string& pool_path,
                                            const AttackOptions& options,
                                            ScoreMode mode) {
  MLMIA_ASSIGN_OR_RETURN(const PrecomputedScorer target,
                         LoadScoreFile(target_path));
  std::optional<PrecomputedScorer> reference;
  if (!reference_path.empty()) {
    MLMIA_ASSIGN_OR_RETURN(reference, LoadScoreFile(reference_path));
  }
  MLMIA_ASSIGN_OR_RETURN(const std::string manifest, ReadFile(pool_path));
  MLMIA_ASSIGN_OR_RETURN(const LabeledPool pool, ParsePoolManifest(manifest));
  MLMIA_ASSIGN_OR_RETURN(
      const AttackResult result,
      IngestAndAudit(target, reference.has_value() ? &*reference : nullptr,
                     pool, options, mode));
  return BuildReport(result);
}

absl::StatusOr<std::string> ExportScores(const EnergyTable& energies,
                                         const LabeledPool& pool,
                                         const std::string& model_label) {
  std::string out;
  absl::flat_hash_set<std::string> seen;
  for (const auto* side : {&pool.members, &pool.nonmembers, &pool.population}) {
    for (const PoolEntry& e : *side) {
      if (!seen.insert(e.seq_id).second) continue;
      auto it = energies.find(e.seq_id);
      if (it == energies.end()) {
        return absl::NotFoundError(
            absl::StrCat("export: no energy for ", e.seq_id));
      }
      MLMIA_ASSIGN_OR_RETURN(const ScoreRecord record,
                             ToScoreRecord(it->second, e.length, model_label));
      MLMIA_ASSIGN_OR_RETURN(const std::string line,
                             SerializeScoreRecord(record));
      absl::StrAppend(&out, line, "\n");
    }
  }
  return out;
}

}  // namespace mlmia
