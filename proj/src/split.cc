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

#include "mlmia/split.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "mlmia/rng.h"
#include "mlmia/status_macros.h"

namespace mlmia {
namespace {

// Sequence indices grouped by group key, in order of first appearance.
std::vector<std::vector<int>> GroupIndices(const std::vector<Sequence>& seqs) {
  std::vector<std::vector<int>> groups;
  absl::flat_hash_map<absl::string_view, int> slot;
  for (int i = 0; i < static_cast<int>(seqs.size()); ++i) {
    auto [it, inserted] =
        slot.try_emplace(seqs[i].GroupKey(), static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

// First-fit assignment of shuffled groups into bins of exact capacity. Returns
// the chosen sequence indices per bin, each in ascending order.
absl::StatusOr<std::vector<std::vector<int>>> FillBins(
    std::vector<std::vector<int>> groups, const std::vector<int>& capacities,
    const std::vector<std::string>& names, uint64_t seed) {
  Rng rng(seed);
  rng.Shuffle(groups);
  std::vector<std::vector<int>> bins(capacities.size());
  std::vector<int> remaining = capacities;
  for (const auto& group : groups) {
    const int size = static_cast<int>(group.size());
    for (size_t b = 0; b < bins.size(); ++b) {
      if (remaining[b] >= size) {
        bins[b].insert(bins[b].end(), group.begin(), group.end());
        remaining[b] -= size;
        break;
      }
    }
  }
  for (size_t b = 0; b < bins.size(); ++b) {
    if (remaining[b] != 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "too few groups to satisfy the split: ", names[b], " needs ",
          capacities[b], " sequences but whole groups fill only ",
          capacities[b] - remaining[b]));
    }
    std::sort(bins[b].begin(), bins[b].end());
  }
  return bins;
}

std::vector<Sequence> Pick(const std::vector<Sequence>& seqs,
                           const std::vector<int>& indices) {
  std::vector<Sequence> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(seqs[i]);
  return out;
}

int Count(double fraction, int total) {
  return static_cast<int>(std::llround(fraction * total));
}

}  // namespace

absl::StatusOr<SplitResult> SplitPool(const Corpus& corpus,
                                      const SplitFractions& f, uint64_t seed) {
  for (double x : {f.train, f.member_eval, f.nonmember, f.population}) {
    if (!(x >= 0.0 && x <= 1.0)) {
      return absl::InvalidArgumentError("split fractions must be in [0,1]");
    }
  }
  if (f.train + f.nonmember + f.population > 1.0 + 1e-12) {
    return absl::InvalidArgumentError(
        "train + nonmember + population fractions exceed 1");
  }
  if (f.member_eval > f.train + 1e-12) {
    return absl::InvalidArgumentError(
        "member_eval fraction exceeds the train fraction");
  }
  const int total = corpus.size();
  const std::vector<int> capacities = {Count(f.train, total),
                                       Count(f.nonmember, total),
                                       Count(f.population, total)};
  MLMIA_ASSIGN_OR_RETURN(const auto bins,
                         FillBins(GroupIndices(corpus.sequences), capacities,
                                  {"train", "nonmember", "population"},
                                  DeriveSeed(seed, "split-groups")));

  SplitResult result;
  result.train.name = absl::StrCat(corpus.name, "/train");
  result.train.vocab = corpus.vocab;
  result.train.sequences = Pick(corpus.sequences, bins[0]);
  result.pool.nonmembers = Pick(corpus.sequences, bins[1]);
  result.pool.population = Pick(corpus.sequences, bins[2]);
  MLMIA_ASSIGN_OR_RETURN(
      result.pool.members,
      SampleMembers(result.train, Count(f.member_eval, total),
                    DeriveSeed(seed, "split-members")));
  MLMIA_RETURN_IF_ERROR(ValidateSplit(result.train, result.pool));
  return result;
}

absl::StatusOr<std::vector<Sequence>> SampleMembers(const Corpus& train,
                                                    int count, uint64_t seed) {
  if (count < 0 || count > train.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot draw ", count, " members from ", train.size(),
                     " training sequences"));
  }
  MLMIA_ASSIGN_OR_RETURN(
      const auto bins,
      FillBins(GroupIndices(train.sequences), {count}, {"member_eval"}, seed));
  return Pick(train.sequences, bins[0]);
}

absl::Status ValidateSplit(const Corpus& train, const TargetPool& pool) {
  absl::flat_hash_set<absl::string_view> train_ids;
  absl::flat_hash_set<absl::string_view> member_groups;
  for (const Sequence& s : train.sequences) {
    train_ids.insert(s.seq_id);
    member_groups.insert(s.GroupKey());
  }
  for (const Sequence& s : pool.members) {
    if (!train_ids.contains(s.seq_id)) {
      return absl::FailedPreconditionError(
          absl::StrCat("member ", s.seq_id, " is not in the training split"));
    }
  }
  absl::flat_hash_set<absl::string_view> nonmember_ids;
  for (const Sequence& s : pool.nonmembers) nonmember_ids.insert(s.seq_id);
  for (const auto* side : {&pool.nonmembers, &pool.population}) {
    for (const Sequence& s : *side) {
      if (train_ids.contains(s.seq_id)) {
        return absl::FailedPreconditionError(absl::StrCat(
            "sequence ", s.seq_id, " is in train and in a non-member split"));
      }
      if (member_groups.contains(s.GroupKey())) {
        return absl::FailedPreconditionError(absl::StrCat(
            "group ", s.GroupKey(), " straddles the member/non-member divide"));
      }
    }
  }
  for (const Sequence& s : pool.population) {
    if (nonmember_ids.contains(s.seq_id)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "sequence ", s.seq_id, " is in both nonmember and population"));
    }
  }
  return absl::OkStatus();
}

}  // namespace mlmia
