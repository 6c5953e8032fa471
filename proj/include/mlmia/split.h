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

#ifndef MLMIA_SPLIT_H_
#define MLMIA_SPLIT_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "mlmia/corpus.h"

namespace mlmia {

// Fractions of the source corpus. `member_eval` is drawn from inside the
// training split, so only train + nonmember + population must be <= 1.
struct SplitFractions {
  double train = 0.5;
  double member_eval = 0.2;
  double nonmember = 0.25;
  double population = 0.25;
};

struct SplitResult {
  Corpus train;
  TargetPool pool;
};

// Assigns whole groups to train / nonmember / population in a seeded order,
// then draws member_eval from the training groups. Partition sizes are exact
// (rounded fraction * corpus size) or the call fails.
absl::StatusOr<SplitResult> SplitPool(const Corpus& corpus,
                                      const SplitFractions& fractions,
                                      uint64_t seed);

// Draws whole groups from `train` until exactly `count` sequences are chosen.
absl::StatusOr<std::vector<Sequence>> SampleMembers(const Corpus& train,
                                                    int count, uint64_t seed);

// member_eval is a subset of train; train, nonmember and population are
// pairwise disjoint by seq_id; no group appears on both sides of the
// member/non-member divide.
absl::Status ValidateSplit(const Corpus& train, const TargetPool& pool);

}  // namespace mlmia

#endif  // MLMIA_SPLIT_H_
