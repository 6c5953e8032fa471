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

#ifndef MLMIA_COMBINATORICS_H_
#define MLMIA_COMBINATORICS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mlmia/rng.h"

namespace mlmia {

// C(n, k), or nullopt when the value does not fit in 64 bits.
std::optional<uint64_t> Binomial(int n, int k);

// The combination of rank `rank` (0-based) among all size-k subsets of
// {0, ..., n-1} in lexicographic order. Requires rank < C(n, k).
std::vector<int> UnrankCombination(uint64_t rank, int n, int k);

// Inverse of UnrankCombination.
uint64_t RankCombination(const std::vector<int>& combination, int n);

// Advances `combination` (sorted, size k, values < n) to its lexicographic
// successor. Returns false after the last combination.
bool NextCombination(std::vector<int>& combination, int n);

// `count` distinct values drawn uniformly without replacement from
// [0, population), returned in ascending order. Uses Floyd's algorithm, so the
// cost is O(count log count) regardless of `population`.
std::vector<uint64_t> SampleDistinct(uint64_t population, uint64_t count,
                                     Rng& rng);

}  // namespace mlmia

#endif  // MLMIA_COMBINATORICS_H_
