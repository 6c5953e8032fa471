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

#include "mlmia/combinatorics.h"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>

namespace mlmia {

std::optional<uint64_t> Binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact: it equals C(n - k + i, i).
    result =
        result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (result > std::numeric_limits<uint64_t>::max()) return std::nullopt;
  }
  return static_cast<uint64_t>(result);
}

std::vector<int> UnrankCombination(uint64_t rank, int n, int k) {
  std::vector<int> out;
  out.reserve(k);
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int x = next; x < n; ++x) {
      // Number of combinations whose slot-th element is x.
      const uint64_t block = Binomial(n - 1 - x, k - 1 - slot).value();
      if (rank < block) {
        out.push_back(x);
        next = x + 1;
        break;
      }
      rank -= block;
    }
  }
  assert(static_cast<int>(out.size()) == k);
  return out;
}

uint64_t RankCombination(const std::vector<int>& combination, int n) {
  const int k = static_cast<int>(combination.size());
  uint64_t rank = 0;
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int x = next; x < combination[slot]; ++x) {
      rank += Binomial(n - 1 - x, k - 1 - slot).value();
    }
    next = combination[slot] + 1;
  }
  return rank;
}

bool NextCombination(std::vector<int>& combination, int n) {
  const int k = static_cast<int>(combination.size());
  int i = k - 1;
  while (i >= 0 && combination[i] == n - k + i) --i;
  if (i < 0) return false;
  ++combination[i];
  for (int j = i + 1; j < k; ++j) combination[j] = combination[j - 1] + 1;
  return true;
}

std::vector<uint64_t> SampleDistinct(uint64_t population, uint64_t count,
                                     Rng& rng) {
  assert(count <= population);
  std::set<uint64_t> chosen;
  for (uint64_t j = population - count; j < population; ++j) {
    const uint64_t t = rng.Uniform(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace mlmia
