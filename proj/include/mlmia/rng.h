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

#ifndef MLMIA_RNG_H_
#define MLMIA_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "absl/strings/string_view.h"

namespace mlmia {

// Expands a root seed into an independent child seed identified by `label`.
// The mapping is a pure function of its arguments, stable across platforms
// and builds, so every consumer of randomness can be seeded without global
// RNG state.
uint64_t DeriveSeed(uint64_t root, absl::string_view label);
uint64_t DeriveSeed(uint64_t root, absl::string_view label, uint64_t index);

// Thin wrapper over std::mt19937_64. The engine is specified bit-exactly by
// the standard; the std distributions are not, so the sampling helpers here
// are implemented directly on top of raw engine output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). Requires bound > 0.
  uint64_t Uniform(uint64_t bound);

  // Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();

  bool Bernoulli(double p) { return UniformDouble() < p; }

  // Index drawn proportionally to non-negative `weights` (sum > 0).
  size_t Categorical(std::span<const double> weights);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(Uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mlmia

#endif  // MLMIA_RNG_H_
