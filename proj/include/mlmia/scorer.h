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

#ifndef MLMIA_SCORER_H_
#define MLMIA_SCORER_H_

#include <algorithm>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/corpus.h"

namespace mlmia {

// A set of masked positions, sorted and distinct.
struct MaskPattern {
  std::vector<int> positions;

  bool Contains(int position) const {
    return std::binary_search(positions.begin(), positions.end(), position);
  }
  int size() const { return static_cast<int>(positions.size()); }
};

// Anything that yields conditional token log-probabilities
// log p(s_i | s with the positions of `masked` hidden).
class MaskedScorer {
 public:
  virtual ~MaskedScorer() = default;

  virtual absl::string_view name() const = 0;
  virtual int vocab_size() const = 0;

  // Requires `position` in `masked` and every position < seq.length().
  virtual absl::StatusOr<double> CondLogProb(const Sequence& seq,
                                             const MaskPattern& masked,
                                             int position) const = 0;
};

// Shared argument checks for CondLogProb implementations.
absl::Status CheckMaskQuery(const Sequence& seq, const MaskPattern& masked,
                            int position);

// Assigns every token probability 1/V regardless of context.
class UniformScorer final : public MaskedScorer {
 public:
  UniformScorer(std::string name, int vocab_size)
      : name_(std::move(name)), vocab_size_(vocab_size) {}

  absl::string_view name() const override { return name_; }
  int vocab_size() const override { return vocab_size_; }
  absl::StatusOr<double> CondLogProb(const Sequence& seq,
                                     const MaskPattern& masked,
                                     int position) const override;

 private:
  std::string name_;
  int vocab_size_;
};

}  // namespace mlmia

#endif  // MLMIA_SCORER_H_
