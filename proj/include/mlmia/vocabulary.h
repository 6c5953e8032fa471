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

#ifndef MLMIA_VOCABULARY_H_
#define MLMIA_VOCABULARY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace mlmia {

using TokenId = int32_t;

inline constexpr TokenId kMaskId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr absl::string_view kMaskSurface = "[MASK]";
inline constexpr absl::string_view kUnkSurface = "[UNK]";

// Surface -> id map. Ids are dense and assigned in insertion order; ids 0 and
// 1 are always MASK and UNK.
class Vocabulary {
 public:
  Vocabulary();

  // Returns the id of `surface`, inserting it if absent.
  TokenId Add(absl::string_view surface);

  // Id of `surface`, or kUnkId if it is not in the vocabulary.
  TokenId Lookup(absl::string_view surface) const;
  bool Contains(absl::string_view surface) const;

  const std::string& Surface(TokenId id) const { return surfaces_[id]; }
  int size() const { return static_cast<int>(surfaces_.size()); }
  const std::vector<std::string>& surfaces() const { return surfaces_; }

  bool operator==(const Vocabulary& other) const {
    return surfaces_ == other.surfaces_;
  }

 private:
  std::vector<std::string> surfaces_;
  absl::flat_hash_map<std::string, TokenId> ids_;
};

// {"format": "mlmia-vocab-v1", "surfaces": [...]}, ids in array order.
std::string SerializeVocabulary(const Vocabulary& vocab);
// Requires the reserved surfaces at their fixed ids and no duplicates.
absl::StatusOr<Vocabulary> ParseVocabulary(absl::string_view contents);

}  // namespace mlmia

#endif  // MLMIA_VOCABULARY_H_
