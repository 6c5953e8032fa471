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

#include "mlmia/vocabulary.h"

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace mlmia {

Vocabulary::Vocabulary() {
  Add(kMaskSurface);
  Add(kUnkSurface);
}

TokenId Vocabulary::Add(absl::string_view surface) {
  auto [it, inserted] =
      ids_.try_emplace(std::string(surface), static_cast<TokenId>(size()));
  if (inserted) surfaces_.emplace_back(surface);
  return it->second;
}

TokenId Vocabulary::Lookup(absl::string_view surface) const {
  auto it = ids_.find(surface);
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::Contains(absl::string_view surface) const {
  return ids_.contains(surface);
}

std::string SerializeVocabulary(const Vocabulary& vocab) {
  nlohmann::json doc = {{"format", "mlmia-vocab-v1"},
                        {"surfaces", vocab.surfaces()}};
  return doc.dump() + "\n";
}

absl::StatusOr<Vocabulary> ParseVocabulary(absl::string_view contents) {
  const nlohmann::json doc =
      nlohmann::json::parse(contents.begin(), contents.end(), nullptr,
                            /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "mlmia-vocab-v1" ||
      !doc.contains("surfaces") || !doc.at("surfaces").is_array()) {
    return absl::InvalidArgumentError("vocabulary: not a mlmia-vocab-v1 file");
  }
  const nlohmann::json& surfaces = doc.at("surfaces");
  if (surfaces.size() < 2 || surfaces[0] != std::string(kMaskSurface) ||
      surfaces[1] != std::string(kUnkSurface)) {
    return absl::InvalidArgumentError(
        "vocabulary: reserved surfaces missing or out of place");
  }
  Vocabulary vocab;
  for (size_t i = 2; i < surfaces.size(); ++i) {
    if (!surfaces[i].is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("vocabulary: entry ", i, " is not a string"));
    }
    const std::string surface = surfaces[i].get<std::string>();
    if (vocab.Contains(surface)) {
      return absl::InvalidArgumentError(
          absl::StrCat("vocabulary: duplicate surface '", surface, "'"));
    }
    vocab.Add(surface);
  }
  return vocab;
}

}  // namespace mlmia
