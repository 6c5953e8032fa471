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

#include "mlmia/scorer.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "mlmia/status_macros.h"

namespace mlmia {

absl::Status CheckMaskQuery(const Sequence& seq, const MaskPattern& masked,
                            int position) {
  if (!masked.Contains(position)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "position ", position, " is not in the mask set of ", seq.seq_id));
  }
  if (masked.positions.front() < 0 || masked.positions.back() >= seq.length()) {
    return absl::OutOfRangeError(absl::StrCat(
        "mask positions outside [0, ", seq.length(), ") for ", seq.seq_id));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> UniformScorer::CondLogProb(const Sequence& seq,
                                                  const MaskPattern& masked,
                                                  int position) const {
  MLMIA_RETURN_IF_ERROR(CheckMaskQuery(seq, masked, position));
  return -std::log(static_cast<double>(vocab_size_));
}

}  // namespace mlmia
