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

#ifndef MLMIA_STATUS_MACROS_H_
#define MLMIA_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define MLMIA_STATUS_CONCAT_INNER_(a, b) a##b
#define MLMIA_STATUS_CONCAT_(a, b) MLMIA_STATUS_CONCAT_INNER_(a, b)

// Returns early from the enclosing function if `expr` is not OK.
#define MLMIA_RETURN_IF_ERROR(expr)                \
  do {                                             \
    const absl::Status _mlmia_status = (expr);     \
    if (!_mlmia_status.ok()) return _mlmia_status; \
  } while (0)

#define MLMIA_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                 \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

// Evaluates `rexpr` (a StatusOr) and assigns its value to `lhs`, or returns
// the error status from the enclosing function.
#define MLMIA_ASSIGN_OR_RETURN(lhs, rexpr) \
  MLMIA_ASSIGN_OR_RETURN_IMPL_(            \
      MLMIA_STATUS_CONCAT_(_mlmia_statusor_, __LINE__), lhs, rexpr)

#endif  // MLMIA_STATUS_MACROS_H_
