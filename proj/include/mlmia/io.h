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

#ifndef MLMIA_IO_H_
#define MLMIA_IO_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace mlmia {

absl::StatusOr<std::string> ReadFile(const std::string& path);

// Writes to a temporary sibling and renames it over `path`, so readers never
// observe a partially written file.
absl::Status WriteFileAtomic(const std::string& path, absl::string_view data);

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(absl::string_view data);

// 17 significant digits, enough to round-trip any double.
std::string FormatDouble(double value);

// RFC 4180 quoting, applied only when the field needs it.
std::string CsvField(absl::string_view field);
// Splits one CSV record, undoing CsvField quoting.
absl::StatusOr<std::vector<std::string>> SplitCsvLine(absl::string_view line);

}  // namespace mlmia

#endif  // MLMIA_IO_H_
