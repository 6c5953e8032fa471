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

#ifndef MLMIA_TOOLS_CLI_H_
#define MLMIA_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace mlmia::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

inline constexpr char kToolVersion[] = "0.1.0";

// Runs one command. `args` excludes the program name. Returns the exit code:
// 0 on success, 2 on usage errors, 1 on data or contract errors.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int Dispatch(int argc, char** argv);

}  // namespace mlmia::cli

#endif  // MLMIA_TOOLS_CLI_H_
