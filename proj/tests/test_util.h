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

#ifndef MLMIA_TESTS_TEST_UTIL_H_
#define MLMIA_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "mlmia/corpus.h"
#include "mlmia/vocabulary.h"

namespace mlmia::testing {

// Builds a corpus from whitespace-separated texts, growing a fresh
// vocabulary in order of first appearance.
inline Corpus MakeCorpus(const std::vector<std::string>& texts,
                         const std::string& prefix = "s") {
  auto vocab = std::make_shared<Vocabulary>();
  Corpus corpus;
  corpus.name = prefix;
  int i = 0;
  for (const std::string& text : texts) {
    Sequence seq;
    seq.seq_id = absl::StrCat(prefix, i++);
    for (absl::string_view w : absl::StrSplit(text, ' ', absl::SkipEmpty())) {
      seq.tokens.push_back({std::string(w), vocab->Add(w)});
    }
    corpus.sequences.push_back(std::move(seq));
  }
  corpus.vocab = std::move(vocab);
  return corpus;
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            absl::StrCat("mlmia_", info->test_suite_name(), "_", info->name(),
                         "_", ::getpid());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mlmia::testing

#endif  // MLMIA_TESTS_TEST_UTIL_H_
