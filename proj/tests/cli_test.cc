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

#include "cli.h"

#include <sstream>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "mlmia/io.h"
#include "test_util.h"

namespace mlmia::cli {
namespace {

using ::testing::HasSubstr;
using json = nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Read(const std::string& path) {
  absl::StatusOr<std::string> data = ReadFile(path);
  EXPECT_TRUE(data.ok()) << data.status();
  return data.ok() ? *data : "";
}

class CliPipelineTest : public ::testing::Test {
 protected:
  // gen-corpus (target domain, split) -> reference corpus -> two models ->
  // two score files.
  void SetUp() override {
    const std::string data = dir_.File("data");
    Expect(Invoke({"gen-corpus", "--num-sequences", "240", "--max-group-size",
                   "2", "--split", "--train-fraction", "0.3333",
                   "--member-fraction", "0.1667", "--nonmember-fraction",
                   "0.1667", "--population-fraction", "0.3333", "--seed", "4",
                   "--out", data}));
    Expect(Invoke({"gen-corpus", "--num-sequences", "100", "--seed", "9",
                   "--chain-seed", "4", "--prefix", "ref", "--out",
                   dir_.File("ref")}));
    Expect(Invoke({"train-mlm", "--corpus", data + "/train.jsonl", "--name",
                   "target", "--out", dir_.File("target.json")}));
    Expect(Invoke({"train-mlm", "--corpus", dir_.File("ref/corpus.jsonl"),
                   "--vocab-from", data + "/vocab.json", "--name", "reference",
                   "--out", dir_.File("reference.json")}));
    for (const char* model : {"target", "reference"}) {
      Expect(Invoke({"score", "--model",
                     dir_.File(absl::StrCat(model, ".json")), "--corpus",
                     data + "/members.jsonl", data + "/nonmembers.jsonl",
                     data + "/population.jsonl", "--label", model, "--out",
                     dir_.File(absl::StrCat(model, ".jsonl"))}));
    }
  }

  static void Expect(const Result& r) { ASSERT_EQ(r.code, kExitOk) << r.err; }

  std::vector<std::string> AttackArgs(const std::string& out) const {
    return {"attack",
            "--target",
            dir_.File("target.jsonl"),
            "--reference",
            dir_.File("reference.jsonl"),
            "--pool",
            dir_.File("data/pool.json"),
            "--alpha",
            "0.10",
            "--kind",
            "lr",
            "--out",
            out};
  }

  testing::TempDir dir_;
};

TEST_F(CliPipelineTest, EndToEndAttack) {
  const std::string report_path = dir_.File("attack/report.json");
  const Result r = Invoke(AttackArgs(report_path));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = json::parse(Read(report_path));
  EXPECT_GT(report["auc"].get<double>(), 0.5);
  EXPECT_EQ(report["level"], "sample");
  EXPECT_EQ(report["counts"]["members"], 40);
  EXPECT_THAT(Read(dir_.File("attack/roc.csv")),
              HasSubstr("threshold,fpr,tpr,precision,recall\n"));
  EXPECT_THAT(Read(dir_.File("attack/outcomes.csv")),
              HasSubstr("seq_id,group_id,kind,statistic"));
  const json manifest = json::parse(Read(report_path + ".manifest.json"));
  EXPECT_EQ(manifest["command"], "attack");
  EXPECT_EQ(manifest["inputs"].size(), 3u);
  EXPECT_EQ(manifest["outputs"].size(), 3u);
  EXPECT_EQ(manifest["outputs"][0]["sha256"], Sha256Hex(Read(report_path)));

  const Result table = Invoke({"report", "--input", report_path});
  ASSERT_EQ(table.code, kExitOk) << table.err;
  EXPECT_THAT(table.out, HasSubstr(report_path));
}

TEST_F(CliPipelineTest, RerunsAreByteIdentical) {
  const std::string a = dir_.File("a/report.json");
  const std::string b = dir_.File("b/report.json");
  ASSERT_EQ(Invoke(AttackArgs(a)).code, kExitOk);
  ASSERT_EQ(Invoke(AttackArgs(b)).code, kExitOk);
  EXPECT_EQ(Read(a), Read(b));
  EXPECT_EQ(Read(dir_.File("a/outcomes.csv")),
            Read(dir_.File("b/outcomes.csv")));
  const std::string first = Read(dir_.File("target.jsonl"));
  ASSERT_EQ(Invoke({"score", "--model", dir_.File("target.json"), "--corpus",
                    dir_.File("data/members.jsonl"),
                    dir_.File("data/nonmembers.jsonl"),
                    dir_.File("data/population.jsonl"), "--label", "target",
                    "--out", dir_.File("target2.jsonl")})
                .code,
            kExitOk);
  EXPECT_EQ(Read(dir_.File("target2.jsonl")), first);
}

TEST_F(CliPipelineTest, ValidateScores) {
  const Result ok =
      Invoke({"validate-scores", "--input", dir_.File("target.jsonl")});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_THAT(ok.out, HasSubstr("0 errors"));

  std::string broken = Read(dir_.File("target.jsonl"));
  broken.insert(broken.find('\n') + 1, "{oops\n");
  ASSERT_TRUE(WriteFileAtomic(dir_.File("broken.jsonl"), broken).ok());
  const Result bad =
      Invoke({"validate-scores", "--input", dir_.File("broken.jsonl")});
  EXPECT_EQ(bad.code, kExitDataError);
  EXPECT_THAT(bad.out, HasSubstr("line 2: malformed"));

  const std::string k_mismatch =
      R"({"seq_id":"x","model":"target","mode":"patterns","T":20,"K":3,)"
      R"("pattern_losses":[1,2]})"
      "\n";
  ASSERT_TRUE(WriteFileAtomic(dir_.File("k.jsonl"), k_mismatch).ok());
  const Result k = Invoke({"validate-scores", "--input", dir_.File("k.jsonl")});
  EXPECT_EQ(k.code, kExitDataError);
  EXPECT_THAT(k.out, HasSubstr("k-mismatch"));
}

TEST_F(CliPipelineTest, FeaturesAndStudy) {
  const Result features = Invoke(
      {"features", "--corpus", dir_.File("data/members.jsonl"), "--train",
       dir_.File("data/train.jsonl"), "--out", dir_.File("features.csv")});
  ASSERT_EQ(features.code, kExitOk) << features.err;
  EXPECT_THAT(Read(dir_.File("features.csv")),
              HasSubstr("seq_id,digits,seq_len,non_alnum,"));
  ASSERT_EQ(Invoke(AttackArgs(dir_.File("attack/report.json"))).code, kExitOk);
  const Result study =
      Invoke({"study", "--members", dir_.File("data/members.jsonl"), "--train",
              dir_.File("data/train.jsonl"), "--outcomes",
              dir_.File("attack/outcomes.csv"), "--sets", "C,C&D", "--out",
              dir_.File("study.csv")});
  if (study.code == kExitOk) {
    EXPECT_THAT(Read(dir_.File("study.csv")),
                HasSubstr("feature_set,train_precision"));
  } else {
    // Every member exposed or none: the predictor cannot be fit.
    EXPECT_EQ(study.code, kExitDataError);
    EXPECT_THAT(study.err, HasSubstr("single-class"));
  }
}

TEST(CliTest, UsageErrorsExitTwo) {
  const Result unknown = Invoke({"attack", "--bogus", "1"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_THAT(unknown.err, HasSubstr("--target"));
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"score", "--model", "m", "--corpus", "c", "--mode", "x",
                    "--out", "o"})
                .code,
            kExitUsage);
}

TEST(CliTest, HelpAndVersion) {
  const Result help = Invoke({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_THAT(help.out, HasSubstr("gen-corpus"));
  const Result version = Invoke({"--version"});
  EXPECT_EQ(version.code, kExitOk);
  EXPECT_EQ(version.out, std::string(kToolVersion) + "\n");
}

TEST(CliTest, MissingInputsExitOne) {
  testing::TempDir dir;
  const Result r =
      Invoke({"validate-scores", "--input", dir.File("absent.jsonl")});
  EXPECT_EQ(r.code, kExitDataError);
  EXPECT_THAT(r.err, HasSubstr("error:"));
  EXPECT_EQ(Invoke({"train-mlm", "--corpus", dir.File("absent.jsonl"), "--out",
                    dir.File("m.json")})
                .code,
            kExitDataError);
}

TEST(CliTest, SmallBenchmark) {
  testing::TempDir dir;
  const std::string config = dir.File("bench.json");
  ASSERT_TRUE(WriteFileAtomic(config, R"({"resamples": 2})").ok());
  const Result r = Invoke({"benchmark", "--config", config, "--seeds", "1..2",
                           "--out", dir.File("bench")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = json::parse(Read(dir.File("bench/benchmark.json")));
  EXPECT_EQ(report["runs"].size(), 2u);
  EXPECT_EQ(report["config"]["seeds"], json::array({1, 2}));
  EXPECT_THAT(Read(dir.File("bench/overview.csv")), HasSubstr("AUC,"));
  EXPECT_TRUE(json::parse(Read(dir.File("bench/manifest.json"))).is_object());
  const Result bad = Invoke({"benchmark", "--config", config, "--seeds", "3..1",
                             "--out", dir.File("bench2")});
  EXPECT_NE(bad.code, kExitOk);
}

}  // namespace
}  // namespace mlmia::cli
