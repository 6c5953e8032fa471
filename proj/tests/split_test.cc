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

#include "mlmia/split.h"

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mlmia/corpus.h"
#include "mlmia/rng.h"
#include "mlmia/synth.h"

namespace mlmia {
namespace {

using ::testing::HasSubstr;

absl::flat_hash_set<std::string> Ids(const std::vector<Sequence>& seqs) {
  absl::flat_hash_set<std::string> ids;
  for (const Sequence& s : seqs) ids.insert(s.seq_id);
  return ids;
}

bool Disjoint(const absl::flat_hash_set<std::string>& a,
              const absl::flat_hash_set<std::string>& b) {
  for (const std::string& x : a) {
    if (b.contains(x)) return false;
  }
  return true;
}

Corpus Synth(int n, int min_group, int max_group, uint64_t seed) {
  SynthConfig config;
  config.num_sequences = n;
  config.min_group_size = min_group;
  config.max_group_size = max_group;
  config.seed = seed;
  config.min_length = 5;
  config.max_length = 10;
  return *SynthCorpus(config);
}

TEST(SplitPoolTest, HundredSequenceExample) {
  const Corpus corpus = Synth(100, 1, 1, 3);
  const absl::StatusOr<SplitResult> split =
      SplitPool(corpus, SplitFractions{0.5, 0.2, 0.25, 0.25}, 11);
  ASSERT_TRUE(split.ok()) << split.status();
  EXPECT_EQ(split->train.size(), 50);
  EXPECT_EQ(split->pool.members.size(), 20u);
  EXPECT_EQ(split->pool.nonmembers.size(), 25u);
  EXPECT_EQ(split->pool.population.size(), 25u);
  const auto train = Ids(split->train.sequences);
  for (const std::string& id : Ids(split->pool.members)) {
    EXPECT_TRUE(train.contains(id));
  }
  EXPECT_TRUE(Disjoint(train, Ids(split->pool.nonmembers)));
  EXPECT_TRUE(Disjoint(train, Ids(split->pool.population)));
  EXPECT_TRUE(
      Disjoint(Ids(split->pool.nonmembers), Ids(split->pool.population)));
}

TEST(SplitPoolTest, DeterministicGivenSeed) {
  const Corpus corpus = Synth(120, 1, 3, 5);
  const SplitFractions f{0.4, 0.2, 0.3, 0.3};
  const absl::StatusOr<SplitResult> a = SplitPool(corpus, f, 9);
  const absl::StatusOr<SplitResult> b = SplitPool(corpus, f, 9);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(SerializeCorpus(a->train), SerializeCorpus(b->train));
  EXPECT_EQ(a->pool.members, b->pool.members);
  EXPECT_EQ(a->pool.nonmembers, b->pool.nonmembers);
  EXPECT_EQ(a->pool.population, b->pool.population);
}

TEST(SplitPoolTest, StraddlingGroupIsRejected) {
  const Corpus corpus = Synth(40, 2, 2, 1);
  const absl::StatusOr<SplitResult> split =
      SplitPool(corpus, SplitFractions{0.5, 0.2, 0.25, 0.25}, 2);
  ASSERT_TRUE(split.ok()) << split.status();
  TargetPool pool = split->pool;
  // Move one training note of some patient to the nonmember side.
  Sequence moved = split->train.sequences.front();
  moved.seq_id = "copy-of-" + moved.seq_id;
  pool.nonmembers.push_back(moved);
  const absl::Status status = ValidateSplit(split->train, pool);
  EXPECT_EQ(status.code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(status.message(), HasSubstr("straddles"));
}

TEST(SplitPoolTest, TooFewGroups) {
  // Ten patients of ten notes each cannot fill a 25-sequence bin exactly.
  const Corpus corpus = Synth(100, 10, 10, 1);
  const absl::StatusOr<SplitResult> split =
      SplitPool(corpus, SplitFractions{0.5, 0.2, 0.25, 0.25}, 2);
  EXPECT_EQ(split.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(split.status().message(), HasSubstr("too few groups"));
}

TEST(SplitPoolTest, RejectsBadFractions) {
  const Corpus corpus = Synth(20, 1, 1, 1);
  EXPECT_FALSE(SplitPool(corpus, SplitFractions{0.5, 0.2, 0.4, 0.2}, 1).ok());
  EXPECT_FALSE(SplitPool(corpus, SplitFractions{0.2, 0.3, 0.2, 0.2}, 1).ok());
  EXPECT_FALSE(SplitPool(corpus, SplitFractions{-0.1, 0, 0.2, 0.2}, 1).ok());
}

TEST(SplitPoolTest, DisjointAndGroupAtomicAcrossRandomConfigs) {
  Rng rng(2024);
  int completed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.UniformInt(60, 200));
    const int max_group = static_cast<int>(rng.UniformInt(1, 4));
    const Corpus corpus = Synth(n, 1, max_group, rng.NextU64());
    const double train = 0.2 + 0.3 * rng.UniformDouble();
    const double nonmember = 0.1 + 0.2 * rng.UniformDouble();
    const double population = (1.0 - train - nonmember) * rng.UniformDouble();
    const SplitFractions f{train, train * rng.UniformDouble(), nonmember,
                           population};
    const absl::StatusOr<SplitResult> split =
        SplitPool(corpus, f, rng.NextU64());
    if (!split.ok()) {
      EXPECT_THAT(split.status().message(), HasSubstr("too few groups"));
      continue;
    }
    ++completed;
    const auto train_ids = Ids(split->train.sequences);
    ASSERT_TRUE(Disjoint(train_ids, Ids(split->pool.nonmembers)));
    ASSERT_TRUE(Disjoint(train_ids, Ids(split->pool.population)));
    ASSERT_TRUE(
        Disjoint(Ids(split->pool.nonmembers), Ids(split->pool.population)));
    absl::flat_hash_set<std::string> train_groups;
    for (const Sequence& s : split->train.sequences) {
      train_groups.insert(s.GroupKey());
    }
    for (const auto* side :
         {&split->pool.nonmembers, &split->pool.population}) {
      for (const Sequence& s : *side) {
        ASSERT_FALSE(train_groups.contains(s.GroupKey()));
      }
    }
    for (const Sequence& s : split->pool.members) {
      ASSERT_TRUE(train_ids.contains(s.seq_id));
    }
  }
  EXPECT_GT(completed, 80);
}

TEST(SampleMembersTest, GroupAtomicDraw) {
  const Corpus corpus = Synth(60, 1, 3, 4);
  const absl::StatusOr<std::vector<Sequence>> members =
      SampleMembers(corpus, 20, 5);
  ASSERT_TRUE(members.ok()) << members.status();
  EXPECT_EQ(members->size(), 20u);
  absl::flat_hash_set<std::string> chosen;
  for (const Sequence& s : *members) chosen.insert(s.GroupKey());
  for (const Sequence& s : corpus.sequences) {
    if (!chosen.contains(s.GroupKey())) continue;
    bool found = false;
    for (const Sequence& m : *members) found |= m.seq_id == s.seq_id;
    EXPECT_TRUE(found) << "partial group " << s.GroupKey();
  }
  EXPECT_FALSE(SampleMembers(corpus, 61, 5).ok());
}

}  // namespace
}  // namespace mlmia
