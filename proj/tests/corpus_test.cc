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

#include "mlmia/corpus.h"

#include <algorithm>
#include <cctype>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "mlmia/synth.h"
#include "mlmia/vocabulary.h"
#include "test_util.h"

namespace mlmia {
namespace {

using ::testing::HasSubstr;

TEST(VocabularyTest, ReservesMaskAndUnk) {
  Vocabulary vocab;
  EXPECT_EQ(vocab.size(), 2);
  EXPECT_EQ(vocab.Lookup(kMaskSurface), kMaskId);
  EXPECT_EQ(vocab.Surface(kUnkId), kUnkSurface);
  EXPECT_EQ(vocab.Add("bp"), 2);
  EXPECT_EQ(vocab.Add("bp"), 2);
  EXPECT_EQ(vocab.Lookup("absent"), kUnkId);
}

TEST(VocabularyTest, SerializationRoundTrips) {
  Vocabulary vocab;
  vocab.Add("bp");
  vocab.Add("120/80");
  const absl::StatusOr<Vocabulary> parsed =
      ParseVocabulary(SerializeVocabulary(vocab));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, vocab);
  EXPECT_FALSE(ParseVocabulary(R"({"format":"mlmia-vocab-v1",)"
                               R"("surfaces":["a","[UNK]"]})")
                   .ok());
}

TEST(TokenizeTest, UnknownSurfacesMapToUnkButSurvive) {
  Vocabulary vocab;
  vocab.Add("bp");
  const absl::StatusOr<Sequence> seq = Tokenize("BP 120/80 **", vocab);
  ASSERT_TRUE(seq.ok());
  ASSERT_EQ(seq->length(), 3);
  EXPECT_EQ(seq->tokens[0].id, vocab.Lookup("bp"));
  EXPECT_EQ(seq->tokens[1].id, kUnkId);
  EXPECT_EQ(seq->tokens[2].id, kUnkId);
  EXPECT_EQ(seq->tokens[1].surface, "120/80");
  EXPECT_EQ(seq->tokens[2].surface, "**");
}

TEST(TokenizeTest, RepeatedTokens) {
  Vocabulary vocab;
  vocab.Add("a");
  const absl::StatusOr<Sequence> seq = Tokenize("a a a", vocab);
  ASSERT_TRUE(seq.ok());
  EXPECT_EQ(seq->length(), 3);
  for (const Token& t : seq->tokens) EXPECT_EQ(t.id, vocab.Lookup("a"));
}

TEST(TokenizeTest, EmptyTextIsDegenerate) {
  Vocabulary vocab;
  for (const char* text : {"", "   \t\n"}) {
    const absl::StatusOr<Sequence> seq = Tokenize(text, vocab);
    EXPECT_EQ(seq.status().code(), absl::StatusCode::kInvalidArgument);
    EXPECT_THAT(seq.status().message(), HasSubstr("degenerate"));
  }
}

TEST(SynthCorpusTest, DeterministicGivenSeed) {
  SynthConfig config;
  config.seed = 7;
  config.num_sequences = 50;
  const absl::StatusOr<Corpus> a = SynthCorpus(config);
  const absl::StatusOr<Corpus> b = SynthCorpus(config);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(SerializeCorpus(*a), SerializeCorpus(*b));
  config.seed = 8;
  EXPECT_NE(SerializeCorpus(*SynthCorpus(config)), SerializeCorpus(*a));
}

TEST(SynthCorpusTest, RejectsBadConfigs) {
  SynthConfig config;
  config.num_sequences = 0;
  EXPECT_EQ(SynthCorpus(config).status().code(),
            absl::StatusCode::kInvalidArgument);
  config = SynthConfig();
  config.vocab_size = 3;
  EXPECT_FALSE(SynthCorpus(config).ok());
  config = SynthConfig();
  config.min_length = 1;
  EXPECT_FALSE(SynthCorpus(config).ok());
  config = SynthConfig();
  config.max_length = 513;
  EXPECT_FALSE(SynthCorpus(config).ok());
  config = SynthConfig();
  config.min_length = 30;
  config.max_length = 20;
  EXPECT_FALSE(SynthCorpus(config).ok());
}

TEST(SynthCorpusTest, CountsAndIdRange) {
  SynthConfig config;
  config.vocab_size = 50;
  config.num_sequences = 200;
  const absl::StatusOr<Corpus> corpus = SynthCorpus(config);
  ASSERT_TRUE(corpus.ok());
  EXPECT_EQ(corpus->size(), 200);
  EXPECT_EQ(corpus->vocab->size(), 52);
  EXPECT_TRUE(ValidateCorpus(*corpus).ok());
  for (const Sequence& s : corpus->sequences) {
    EXPECT_GE(s.length(), config.min_length);
    EXPECT_LE(s.length(), config.max_length);
    for (const Token& t : s.tokens) {
      EXPECT_GE(t.id, 2);
      EXPECT_LT(t.id, 52);
    }
  }
}

TEST(SynthCorpusTest, SurfacesCarryDigitsAndPunctuation) {
  const absl::StatusOr<Corpus> corpus = SynthCorpus(SynthConfig());
  ASSERT_TRUE(corpus.ok());
  int digit_tokens = 0;
  int punct_tokens = 0;
  for (const Sequence& s : corpus->sequences) {
    for (const Token& t : s.tokens) {
      digit_tokens +=
          std::any_of(t.surface.begin(), t.surface.end(),
                      [](unsigned char c) { return std::isdigit(c); });
      punct_tokens +=
          std::any_of(t.surface.begin(), t.surface.end(),
                      [](unsigned char c) { return std::ispunct(c); });
    }
  }
  EXPECT_GT(digit_tokens, 0);
  EXPECT_GT(punct_tokens, 0);
}

TEST(SynthCorpusTest, GroupsAreConsecutiveBlocks) {
  SynthConfig config;
  config.num_sequences = 100;
  config.min_group_size = 2;
  config.max_group_size = 4;
  const absl::StatusOr<Corpus> corpus = SynthCorpus(config);
  ASSERT_TRUE(corpus.ok());
  std::vector<std::string> order;
  for (const Sequence& s : corpus->sequences) {
    ASSERT_TRUE(s.group_id.has_value());
    if (order.empty() || order.back() != *s.group_id) {
      EXPECT_EQ(std::count(order.begin(), order.end(), *s.group_id), 0);
      order.push_back(*s.group_id);
    }
  }
  EXPECT_GE(order.size(), 25u);
  EXPECT_LE(order.size(), 50u);
}

TEST(PrependNameTest, NamesGoFirst) {
  Corpus corpus = testing::MakeCorpus({"bp high"});
  auto vocab = std::make_shared<Vocabulary>(*corpus.vocab);
  const std::vector<Token> name = {{"john", vocab->Add("john")},
                                   {"doe", vocab->Add("doe")}};
  const absl::StatusOr<Sequence> named = PrependName(corpus.sequences[0], name);
  ASSERT_TRUE(named.ok());
  ASSERT_EQ(named->length(), 4);
  std::vector<std::string> surfaces;
  for (const Token& t : named->tokens) surfaces.push_back(t.surface);
  EXPECT_EQ(surfaces, (std::vector<std::string>{"john", "doe", "bp", "high"}));
  EXPECT_NE(named->seq_id, corpus.sequences[0].seq_id);
  EXPECT_EQ(PrependName(corpus.sequences[0], name)->seq_id, named->seq_id);
}

TEST(PrependNameTest, EmptyNameIsRejected) {
  const Corpus corpus = testing::MakeCorpus({"bp high"});
  EXPECT_EQ(PrependName(corpus.sequences[0], {}).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PrependNameTest, WholeCorpusShiftsByTwo) {
  Corpus corpus = testing::MakeCorpus({"a b c", "b c", "c a b d"});
  auto vocab = std::make_shared<Vocabulary>(*corpus.vocab);
  const int before = vocab->size();
  const std::vector<std::pair<std::string, std::string>> names = {
      {"ann", "lee"}, {"bo", "lee"}, {"ann", "kim"}};
  for (size_t i = 0; i < corpus.sequences.size(); ++i) {
    const std::vector<Token> name = {
        {names[i].first, vocab->Add(names[i].first)},
        {names[i].second, vocab->Add(names[i].second)}};
    const int t = corpus.sequences[i].length();
    absl::StatusOr<Sequence> named = PrependName(corpus.sequences[i], name);
    ASSERT_TRUE(named.ok());
    EXPECT_EQ(named->length(), t + 2);
  }
  EXPECT_EQ(vocab->size(), before + 4);  // ann, lee, bo, kim
}

TEST(CorpusFileTest, RoundTrip) {
  SynthConfig config;
  config.num_sequences = 20;
  config.max_group_size = 3;
  const absl::StatusOr<Corpus> corpus = SynthCorpus(config);
  ASSERT_TRUE(corpus.ok());
  Vocabulary vocab = *corpus->vocab;
  const absl::StatusOr<std::vector<Sequence>> parsed =
      ParseCorpus(SerializeCorpus(*corpus), vocab, /*grow_vocab=*/false);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, corpus->sequences);
}

TEST(CorpusFileTest, ErrorsCarryLineNumbers) {
  Vocabulary vocab;
  const std::string contents =
      "{\"seq_id\":\"a\",\"group_id\":null,\"tokens\":[\"x\"]}\n"
      "{\"seq_id\":\"b\",\"tokens\":[\"y\"]\n";
  const absl::StatusOr<std::vector<Sequence>> parsed =
      ParseCorpus(contents, vocab, true);
  EXPECT_FALSE(parsed.ok());
  EXPECT_THAT(parsed.status().message(), HasSubstr("line 2"));
  const std::string dup =
      "{\"seq_id\":\"a\",\"tokens\":[\"x\"]}\n"
      "{\"seq_id\":\"a\",\"tokens\":[\"y\"]}\n";
  EXPECT_THAT(ParseCorpus(dup, vocab, true).status().message(),
              HasSubstr("duplicate"));
}

TEST(CorpusFileTest, UnknownSurfacesBecomeUnkWithoutGrowth) {
  Vocabulary vocab;
  vocab.Add("x");
  const absl::StatusOr<std::vector<Sequence>> parsed =
      ParseCorpus("{\"seq_id\":\"a\",\"tokens\":[\"x\",\"zz\",\"[MASK]\"]}\n",
                  vocab, false);
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ((*parsed)[0].tokens[0].id, 2);
  EXPECT_EQ((*parsed)[0].tokens[1].id, kUnkId);
  EXPECT_EQ((*parsed)[0].tokens[2].id, kUnkId);
  EXPECT_EQ(vocab.size(), 3);
}

}  // namespace
}  // namespace mlmia
