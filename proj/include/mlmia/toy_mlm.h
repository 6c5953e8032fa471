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

#ifndef MLMIA_TOY_MLM_H_
#define MLMIA_TOY_MLM_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/corpus.h"
#include "mlmia/scorer.h"

namespace mlmia {

struct ToyMlmOptions {
  int window = 2;
  double smoothing = 0.1;
  // Whether UNK is a predictable outcome. When false the smoothing support is
  // the content vocabulary only and UNK centers are skipped during training.
  bool unk_in_support = true;
};

// Up to `window` tokens on each side of the center, nearest last on the left
// and nearest first on the right. Off-sequence slots hold kBoundaryId and
// masked neighbors hold kMaskId.
using ContextKey = std::vector<TokenId>;

inline constexpr TokenId kBoundaryId = -1;

// Count-based masked language model: additive smoothing over (context, token)
// counts with a single backoff to the smoothed unigram when the context was
// never observed.
class ToyMlm final : public MaskedScorer {
 public:
  static absl::StatusOr<ToyMlm> Train(const Corpus& train,
                                      const ToyMlmOptions& options,
                                      std::string name = "toy-mlm");

  absl::string_view name() const override { return name_; }
  int vocab_size() const override { return vocab_->size(); }
  absl::StatusOr<double> CondLogProb(const Sequence& seq,
                                     const MaskPattern& masked,
                                     int position) const override;

  const ToyMlmOptions& options() const { return options_; }
  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> shared_vocab() const { return vocab_; }

  // Number of outcomes the smoothing mass is spread over.
  int support_size() const;
  bool InSupport(TokenId id) const;
  // Every id in the support, ascending.
  std::vector<TokenId> Support() const;

  ContextKey BuildContext(const Sequence& seq, const MaskPattern& masked,
                          int position) const;

  // p(token | context); falls back to the unigram when the context is unseen.
  // Requires InSupport(token).
  double Probability(const ContextKey& context, TokenId token) const;

  int64_t Count(const ContextKey& context, TokenId token) const;
  int64_t Total(const ContextKey& context) const;
  int64_t UnigramCount(TokenId token) const { return unigram_[token]; }
  int64_t unigram_total() const { return unigram_total_; }
  int64_t max_context_total() const { return max_context_total_; }
  size_t num_contexts() const { return contexts_.size(); }

  // Canonical JSON with sorted contexts; equal models serialize identically.
  std::string Serialize() const;
  static absl::StatusOr<ToyMlm> Parse(absl::string_view contents);

 private:
  struct ContextStats {
    int64_t total = 0;
    absl::flat_hash_map<TokenId, int64_t> counts;
  };

  ToyMlm() = default;
  void Observe(const ContextKey& context, TokenId token, int64_t count);

  std::string name_;
  ToyMlmOptions options_;
  std::shared_ptr<const Vocabulary> vocab_;
  absl::flat_hash_map<ContextKey, ContextStats> contexts_;
  std::vector<int64_t> unigram_;
  int64_t unigram_total_ = 0;
  int64_t max_context_total_ = 0;
};

}  // namespace mlmia

#endif  // MLMIA_TOY_MLM_H_
