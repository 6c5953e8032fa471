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

#include "mlmia/toy_mlm.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "mlmia/status_macros.h"

namespace mlmia {

using json = nlohmann::json;

absl::StatusOr<ToyMlm> ToyMlm::Train(const Corpus& train,
                                     const ToyMlmOptions& options,
                                     std::string name) {
  if (options.window < 1) {
    return absl::InvalidArgumentError("window must be >= 1");
  }
  if (!(options.smoothing > 0.0) || !std::isfinite(options.smoothing)) {
    return absl::InvalidArgumentError("smoothing must be positive");
  }
  if (train.sequences.empty()) {
    return absl::InvalidArgumentError("cannot train on an empty corpus");
  }
  MLMIA_RETURN_IF_ERROR(ValidateCorpus(train));
  ToyMlm model;
  model.name_ = std::move(name);
  model.options_ = options;
  model.vocab_ = train.vocab;
  model.unigram_.assign(model.vocab_->size(), 0);
  if (model.support_size() < 1) {
    return absl::InvalidArgumentError("vocabulary has no predictable tokens");
  }
  for (const Sequence& seq : train.sequences) {
    for (int i = 0; i < seq.length(); ++i) {
      const TokenId center = seq.tokens[i].id;
      if (!model.InSupport(center)) continue;
      model.Observe(model.BuildContext(seq, MaskPattern{{i}}, i), center, 1);
    }
  }
  return model;
}

void ToyMlm::Observe(const ContextKey& context, TokenId token, int64_t count) {
  ContextStats& stats = contexts_[context];
  stats.total += count;
  stats.counts[token] += count;
  max_context_total_ = std::max(max_context_total_, stats.total);
  unigram_[token] += count;
  unigram_total_ += count;
}

int ToyMlm::support_size() const {
  return vocab_->size() - (options_.unk_in_support ? 1 : 2);
}

bool ToyMlm::InSupport(TokenId id) const {
  if (id >= vocab_->size()) return false;
  return options_.unk_in_support ? id >= kUnkId : id > kUnkId;
}

std::vector<TokenId> ToyMlm::Support() const {
  std::vector<TokenId> out;
  for (TokenId id = 0; id < vocab_->size(); ++id) {
    if (InSupport(id)) out.push_back(id);
  }
  return out;
}

ContextKey ToyMlm::BuildContext(const Sequence& seq, const MaskPattern& masked,
                                int position) const {
  const int w = options_.window;
  ContextKey key;
  key.reserve(2 * w);
  auto slot = [&](int p) -> TokenId {
    if (p < 0 || p >= seq.length()) return kBoundaryId;
    if (masked.Contains(p)) return kMaskId;
    return seq.tokens[p].id;
  };
  for (int p = position - w; p < position; ++p) key.push_back(slot(p));
  for (int p = position + 1; p <= position + w; ++p) key.push_back(slot(p));
  return key;
}

double ToyMlm::Probability(const ContextKey& context, TokenId token) const {
  const double alpha = options_.smoothing;
  const double mass = alpha * support_size();
  auto it = contexts_.find(context);
  if (it == contexts_.end() || it->second.total == 0) {
    return (static_cast<double>(unigram_[token]) + alpha) /
           (static_cast<double>(unigram_total_) + mass);
  }
  auto c = it->second.counts.find(token);
  const double count =
      c == it->second.counts.end() ? 0.0 : static_cast<double>(c->second);
  return (count + alpha) / (static_cast<double>(it->second.total) + mass);
}

int64_t ToyMlm::Count(const ContextKey& context, TokenId token) const {
  auto it = contexts_.find(context);
  if (it == contexts_.end()) return 0;
  auto c = it->second.counts.find(token);
  return c == it->second.counts.end() ? 0 : c->second;
}

int64_t ToyMlm::Total(const ContextKey& context) const {
  auto it = contexts_.find(context);
  return it == contexts_.end() ? 0 : it->second.total;
}

absl::StatusOr<double> ToyMlm::CondLogProb(const Sequence& seq,
                                           const MaskPattern& masked,
                                           int position) const {
  MLMIA_RETURN_IF_ERROR(CheckMaskQuery(seq, masked, position));
  const TokenId token = seq.tokens[position].id;
  if (!InSupport(token)) {
    return absl::InvalidArgumentError(
        absl::StrCat("token id ", token, " at position ", position, " of ",
                     seq.seq_id, " is outside the support of ", name_));
  }
  return std::log(Probability(BuildContext(seq, masked, position), token));
}

std::string ToyMlm::Serialize() const {
  std::vector<const std::pair<const ContextKey, ContextStats>*> entries;
  entries.reserve(contexts_.size());
  for (const auto& entry : contexts_) entries.push_back(&entry);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  json contexts = json::array();
  for (const auto* entry : entries) {
    std::vector<std::pair<TokenId, int64_t>> counts(
        entry->second.counts.begin(), entry->second.counts.end());
    std::sort(counts.begin(), counts.end());
    json c = json::array();
    for (const auto& [token, n] : counts) c.push_back({token, n});
    contexts.push_back({{"k", entry->first}, {"c", std::move(c)}});
  }
  json doc;
  doc["format"] = "mlmia-toy-mlm-v1";
  doc["name"] = name_;
  doc["window"] = options_.window;
  doc["smoothing"] = options_.smoothing;
  doc["unk_in_support"] = options_.unk_in_support;
  doc["vocab"] = vocab_->surfaces();
  doc["contexts"] = std::move(contexts);
  return doc.dump();
}

absl::StatusOr<ToyMlm> ToyMlm::Parse(absl::string_view contents) {
  const json doc = json::parse(contents, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "mlmia-toy-mlm-v1") {
    return absl::InvalidArgumentError("not a toy MLM model file");
  }
  try {
    ToyMlm model;
    model.name_ = doc.at("name").get<std::string>();
    model.options_.window = doc.at("window").get<int>();
    model.options_.smoothing = doc.at("smoothing").get<double>();
    model.options_.unk_in_support = doc.at("unk_in_support").get<bool>();
    const auto surfaces = doc.at("vocab").get<std::vector<std::string>>();
    if (surfaces.size() < 2 || surfaces[0] != kMaskSurface ||
        surfaces[1] != kUnkSurface) {
      return absl::InvalidArgumentError("model vocabulary lacks MASK/UNK");
    }
    auto vocab = std::make_shared<Vocabulary>();
    for (const std::string& s : surfaces) vocab->Add(s);
    if (vocab->size() != static_cast<int>(surfaces.size())) {
      return absl::InvalidArgumentError("model vocabulary has duplicates");
    }
    model.vocab_ = std::move(vocab);
    model.unigram_.assign(model.vocab_->size(), 0);
    if (model.options_.window < 1 || !(model.options_.smoothing > 0.0)) {
      return absl::InvalidArgumentError("invalid model hyperparameters");
    }
    for (const json& entry : doc.at("contexts")) {
      const auto key = entry.at("k").get<ContextKey>();
      if (static_cast<int>(key.size()) != 2 * model.options_.window) {
        return absl::InvalidArgumentError("context width mismatch");
      }
      for (const json& c : entry.at("c")) {
        const TokenId token = c.at(0).get<TokenId>();
        const int64_t n = c.at(1).get<int64_t>();
        if (!model.InSupport(token) || n <= 0) {
          return absl::InvalidArgumentError("invalid context count");
        }
        model.Observe(key, token, n);
      }
    }
    return model;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model file: ", e.what()));
  }
}

}  // namespace mlmia
