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

#include "mlmia/analysis.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "mlmia/io.h"
#include "mlmia/rng.h"
#include "mlmia/status_macros.h"

namespace mlmia {

absl::StatusOr<FrequencyDict> FrequencyDict::Build(const Corpus& train) {
  return Build(train.sequences);
}

absl::StatusOr<FrequencyDict> FrequencyDict::Build(
    std::span<const Sequence> sequences) {
  if (sequences.empty()) {
    return absl::InvalidArgumentError("frequency dictionary: empty corpus");
  }
  FrequencyDict dict;
  for (const Sequence& seq : sequences) {
    for (const Token& token : seq.tokens) ++dict.counts_[token.surface];
  }
  return dict;
}

int64_t FrequencyDict::Count(absl::string_view surface) const {
  auto it = counts_.find(surface);
  return it == counts_.end() ? 0 : it->second;
}

FeatureVector ExtractFeatures(const Sequence& seq, const FrequencyDict& freq) {
  FeatureVector f;
  f.seq_len = seq.length();
  std::vector<int64_t> freqs;
  freqs.reserve(seq.tokens.size());
  for (const Token& token : seq.tokens) {
    for (unsigned char c : token.surface) {
      if (std::isdigit(c)) ++f.digits;
      if (!std::isalnum(c) && !std::isspace(c)) ++f.non_alnum;
    }
    freqs.push_back(freq.Count(token.surface));
  }
  std::sort(freqs.begin(), freqs.end());
  // Pad to three with zeros, keeping the vector ascending.
  while (freqs.size() < 3) freqs.insert(freqs.begin(), 0);
  for (int i = 0; i < 3; ++i) f.least_freqs[i] = freqs[i];
  return f;
}

absl::StatusOr<FeatureSet> ParseFeatureSet(absl::string_view name) {
  FeatureSet set{std::string(name), 0};
  for (absl::string_view part : absl::StrSplit(name, '&')) {
    uint32_t bit = 0;
    if (part == "A") bit = kDigits;
    if (part == "B") bit = kSeqLen;
    if (part == "C") bit = kNonAlnum;
    if (part == "D") bit = kLeastFreqs;
    if (bit == 0 || (set.groups & bit) != 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad feature set '", name, "'"));
    }
    set.groups |= bit;
  }
  return set;
}

std::vector<FeatureSet> StandardFeatureSets() {
  std::vector<FeatureSet> sets;
  for (const char* name : {"A", "B", "C", "D", "C&D", "B&C&D", "A&B&C&D"}) {
    sets.push_back(*ParseFeatureSet(name));
  }
  return sets;
}

std::vector<double> SelectFeatures(const FeatureVector& f,
                                   const FeatureSet& set) {
  std::vector<double> row;
  if (set.groups & kDigits) row.push_back(static_cast<double>(f.digits));
  if (set.groups & kSeqLen) row.push_back(static_cast<double>(f.seq_len));
  if (set.groups & kNonAlnum) row.push_back(static_cast<double>(f.non_alnum));
  if (set.groups & kLeastFreqs) {
    for (int64_t v : f.least_freqs) row.push_back(static_cast<double>(v));
  }
  return row;
}

absl::StatusOr<Standardizer> Standardizer::Fit(const Matrix& x) {
  if (x.empty()) return absl::InvalidArgumentError("standardize: no rows");
  const size_t d = x.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& row : x) {
    if (row.size() != d) {
      return absl::InvalidArgumentError("standardize: ragged matrix");
    }
    for (size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  const double n = static_cast<double>(x.size());
  for (double& m : s.mean) m /= n;
  for (const auto& row : x) {
    for (size_t j = 0; j < d; ++j) {
      const double diff = row[j] - s.mean[j];
      s.scale[j] += diff * diff;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::Apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (size_t j = 0; j < row.size(); ++j) {
    out[j] = (row[j] - mean[j]) / scale[j];
  }
  return out;
}

Matrix Standardizer::Apply(const Matrix& x) const {
  Matrix out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(Apply(row));
  return out;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

absl::Status CheckProblem(const Matrix& x, std::span<const int> y) {
  if (x.size() != y.size()) {
    return absl::InvalidArgumentError("logreg: x and y sizes differ");
  }
  if (x.size() < 2) {
    return absl::InvalidArgumentError("logreg: need at least 2 samples");
  }
  bool pos = false;
  bool neg = false;
  for (int label : y) {
    if (label != 0 && label != 1) {
      return absl::InvalidArgumentError("logreg: labels must be 0 or 1");
    }
    (label == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) {
    return absl::FailedPreconditionError("logreg: single-class labels");
  }
  return absl::OkStatus();
}

PrecisionRecall Score(std::span<const int> predicted, std::span<const int> y) {
  PrecisionRecall pr;
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      (predicted[i] == 1 ? pr.tp : pr.fn) += 1;
    } else {
      (predicted[i] == 1 ? pr.fp : pr.tn) += 1;
    }
  }
  if (pr.tp + pr.fp > 0) {
    pr.precision = static_cast<double>(pr.tp) / (pr.tp + pr.fp);
  }
  pr.recall =
      pr.tp + pr.fn > 0 ? static_cast<double>(pr.tp) / (pr.tp + pr.fn) : 0.0;
  return pr;
}

std::string CsvOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "";
}

}  // namespace

double LogRegModel::Predict(std::span<const double> raw) const {
  const std::vector<double> z = standardization.Apply(raw);
  return Sigmoid(Dot(weights, z) + bias);
}

double LogRegObjective(const Matrix& x, std::span<const int> y,
                       std::span<const double> w, double b, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double z = Dot(w, x[i]) + b;
    loss += Softplus(z) - y[i] * z;
  }
  loss /= static_cast<double>(x.size());
  return loss + 0.5 * l2 * Dot(w, w);
}

void LogRegGradient(const Matrix& x, std::span<const int> y,
                    std::span<const double> w, double b, double l2,
                    std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = Sigmoid(Dot(w, x[i]) + b) - y[i];
    for (size_t j = 0; j < w.size(); ++j) grad_w[j] += r * x[i][j];
    grad_b += r;
  }
  const double n = static_cast<double>(x.size());
  for (size_t j = 0; j < w.size(); ++j) grad_w[j] = grad_w[j] / n + l2 * w[j];
  grad_b /= n;
}

absl::StatusOr<LogRegModel> TrainLogReg(const Matrix& x, std::span<const int> y,
                                        const LogRegOptions& options,
                                        std::vector<double>* trace) {
  MLMIA_RETURN_IF_ERROR(CheckProblem(x, y));
  if (!(options.learning_rate > 0) || options.epochs < 0 ||
      !(options.l2 >= 0)) {
    return absl::InvalidArgumentError("logreg: bad hyperparameters");
  }
  LogRegModel model;
  MLMIA_ASSIGN_OR_RETURN(model.standardization, Standardizer::Fit(x));
  const Matrix z = model.standardization.Apply(x);
  model.weights.assign(x.front().size(), 0.0);
  std::vector<double> grad_w;
  double grad_b = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (trace != nullptr) {
      trace->push_back(
          LogRegObjective(z, y, model.weights, model.bias, options.l2));
    }
    LogRegGradient(z, y, model.weights, model.bias, options.l2, grad_w, grad_b);
    for (size_t j = 0; j < grad_w.size(); ++j) {
      model.weights[j] -= options.learning_rate * grad_w[j];
    }
    model.bias -= options.learning_rate * grad_b;
  }
  if (trace != nullptr) {
    trace->push_back(
        LogRegObjective(z, y, model.weights, model.bias, options.l2));
  }
  return model;
}

PrecisionRecall EvalMemorizationPredictor(const LogRegModel& model,
                                          const Matrix& x,
                                          std::span<const int> y,
                                          double cutoff) {
  std::vector<int> predicted;
  predicted.reserve(x.size());
  for (const auto& row : x) {
    predicted.push_back(model.Predict(row) >= cutoff ? 1 : 0);
  }
  return Score(predicted, y);
}

std::vector<ExposureLabel> LabelExposed(
    std::span<const AttackOutcome> outcomes) {
  std::vector<ExposureLabel> labels;
  for (const AttackOutcome& o : outcomes) {
    if (o.truth != Membership::kMember) continue;
    labels.push_back({o.id, o.decision == Membership::kMember});
  }
  return labels;
}

absl::StatusOr<std::vector<StudyRow>> MemorizationStudy(
    std::span<const Sequence> members, std::span<const ExposureLabel> labels,
    const FrequencyDict& freq, std::span<const FeatureSet> sets,
    const StudyOptions& options) {
  if (!(options.test_fraction > 0 && options.test_fraction < 1)) {
    return absl::InvalidArgumentError("study: test_fraction must be in (0,1)");
  }
  absl::flat_hash_map<std::string, const Sequence*> by_id;
  for (const Sequence& seq : members) by_id[seq.seq_id] = &seq;
  std::vector<FeatureVector> features;
  std::vector<int> y;
  std::vector<std::string> missing;
  for (const ExposureLabel& label : labels) {
    auto it = by_id.find(label.seq_id);
    if (it == by_id.end()) {
      missing.push_back(label.seq_id);
      continue;
    }
    features.push_back(ExtractFeatures(*it->second, freq));
    y.push_back(label.exposed ? 1 : 0);
  }
  if (!missing.empty()) {
    return absl::NotFoundError(absl::StrCat("study: labels without sequences: ",
                                            absl::StrJoin(missing, ",")));
  }

  // Label-stratified split so both classes reach the training side.
  std::vector<int> train_idx;
  std::vector<int> test_idx;
  Rng rng(DeriveSeed(options.seed, "memorization-split"));
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(y.size()); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    rng.Shuffle(idx);
    const int n_test = static_cast<int>(
        std::lround(options.test_fraction * static_cast<double>(idx.size())));
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + n_test);
    train_idx.insert(train_idx.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  std::vector<StudyRow> rows;
  for (const FeatureSet& set : sets) {
    Matrix x_train;
    Matrix x_test;
    std::vector<int> y_train;
    std::vector<int> y_test;
    for (int i : train_idx) {
      x_train.push_back(SelectFeatures(features[i], set));
      y_train.push_back(y[i]);
    }
    for (int i : test_idx) {
      x_test.push_back(SelectFeatures(features[i], set));
      y_test.push_back(y[i]);
    }
    MLMIA_ASSIGN_OR_RETURN(const LogRegModel model,
                           TrainLogReg(x_train, y_train, options.logreg));
    StudyRow row;
    row.feature_set = set.name;
    row.train =
        EvalMemorizationPredictor(model, x_train, y_train, options.cutoff);
    row.test = EvalMemorizationPredictor(model, x_test, y_test, options.cutoff);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string StudyCsv(std::span<const StudyRow> rows) {
  std::string out =
      "feature_set,train_precision,train_recall,test_precision,test_recall\n";
  for (const StudyRow& row : rows) {
    absl::StrAppend(
        &out, row.feature_set, ",", CsvOptional(row.train.precision), ",",
        FormatDouble(row.train.recall), ",", CsvOptional(row.test.precision),
        ",", FormatDouble(row.test.recall), "\n");
  }
  return out;
}

std::string FeatureCsv(std::span<const Sequence> sequences,
                       const FrequencyDict& freq) {
  std::string out =
      "seq_id,digits,seq_len,non_alnum,least_freq_1,least_freq_2,"
      "least_freq_3\n";
  for (const Sequence& seq : sequences) {
    const FeatureVector f = ExtractFeatures(seq, freq);
    absl::StrAppend(&out, CsvField(seq.seq_id), ",", f.digits, ",", f.seq_len,
                    ",", f.non_alnum, ",", f.least_freqs[0], ",",
                    f.least_freqs[1], ",", f.least_freqs[2], "\n");
  }
  return out;
}

}  // namespace mlmia
