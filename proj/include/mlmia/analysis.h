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

#ifndef MLMIA_ANALYSIS_H_
#define MLMIA_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mlmia/attack.h"
#include "mlmia/corpus.h"
#include "mlmia/metrics.h"

namespace mlmia {

// Token surface -> count over a training corpus.
class FrequencyDict {
 public:
  static absl::StatusOr<FrequencyDict> Build(const Corpus& train);
  static absl::StatusOr<FrequencyDict> Build(
      std::span<const Sequence> sequences);

  int64_t Count(absl::string_view surface) const;
  int size() const { return static_cast<int>(counts_.size()); }
  bool operator==(const FrequencyDict& other) const {
    return counts_ == other.counts_;
  }

 private:
  absl::flat_hash_map<std::string, int64_t> counts_;
};

struct FeatureVector {
  int64_t digits = 0;                              // A
  int64_t seq_len = 0;                             // B
  int64_t non_alnum = 0;                           // C
  std::array<int64_t, 3> least_freqs = {0, 0, 0};  // D, ascending

  bool operator==(const FeatureVector&) const = default;
};

FeatureVector ExtractFeatures(const Sequence& seq, const FrequencyDict& freq);

// Bit set over the four feature groups.
enum FeatureGroup : uint32_t {
  kDigits = 1,
  kSeqLen = 2,
  kNonAlnum = 4,
  kLeastFreqs = 8,
};

struct FeatureSet {
  std::string name;  // e.g. "C&D"
  uint32_t groups = 0;
};

absl::StatusOr<FeatureSet> ParseFeatureSet(absl::string_view name);
// A; B; C; D; C&D; B&C&D; A&B&C&D.
std::vector<FeatureSet> StandardFeatureSets();

// Flattens the selected groups in A, B, C, D order.
std::vector<double> SelectFeatures(const FeatureVector& features,
                                   const FeatureSet& set);

using Matrix = std::vector<std::vector<double>>;

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 for constant features

  static absl::StatusOr<Standardizer> Fit(const Matrix& x);
  std::vector<double> Apply(std::span<const double> row) const;
  Matrix Apply(const Matrix& x) const;
};

struct LogRegOptions {
  double learning_rate = 0.1;
  int epochs = 1000;
  double l2 = 1e-4;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardization;

  // P(exposed) for a raw, unstandardized feature row.
  double Predict(std::span<const double> raw) const;
};

double Sigmoid(double z);

// Mean cross-entropy plus (l2 / 2) * |w|^2 on already standardized inputs.
// The bias is not regularized.
double LogRegObjective(const Matrix& x, std::span<const int> y,
                       std::span<const double> w, double b, double l2);

// Gradient of LogRegObjective; `grad_w` is resized to w.size().
void LogRegGradient(const Matrix& x, std::span<const int> y,
                    std::span<const double> w, double b, double l2,
                    std::vector<double>& grad_w, double& grad_b);

// Standardizes with train statistics, then runs full-batch gradient descent
// from zero. When `trace` is set it receives the objective before every
// epoch and after the last one.
absl::StatusOr<LogRegModel> TrainLogReg(const Matrix& x, std::span<const int> y,
                                        const LogRegOptions& options,
                                        std::vector<double>* trace = nullptr);

PrecisionRecall EvalMemorizationPredictor(const LogRegModel& model,
                                          const Matrix& x,
                                          std::span<const int> y,
                                          double cutoff = 0.5);

struct ExposureLabel {
  std::string seq_id;
  bool exposed = false;
};

// Members only; exposed iff the attack flagged the member.
std::vector<ExposureLabel> LabelExposed(
    std::span<const AttackOutcome> outcomes);

struct StudyOptions {
  double test_fraction = 0.3;
  uint64_t seed = 1;
  double cutoff = 0.5;
  LogRegOptions logreg;
};

struct StudyRow {
  std::string feature_set;
  PrecisionRecall train;
  PrecisionRecall test;
};

// Fits one predictor per feature set on a label-stratified split of the
// member samples and reports train and test precision / recall.
absl::StatusOr<std::vector<StudyRow>> MemorizationStudy(
    std::span<const Sequence> members, std::span<const ExposureLabel> labels,
    const FrequencyDict& freq, std::span<const FeatureSet> sets,
    const StudyOptions& options);

// CSV: feature_set,train_precision,train_recall,test_precision,test_recall.
std::string StudyCsv(std::span<const StudyRow> rows);

// CSV: seq_id,digits,seq_len,non_alnum,least_freq_1,least_freq_2,least_freq_3.
std::string FeatureCsv(std::span<const Sequence> sequences,
                       const FrequencyDict& freq);

}  // namespace mlmia

#endif  // MLMIA_ANALYSIS_H_
