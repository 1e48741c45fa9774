#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drugrec/corpus.hpp"
#include "drugrec/learn.hpp"

namespace drugrec {

struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  /// Counts with the roles of the two classes exchanged.
  ConfusionCounts swapped() const noexcept { return {tn, tp, fn, fp}; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Positive is the positive class. Requires equal, non-zero lengths.
ConfusionCounts confusion(std::span<const Sentiment> predictions, std::span<const Sentiment> labels);

/// A metric value; `undefined` is set when the denominator was zero and value is 0.
struct Metric {
  double value = 0.0;
  bool undefined = false;
};

Metric precision(const ConfusionCounts& c);
Metric recall(const ConfusionCounts& c);
Metric accuracy(const ConfusionCounts& c);
Metric f1(const ConfusionCounts& c);

/// Tie-aware rank statistic. Requires both classes to be present.
double roc_auc(std::span<const double> scores, std::span<const Sentiment> labels);

struct ClassMetrics {
  Metric precision, recall, f1;
};

struct EvaluationReport {
  std::string model_id;
  std::string feature_set;
  ClassMetrics positive, negative;
  Metric accuracy;
  double auc = 0.0;
  ConfusionCounts counts;

  /// True when any metric hit a zero denominator.
  bool has_undefined() const noexcept;
};

EvaluationReport make_report(std::span<const double> scores, std::span<const Sentiment> labels,
                             std::string model_id = {}, std::string feature_set = {});

template <typename Matrix>
EvaluationReport evaluate_model(const ClassifierModel& model, const Matrix& features,
                                std::span<const Sentiment> labels, std::string model_id = {},
                                std::string feature_set = {}) {
  const auto scores = model.decision_scores(features);
  return make_report(scores, labels, std::move(model_id), std::move(feature_set));
}

/// Columns: model,features,class,precision,recall,f1,accuracy,auc,flags.
void write_reports_csv(std::ostream& out, std::span<const EvaluationReport> reports);
std::string reports_to_json(std::span<const EvaluationReport> reports);

}  // namespace drugrec
