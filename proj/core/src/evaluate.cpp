#include "drugrec/evaluate.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "drugrec/error.hpp"
#include "text_util.hpp"

namespace drugrec {

namespace {

Metric ratio(std::size_t num, std::size_t den) {
  if (den == 0) return {0.0, true};
  return {static_cast<double>(num) / static_cast<double>(den), false};
}

std::string flags_of(const ClassMetrics& m, const Metric& acc) {
  std::string flags;
  auto add = [&](const Metric& x, const char* name) {
    if (!x.undefined) return;
    if (!flags.empty()) flags += ';';
    flags += name;
  };
  add(m.precision, "precision_undefined");
  add(m.recall, "recall_undefined");
  add(m.f1, "f1_undefined");
  add(acc, "accuracy_undefined");
  return flags;
}

ClassMetrics class_metrics(const ConfusionCounts& c) { return {precision(c), recall(c), f1(c)}; }

}  // namespace

ConfusionCounts confusion(std::span<const Sentiment> predictions, std::span<const Sentiment> labels) {
  if (predictions.size() != labels.size())
    throw InvalidArgument("prediction and label counts differ");
  if (labels.empty()) throw InvalidArgument("cannot evaluate an empty set");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == Sentiment::positive;
    const bool y = labels[i] == Sentiment::positive;
    if (p && y) ++c.tp;
    else if (!p && !y) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

Metric precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }
Metric recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }
Metric accuracy(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.total()); }

Metric f1(const ConfusionCounts& c) {
  const Metric p = precision(c), r = recall(c);
  if (p.value + r.value == 0.0) return {0.0, true};
  return {2.0 * p.value * r.value / (p.value + r.value), p.undefined || r.undefined};
}

double roc_auc(std::span<const double> scores, std::span<const Sentiment> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("score and label counts differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of mid-ranks of positives; tied groups share their average rank.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Sentiment::positive) {
        rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("roc_auc needs both classes");
  const double p = static_cast<double>(n_pos), n = static_cast<double>(n_neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

bool EvaluationReport::has_undefined() const noexcept {
  return !flags_of(positive, accuracy).empty() || !flags_of(negative, accuracy).empty();
}

EvaluationReport make_report(std::span<const double> scores, std::span<const Sentiment> labels,
                             std::string model_id, std::string feature_set) {
  std::vector<Sentiment> preds(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    preds[i] = scores[i] > 0.0 ? Sentiment::positive : Sentiment::negative;
  EvaluationReport r;
  r.model_id = std::move(model_id);
  r.feature_set = std::move(feature_set);
  r.counts = confusion(preds, labels);
  r.positive = class_metrics(r.counts);
  r.negative = class_metrics(r.counts.swapped());
  r.accuracy = accuracy(r.counts);
  r.auc = roc_auc(scores, labels);
  return r;
}

void write_reports_csv(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << "model,features,class,precision,recall,f1,accuracy,auc,flags\n";
  for (const auto& r : reports) {
    for (const auto* cls : {"positive", "negative"}) {
      const auto& m = std::string_view(cls) == "positive" ? r.positive : r.negative;
      out << csv_field(r.model_id) << ',' << csv_field(r.feature_set) << ',' << cls << ',' << format_real(m.precision.value)
          << ',' << format_real(m.recall.value) << ',' << format_real(m.f1.value) << ','
          << format_real(r.accuracy.value) << ',' << format_real(r.auc) << ','
          << flags_of(m, r.accuracy) << '\n';
    }
  }
}

std::string reports_to_json(std::span<const EvaluationReport> reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    auto cls = [&](const ClassMetrics& m) {
      return nlohmann::ordered_json{{"precision", m.precision.value},
                                    {"recall", m.recall.value},
                                    {"f1", m.f1.value},
                                    {"flags", flags_of(m, r.accuracy)}};
    };
    arr.push_back({{"model", r.model_id},
                   {"features", r.feature_set},
                   {"positive", cls(r.positive)},
                   {"negative", cls(r.negative)},
                   {"accuracy", r.accuracy.value},
                   {"auc", r.auc},
                   {"confusion", {{"tp", r.counts.tp}, {"tn", r.counts.tn}, {"fp", r.counts.fp}, {"fn", r.counts.fn}}}});
  }
  return arr.dump(2);
}

}  // namespace drugrec
