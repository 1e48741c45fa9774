#include "drugrec/recommend.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "drugrec/error.hpp"
#include "text_util.hpp"

namespace drugrec {

namespace {

std::vector<std::string> selected_conditions(const RecommendationTable& table,
                                             std::span<const std::string> conditions) {
  if (conditions.empty()) {
    std::vector<std::string> all;
    for (const auto& [c, _] : table.conditions) all.push_back(c);
    return all;
  }
  for (const auto& c : conditions) (void)table.top_n(c, 0);
  return {conditions.begin(), conditions.end()};
}

}  // namespace

CombinedPrediction combine_predictions(std::int64_t record_id, std::span<const Sentiment> predictions) {
  if (predictions.size() != kVotingModels)
    throw InvalidArgument("expected " + std::to_string(kVotingModels) + " model predictions for record " +
                          std::to_string(record_id) + ", got " + std::to_string(predictions.size()));
  CombinedPrediction out{record_id, 0, {predictions.begin(), predictions.end()}};
  for (auto p : predictions) out.votes += to_int(p);
  return out;
}

std::unordered_map<std::int64_t, double> normalize_usefulcount(std::span<const ReviewRecord> records) {
  struct Range {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  };
  // The null condition is keyed separately from every real string.
  std::map<std::pair<bool, std::string>, Range> ranges;
  auto key = [](const ReviewRecord& r) { return std::make_pair(r.condition.has_value(), r.condition.value_or("")); };
  for (const auto& r : records) {
    auto& g = ranges[key(r)];
    g.lo = std::min(g.lo, r.useful_count);
    g.hi = std::max(g.hi, r.useful_count);
  }
  std::unordered_map<std::int64_t, double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto& g = ranges.at(key(r));
    out[r.unique_id] = g.hi == g.lo ? 1.0
                                    : static_cast<double>(r.useful_count - g.lo) / static_cast<double>(g.hi - g.lo);
  }
  return out;
}

std::vector<RankedDrug> RecommendationTable::top_n(const std::string& condition, std::size_t n) const {
  const auto it = conditions.find(condition);
  if (it == conditions.end()) throw InvalidArgument("unknown condition '" + condition + "'");
  const auto& ranked = it->second;
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(n, ranked.size()))};
}

RecommendationTable score_drugs(std::span<const ScoredReview> reviews, ScoreDivisor divisor) {
  std::map<std::string, std::map<std::string, RankedDrug>> acc;
  for (const auto& r : reviews) {
    auto& d = acc[r.condition][r.drug];
    d.drug = r.drug;
    d.overall += static_cast<double>(r.votes) * r.norm_useful;
    ++d.reviews;
  }
  RecommendationTable table;
  for (auto& [condition, drugs] : acc) {
    auto& ranked = table.conditions[condition];
    for (auto& [_, d] : drugs) {
      double den = 1.0;
      if (divisor == ScoreDivisor::distinct_drugs) den = static_cast<double>(drugs.size());
      else if (divisor == ScoreDivisor::drug_reviews) den = static_cast<double>(d.reviews);
      d.final_score = d.overall / den;
      ranked.push_back(std::move(d));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedDrug& a, const RankedDrug& b) {
      if (a.final_score != b.final_score) return a.final_score > b.final_score;
      return a.drug < b.drug;
    });
  }
  return table;
}

std::vector<std::string> most_reviewed_conditions(std::span<const ReviewRecord> records, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records)
    if (r.condition) ++counts[*r.condition];
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, v.size()); ++i) out.push_back(v[i].first);
  return out;
}

void write_recommendations_csv(std::ostream& out, const RecommendationTable& table,
                               std::span<const std::string> conditions, std::size_t top_n) {
  out << "condition,rank,drug,final_score\n";
  for (const auto& c : selected_conditions(table, conditions)) {
    const auto ranked = table.top_n(c, top_n == 0 ? std::numeric_limits<std::size_t>::max() : top_n);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      out << csv_field(c) << ',' << (i + 1) << ',' << csv_field(ranked[i].drug) << ','
          << format_real(ranked[i].final_score) << '\n';
  }
}

std::string recommendations_to_json(const RecommendationTable& table, std::span<const std::string> conditions,
                                    std::size_t top_n) {
  nlohmann::ordered_json j;
  j["models"] = table.models;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : selected_conditions(table, conditions)) {
    auto drugs = nlohmann::ordered_json::array();
    const auto ranked = table.top_n(c, top_n == 0 ? std::numeric_limits<std::size_t>::max() : top_n);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      drugs.push_back({{"rank", i + 1},
                       {"drug", ranked[i].drug},
                       {"final_score", ranked[i].final_score},
                       {"overall", ranked[i].overall},
                       {"reviews", ranked[i].reviews}});
    arr.push_back({{"condition", c}, {"drugs", drugs}});
  }
  j["conditions"] = arr;
  return j.dump(2);
}

}  // namespace drugrec
