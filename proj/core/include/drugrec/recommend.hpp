#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "drugrec/corpus.hpp"

namespace drugrec {

inline constexpr std::size_t kVotingModels = 4;

struct CombinedPrediction {
  std::int64_t record_id = 0;
  int votes = 0;  // number of positive predictions, 0..4
  std::vector<Sentiment> predictions;
};

/// Requires exactly four predictions.
CombinedPrediction combine_predictions(std::int64_t record_id, std::span<const Sentiment> predictions);

/// Per-condition min-max scaling of useful_count, keyed by unique_id.
/// Records without a condition form their own group. A group with max == min maps to 1.0.
std::unordered_map<std::int64_t, double> normalize_usefulcount(std::span<const ReviewRecord> records);

struct ScoredReview {
  std::string condition;
  std::string drug;
  int votes = 0;
  double norm_useful = 0.0;
};

enum class ScoreDivisor {
  distinct_drugs,  // number of distinct drugs in the condition
  drug_reviews,    // number of reviews of that drug in the condition
  none,
};

struct RankedDrug {
  std::string drug;
  double final_score = 0.0;
  double overall = 0.0;
  std::size_t reviews = 0;
};

/// Rankings are sorted by final_score descending, then drug name ascending.
struct RecommendationTable {
  std::map<std::string, std::vector<RankedDrug>> conditions;
  std::vector<std::string> models;

  /// First n drugs of a condition. Throws InvalidArgument for an unknown condition.
  std::vector<RankedDrug> top_n(const std::string& condition, std::size_t n) const;
};

RecommendationTable score_drugs(std::span<const ScoredReview> reviews,
                                ScoreDivisor divisor = ScoreDivisor::distinct_drugs);

/// Conditions ordered by review count descending, then name; at most n.
std::vector<std::string> most_reviewed_conditions(std::span<const ReviewRecord> records, std::size_t n);

/// Columns: condition,rank,drug,final_score. Restricted to `conditions` when
/// non-empty and to the first top_n drugs of each when top_n > 0.
void write_recommendations_csv(std::ostream& out, const RecommendationTable& table,
                               std::span<const std::string> conditions = {}, std::size_t top_n = 0);
std::string recommendations_to_json(const RecommendationTable& table,
                                    std::span<const std::string> conditions = {}, std::size_t top_n = 0);

}  // namespace drugrec
