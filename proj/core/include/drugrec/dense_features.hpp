#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "drugrec/corpus.hpp"
#include "drugrec/matrix.hpp"
#include "drugrec/textprep.hpp"

namespace drugrec {

using DenseVector = std::vector<double>;

// ---------------------------------------------------------------------------
// Skip-gram word embeddings

struct Word2VecConfig {
  std::size_t dimension = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of its start value
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, std::size_t dimension, std::vector<float> values);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// Vector of `token`, or an empty span for tokens outside the training vocabulary.
  std::span<const float> find(std::string_view token) const;
  std::span<const float> vector(std::size_t index) const {
    return std::span(values_).subspan(index * dimension_, dimension_);
  }

  /// Hyperparameters the table was trained with (not persisted).
  Word2VecConfig config;

  /// Text format: "<count> <dim>" header, then "<token> v1 ... vd" per line.
  void save(std::ostream& out) const;
  static EmbeddingTable load(std::istream& in);

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dimension_ == b.dimension_ && a.tokens_ == b.tokens_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
  std::vector<float> values_;
};

/// Trains skip-gram with negative sampling, single-threaded and deterministic
/// for a given seed and document order. `epoch_loss`, when given, receives the
/// mean per-pair negative-sampling loss of every epoch.
EmbeddingTable train_word2vec(std::span<const Tokens> docs, const Word2VecConfig& config,
                              std::vector<double>* epoch_loss = nullptr);

/// Mean embedding of the in-vocabulary tokens; zero vector when none match.
DenseVector doc_vector(std::span<const std::string> tokens, const EmbeddingTable& table);

DenseMatrix embedding_matrix(std::span<const Tokens> docs, const EmbeddingTable& table);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

// ---------------------------------------------------------------------------
// Manual features

class SentimentLexicon {
 public:
  static const SentimentLexicon& builtin();
  /// "<token> <score>" lines with score in [-1, 1]; '#' starts a comment line.
  static SentimentLexicon parse(std::string_view text);
  static SentimentLexicon load(const std::string& path);

  std::optional<double> score(std::string_view token) const;
  std::size_t size() const noexcept { return scores_.size(); }

 private:
  std::unordered_map<std::string, double> scores_;
};

/// True for "not", "no", "never" and any token ending in "n't".
bool is_negator(std::string_view token);

/// Mean lexicon score of matched tokens, sign-flipped for a token directly
/// after a negator. 0 when nothing matches. Always in [-1, 1].
double polarity(std::string_view text, const SentimentLexicon& lexicon = SentimentLexicon::builtin());

enum TextStat : std::size_t {
  kPunctuation = 0,
  kWords,
  kStopwords,
  kLetters,
  kUniqueWords,
  kMeanWordLength,
  kUppercaseWords,
  kTitleWords,
  kTextStatCount
};

/// Eight surface statistics of raw text. Words are whitespace-separated runs
/// with ASCII punctuation removed; runs that are pure punctuation are not words.
std::array<double, kTextStatCount> text_stats(std::string_view raw,
                                              const StopwordLexicon& stopwords = StopwordLexicon::builtin());

/// Label codes assigned in lexicographic order of the training conditions.
class ConditionEncoder {
 public:
  static constexpr std::int64_t kUnseen = -1;

  static ConditionEncoder fit(std::span<const ReviewRecord> train);
  static ConditionEncoder from_conditions(std::vector<std::string> sorted_conditions);

  std::int64_t code(std::string_view condition) const;
  std::int64_t code(const std::optional<std::string>& condition) const;
  std::int64_t code(const std::string& condition) const { return code(std::string_view(condition)); }
  const std::vector<std::string>& conditions() const noexcept { return conditions_; }

 private:
  std::vector<std::string> conditions_;
  std::unordered_map<std::string, std::int64_t> codes_;
};

inline constexpr std::size_t kManualFeatureCount = 15;

/// [useful_count, condition code, day, month, year, polarity(cleaned review),
///  polarity(raw review), the eight text_stats of the raw review]
DenseVector manual_features(const ReviewRecord& record, const ConditionEncoder& encoder,
                            const StopwordLexicon& stopwords = StopwordLexicon::builtin(),
                            const SentimentLexicon& lexicon = SentimentLexicon::builtin());

DenseMatrix manual_feature_matrix(std::span<const ReviewRecord> records, const ConditionEncoder& encoder);

}  // namespace drugrec
