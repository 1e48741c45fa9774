#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "drugrec/matrix.hpp"
#include "drugrec/textprep.hpp"

namespace drugrec {

/// Joins the tokens of an n-gram (U+001F, the ASCII unit separator).
inline constexpr char kGramSeparator = '\x1f';

struct NgramRange {
  int low = 1;
  int high = 2;

  friend bool operator==(const NgramRange&, const NgramRange&) = default;
};

/// All contiguous n-grams for n in [low, high], ordered by n then position.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, NgramRange range);

/// Fitted n-gram index with document frequencies.
class Vocabulary {
 public:
  struct Entry {
    std::uint32_t index;
    std::uint32_t document_frequency;
  };

  Vocabulary() = default;

  /// Indices follow lexicographic gram order over grams with df >= min_df.
  static Vocabulary fit(std::span<const Tokens> docs, NgramRange range, std::uint32_t min_df);

  /// Rebuilds a vocabulary from persisted (gram, df) rows. Indices are
  /// reassigned by position, which must already be lexicographic.
  static Vocabulary from_rows(std::vector<std::pair<std::string, std::uint32_t>> rows,
                              NgramRange range, std::size_t corpus_size, std::uint32_t min_df);

  std::size_t size() const noexcept { return grams_.size(); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  NgramRange ngram_range() const noexcept { return range_; }
  std::uint32_t min_df() const noexcept { return min_df_; }

  std::optional<Entry> find(std::string_view gram) const;
  const std::string& gram(std::uint32_t index) const { return grams_.at(index); }
  std::uint32_t document_frequency(std::uint32_t index) const { return dfs_.at(index); }

  /// Grams of `doc` mapped to vocabulary indices with raw counts. OOV grams are skipped.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> count_grams(
      std::span<const std::string> tokens) const;

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> grams_;
  std::vector<std::uint32_t> dfs_;
  NgramRange range_;
  std::size_t corpus_size_ = 0;
  std::uint32_t min_df_ = 1;
};

Vocabulary fit_vocabulary(std::span<const Tokens> docs, NgramRange range = {},
                          std::uint32_t min_df = 2);

/// Raw n-gram counts over the vocabulary.
SparseVector bow_transform(std::span<const std::string> tokens, const Vocabulary& vocab);

/// Log-scaled term frequency: ln(1 + count).
double tf(std::uint64_t count);

/// Inverse document frequency: ln(N / df). Throws InvalidArgument for OOV grams.
double idf(std::string_view gram, const Vocabulary& vocab);

class TfIdfModel {
 public:
  TfIdfModel() = default;
  explicit TfIdfModel(Vocabulary vocab);

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  double idf_weight(std::uint32_t index) const { return idf_.at(index); }
  std::span<const double> idf_weights() const noexcept { return idf_; }

  /// Writes the vocabulary/IDF table (gram, index, df, idf per row) as JSON.
  void save(std::ostream& out) const;
  static TfIdfModel load(std::istream& in);

 private:
  Vocabulary vocab_;
  std::vector<double> idf_;
};

TfIdfModel fit_tfidf(std::span<const Tokens> docs, NgramRange range = {}, std::uint32_t min_df = 2);

/// weight = tf(count) * idf(gram); zero products are not stored.
SparseVector tfidf_transform(std::span<const std::string> tokens, const TfIdfModel& model);

SparseMatrix bow_matrix(std::span<const Tokens> docs, const Vocabulary& vocab);
SparseMatrix tfidf_matrix(std::span<const Tokens> docs, const TfIdfModel& model);

/// Coordinate text format: a "%drugrec coordinate <rows> <cols> <nnz>" header,
/// then one "row col value" line per stored entry (0-based, row-major order).
void write_coordinate(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_coordinate(std::istream& in);

}  // namespace drugrec
