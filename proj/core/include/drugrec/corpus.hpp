#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drugrec {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Parses "May 20, 2012" (full or three-letter month names) or ISO "2012-05-20".
std::optional<Date> parse_date(std::string_view text);
std::string to_iso(const Date& d);

/// One row of the drugs.com review corpus.
struct ReviewRecord {
  std::int64_t unique_id = 0;
  std::string drug_name;
  std::optional<std::string> condition;
  std::string review_text;
  int rating = 0;  // 1..10
  Date date;
  std::int64_t useful_count = 0;

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

enum class Sentiment : std::uint8_t { negative = 0, positive = 1 };

constexpr int to_int(Sentiment s) noexcept { return s == Sentiment::positive ? 1 : 0; }
constexpr Sentiment flip(Sentiment s) noexcept {
  return s == Sentiment::positive ? Sentiment::negative : Sentiment::positive;
}
std::string_view to_string(Sentiment s) noexcept;

/// Positive iff rating >= 6. Throws InvalidArgument outside 1..10.
Sentiment derive_label(int rating);

struct RowError {
  std::size_t line = 0;  // 1-based physical line where the row starts
  std::string message;
};

struct ParseResult {
  std::vector<ReviewRecord> records;
  std::vector<RowError> errors;
};

/// Decodes named (&quot; &amp; &lt; &gt; &apos;) and numeric (&#039; &#x27;)
/// HTML character references. Unknown entities are left verbatim.
std::string decode_html_entities(std::string_view text);

/// Parses the tab-separated corpus. The header row is mandatory (FormatError
/// otherwise); per-row problems are collected in ParseResult::errors.
ParseResult parse_tsv(std::istream& in);
ParseResult parse_tsv(std::string_view text);
ParseResult parse_tsv_file(const std::string& path);

/// Writes records in the same TSV layout parse_tsv reads.
void write_tsv(std::ostream& out, std::span<const ReviewRecord> records);

/// True for scraping artifacts such as "3</span> users found this comment helpful.".
bool is_junk_condition(std::string_view condition);

struct CleaningReport {
  std::size_t input_rows = 0;
  std::size_t removed_null_condition = 0;
  std::size_t removed_junk_condition = 0;
  std::size_t removed_duplicate_id = 0;
  std::size_t output_rows = 0;
};

/// Drops rows with no condition or a junk condition, then keeps the first
/// occurrence of each unique_id. Order is otherwise preserved.
std::vector<ReviewRecord> clean_corpus(std::span<const ReviewRecord> records,
                                       CleaningReport* report = nullptr);

struct CorpusSplit {
  std::vector<ReviewRecord> train;
  std::vector<ReviewRecord> test;
  std::uint64_t seed = 0;
  double train_fraction = 0.75;
};

/// Number of training rows for n records: floor(fraction * n).
std::size_t train_size(std::size_t n, double train_fraction);

/// Seeded uniform permutation of row positions; the first train_size() rows
/// (in permuted order) form the training split.
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed);

CorpusSplit split(std::span<const ReviewRecord> records, double train_fraction, std::uint64_t seed);

struct UsefulCountSummary {
  std::int64_t min = 0;
  std::int64_t max = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

struct CorpusStats {
  std::size_t row_count = 0;
  /// Distinct drugs per condition, sorted by count descending then name.
  std::vector<std::pair<std::string, std::size_t>> condition_drug_counts;
  std::array<std::size_t, 10> rating_histogram{};  // bin r-1 counts rating r
  std::size_t positive = 0;
  std::size_t negative = 0;
  UsefulCountSummary useful_count;
  std::optional<CleaningReport> cleaning;
};

CorpusStats summarize(std::span<const ReviewRecord> records);

void write_stats_csv(std::ostream& out, const CorpusStats& stats);
std::string stats_to_json(const CorpusStats& stats);

}  // namespace drugrec
