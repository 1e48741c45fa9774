#include "drugrec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "drugrec/error.hpp"
#include "drugrec/rng.hpp"
#include "text_util.hpp"

namespace drugrec {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

template <typename T>
std::optional<T> parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Accepts "7" and integral decimals such as "7.0"; the distributed corpus
// stores ratings with a trailing ".0".
std::optional<int> parse_rating(std::string_view s) {
  s = trim(s);
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto frac = s.substr(dot + 1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](char c) { return c == '0'; }))
      return std::nullopt;
    s = s.substr(0, dot);
  }
  return parse_integer<int>(s);
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

struct RawRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
  std::string error;
};

// Splits the input into tab-separated rows. Quoted fields may span lines and
// escape quotes by doubling them.
class RowReader {
 public:
  explicit RowReader(std::string_view text) : text_(text) {}

  bool next(RawRow& row) {
    row.fields.clear();
    row.error.clear();
    // Skip blank lines between rows.
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    row.line = line_;
    std::string field;
    while (true) {
      field.clear();
      if (pos_ < text_.size() && text_[pos_] == '"') {
        ++pos_;
        bool closed = false;
        while (pos_ < text_.size()) {
          const char c = text_[pos_++];
          if (c == '"') {
            if (pos_ < text_.size() && text_[pos_] == '"') {
              field += '"';
              ++pos_;
            } else {
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line_;
            field += c;
          }
        }
        if (!closed) {
          row.error = "unterminated quoted field";
          row.fields.push_back(std::move(field));
          return true;
        }
        // Anything between the closing quote and the delimiter is kept verbatim.
        while (pos_ < text_.size() && text_[pos_] != '\t' && text_[pos_] != '\n' &&
               text_[pos_] != '\r')
          field += text_[pos_++];
      } else {
        while (pos_ < text_.size() && text_[pos_] != '\t' && text_[pos_] != '\n' &&
               text_[pos_] != '\r')
          field += text_[pos_++];
      }
      row.fields.push_back(field);
      if (pos_ >= text_.size()) return true;
      const char delim = text_[pos_++];
      if (delim == '\t') continue;
      if (delim == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
      ++line_;
      return true;
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

constexpr std::array<std::string_view, 7> kColumns = {
    "uniqueid", "drugname", "condition", "review", "rating", "date", "usefulcount"};

bool header_matches(const std::vector<std::string>& fields) {
  if (fields.size() != kColumns.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto name = to_lower_ascii(trim(fields[i]));
    // The distributed files leave the id column unnamed.
    if (i == 0 && name.empty()) continue;
    if (name != kColumns[i]) return false;
  }
  return true;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  Date d;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    auto y = parse_integer<int>(text.substr(0, 4));
    auto m = parse_integer<int>(text.substr(5, 2));
    auto dd = parse_integer<int>(text.substr(8, 2));
    if (!y || !m || !dd) return std::nullopt;
    d = {*y, *m, *dd};
  } else {
    const auto space = text.find(' ');
    if (space == std::string_view::npos) return std::nullopt;
    const auto month_name = to_lower_ascii(text.substr(0, space));
    int month = 0;
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
      if (month_name == kMonths[i] || (month_name.size() == 3 && kMonths[i].starts_with(month_name)))
        month = static_cast<int>(i) + 1;
    }
    if (month == 0) return std::nullopt;
    auto rest = trim(text.substr(space + 1));
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    auto day = parse_integer<int>(rest.substr(0, comma));
    auto year = parse_integer<int>(rest.substr(comma + 1));
    if (!day || !year) return std::nullopt;
    d = {*year, month, *day};
  }
  if (d.year < 1 || d.month < 1 || d.month > 12 || d.day < 1 ||
      d.day > days_in_month(d.year, d.month))
    return std::nullopt;
  return d;
}

std::string to_iso(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string_view to_string(Sentiment s) noexcept {
  return s == Sentiment::positive ? "positive" : "negative";
}

Sentiment derive_label(int rating) {
  if (rating < 1 || rating > 10)
    throw InvalidArgument("rating " + std::to_string(rating) + " outside 1..10");
  return rating >= 6 ? Sentiment::positive : Sentiment::negative;
}

std::string decode_html_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    const auto name = text.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (name == "quot") cp = '"';
    else if (name == "amp") cp = '&';
    else if (name == "lt") cp = '<';
    else if (name == "gt") cp = '>';
    else if (name == "apos") cp = '\'';
    else if (name == "nbsp") cp = 0xA0;
    else if (name.size() >= 2 && name[0] == '#') {
      std::uint32_t v = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const auto digits = name.substr(hex ? 2 : 1);
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), v, hex ? 16 : 10);
      if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size() &&
          v > 0 && v <= 0x10FFFF)
        cp = v;
    }
    if (!cp) {
      out += text[i++];
      continue;
    }
    append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

ParseResult parse_tsv(std::string_view text) {
  ParseResult result;
  RowReader reader(text);
  RawRow row;
  if (!reader.next(row) || !row.error.empty() || !header_matches(row.fields))
    throw FormatError(
        "missing header row: expected columns uniqueID, drugName, condition, review, rating, "
        "date, usefulCount");

  while (reader.next(row)) {
    auto fail = [&](std::string message) {
      result.errors.push_back({row.line, std::move(message)});
    };
    if (!row.error.empty()) {
      fail(row.error);
      continue;
    }
    if (row.fields.size() != kColumns.size()) {
      fail("expected 7 fields, found " + std::to_string(row.fields.size()));
      continue;
    }
    ReviewRecord rec;
    const auto id = parse_integer<std::int64_t>(row.fields[0]);
    if (!id) {
      fail("non-integer uniqueID '" + row.fields[0] + "'");
      continue;
    }
    rec.unique_id = *id;
    rec.drug_name = std::string(trim(row.fields[1]));
    if (auto cond = trim(row.fields[2]); !cond.empty()) rec.condition = std::string(cond);
    rec.review_text = decode_html_entities(row.fields[3]);
    const auto rating = parse_rating(row.fields[4]);
    if (!rating) {
      fail("non-integer rating '" + row.fields[4] + "'");
      continue;
    }
    if (*rating < 1 || *rating > 10) {
      fail("rating " + std::to_string(*rating) + " outside 1..10");
      continue;
    }
    rec.rating = *rating;
    const auto date = parse_date(row.fields[5]);
    if (!date) {
      fail("unparseable date '" + row.fields[5] + "'");
      continue;
    }
    rec.date = *date;
    const auto useful = parse_integer<std::int64_t>(row.fields[6]);
    if (!useful) {
      fail("non-integer usefulCount '" + row.fields[6] + "'");
      continue;
    }
    if (*useful < 0) {
      fail("negative usefulCount");
      continue;
    }
    rec.useful_count = *useful;
    result.records.push_back(std::move(rec));
  }
  return result;
}

ParseResult parse_tsv(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tsv(std::string_view(buf.str()));
}

ParseResult parse_tsv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  return parse_tsv(in);
}

void write_tsv(std::ostream& out, std::span<const ReviewRecord> records) {
  out << "\tdrugName\tcondition\treview\trating\tdate\tusefulCount\n";
  for (const auto& r : records) {
    std::string review = "\"";
    for (char c : r.review_text) {
      if (c == '"') review += '"';
      review += c;
    }
    review += '"';
    static constexpr std::string_view kMonthNames[] = {
        "January", "February", "March",     "April",   "May",      "June",
        "July",    "August",   "September", "October", "November", "December"};
    out << r.unique_id << '\t' << r.drug_name << '\t' << r.condition.value_or("") << '\t' << review
        << '\t' << r.rating << ".0\t" << kMonthNames[r.date.month - 1] << ' ' << r.date.day << ", "
        << r.date.year << '\t' << r.useful_count << '\n';
  }
}

bool is_junk_condition(std::string_view condition) {
  return condition.find("</span>") != std::string_view::npos;
}

std::vector<ReviewRecord> clean_corpus(std::span<const ReviewRecord> records,
                                       CleaningReport* report) {
  CleaningReport local;
  local.input_rows = records.size();
  std::vector<ReviewRecord> out;
  out.reserve(records.size());
  std::unordered_set<std::int64_t> seen;
  for (const auto& r : records) {
    if (!r.condition) {
      ++local.removed_null_condition;
      continue;
    }
    if (is_junk_condition(*r.condition)) {
      ++local.removed_junk_condition;
      continue;
    }
    if (!seen.insert(r.unique_id).second) {
      ++local.removed_duplicate_id;
      continue;
    }
    out.push_back(r);
  }
  local.output_rows = out.size();
  if (report) *report = local;
  return out;
}

std::size_t train_size(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train fraction must lie in (0, 1)");
  // Exact for fractions with a short decimal expansion, e.g. 0.75 * n.
  const long double v = static_cast<long double>(train_fraction) * static_cast<long double>(n);
  return static_cast<std::size_t>(std::floor(v + 1e-9L));
}

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5b117));
  rng.shuffle(order.begin(), order.end());
  return order;
}

CorpusSplit split(std::span<const ReviewRecord> records, double train_fraction,
                  std::uint64_t seed) {
  if (records.empty()) throw InvalidArgument("cannot split an empty corpus");
  const auto n_train = train_size(records.size(), train_fraction);
  const auto order = split_permutation(records.size(), seed);
  CorpusSplit out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  out.train.reserve(n_train);
  out.test.reserve(records.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? out.train : out.test).push_back(records[order[i]]);
  return out;
}

CorpusStats summarize(std::span<const ReviewRecord> records) {
  CorpusStats s;
  s.row_count = records.size();
  std::map<std::string, std::set<std::string>> drugs_by_condition;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.rating >= 1 && r.rating <= 10) {
      ++s.rating_histogram[r.rating - 1];
      (derive_label(r.rating) == Sentiment::positive ? s.positive : s.negative)++;
    }
    if (r.condition) drugs_by_condition[*r.condition].insert(r.drug_name);
    sum += static_cast<double>(r.useful_count);
  }
  for (auto& [cond, drugs] : drugs_by_condition)
    s.condition_drug_counts.emplace_back(cond, drugs.size());
  std::stable_sort(s.condition_drug_counts.begin(), s.condition_drug_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (!records.empty()) {
    const auto [lo, hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const auto& a, const auto& b) { return a.useful_count < b.useful_count; });
    s.useful_count.min = lo->useful_count;
    s.useful_count.max = hi->useful_count;
    s.useful_count.mean = sum / static_cast<double>(records.size());
    if (records.size() > 1) {
      double ss = 0.0;
      for (const auto& r : records) {
        const double d = static_cast<double>(r.useful_count) - s.useful_count.mean;
        ss += d * d;
      }
      s.useful_count.stddev = std::sqrt(ss / static_cast<double>(records.size() - 1));
    }
  }
  return s;
}

void write_stats_csv(std::ostream& out, const CorpusStats& s) {
  out << "section,key,value\n";
  out << "corpus,row_count," << s.row_count << '\n';
  out << "labels,positive," << s.positive << '\n';
  out << "labels,negative," << s.negative << '\n';
  for (std::size_t i = 0; i < s.rating_histogram.size(); ++i)
    out << "rating_histogram," << i + 1 << ',' << s.rating_histogram[i] << '\n';
  out << "useful_count,min," << s.useful_count.min << '\n';
  out << "useful_count,max," << s.useful_count.max << '\n';
  out << "useful_count,mean," << format_real(s.useful_count.mean) << '\n';
  out << "useful_count,stddev," << format_real(s.useful_count.stddev) << '\n';
  if (s.cleaning) {
    const auto& c = *s.cleaning;
    out << "cleaning,input_rows," << c.input_rows << '\n';
    out << "cleaning,removed_null_condition," << c.removed_null_condition << '\n';
    out << "cleaning,removed_junk_condition," << c.removed_junk_condition << '\n';
    out << "cleaning,removed_duplicate_id," << c.removed_duplicate_id << '\n';
    out << "cleaning,output_rows," << c.output_rows << '\n';
  }
  for (const auto& [cond, n] : s.condition_drug_counts)
    out << "condition_drug_count," << csv_field(cond) << ',' << n << '\n';
}

std::string stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["row_count"] = s.row_count;
  j["labels"] = {{"positive", s.positive}, {"negative", s.negative}};
  j["rating_histogram"] = s.rating_histogram;
  j["useful_count"] = {{"min", s.useful_count.min},
                       {"max", s.useful_count.max},
                       {"mean", s.useful_count.mean},
                       {"stddev", s.useful_count.stddev}};
  if (s.cleaning) {
    const auto& c = *s.cleaning;
    j["cleaning"] = {{"input_rows", c.input_rows},
                     {"removed_null_condition", c.removed_null_condition},
                     {"removed_junk_condition", c.removed_junk_condition},
                     {"removed_duplicate_id", c.removed_duplicate_id},
                     {"output_rows", c.output_rows}};
  }
  auto conds = nlohmann::ordered_json::array();
  for (const auto& [cond, n] : s.condition_drug_counts)
    conds.push_back({{"condition", cond}, {"drugs", n}});
  j["condition_drug_counts"] = std::move(conds);
  return j.dump(2);
}

}  // namespace drugrec
