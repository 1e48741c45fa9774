#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "drugrec/dense_features.hpp"
#include "drugrec/error.hpp"
#include "embedded_data.hpp"
#include "text_util.hpp"

namespace drugrec {

namespace {

bool is_punct_ascii(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}
bool is_upper_ascii(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower_ascii(char c) { return c >= 'a' && c <= 'z'; }

// Lowercased tokens of [a-z0-9'] runs, with typographic apostrophes folded to '.
std::vector<std::string> polarity_tokens(std::string_view text) {
  std::string folded;
  folded.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i).starts_with("\xE2\x80\x99")) {
      folded += '\'';
      i += 2;
    } else {
      folded += text[i];
    }
  }
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
    // Keep a trailing apostrophe only as part of "n't".
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) tokens.push_back(cur);
    cur.clear();
  };
  for (char c : folded) {
    if (is_upper_ascii(c)) c = static_cast<char>(c - 'A' + 'a');
    if (is_lower_ascii(c) || (c >= '0' && c <= '9') || c == '\'')
      cur += c;
    else
      flush();
  }
  flush();
  return tokens;
}

}  // namespace

const SentimentLexicon& SentimentLexicon::builtin() {
  static const SentimentLexicon lexicon = parse(detail::embedded_sentiment_lexicon());
  return lexicon;
}

SentimentLexicon SentimentLexicon::parse(std::string_view text) {
  SentimentLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    std::string token;
    double score = 0.0;
    if (!(fields >> token >> score) || !std::isfinite(score) || score < -1.0 || score > 1.0)
      throw FormatError("sentiment lexicon line " + std::to_string(line_no) +
                        " needs '<token> <score in [-1,1]>'");
    lex.scores_.insert_or_assign(to_lower_ascii(token), score);
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sentiment lexicon: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<double> SentimentLexicon::score(std::string_view token) const {
  const auto it = scores_.find(std::string(token));
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

bool is_negator(std::string_view token) {
  return token == "not" || token == "no" || token == "never" || token.ends_with("n't");
}

double polarity(std::string_view text, const SentimentLexicon& lexicon) {
  const auto tokens = polarity_tokens(text);
  double sum = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto s = lexicon.score(tokens[i]);
    if (!s) continue;
    sum += (i > 0 && is_negator(tokens[i - 1])) ? -*s : *s;
    ++matched;
  }
  return matched ? sum / static_cast<double>(matched) : 0.0;
}

std::array<double, kTextStatCount> text_stats(std::string_view raw, const StopwordLexicon& stopwords) {
  std::array<double, kTextStatCount> stats{};
  std::set<std::string> unique;
  double length_sum = 0.0;
  for (char c : raw) {
    if (is_punct_ascii(c)) stats[kPunctuation] += 1;
    if (is_upper_ascii(c) || is_lower_ascii(c)) stats[kLetters] += 1;
  }
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_space_ascii(raw[i])) ++i;
    std::string word;
    while (i < raw.size() && !is_space_ascii(raw[i])) {
      if (!is_punct_ascii(raw[i])) word += raw[i];
      ++i;
    }
    if (word.empty()) continue;
    stats[kWords] += 1;
    length_sum += static_cast<double>(word.size());
    const auto lower = to_lower_ascii(word);
    if (stopwords.contains(lower)) stats[kStopwords] += 1;
    unique.insert(lower);
    const bool any_upper = std::any_of(word.begin(), word.end(), is_upper_ascii);
    const bool any_lower = std::any_of(word.begin(), word.end(), is_lower_ascii);
    if (any_upper && !any_lower) stats[kUppercaseWords] += 1;
    if (is_upper_ascii(word.front()) && any_lower &&
        std::none_of(word.begin() + 1, word.end(), is_upper_ascii))
      stats[kTitleWords] += 1;
  }
  stats[kUniqueWords] = static_cast<double>(unique.size());
  stats[kMeanWordLength] = stats[kWords] > 0 ? length_sum / stats[kWords] : 0.0;
  return stats;
}

ConditionEncoder ConditionEncoder::fit(std::span<const ReviewRecord> train) {
  std::set<std::string> names;
  for (const auto& r : train)
    if (r.condition) names.insert(*r.condition);
  return from_conditions({names.begin(), names.end()});
}

ConditionEncoder ConditionEncoder::from_conditions(std::vector<std::string> sorted_conditions) {
  ConditionEncoder enc;
  for (std::size_t i = 0; i < sorted_conditions.size(); ++i) {
    if (i > 0 && !(sorted_conditions[i - 1] < sorted_conditions[i]))
      throw InvalidArgument("condition list must be sorted and unique");
    enc.codes_.emplace(sorted_conditions[i], static_cast<std::int64_t>(i));
  }
  enc.conditions_ = std::move(sorted_conditions);
  return enc;
}

std::int64_t ConditionEncoder::code(std::string_view condition) const {
  const auto it = codes_.find(std::string(condition));
  return it == codes_.end() ? kUnseen : it->second;
}

std::int64_t ConditionEncoder::code(const std::optional<std::string>& condition) const {
  return condition ? code(std::string_view(*condition)) : kUnseen;
}

DenseVector manual_features(const ReviewRecord& record, const ConditionEncoder& encoder,
                            const StopwordLexicon& stopwords, const SentimentLexicon& lexicon) {
  DenseVector f;
  f.reserve(kManualFeatureCount);
  f.push_back(static_cast<double>(record.useful_count));
  f.push_back(static_cast<double>(encoder.code(record.condition)));
  f.push_back(record.date.day);
  f.push_back(record.date.month);
  f.push_back(record.date.year);
  f.push_back(polarity(clean_text(record.review_text), lexicon));
  f.push_back(polarity(record.review_text, lexicon));
  for (double s : text_stats(record.review_text, stopwords)) f.push_back(s);
  return f;
}

DenseMatrix manual_feature_matrix(std::span<const ReviewRecord> records, const ConditionEncoder& encoder) {
  DenseMatrix m(0, kManualFeatureCount);
  for (const auto& r : records) m.append(manual_features(r, encoder));
  return m;
}

}  // namespace drugrec
