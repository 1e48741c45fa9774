#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drugrec/corpus.hpp"

namespace drugrec {

using Tokens = std::vector<std::string>;

class StopwordLexicon {
 public:
  /// The compiled-in default list (core/data/stopwords.txt).
  static const StopwordLexicon& builtin();
  /// One lowercase word per line; '#' starts a comment line.
  static StopwordLexicon parse(std::string_view text);
  static StopwordLexicon load(const std::string& path);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Rule-based lemmatizer: an exception table of irregular and protected forms
/// plus suffix rules for plurals, -ing, -ed and -er. Rules are applied until
/// the token stops changing, so every output is a fixed point.
class Lemmatizer {
 public:
  static const Lemmatizer& builtin();
  /// "<form> <lemma>" pairs, one per line; '#' starts a comment line.
  static Lemmatizer parse(std::string_view text);
  static Lemmatizer load(const std::string& path);

  std::string lemma(std::string_view token) const;
  const std::unordered_map<std::string, std::string>& exceptions() const noexcept {
    return exceptions_;
  }

 private:
  std::unordered_map<std::string, std::string> exceptions_;
};

/// Strips HTML tags and URLs, turns punctuation and quotes into spaces,
/// lowercases ASCII letters and collapses whitespace.
std::string clean_text(std::string_view raw);

Tokens tokenize(std::string_view cleaned);

Tokens remove_stopwords(std::span<const std::string> tokens,
                        const StopwordLexicon& stopwords = StopwordLexicon::builtin());

Tokens lemmatize(std::span<const std::string> tokens,
                 const Lemmatizer& lemmatizer = Lemmatizer::builtin());

struct ProcessedDoc {
  std::int64_t record_id = 0;
  std::string raw_text;
  std::string combined_text;
  std::string cleaned_text;
  Tokens tokens;
};

struct TextPipeline {
  const StopwordLexicon* stopwords = &StopwordLexicon::builtin();
  const Lemmatizer* lemmatizer = &Lemmatizer::builtin();
};

/// condition + drug + review, cleaned, tokenized, stopword-filtered and
/// lemmatized. Lemmas that land on a stopword are filtered as well.
ProcessedDoc preprocess_review(const ReviewRecord& record, const TextPipeline& pipeline = {});

}  // namespace drugrec
