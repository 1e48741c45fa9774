#include "drugrec/textprep.hpp"

#include <fstream>
#include <sstream>

#include "drugrec/error.hpp"
#include "embedded_data.hpp"
#include "text_util.hpp"

namespace drugrec {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') fn(line, line_no);
    start = end + 1;
  }
}

bool is_alpha_ascii(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_alnum_ascii(char c) { return is_alpha_ascii(c) || (c >= '0' && c <= '9'); }

// Length in bytes of a UTF-8 sequence starting at `lead`, or 0 if invalid.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 0;
}

std::uint32_t utf8_decode(std::string_view s, std::size_t len) {
  const auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])); };
  switch (len) {
    case 1: return b(0);
    case 2: return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
    case 3: return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
    default: return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) | (b(3) & 0x3F);
  }
}

bool is_unicode_punctuation(std::uint32_t cp) {
  return (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) ||
         (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF01 && cp <= 0xFF0F) || cp == 0xFEFF;
}

// Removes `<...>` runs; an unmatched '<' is left for the punctuation pass.
std::string strip_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<') {
      const auto close = s.find_first_of("<>", i + 1);
      if (close != std::string_view::npos && s[close] == '>') {
        out += ' ';
        i = close + 1;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

bool starts_url_at(std::string_view s, std::size_t i) {
  if (i > 0 && !is_space_ascii(s[i - 1])) return false;
  auto rest = s.substr(i);
  if (rest.size() >= 4 && to_lower_ascii(rest.substr(0, 4)) == "www.") return true;
  std::size_t j = 0;
  if (j >= rest.size() || !is_alpha_ascii(rest[j])) return false;
  while (j < rest.size() && (is_alnum_ascii(rest[j]) || rest[j] == '+' || rest[j] == '.' || rest[j] == '-'))
    ++j;
  return rest.substr(j).starts_with("://");
}

std::string strip_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (starts_url_at(s, i)) {
      while (i < s.size() && !is_space_ascii(s[i])) ++i;
      out += ' ';
      continue;
    }
    out += s[i++];
  }
  return out;
}

bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i > 0 && !is_vowel_at(w, i - 1);
    default: return false;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (is_vowel_at(w, i)) return true;
  return false;
}

// Number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel_at(w, n - 1) && is_vowel_at(w, n - 2) && !is_vowel_at(w, n - 3) &&
         last != 'w' && last != 'x' && last != 'y';
}

std::string restore_stem(std::string stem) {
  const std::string_view s = stem;
  if (s.ends_with("at") || s.ends_with("bl") || s.ends_with("iz")) return stem + 'e';
  const auto n = s.size();
  if (n >= 2 && s[n - 1] == s[n - 2] && !is_vowel_at(s, n - 1) && s[n - 1] != 'l' &&
      s[n - 1] != 's' && s[n - 1] != 'z') {
    stem.pop_back();
    return stem;
  }
  if (measure(s) == 1 && ends_cvc(s)) return stem + 'e';
  return stem;
}

// One suffix-rule step; returns the input unchanged when no rule applies.
std::string apply_suffix_rule(const std::string& w) {
  const std::string_view v = w;
  const auto n = v.size();
  for (char c : v)
    if (c < 'a' || c > 'z') return w;
  if (n >= 5 && v.ends_with("ies")) return std::string(v.substr(0, n - 3)) + 'y';
  if (v.ends_with("sses")) return std::string(v.substr(0, n - 2));
  if (n >= 5 && v.ends_with("xes")) return std::string(v.substr(0, n - 2));
  if (n >= 4 && v.ends_with('s') && !v.ends_with("ss") && !v.ends_with("us") &&
      !v.ends_with("is"))
    return std::string(v.substr(0, n - 1));
  if (n >= 6 && v.ends_with("ing")) {
    const auto stem = v.substr(0, n - 3);
    if (has_vowel(stem)) return restore_stem(std::string(stem));
  }
  if (n >= 5 && v.ends_with("ed") && !v.ends_with("eed")) {
    const auto stem = v.substr(0, n - 2);
    if (has_vowel(stem)) return restore_stem(std::string(stem));
  }
  if (n >= 6 && v.ends_with("er")) {
    const auto stem = v.substr(0, n - 2);
    if (has_vowel(stem)) return restore_stem(std::string(stem));
  }
  return w;
}

}  // namespace

const StopwordLexicon& StopwordLexicon::builtin() {
  static const StopwordLexicon lexicon = parse(detail::embedded_stopwords());
  return lexicon;
}

StopwordLexicon StopwordLexicon::parse(std::string_view text) {
  StopwordLexicon lex;
  for_each_data_line(text, [&](std::string_view line, std::size_t) {
    lex.words_.insert(to_lower_ascii(line));
  });
  return lex;
}

StopwordLexicon StopwordLexicon::load(const std::string& path) { return parse(read_file(path)); }

const Lemmatizer& Lemmatizer::builtin() {
  static const Lemmatizer lemmatizer = parse(detail::embedded_lemma_exceptions());
  return lemmatizer;
}

Lemmatizer Lemmatizer::parse(std::string_view text) {
  Lemmatizer lem;
  for_each_data_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos)
      throw FormatError("lemma exception line " + std::to_string(line_no) + " needs two columns");
    const auto form = to_lower_ascii(trim(line.substr(0, split)));
    const auto lemma = to_lower_ascii(trim(line.substr(split + 1)));
    if (lemma.empty() || lemma.find_first_of(" \t") != std::string::npos)
      throw FormatError("lemma exception line " + std::to_string(line_no) + " is malformed");
    lem.exceptions_.insert_or_assign(form, lemma);
  });
  return lem;
}

Lemmatizer Lemmatizer::load(const std::string& path) { return parse(read_file(path)); }

std::string Lemmatizer::lemma(std::string_view token) const {
  std::string w(token);
  while (true) {
    if (const auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
    auto next = apply_suffix_rule(w);
    if (next == w) return w;
    w = std::move(next);
  }
}

std::string clean_text(std::string_view raw) {
  const auto no_urls = strip_urls(strip_tags(raw));
  std::string spaced;
  spaced.reserve(no_urls.size());
  const std::string_view s = no_urls;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      if (is_alnum_ascii(static_cast<char>(c)))
        spaced += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
      else
        spaced += ' ';  // punctuation, quotes, control characters, whitespace
      ++i;
      continue;
    }
    const auto len = utf8_length(c);
    if (len == 0 || i + len > s.size()) {
      spaced += ' ';
      ++i;
      continue;
    }
    const auto cp = utf8_decode(s.substr(i), len);
    if (is_unicode_punctuation(cp)) {
      spaced += ' ';
    } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
      // Latin-1 uppercase letters map to lowercase by +0x20.
      const auto lower = cp + 0x20;
      spaced += static_cast<char>(0xC0 | (lower >> 6));
      spaced += static_cast<char>(0x80 | (lower & 0x3F));
    } else {
      spaced.append(s.substr(i, len));
    }
    i += len;
  }
  std::string out;
  out.reserve(spaced.size());
  for (char c : spaced) {
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += c;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

Tokens tokenize(std::string_view cleaned) {
  Tokens out;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space_ascii(cleaned[i])) ++i;
    const auto start = i;
    while (i < cleaned.size() && !is_space_ascii(cleaned[i])) ++i;
    if (i > start) out.emplace_back(cleaned.substr(start, i - start));
  }
  return out;
}

Tokens remove_stopwords(std::span<const std::string> tokens, const StopwordLexicon& stopwords) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!t.empty() && !stopwords.contains(t)) out.push_back(t);
  return out;
}

Tokens lemmatize(std::span<const std::string> tokens, const Lemmatizer& lemmatizer) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatizer.lemma(t));
  return out;
}

ProcessedDoc preprocess_review(const ReviewRecord& record, const TextPipeline& pipeline) {
  ProcessedDoc doc;
  doc.record_id = record.unique_id;
  doc.raw_text = record.review_text;
  doc.combined_text = record.condition.value_or("");
  doc.combined_text += ' ';
  doc.combined_text += record.drug_name;
  doc.combined_text += ' ';
  doc.combined_text += record.review_text;
  doc.cleaned_text = clean_text(doc.combined_text);
  const auto tokens = remove_stopwords(tokenize(doc.cleaned_text), *pipeline.stopwords);
  doc.tokens = remove_stopwords(lemmatize(tokens, *pipeline.lemmatizer), *pipeline.stopwords);
  return doc;
}

}  // namespace drugrec
