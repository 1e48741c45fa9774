#include "drugrec/sparse_features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "drugrec/error.hpp"
#include "text_util.hpp"

namespace drugrec {

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, NgramRange range) {
  if (range.low < 1 || range.low > range.high)
    throw InvalidArgument("n-gram range must satisfy 1 <= low <= high");
  std::vector<std::string> grams;
  for (int n = range.low; n <= range.high; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (tokens.size() < len) break;
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (std::size_t k = 1; k < len; ++k) {
        g += kGramSeparator;
        g += tokens[i + k];
      }
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

Vocabulary Vocabulary::fit(std::span<const Tokens> docs, NgramRange range, std::uint32_t min_df) {
  if (docs.empty()) throw InvalidArgument("cannot fit a vocabulary on an empty corpus");
  if (min_df < 1) throw InvalidArgument("min_df must be at least 1");
  std::unordered_map<std::string, std::uint32_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (auto& g : extract_ngrams(doc, range))
      if (seen.insert(g).second) ++df[g];
  }
  std::vector<std::pair<std::string, std::uint32_t>> rows;
  rows.reserve(df.size());
  for (auto& [g, n] : df)
    if (n >= min_df) rows.emplace_back(g, n);
  std::sort(rows.begin(), rows.end());
  return from_rows(std::move(rows), range, docs.size(), min_df);
}

Vocabulary Vocabulary::from_rows(std::vector<std::pair<std::string, std::uint32_t>> rows,
                                 NgramRange range, std::size_t corpus_size, std::uint32_t min_df) {
  Vocabulary v;
  v.range_ = range;
  v.corpus_size_ = corpus_size;
  v.min_df_ = min_df;
  v.grams_.reserve(rows.size());
  v.dfs_.reserve(rows.size());
  v.index_.reserve(rows.size());
  for (auto& [g, n] : rows) {
    if (n < 1 || n > corpus_size)
      throw InvalidArgument("document frequency of '" + g + "' outside 1..N");
    if (!v.grams_.empty() && !(v.grams_.back() < g))
      throw InvalidArgument("vocabulary rows must be strictly lexicographic");
    v.index_.emplace(g, static_cast<std::uint32_t>(v.grams_.size()));
    v.grams_.push_back(std::move(g));
    v.dfs_.push_back(n);
  }
  return v;
}

std::optional<Vocabulary::Entry> Vocabulary::find(std::string_view gram) const {
  const auto it = index_.find(std::string(gram));
  if (it == index_.end()) return std::nullopt;
  return Entry{it->second, dfs_[it->second]};
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Vocabulary::count_grams(
    std::span<const std::string> tokens) const {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& g : extract_ngrams(tokens, range_)) {
    const auto it = index_.find(g);
    if (it != index_.end()) ++counts[it->second];
  }
  return {counts.begin(), counts.end()};
}

Vocabulary fit_vocabulary(std::span<const Tokens> docs, NgramRange range, std::uint32_t min_df) {
  return Vocabulary::fit(docs, range, min_df);
}

SparseVector bow_transform(std::span<const std::string> tokens, const Vocabulary& vocab) {
  SparseVector v;
  v.dimension = vocab.size();
  for (const auto& [index, count] : vocab.count_grams(tokens))
    v.entries.push_back({index, static_cast<double>(count)});
  return v;
}

double tf(std::uint64_t count) { return std::log1p(static_cast<double>(count)); }

double idf(std::string_view gram, const Vocabulary& vocab) {
  const auto e = vocab.find(gram);
  if (!e) throw InvalidArgument("gram not in vocabulary");
  return std::log(static_cast<double>(vocab.corpus_size()) /
                  static_cast<double>(e->document_frequency));
}

TfIdfModel::TfIdfModel(Vocabulary vocab) : vocab_(std::move(vocab)) {
  idf_.resize(vocab_.size());
  const auto n = static_cast<double>(vocab_.corpus_size());
  for (std::uint32_t i = 0; i < idf_.size(); ++i)
    idf_[i] = std::log(n / static_cast<double>(vocab_.document_frequency(i)));
}

void TfIdfModel::save(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["format"] = "drugrec.tfidf.v1";
  j["ngram_range"] = {vocab_.ngram_range().low, vocab_.ngram_range().high};
  j["corpus_size"] = vocab_.corpus_size();
  j["min_df"] = vocab_.min_df();
  auto rows = nlohmann::ordered_json::array();
  for (std::uint32_t i = 0; i < vocab_.size(); ++i)
    rows.push_back({{"gram", vocab_.gram(i)},
                    {"index", i},
                    {"df", vocab_.document_frequency(i)},
                    {"idf", idf_[i]}});
  j["grams"] = std::move(rows);
  out << j.dump() << '\n';
}

TfIdfModel TfIdfModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "drugrec.tfidf.v1") throw FormatError("unsupported tfidf format");
    NgramRange range{j.at("ngram_range").at(0).get<int>(), j.at("ngram_range").at(1).get<int>()};
    std::vector<std::pair<std::string, std::uint32_t>> rows;
    for (const auto& row : j.at("grams")) {
      if (row.at("index").get<std::size_t>() != rows.size())
        throw FormatError("tfidf rows out of index order");
      rows.emplace_back(row.at("gram").get<std::string>(), row.at("df").get<std::uint32_t>());
    }
    return TfIdfModel(Vocabulary::from_rows(std::move(rows), range,
                                            j.at("corpus_size").get<std::size_t>(),
                                            j.at("min_df").get<std::uint32_t>()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tfidf table: ") + e.what());
  }
}

TfIdfModel fit_tfidf(std::span<const Tokens> docs, NgramRange range, std::uint32_t min_df) {
  return TfIdfModel(fit_vocabulary(docs, range, min_df));
}

SparseVector tfidf_transform(std::span<const std::string> tokens, const TfIdfModel& model) {
  SparseVector v;
  v.dimension = model.vocabulary().size();
  for (const auto& [index, count] : model.vocabulary().count_grams(tokens)) {
    const double w = tf(count) * model.idf_weight(index);
    if (w != 0.0) v.entries.push_back({index, w});
  }
  return v;
}

SparseMatrix bow_matrix(std::span<const Tokens> docs, const Vocabulary& vocab) {
  SparseMatrix m(vocab.size());
  for (const auto& d : docs) m.append(bow_transform(d, vocab));
  return m;
}

SparseMatrix tfidf_matrix(std::span<const Tokens> docs, const TfIdfModel& model) {
  SparseMatrix m(model.vocabulary().size());
  for (const auto& d : docs) m.append(tfidf_transform(d, model));
  return m;
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  out << "%drugrec coordinate " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k)
      out << i << ' ' << r.indices[k] << ' ' << format_real(r.values[k]) << '\n';
  }
}

SparseMatrix read_coordinate(std::istream& in) {
  std::string tag, kind;
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(in >> tag >> kind >> rows >> cols >> nnz) || tag != "%drugrec" || kind != "coordinate")
    throw FormatError("missing coordinate header");
  SparseMatrix m(cols);
  SparseVector row;
  row.dimension = cols;
  std::size_t current = 0;
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t r = 0;
    std::uint32_t c = 0;
    std::string value;
    if (!(in >> r >> c >> value)) throw FormatError("truncated coordinate file");
    if (r < current || r >= rows) throw FormatError("coordinate rows must be sorted and in range");
    while (current < r) {
      m.append(row);
      row.entries.clear();
      ++current;
    }
    row.entries.push_back({c, std::strtod(value.c_str(), nullptr)});
  }
  while (current < rows) {
    m.append(row);
    row.entries.clear();
    ++current;
  }
  return m;
}

}  // namespace drugrec
