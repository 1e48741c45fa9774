#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include <drugrec/error.hpp>
#include <drugrec/rng.hpp>
#include <drugrec/sparse_features.hpp>

namespace drugrec {
namespace {

std::string g(std::initializer_list<const char*> parts) {
  std::string out;
  for (const char* p : parts) {
    if (!out.empty()) out += kGramSeparator;
    out += p;
  }
  return out;
}

std::vector<Tokens> three_docs() { return {{"a", "b"}, {"a"}, {"a", "c"}}; }

double weight_at(const SparseVector& v, std::uint32_t index) {
  for (const auto& e : v.entries)
    if (e.index == index) return e.weight;
  return 0.0;
}

TEST(ExtractNgrams, Examples) {
  const Tokens abc = {"a", "b", "c"};
  EXPECT_EQ(extract_ngrams(abc, {1, 2}), (std::vector<std::string>{"a", "b", "c", g({"a", "b"}), g({"b", "c"})}));
  EXPECT_EQ(extract_ngrams(Tokens{"a"}, {1, 2}), (std::vector<std::string>{"a"}));
  EXPECT_EQ(extract_ngrams(abc, {3, 3}), (std::vector<std::string>{g({"a", "b", "c"})}));
}

TEST(FitVocabulary, Examples) {
  const std::vector<Tokens> docs = {{"a", "b"}, {"b"}};
  const auto v = fit_vocabulary(docs, {1, 1}, 1);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.corpus_size(), 2u);
  EXPECT_EQ(v.find("a")->document_frequency, 1u);
  EXPECT_EQ(v.find("b")->document_frequency, 2u);
  EXPECT_EQ(v.find("a")->index, 0u);
  EXPECT_EQ(v.find("b")->index, 1u);

  const auto v2 = fit_vocabulary(docs, {1, 1}, 2);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_TRUE(v2.find("b"));
  EXPECT_FALSE(v2.find("a"));

  const auto again = fit_vocabulary(docs, {1, 1}, 1);
  for (std::uint32_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.gram(i), again.gram(i));
}

TEST(FitVocabulary, EmptyCorpusIsError) {
  EXPECT_THROW(fit_vocabulary(std::vector<Tokens>{}, {1, 2}, 1), InvalidArgument);
}

TEST(FitVocabulary, IndicesAreLexicographicBijection) {
  const auto v = fit_vocabulary(three_docs(), {1, 2}, 1);
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.find(v.gram(i))->index, i);
    EXPECT_GE(v.document_frequency(i), 1u);
    EXPECT_LE(v.document_frequency(i), v.corpus_size());
    if (i > 0) {
      EXPECT_LT(v.gram(i - 1), v.gram(i));
    }
  }
}

TEST(BowTransform, Examples) {
  const auto vocab = fit_vocabulary(std::vector<Tokens>{{"a", "b"}}, {1, 1}, 1);
  const auto v = bow_transform(Tokens{"b", "b", "a"}, vocab);
  EXPECT_EQ(v.entries, (std::vector<SparseEntry>{{0, 1.0}, {1, 2.0}}));
  EXPECT_TRUE(bow_transform(Tokens{"z", "q"}, vocab).empty());
  EXPECT_TRUE(bow_transform(Tokens{}, vocab).empty());
}

TEST(BowTransform, MatchesNaiveRecount) {
  Rng rng(3);
  const char* words[] = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tokens> docs(1 + rng.uniform_index(6));
    for (auto& d : docs)
      for (std::size_t k = rng.uniform_index(8); k > 0; --k) d.push_back(words[rng.uniform_index(6)]);
    if (std::all_of(docs.begin(), docs.end(), [](const Tokens& d) { return d.empty(); })) docs[0].push_back("a");
    const auto vocab = fit_vocabulary(docs, {1, 2}, 1);
    for (const auto& d : docs) {
      std::map<std::string, double> naive;
      for (std::size_t i = 0; i < d.size(); ++i) {
        naive[d[i]] += 1;
        if (i + 1 < d.size()) naive[d[i] + kGramSeparator + d[i + 1]] += 1;
      }
      const auto v = bow_transform(d, vocab);
      validate(v);
      ASSERT_EQ(v.nnz(), naive.size());
      for (const auto& e : v.entries) EXPECT_EQ(e.weight, naive.at(vocab.gram(e.index)));
    }
  }
}

TEST(TermWeights, TfExamplesAndMonotonicity) {
  EXPECT_EQ(tf(0), 0.0);
  EXPECT_NEAR(tf(1), 0.6931, 1e-4);
  EXPECT_NEAR(tf(9), 2.3026, 1e-4);
  for (std::uint64_t c = 0; c < 100; ++c) EXPECT_LT(tf(c), tf(c + 1));
}

TEST(TermWeights, IdfExamples) {
  const std::vector<Tokens> four = {{"u", "r"}, {"u"}, {"u"}, {"u"}};
  const auto v = fit_vocabulary(four, {1, 1}, 1);
  EXPECT_EQ(idf("u", v), 0.0);
  EXPECT_NEAR(idf("r", v), 1.3863, 1e-4);
  const auto two = fit_vocabulary(std::vector<Tokens>{{"x"}, {"x"}}, {1, 1}, 1);
  EXPECT_EQ(idf("x", two), 0.0);
  EXPECT_THROW(idf("missing", v), InvalidArgument);
}

TEST(TfIdf, ThreeDocumentOracle) {
  const auto model = fit_tfidf(three_docs(), {1, 1}, 1);
  const auto v = tfidf_transform(Tokens{"a", "b"}, model);
  const auto b = model.vocabulary().find("b")->index;
  EXPECT_NEAR(weight_at(v, b), std::log(2.0) * std::log(3.0), 1e-9);
  EXPECT_NEAR(weight_at(v, b), 0.7615, 1e-4);
  // "a" occurs in every document, so its weight is 0 and is not stored.
  EXPECT_EQ(v.nnz(), 1u);
}

TEST(TfIdf, CountOneWithIdfLnFour) {
  const std::vector<Tokens> four = {{"u", "r"}, {"u"}, {"u"}, {"u"}};
  const auto model = fit_tfidf(four, {1, 1}, 1);
  const auto v = tfidf_transform(Tokens{"r"}, model);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_NEAR(v.entries[0].weight, 0.9609, 1e-4);
}

TEST(TfIdf, UbiquitousGramIsZeroForAnyCount) {
  const auto model = fit_tfidf(three_docs(), {1, 1}, 1);
  for (int n = 1; n < 6; ++n) EXPECT_TRUE(tfidf_transform(Tokens(n, "a"), model).empty());
  EXPECT_TRUE(tfidf_transform(Tokens{}, model).empty());
}

TEST(TfIdf, PersistenceRoundTrip) {
  const auto model = fit_tfidf(std::vector<Tokens>{{"a", "b", "c"}, {"a", "b"}, {"b", "d"}}, {1, 2}, 1);
  std::stringstream ss;
  model.save(ss);
  const auto back = TfIdfModel::load(ss);
  ASSERT_EQ(back.vocabulary().size(), model.vocabulary().size());
  for (std::uint32_t i = 0; i < model.vocabulary().size(); ++i) {
    EXPECT_EQ(back.vocabulary().gram(i), model.vocabulary().gram(i));
    EXPECT_EQ(back.idf_weight(i), model.idf_weight(i));
  }
  std::stringstream bad("{\"format\": \"nope\"}");
  EXPECT_THROW(TfIdfModel::load(bad), FormatError);
}

TEST(Coordinate, RoundTrip) {
  const std::vector<Tokens> docs = {{"a", "b", "b"}, {}, {"c", "a"}};
  const auto model = fit_tfidf(docs, {1, 2}, 1);
  const auto m = tfidf_matrix(docs, model);
  std::stringstream ss;
  write_coordinate(ss, m);
  EXPECT_EQ(ss.str().rfind("%drugrec coordinate 3 ", 0), 0u);
  EXPECT_EQ(read_coordinate(ss), m);
}

}  // namespace
}  // namespace drugrec
