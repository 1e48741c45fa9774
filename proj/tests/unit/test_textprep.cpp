#include <gtest/gtest.h>

#include <drugrec/corpus.hpp>
#include <drugrec/rng.hpp>
#include <drugrec/textprep.hpp>

namespace drugrec {
namespace {

bool has_upper_or_space(const std::string& t) {
  for (char c : t)
    if ((c >= 'A' && c <= 'Z') || c == ' ' || c == '\t' || c == '\n') return true;
  return false;
}

TEST(CleanText, Examples) {
  EXPECT_EQ(clean_text("It Worked!!"), "it worked");
  EXPECT_EQ(clean_text("see <b>this</b> at http://x.co now"), "see this at now");
  EXPECT_EQ(clean_text(""), "");
  EXPECT_EQ(clean_text("visit www.drugs.com/x, then \"rest\""), "visit then rest");
  EXPECT_EQ(clean_text("10mg—twice “daily”"), "10mg twice daily");
}

TEST(CleanText, IsIdempotent) {
  for (const char* s : {"It Worked!!", "A <i>b</i> c... https://e.f/g?h=1 I&#039;m", "  MiXeD\tcase\n", "ÉtÉ"})
    EXPECT_EQ(clean_text(clean_text(s)), clean_text(s));
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("it worked"), (Tokens{"it", "worked"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("a  b"), (Tokens{"a", "b"}));
}

TEST(RemoveStopwords, Examples) {
  EXPECT_EQ(remove_stopwords(Tokens{"we", "all", "went"}), (Tokens{"went"}));
  EXPECT_EQ(remove_stopwords(Tokens{"drug"}), (Tokens{"drug"}));
  EXPECT_TRUE(remove_stopwords(Tokens{}).empty());
  for (const char* w : {"a", "to", "all", "we", "with"}) EXPECT_TRUE(StopwordLexicon::builtin().contains(w)) << w;
}

TEST(RemoveStopwords, IsIdempotent) {
  const Tokens t = {"i", "was", "not", "sure", "the", "drug", "was", "working"};
  const auto once = remove_stopwords(t);
  EXPECT_EQ(remove_stopwords(once), once);
}

TEST(Lemmatize, Examples) {
  EXPECT_EQ(lemmatize(Tokens{"running"}), (Tokens{"run"}));
  EXPECT_EQ(lemmatize(Tokens{"feet"}), (Tokens{"foot"}));
  EXPECT_EQ(lemmatize(Tokens{"drug"}), (Tokens{"drug"}));
}

TEST(Lemmatize, SuffixRules) {
  const auto& lm = Lemmatizer::builtin();
  EXPECT_EQ(lm.lemma("pills"), "pill");
  EXPECT_EQ(lm.lemma("remedies"), "remedy");
  EXPECT_EQ(lm.lemma("glasses"), "glass");
  EXPECT_EQ(lm.lemma("boxes"), "box");
  EXPECT_EQ(lm.lemma("helped"), "help");
  EXPECT_EQ(lm.lemma("stopped"), "stop");
  EXPECT_EQ(lm.lemma("hoping"), "hope");
  EXPECT_EQ(lm.lemma("bus"), "bus");
  EXPECT_EQ(lm.lemma("herpes"), "herpes");
  EXPECT_EQ(lm.lemma("10mg"), "10mg");
}

TEST(Lemmatize, OutputsAreFixedPoints) {
  const auto& lm = Lemmatizer::builtin();
  for (const auto& [form, lemma] : lm.exceptions()) EXPECT_EQ(lm.lemma(lemma), lemma) << form;
  Rng rng(11);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  const char* suffixes[] = {"", "s", "es", "ies", "ing", "ed", "er", "ers", "ings", "sses"};
  for (int i = 0; i < 5000; ++i) {
    std::string w;
    const auto len = 1 + rng.uniform_index(8);
    for (std::size_t k = 0; k < len; ++k) w += alphabet[rng.uniform_index(26)];
    w += suffixes[rng.uniform_index(std::size(suffixes))];
    const auto l = lm.lemma(w);
    EXPECT_EQ(lm.lemma(l), l) << w;
    EXPECT_FALSE(l.empty()) << w;
  }
}

TEST(PreprocessReview, CombinesConditionAndDrug) {
  ReviewRecord r;
  r.condition = "acne";
  r.drug_name = "X";
  r.review_text = "It Worked!!";
  const auto doc = preprocess_review(r);
  EXPECT_EQ(doc.combined_text, "acne X It Worked!!");
  EXPECT_EQ(doc.cleaned_text, "acne x it worked");
  EXPECT_NE(std::find(doc.tokens.begin(), doc.tokens.end(), "acne"), doc.tokens.end());
  EXPECT_NE(std::find(doc.tokens.begin(), doc.tokens.end(), "x"), doc.tokens.end());
  EXPECT_NE(std::find(doc.tokens.begin(), doc.tokens.end(), "work"), doc.tokens.end());
}

TEST(PreprocessReview, EmptyReviewKeepsConditionAndDrug) {
  ReviewRecord r;
  r.condition = "Birth Control";
  r.drug_name = "Nexplanon";
  const auto doc = preprocess_review(r);
  EXPECT_EQ(doc.tokens, lemmatize(remove_stopwords(tokenize("birth control nexplanon"))));
}

TEST(PreprocessReview, TokensSatisfyInvariants) {
  ReviewRecord r;
  r.condition = "Depression";
  r.drug_name = "Sertraline";
  r.review_text = "\"I WAS feeling <br>much better</br> after 2 weeks... see www.x.org; it's the BEST!\"";
  const auto a = preprocess_review(r);
  const auto b = preprocess_review(r);
  EXPECT_EQ(a.tokens, b.tokens);
  for (const auto& t : a.tokens) {
    EXPECT_FALSE(t.empty());
    EXPECT_FALSE(has_upper_or_space(t)) << t;
    EXPECT_FALSE(StopwordLexicon::builtin().contains(t)) << t;
  }
  EXPECT_EQ(a.cleaned_text.find('<'), std::string::npos);
  EXPECT_EQ(a.cleaned_text.find("www"), std::string::npos);
}

TEST(Lexicons, ParseFromText) {
  const auto sw = StopwordLexicon::parse("# comment\nfoo\n\nBar\n");
  EXPECT_TRUE(sw.contains("foo"));
  EXPECT_EQ(sw.size(), 2u);
  const auto lm = Lemmatizer::parse("# c\ngeese goose\n");
  EXPECT_EQ(lm.lemma("geese"), "goose");
}

}  // namespace
}  // namespace drugrec
