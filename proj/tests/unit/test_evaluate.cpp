#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <drugrec/error.hpp>
#include <drugrec/evaluate.hpp>
#include <drugrec/rng.hpp>

namespace drugrec {
namespace {

constexpr Sentiment P = Sentiment::positive;
constexpr Sentiment N = Sentiment::negative;

double brute_auc(const std::vector<double>& s, const std::vector<Sentiment>& y) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == P && y[j] == N) {
        pairs += 1;
        num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return num / pairs;
}

TEST(Confusion, Examples) {
  std::vector<Sentiment> y = {P, P, N};
  EXPECT_EQ(confusion(y, y), (ConfusionCounts{2, 1, 0, 0}));
  std::vector<Sentiment> inv = {N, N, P};
  const auto c = confusion(inv, y);
  EXPECT_EQ(c.tp, 0u);
  EXPECT_EQ(c.tn, 0u);
  EXPECT_THROW(confusion(std::vector<Sentiment>{P}, y), InvalidArgument);
  EXPECT_THROW(confusion(std::vector<Sentiment>{}, std::vector<Sentiment>{}), InvalidArgument);
}

TEST(Metrics, Arithmetic) {
  const ConfusionCounts c{2, 6, 1, 1};
  EXPECT_NEAR(precision(c).value, 0.6667, 1e-4);
  EXPECT_NEAR(recall(c).value, 0.6667, 1e-4);
  EXPECT_NEAR(accuracy(c).value, 0.8, 1e-12);
  EXPECT_NEAR(f1(c).value, 0.6667, 1e-4);
  const ConfusionCounts perfect{5, 5, 0, 0};
  for (auto m : {precision(perfect), recall(perfect), accuracy(perfect), f1(perfect)}) {
    EXPECT_EQ(m.value, 1.0);
    EXPECT_FALSE(m.undefined);
  }
  const ConfusionCounts none{0, 4, 0, 3};
  EXPECT_EQ(precision(none).value, 0.0);
  EXPECT_TRUE(precision(none).undefined);
}

TEST(Metrics, HarmonicMeanAndFlipIdentity) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.uniform_index(30);
    std::vector<Sentiment> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform_index(2) ? P : N;
      y[i] = rng.uniform_index(2) ? P : N;
    }
    const auto c = confusion(p, y);
    const auto pr = precision(c), rc = recall(c);
    if (pr.value + rc.value > 0) {
      EXPECT_NEAR(f1(c).value, 2 * pr.value * rc.value / (pr.value + rc.value), 1e-15);
    }
    std::vector<Sentiment> fp(n), fy(n);
    for (std::size_t i = 0; i < n; ++i) { fp[i] = flip(p[i]); fy[i] = flip(y[i]); }
    const auto flipped = confusion(fp, fy);
    EXPECT_EQ(flipped, c.swapped());
    EXPECT_EQ(precision(flipped).value, precision(c.swapped()).value);
  }
}

TEST(RocAuc, Examples) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.1}, std::vector<Sentiment>{P, P, N}), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{3, 3, 3, 3}, std::vector<Sentiment>{P, N, N, P}), 0.5);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<Sentiment>{P, P}), InvalidArgument);
}

TEST(RocAuc, MatchesPairEnumeration) {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 2 + rng.uniform_index(11);
    std::vector<double> s(n);
    std::vector<Sentiment> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.uniform_index(5));  // coarse values force ties
      y[i] = i == 0 ? P : (i == 1 ? N : (rng.uniform_index(2) ? P : N));
    }
    EXPECT_NEAR(roc_auc(s, y), brute_auc(s, y), 1e-12);
  }
}

TEST(RocAuc, MonotoneInvarianceAndNegation) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 10 + rng.uniform_index(40);
    std::vector<double> s(n), e(n), neg(n);
    std::vector<Sentiment> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.uniform(-3, 3);
      e[i] = std::exp(2 * s[i]) + 1;
      neg[i] = -s[i];
      y[i] = i % 2 ? P : N;
    }
    EXPECT_NEAR(roc_auc(e, y), roc_auc(s, y), 1e-12);
    EXPECT_NEAR(roc_auc(neg, y), 1 - roc_auc(s, y), 1e-12);
  }
}

TEST(Report, ConstantPositiveModel) {
  std::vector<double> scores(10, 1.0);
  std::vector<Sentiment> y = {P, P, P, P, P, P, P, N, N, N};
  const auto r = make_report(scores, y, "always", "none");
  EXPECT_NEAR(r.accuracy.value, 0.7, 1e-12);
  EXPECT_EQ(r.negative.recall.value, 0.0);
  EXPECT_TRUE(r.negative.precision.undefined);
  EXPECT_TRUE(r.has_undefined());
  EXPECT_EQ(r.auc, 0.5);
}

TEST(Report, OracleModelAndRange) {
  Rng rng(5);
  std::vector<double> scores;
  std::vector<Sentiment> y;
  for (int i = 0; i < 50; ++i) {
    y.push_back(i % 3 ? P : N);
    scores.push_back(y.back() == P ? 1.0 + rng.uniform01() : -1.0 - rng.uniform01());
  }
  const auto r = make_report(scores, y);
  for (double v : {r.positive.precision.value, r.positive.recall.value, r.positive.f1.value, r.negative.precision.value,
                   r.negative.recall.value, r.negative.f1.value, r.accuracy.value, r.auc})
    EXPECT_EQ(v, 1.0);
  for (auto& s : scores) s = rng.uniform(-1, 1);
  const auto q = make_report(scores, y);
  for (double v : {q.positive.precision.value, q.negative.f1.value, q.accuracy.value, q.auc}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Report, CsvOneRowPerModelAndClass) {
  std::vector<double> scores = {1, -1, 1};
  std::vector<Sentiment> y = {P, N, N};
  std::vector<EvaluationReport> rs = {make_report(scores, y, "m1", "bow"), make_report(scores, y, "m2", "tfidf")};
  std::ostringstream out;
  write_reports_csv(out, rs);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_NE(text.find("m2,tfidf,negative,"), std::string::npos);
  EXPECT_NE(reports_to_json(rs).find("\"auc\""), std::string::npos);
}

}  // namespace
}  // namespace drugrec
