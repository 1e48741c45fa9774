#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <drugrec/error.hpp>
#include <drugrec/learn.hpp>
#include <drugrec/rng.hpp>

namespace drugrec {
namespace {

constexpr Sentiment P = Sentiment::positive;
constexpr Sentiment N = Sentiment::negative;

DenseDataset dense(std::vector<std::vector<double>> rows, std::vector<Sentiment> labels) {
  DenseMatrix m;
  for (const auto& r : rows) m.append(r);
  return DenseDataset::original(std::move(m), std::move(labels));
}

SparseDataset sparse(std::vector<std::vector<double>> rows, std::vector<Sentiment> labels) {
  DenseMatrix m;
  for (const auto& r : rows) m.append(r);
  return SparseDataset::original(to_sparse(m), std::move(labels));
}

DenseDataset xor_data() { return dense({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {N, P, P, N}); }

template <typename Data>
double train_accuracy(const ClassifierModel& m, const Data& d) {
  const auto s = m.decision_scores(d.rows);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ok += (s[i] > 0.0) == (d.labels[i] == P);
  return static_cast<double>(ok) / static_cast<double>(s.size());
}

SparseDataset separable(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> w(d);
  for (auto& v : w) v = rng.uniform(-1, 1);
  std::vector<std::vector<double>> rows;
  std::vector<Sentiment> labels;
  while (rows.size() < n) {
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform(-1, 1);
    double s = 0;
    for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
    if (std::abs(s) < 0.05) continue;  // keep a margin
    rows.push_back(x);
    labels.push_back(s > 0 ? P : N);
  }
  return sparse(rows, labels);
}

TEST(NaiveBayes, ClosedFormPosterior) {
  const auto data = sparse({{2, 0}, {0, 2}}, {P, N});
  const auto m = fit_multinomial_nb(data, 1.0);
  const std::vector<double> x = {1, 0};
  // log(3/4) - log(1/4) with equal priors.
  EXPECT_NEAR(m.decision_score(std::span<const double>(x)), std::log(3.0), 1e-12);
  EXPECT_EQ(m.predict(std::span<const double>(x)), P);
}

TEST(NaiveBayes, LargeAlphaShrinksToPriorDifference) {
  const auto data = sparse({{3, 0}, {2, 1}, {0, 4}}, {P, P, N});
  const std::vector<double> x = {1, 0};
  const double prior = std::log(2.0 / 3.0) - std::log(1.0 / 3.0);
  double prev = std::abs(fit_multinomial_nb(data, 1.0).decision_score(std::span<const double>(x)) - prior);
  for (double alpha : {10.0, 100.0, 1e4, 1e7}) {
    const double gap = std::abs(fit_multinomial_nb(data, alpha).decision_score(std::span<const double>(x)) - prior);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(NaiveBayes, TieIsNegativeAndErrors) {
  const auto data = sparse({{1, 1}, {1, 1}}, {P, N});
  const auto m = fit_multinomial_nb(data, 1.0);
  const std::vector<double> x = {1, 1};
  EXPECT_EQ(m.decision_score(std::span<const double>(x)), 0.0);
  EXPECT_EQ(m.predict(std::span<const double>(x)), N);
  EXPECT_THROW(fit_multinomial_nb(sparse({{-1, 0}, {1, 0}}, {P, N}), 1.0), InvalidArgument);
  EXPECT_THROW(fit_multinomial_nb(data, 0.0), InvalidArgument);
}

TEST(LinearSgd, PerceptronSeparatesRandomSets) {
  Rng rng(21);
  TrainConfig cfg = default_config(Algorithm::perceptron);
  cfg.epochs = 100;
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = separable(rng, 20 + rng.uniform_index(180), 2 + rng.uniform_index(4));
    const auto m = fit_linear_sgd(data, cfg, Loss::perceptron);
    EXPECT_EQ(train_accuracy(m, data), 1.0) << trial;
  }
}

TEST(LinearSgd, LogisticOnSymmetricData) {
  const auto data = sparse({{1}, {-1}}, {P, N});
  TrainConfig cfg;
  cfg.epochs = 50;
  const auto m = fit_linear_sgd(data, cfg, Loss::logistic);
  const auto& p = std::get<LinearParams>(m.params);
  EXPECT_GT(p.weights[0], 0.0);
  EXPECT_NEAR(p.bias, 0.0, 0.05);
}

TEST(LinearSgd, SingleLabelPredictsThatLabel) {
  for (auto loss : {Loss::logistic, Loss::hinge, Loss::squared, Loss::perceptron}) {
    for (auto label : {P, N}) {
      const auto data = sparse({{1, 0}, {0, 1}, {2, 3}}, {label, label, label});
      const auto m = fit_linear_sgd(data, TrainConfig{}, loss);
      for (const auto& x : std::vector<std::vector<double>>{{1, 0}, {0, 1}, {2, 3}, {0, 0}})
        EXPECT_EQ(m.predict(std::span<const double>(x)), label) << to_string(loss);
    }
  }
}

TEST(LinearSgd, DimensionMismatchIsError) {
  const auto m = fit_linear_sgd(sparse({{1, 0}, {0, 1}}, {P, N}), TrainConfig{}, Loss::hinge);
  const std::vector<double> x = {1, 2, 3};
  EXPECT_THROW(m.decision_score(std::span<const double>(x)), InvalidArgument);
}

TEST(LinearSgd, AnalyticGradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (auto loss : {Loss::logistic, Loss::squared}) {
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 3 + rng.uniform_index(10), d = 1 + rng.uniform_index(5);
      std::vector<std::vector<double>> rows(n, std::vector<double>(d));
      std::vector<Sentiment> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : rows[i]) v = rng.uniform(-2, 2);
        labels[i] = rng.uniform_index(2) ? P : N;
      }
      const auto data = sparse(rows, labels);
      std::vector<double> w(d);
      for (auto& v : w) v = rng.uniform(-1, 1);
      const double b = rng.uniform(-1, 1), lambda = rng.uniform(0, 0.5);
      std::vector<double> gw(d);
      double gb = 0;
      linear_objective_gradient(data, w, b, loss, lambda, gw, gb);
      const double h = 1e-6;
      for (std::size_t j = 0; j <= d; ++j) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (j < d) { wp[j] += h; wm[j] -= h; } else { bp += h; bm -= h; }
        const double fd = (linear_objective(data, wp, bp, loss, lambda) - linear_objective(data, wm, bm, loss, lambda)) / (2 * h);
        const double an = j < d ? gw[j] : gb;
        EXPECT_LE(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an))) << to_string(loss) << " j=" << j;
      }
    }
  }
}

TEST(LinearSgd, PerceptronSignsInvariantToFeatureScaling) {
  Rng rng(6);
  TrainConfig cfg = default_config(Algorithm::perceptron);
  cfg.fit_intercept = false;
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = separable(rng, 60, 4);
    const auto base = fit_linear_sgd(data, cfg, Loss::perceptron);
    for (int k : {-3, 2, 5}) {
      const double c = std::ldexp(1.0, k);
      DenseMatrix scaled = to_dense(data.rows);
      for (std::size_t i = 0; i < scaled.rows(); ++i)
        for (auto& v : scaled.row(i)) v *= c;
      auto scfg = cfg;
      scfg.learning_rate = cfg.learning_rate / c;
      const auto sdata = SparseDataset::original(to_sparse(scaled), data.labels);
      const auto m = fit_linear_sgd(sdata, scfg, Loss::perceptron);
      for (std::size_t i = 0; i < data.size(); ++i)
        EXPECT_EQ(m.predict(sdata.rows.row(i)), base.predict(data.rows.row(i)));
    }
  }
}

TEST(LinearSgd, Deterministic) {
  Rng rng(7);
  const auto data = separable(rng, 50, 3);
  for (auto a : {Algorithm::logistic_regression, Algorithm::linear_svc, Algorithm::ridge, Algorithm::sgd_hinge}) {
    const auto m1 = fit(a, data, default_config(a));
    const auto m2 = fit(a, data, default_config(a));
    EXPECT_EQ(std::get<LinearParams>(m1.params).weights, std::get<LinearParams>(m2.params).weights);
    EXPECT_EQ(m1.algorithm, a);
  }
}

TEST(Predict, ScoreZeroIsNegativeAndLinearScore) {
  ClassifierModel m;
  m.feature_dimension = 2;
  m.params = LinearParams{{1.0, 0.0}, 0.0};
  const std::vector<double> x = {2, 5}, z = {0, 7};
  EXPECT_EQ(m.decision_score(std::span<const double>(x)), 2.0);
  EXPECT_EQ(m.predict(std::span<const double>(x)), P);
  EXPECT_EQ(m.predict(std::span<const double>(z)), N);
}

TEST(DecisionTree, XorNeedsDepthTwo) {
  auto cfg = default_config(Algorithm::decision_tree);
  cfg.max_depth = 2;
  EXPECT_EQ(train_accuracy(fit_decision_tree(xor_data(), cfg), xor_data()), 1.0);
  cfg.max_depth = 1;
  EXPECT_LE(train_accuracy(fit_decision_tree(xor_data(), cfg), xor_data()), 0.75);
}

TEST(DecisionTree, PureInputIsSingleLeaf) {
  const auto m = fit_decision_tree(dense({{0, 1}, {2, 3}, {4, 5}}, {P, P, P}), default_config(Algorithm::decision_tree));
  const auto& e = std::get<TreeEnsembleParams>(m.params);
  ASSERT_EQ(e.trees.size(), 1u);
  EXPECT_EQ(e.trees[0].nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(e.trees[0].nodes[0].value, 0.5);
  EXPECT_THROW(fit_decision_tree(dense({}, {}), default_config(Algorithm::decision_tree)), InvalidArgument);
}

TEST(RandomForest, XorAndDeterminism) {
  auto cfg = default_config(Algorithm::random_forest);
  cfg.n_trees = 50;
  cfg.max_depth = 2;
  const auto m = fit_random_forest(xor_data(), cfg);
  EXPECT_EQ(train_accuracy(m, xor_data()), 1.0);
  const auto again = fit_random_forest(xor_data(), cfg);
  EXPECT_EQ(std::get<TreeEnsembleParams>(m.params).trees, std::get<TreeEnsembleParams>(again.params).trees);
}

TEST(RandomForest, SingleFullTreeEqualsDecisionTree) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> rows;
    std::vector<Sentiment> labels;
    for (int i = 0; i < 80; ++i) {
      rows.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
      labels.push_back(rows.back()[0] + rows.back()[1] * rows.back()[2] > 0.6 ? P : N);
    }
    const auto data = dense(rows, labels);
    auto fc = default_config(Algorithm::random_forest);
    fc.n_trees = 1;
    fc.bootstrap = false;
    fc.max_features = 3;
    const auto forest = fit_random_forest(data, fc);
    const auto tree = fit_decision_tree(data, default_config(Algorithm::decision_tree));
    EXPECT_EQ(forest.decision_scores(data.rows), tree.decision_scores(data.rows));
  }
}

TEST(Gbdt, OneRoundSolvesXor) {
  auto cfg = default_config(Algorithm::gbdt);
  cfg.n_trees = 1;
  cfg.shrinkage = 1.0;
  cfg.max_depth = 2;
  EXPECT_EQ(train_accuracy(fit_gbdt(xor_data(), cfg), xor_data()), 1.0);
}

TEST(Gbdt, ZeroRoundsScoreIsBaseLogOdds) {
  auto cfg = default_config(Algorithm::gbdt);
  cfg.n_trees = 0;
  const auto data = dense({{0}, {1}, {2}, {3}}, {P, P, P, N});
  const auto m = fit_gbdt(data, cfg);
  const std::vector<double> x = {5};
  EXPECT_NEAR(m.decision_score(std::span<const double>(x)), std::log(3.0), 1e-12);
}

TEST(Gbdt, TrainingLossNonIncreasing) {
  Rng rng(13);
  std::vector<std::vector<double>> rows;
  std::vector<Sentiment> labels;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    labels.push_back(rows.back()[0] * rows.back()[1] + 0.3 * rng.uniform(-1, 1) > 0 ? P : N);
  }
  const auto data = dense(rows, labels);
  double prev = INFINITY;
  for (std::size_t rounds = 0; rounds <= 12; ++rounds) {
    auto cfg = default_config(Algorithm::gbdt);
    cfg.n_trees = rounds;
    cfg.max_depth = 3;
    const auto m = fit_gbdt(data, cfg);
    const double loss = mean_logistic_loss(m.decision_scores(data.rows), data.labels);
    EXPECT_LE(loss, prev + 1e-12) << rounds;
    prev = loss;
  }
}

TEST(Persistence, RoundTripIsBitExact) {
  Rng rng(14);
  std::vector<std::vector<double>> rows;
  std::vector<Sentiment> labels;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)});
    labels.push_back(rows.back()[0] > rows.back()[2] ? P : N);
  }
  const auto d = dense(rows, labels);
  const auto s = SparseDataset::original(to_sparse(d.rows), labels);
  for (auto a : {Algorithm::multinomial_nb, Algorithm::logistic_regression, Algorithm::perceptron, Algorithm::ridge,
                 Algorithm::linear_svc, Algorithm::sgd_hinge, Algorithm::decision_tree, Algorithm::random_forest,
                 Algorithm::gbdt}) {
    auto cfg = default_config(a);
    cfg.n_trees = std::min<std::size_t>(cfg.n_trees, 10);
    const auto m = is_tree_algorithm(a) ? fit(a, d, cfg) : fit(a, s, cfg);
    std::stringstream ss;
    m.save(ss);
    const auto back = ClassifierModel::load(ss);
    EXPECT_EQ(back.algorithm, a);
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.decision_scores(d.rows), m.decision_scores(d.rows)) << to_string(a);
    EXPECT_EQ(back.decision_scores(s.rows), m.decision_scores(s.rows)) << to_string(a);
  }
  std::stringstream bad("{\"format\":\"drugrec.model.v1\",\"algorithm\":\"nope\"}");
  EXPECT_THROW(ClassifierModel::load(bad), FormatError);
}

TEST(Algorithms, NamesRoundTrip) {
  for (auto a : {Algorithm::multinomial_nb, Algorithm::gbdt, Algorithm::sgd_hinge})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("lgbm"));
}

}  // namespace
}  // namespace drugrec
