#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "drugrec/matrix.hpp"
#include "drugrec/resample.hpp"

namespace drugrec {

enum class Algorithm {
  multinomial_nb,
  logistic_regression,
  perceptron,
  ridge,
  linear_svc,
  sgd_hinge,
  decision_tree,
  random_forest,
  gbdt,
};

std::string_view to_string(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool is_tree_algorithm(Algorithm a) noexcept;

enum class Loss { logistic, hinge, perceptron, squared };

std::string_view to_string(Loss l) noexcept;

struct TrainConfig {
  // linear models
  std::size_t epochs = 10;
  double learning_rate = 0.1;  // step at epoch e (1-based) is learning_rate / sqrt(e)
  double l2_lambda = 1e-4;
  bool fit_intercept = true;
  // naive Bayes
  double nb_alpha = 1.0;
  // trees
  std::size_t max_depth = 12;
  std::size_t n_trees = 100;   // forest size or boosting rounds
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // per-split candidates; 0 = sqrt(d) for forests, d otherwise
  bool bootstrap = true;
  std::size_t max_bins = 256;
  double shrinkage = 0.1;
  double leaf_l2 = 1.0;  // L2 penalty on boosted leaf values

  std::uint64_t seed = 1;
  std::size_t threads = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Defaults for one algorithm (epochs, rates, forest/boosting sizes).
TrainConfig default_config(Algorithm a);

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct NaiveBayesParams {
  double log_prior[2] = {0.0, 0.0};             // indexed by to_int(Sentiment)
  std::vector<double> log_likelihood[2];
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // rows with x[feature] <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double evaluate(std::span<const double> x) const;
  double evaluate(SparseRowView x) const;
  std::size_t depth() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

/// score = base_score + tree_weight * sum of tree outputs.
struct TreeEnsembleParams {
  std::vector<Tree> trees;
  double base_score = 0.0;
  double tree_weight = 1.0;
};

using ModelParams = std::variant<LinearParams, NaiveBayesParams, TreeEnsembleParams>;

/// A fitted binary classifier. predict(x) is positive iff decision_score(x) > 0.
class ClassifierModel {
 public:
  Algorithm algorithm = Algorithm::perceptron;
  std::size_t feature_dimension = 0;
  TrainConfig config;
  ModelParams params;

  double decision_score(std::span<const double> x) const;
  double decision_score(SparseRowView x) const;
  Sentiment predict(std::span<const double> x) const;
  Sentiment predict(SparseRowView x) const;

  std::vector<double> decision_scores(const DenseMatrix& x) const;
  std::vector<double> decision_scores(const SparseMatrix& x) const;

  /// JSON with algorithm tag, dimension, config and parameters. Reloaded
  /// models reproduce every decision score bit for bit.
  void save(std::ostream& out) const;
  static ClassifierModel load(std::istream& in);
};

// ---- linear models ---------------------------------------------------------

/// Loss of one example with label y in {-1, +1} and score s.
double loss_value(Loss loss, double y, double s);
/// d loss / d s.
double loss_derivative(Loss loss, double y, double s);

/// (1/n) sum loss(y_i, w.x_i + b) + lambda * |w|^2 / 2.
double linear_objective(const SparseDataset& data, std::span<const double> w, double b, Loss loss,
                        double lambda);
/// Analytic gradient of linear_objective.
void linear_objective_gradient(const SparseDataset& data, std::span<const double> w, double b,
                               Loss loss, double lambda, std::span<double> grad_w, double& grad_b);

/// Stochastic gradient descent on linear_objective with per-epoch shuffling.
/// Updates touch only non-zero coordinates; L2 shrinkage is applied lazily
/// through a global scale. Squared-loss steps are divided by max(1, |x|^2).
/// The perceptron loss is never regularized.
ClassifierModel fit_linear_sgd(const SparseDataset& train, const TrainConfig& config, Loss loss);

ClassifierModel fit_multinomial_nb(const SparseDataset& train, double alpha);

// ---- trees -----------------------------------------------------------------

/// Greedy CART on Gini impurity over per-feature quantile cut points (exact
/// when a feature has at most max_bins distinct values). Ties prefer the lower
/// feature index, then the lower threshold. Leaves score positive fraction - 0.5.
ClassifierModel fit_decision_tree(const DenseDataset& train, const TrainConfig& config);

/// Bagged CART trees with per-split feature subsampling; score is the mean tree score.
ClassifierModel fit_random_forest(const DenseDataset& train, const TrainConfig& config);

/// Gradient-boosted regression trees on logistic loss using histogram splits.
/// Leaf values minimize the L2-penalized logistic loss of their rows exactly.
ClassifierModel fit_gbdt(const DenseDataset& train, const TrainConfig& config);

/// Mean logistic loss of a model's decision scores (used for boosting checks).
double mean_logistic_loss(std::span<const double> scores, std::span<const Sentiment> labels);

// ---- dispatch --------------------------------------------------------------

ClassifierModel fit(Algorithm algorithm, const SparseDataset& train, const TrainConfig& config);
ClassifierModel fit(Algorithm algorithm, const DenseDataset& train, const TrainConfig& config);

}  // namespace drugrec
