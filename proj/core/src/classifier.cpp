#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "drugrec/error.hpp"
#include "drugrec/learn.hpp"

namespace drugrec {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 9> kAlgorithmNames = {{
    {Algorithm::multinomial_nb, "multinomial_nb"},
    {Algorithm::logistic_regression, "logistic_regression"},
    {Algorithm::perceptron, "perceptron"},
    {Algorithm::ridge, "ridge"},
    {Algorithm::linear_svc, "linear_svc"},
    {Algorithm::sgd_hinge, "sgd_hinge"},
    {Algorithm::decision_tree, "decision_tree"},
    {Algorithm::random_forest, "random_forest"},
    {Algorithm::gbdt, "gbdt"},
}};

template <typename Row>
void check_row(const ClassifierModel& m, const Row& x);

template <>
void check_row(const ClassifierModel& m, const std::span<const double>& x) {
  if (x.size() != m.feature_dimension)
    throw InvalidArgument("input has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(m.feature_dimension));
}

template <>
void check_row(const ClassifierModel& m, const SparseRowView& x) {
  if (x.nnz() > 0 && x.indices.back() >= m.feature_dimension)
    throw InvalidArgument("sparse input index exceeds the model's feature dimension");
}

struct ScoreVisitor {
  std::span<const double> dense;
  const SparseRowView* sparse = nullptr;

  double operator()(const LinearParams& p) const {
    if (sparse) return dot(*sparse, p.weights) + p.bias;
    double s = p.bias;
    for (std::size_t j = 0; j < dense.size(); ++j) s += p.weights[j] * dense[j];
    return s;
  }
  double operator()(const NaiveBayesParams& p) const {
    double pos = p.log_prior[1], neg = p.log_prior[0];
    if (sparse) {
      for (std::size_t k = 0; k < sparse->nnz(); ++k) {
        pos += sparse->values[k] * p.log_likelihood[1][sparse->indices[k]];
        neg += sparse->values[k] * p.log_likelihood[0][sparse->indices[k]];
      }
    } else {
      for (std::size_t j = 0; j < dense.size(); ++j) {
        if (dense[j] == 0.0) continue;
        pos += dense[j] * p.log_likelihood[1][j];
        neg += dense[j] * p.log_likelihood[0][j];
      }
    }
    return pos - neg;
  }
  double operator()(const TreeEnsembleParams& p) const {
    double sum = 0.0;
    for (const auto& t : p.trees) sum += sparse ? t.evaluate(*sparse) : t.evaluate(dense);
    return p.base_score + p.tree_weight * sum;
  }
};

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},         {"learning_rate", c.learning_rate},
          {"l2_lambda", c.l2_lambda},   {"fit_intercept", c.fit_intercept},
          {"nb_alpha", c.nb_alpha},     {"max_depth", c.max_depth},
          {"n_trees", c.n_trees},       {"min_leaf", c.min_leaf},
          {"max_features", c.max_features}, {"bootstrap", c.bootstrap},
          {"max_bins", c.max_bins},     {"shrinkage", c.shrinkage},
          {"leaf_l2", c.leaf_l2},       {"seed", c.seed},
          {"threads", c.threads}};
}

TrainConfig config_from_json(const nlohmann::json& j, TrainConfig c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("epochs", c.epochs);
  get("learning_rate", c.learning_rate);
  get("l2_lambda", c.l2_lambda);
  get("fit_intercept", c.fit_intercept);
  get("nb_alpha", c.nb_alpha);
  get("max_depth", c.max_depth);
  get("n_trees", c.n_trees);
  get("min_leaf", c.min_leaf);
  get("max_features", c.max_features);
  get("bootstrap", c.bootstrap);
  get("max_bins", c.max_bins);
  get("shrinkage", c.shrinkage);
  get("leaf_l2", c.leaf_l2);
  get("seed", c.seed);
  get("threads", c.threads);
  return c;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  for (const auto& [alg, name] : kAlgorithmNames)
    if (alg == a) return name;
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& [alg, n] : kAlgorithmNames)
    if (n == name) return alg;
  return std::nullopt;
}

bool is_tree_algorithm(Algorithm a) noexcept {
  return a == Algorithm::decision_tree || a == Algorithm::random_forest || a == Algorithm::gbdt;
}

TrainConfig default_config(Algorithm a) {
  TrainConfig c;
  switch (a) {
    case Algorithm::perceptron:
      c.l2_lambda = 0.0;
      break;
    case Algorithm::sgd_hinge:
      c.epochs = 5;
      c.l2_lambda = 1e-3;
      break;
    case Algorithm::decision_tree:
      c.n_trees = 1;
      c.bootstrap = false;
      break;
    case Algorithm::random_forest:
      c.n_trees = 100;
      c.max_depth = 12;
      break;
    case Algorithm::gbdt:
      c.n_trees = 100;
      c.max_depth = 6;
      c.shrinkage = 0.1;
      c.bootstrap = false;
      break;
    default:
      break;
  }
  return c;
}

double ClassifierModel::decision_score(std::span<const double> x) const {
  check_row(*this, x);
  return std::visit(ScoreVisitor{x, nullptr}, params);
}

double ClassifierModel::decision_score(SparseRowView x) const {
  check_row(*this, x);
  return std::visit(ScoreVisitor{{}, &x}, params);
}

Sentiment ClassifierModel::predict(std::span<const double> x) const {
  return decision_score(x) > 0.0 ? Sentiment::positive : Sentiment::negative;
}

Sentiment ClassifierModel::predict(SparseRowView x) const {
  return decision_score(x) > 0.0 ? Sentiment::positive : Sentiment::negative;
}

std::vector<double> ClassifierModel::decision_scores(const DenseMatrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decision_score(x.row(i));
  return out;
}

std::vector<double> ClassifierModel::decision_scores(const SparseMatrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decision_score(x.row(i));
  return out;
}

void ClassifierModel::save(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["format"] = "drugrec.model.v1";
  j["algorithm"] = to_string(algorithm);
  j["feature_dimension"] = feature_dimension;
  j["config"] = config_to_json(config);
  if (const auto* p = std::get_if<LinearParams>(&params)) {
    j["kind"] = "linear";
    j["params"] = {{"weights", p->weights}, {"bias", p->bias}};
  } else if (const auto* p = std::get_if<NaiveBayesParams>(&params)) {
    j["kind"] = "naive_bayes";
    j["params"] = {{"log_prior", {p->log_prior[0], p->log_prior[1]}},
                   {"log_likelihood", {p->log_likelihood[0], p->log_likelihood[1]}}};
  } else {
    const auto& e = std::get<TreeEnsembleParams>(params);
    j["kind"] = "tree_ensemble";
    auto trees = nlohmann::ordered_json::array();
    for (const auto& t : e.trees) {
      nlohmann::ordered_json nodes = {{"feature", nlohmann::json::array()},
                                      {"threshold", nlohmann::json::array()},
                                      {"left", nlohmann::json::array()},
                                      {"right", nlohmann::json::array()},
                                      {"value", nlohmann::json::array()}};
      for (const auto& n : t.nodes) {
        nodes["feature"].push_back(n.feature);
        nodes["threshold"].push_back(n.threshold);
        nodes["left"].push_back(n.left);
        nodes["right"].push_back(n.right);
        nodes["value"].push_back(n.value);
      }
      trees.push_back(std::move(nodes));
    }
    j["params"] = {{"base_score", e.base_score}, {"tree_weight", e.tree_weight}, {"trees", trees}};
  }
  out << j.dump() << '\n';
}

ClassifierModel ClassifierModel::load(std::istream& in) {
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("format") != "drugrec.model.v1") throw FormatError("unsupported model format");
    ClassifierModel m;
    const auto alg = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!alg) throw FormatError("unknown algorithm tag");
    m.algorithm = *alg;
    m.feature_dimension = j.at("feature_dimension").get<std::size_t>();
    m.config = config_from_json(j.at("config"), default_config(*alg));
    const auto kind = j.at("kind").get<std::string>();
    const auto& p = j.at("params");
    if (kind == "linear") {
      LinearParams lp;
      lp.weights = p.at("weights").get<std::vector<double>>();
      lp.bias = p.at("bias").get<double>();
      if (lp.weights.size() != m.feature_dimension) throw FormatError("weight vector size mismatch");
      m.params = std::move(lp);
    } else if (kind == "naive_bayes") {
      NaiveBayesParams nb;
      for (int c = 0; c < 2; ++c) {
        nb.log_prior[c] = p.at("log_prior").at(c).get<double>();
        nb.log_likelihood[c] = p.at("log_likelihood").at(c).get<std::vector<double>>();
        if (nb.log_likelihood[c].size() != m.feature_dimension)
          throw FormatError("likelihood vector size mismatch");
      }
      m.params = std::move(nb);
    } else if (kind == "tree_ensemble") {
      TreeEnsembleParams e;
      e.base_score = p.at("base_score").get<double>();
      e.tree_weight = p.at("tree_weight").get<double>();
      for (const auto& t : p.at("trees")) {
        Tree tree;
        const auto n = t.at("feature").size();
        for (std::size_t k = 0; k < n; ++k) {
          TreeNode node{t.at("feature").at(k).get<std::int32_t>(), t.at("threshold").at(k).get<double>(),
                        t.at("left").at(k).get<std::int32_t>(), t.at("right").at(k).get<std::int32_t>(),
                        t.at("value").at(k).get<double>()};
          const bool leaf = node.feature < 0;
          if (!leaf && (node.feature >= static_cast<std::int32_t>(m.feature_dimension) || node.left <= 0 ||
                        node.right <= 0 || static_cast<std::size_t>(node.left) >= n ||
                        static_cast<std::size_t>(node.right) >= n))
            throw FormatError("tree node references are out of range");
          tree.nodes.push_back(node);
        }
        if (tree.nodes.empty()) throw FormatError("empty tree");
        e.trees.push_back(std::move(tree));
      }
      m.params = std::move(e);
    } else {
      throw FormatError("unknown model kind '" + kind + "'");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

ClassifierModel fit(Algorithm algorithm, const SparseDataset& train, const TrainConfig& config) {
  switch (algorithm) {
    case Algorithm::multinomial_nb: return fit_multinomial_nb(train, config.nb_alpha);
    case Algorithm::logistic_regression: return fit_linear_sgd(train, config, Loss::logistic);
    case Algorithm::perceptron: return fit_linear_sgd(train, config, Loss::perceptron);
    case Algorithm::ridge: return fit_linear_sgd(train, config, Loss::squared);
    case Algorithm::linear_svc: return fit_linear_sgd(train, config, Loss::hinge);
    case Algorithm::sgd_hinge: {
      auto m = fit_linear_sgd(train, config, Loss::hinge);
      m.algorithm = Algorithm::sgd_hinge;
      return m;
    }
    default: {
      const auto dense = DenseDataset{to_dense(train.rows), train.labels, train.provenance, train.origins};
      return fit(algorithm, dense, config);
    }
  }
}

ClassifierModel fit(Algorithm algorithm, const DenseDataset& train, const TrainConfig& config) {
  switch (algorithm) {
    case Algorithm::decision_tree: return fit_decision_tree(train, config);
    case Algorithm::random_forest: return fit_random_forest(train, config);
    case Algorithm::gbdt: return fit_gbdt(train, config);
    default: {
      const auto sparse = SparseDataset{to_sparse(train.rows), train.labels, train.provenance, train.origins};
      return fit(algorithm, sparse, config);
    }
  }
}

}  // namespace drugrec
