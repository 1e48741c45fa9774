#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drugrec/error.hpp"
#include "drugrec/learn.hpp"
#include "drugrec/rng.hpp"

namespace drugrec {

namespace {

double label_sign(Sentiment s) { return s == Sentiment::positive ? 1.0 : -1.0; }

// ln(1 + e^z), stable for large |z|.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Algorithm algorithm_for(Loss loss) {
  switch (loss) {
    case Loss::logistic: return Algorithm::logistic_regression;
    case Loss::hinge: return Algorithm::linear_svc;
    case Loss::perceptron: return Algorithm::perceptron;
    case Loss::squared: return Algorithm::ridge;
  }
  return Algorithm::perceptron;
}

void check_dimensions(const SparseDataset& data, std::size_t w) {
  if (data.rows.rows() != data.labels.size()) throw InvalidArgument("row and label counts differ");
  if (data.rows.cols() != w)
    throw InvalidArgument("feature dimension " + std::to_string(data.rows.cols()) +
                          " does not match weight dimension " + std::to_string(w));
}

}  // namespace

std::string_view to_string(Loss l) noexcept {
  switch (l) {
    case Loss::logistic: return "logistic";
    case Loss::hinge: return "hinge";
    case Loss::perceptron: return "perceptron";
    case Loss::squared: return "squared";
  }
  return "?";
}

double loss_value(Loss loss, double y, double s) {
  switch (loss) {
    case Loss::logistic: return softplus(-y * s);
    case Loss::hinge: return std::max(0.0, 1.0 - y * s);
    case Loss::perceptron: return std::max(0.0, -y * s);
    case Loss::squared: return (y - s) * (y - s);
  }
  return 0.0;
}

double loss_derivative(Loss loss, double y, double s) {
  switch (loss) {
    case Loss::logistic: return -y * sigmoid(-y * s);
    case Loss::hinge: return y * s < 1.0 ? -y : 0.0;
    // A zero margin counts as a mistake so training from zero weights moves.
    case Loss::perceptron: return y * s <= 0.0 ? -y : 0.0;
    case Loss::squared: return 2.0 * (s - y);
  }
  return 0.0;
}

double linear_objective(const SparseDataset& data, std::span<const double> w, double b, Loss loss,
                        double lambda) {
  check_dimensions(data, w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    total += loss_value(loss, label_sign(data.labels[i]), dot(data.rows.row(i), w) + b);
  const double sq = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return total / static_cast<double>(data.size()) + 0.5 * lambda * sq;
}

void linear_objective_gradient(const SparseDataset& data, std::span<const double> w, double b,
                               Loss loss, double lambda, std::span<double> grad_w, double& grad_b) {
  check_dimensions(data, w.size());
  if (grad_w.size() != w.size()) throw InvalidArgument("gradient buffer has the wrong size");
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.rows.row(i);
    const double g = loss_derivative(loss, label_sign(data.labels[i]), dot(row, w) + b) * inv_n;
    for (std::size_t k = 0; k < row.nnz(); ++k) grad_w[row.indices[k]] += g * row.values[k];
    grad_b += g;
  }
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += lambda * w[j];
}

ClassifierModel fit_linear_sgd(const SparseDataset& train, const TrainConfig& config, Loss loss) {
  const std::size_t dim = train.rows.cols();
  check_dimensions(train, dim);
  if (train.size() == 0) throw InvalidArgument("cannot fit on an empty training set");

  const double lambda = loss == Loss::perceptron ? 0.0 : config.l2_lambda;
  std::vector<double> v(dim, 0.0);  // weights = scale * v
  double scale = 1.0;
  double bias = 0.0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, 0x11ea5));

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    const double eta = config.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (const auto i : order) {
      const auto row = train.rows.row(i);
      const double y = label_sign(train.labels[i]);
      const double s = scale * dot(row, v) + bias;
      double step = eta;
      if (loss == Loss::squared) step /= std::max(1.0, row.squared_norm());
      const double g = loss_derivative(loss, y, s);
      if (lambda > 0.0) {
        scale *= 1.0 - step * lambda;
        if (scale < 1e-9) {
          for (auto& x : v) x *= scale;
          scale = 1.0;
        }
      }
      if (g != 0.0) {
        const double delta = step * g / scale;
        for (std::size_t k = 0; k < row.nnz(); ++k) v[row.indices[k]] -= delta * row.values[k];
        if (config.fit_intercept) bias -= step * g;
      }
    }
  }

  LinearParams params;
  params.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) params.weights[j] = scale * v[j];
  params.bias = bias;

  ClassifierModel model;
  model.algorithm = algorithm_for(loss);
  model.feature_dimension = dim;
  model.config = config;
  model.params = std::move(params);
  return model;
}

ClassifierModel fit_multinomial_nb(const SparseDataset& train, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("naive Bayes smoothing alpha must be positive");
  if (train.rows.rows() != train.labels.size()) throw InvalidArgument("row and label counts differ");
  if (train.size() == 0) throw InvalidArgument("cannot fit on an empty training set");
  const std::size_t dim = train.rows.cols();
  std::vector<double> totals[2] = {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  std::size_t class_rows[2] = {0, 0};
  for (std::size_t i = 0; i < train.size(); ++i) {
    const int c = to_int(train.labels[i]);
    ++class_rows[c];
    const auto row = train.rows.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      if (row.values[k] < 0.0) throw InvalidArgument("multinomial naive Bayes needs non-negative features");
      totals[c][row.indices[k]] += row.values[k];
    }
  }
  if (class_rows[0] == 0 || class_rows[1] == 0)
    throw InvalidArgument("multinomial naive Bayes needs both classes present");

  NaiveBayesParams params;
  for (int c = 0; c < 2; ++c) {
    params.log_prior[c] =
        std::log(static_cast<double>(class_rows[c]) / static_cast<double>(train.size()));
    const double denom =
        std::accumulate(totals[c].begin(), totals[c].end(), 0.0) + alpha * static_cast<double>(dim);
    auto& ll = params.log_likelihood[c];
    ll.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) ll[j] = std::log((totals[c][j] + alpha) / denom);
  }
  ClassifierModel model;
  model.algorithm = Algorithm::multinomial_nb;
  model.feature_dimension = dim;
  model.config = default_config(Algorithm::multinomial_nb);
  model.config.nb_alpha = alpha;
  model.params = std::move(params);
  return model;
}

}  // namespace drugrec
