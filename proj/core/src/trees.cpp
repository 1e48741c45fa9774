#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "drugrec/error.hpp"
#include "drugrec/learn.hpp"
#include "drugrec/parallel.hpp"
#include "drugrec/rng.hpp"

namespace drugrec {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Per-feature cut points and the bin of every (row, feature) cell.
// bin(v) = number of thresholds strictly below v, so bin <= b  <=>  v <= thresholds[b].
struct BinnedFeatures {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<double>> thresholds;
  std::vector<std::uint16_t> bins;  // column-major

  std::uint16_t bin(std::size_t row, std::size_t col) const { return bins[col * rows + row]; }
};

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

BinnedFeatures bin_features(const DenseMatrix& x, std::size_t max_bins) {
  if (max_bins < 2 || max_bins > 65536) throw InvalidArgument("max_bins must lie in [2, 65536]");
  BinnedFeatures out;
  out.rows = x.rows();
  out.cols = x.cols();
  out.thresholds.resize(out.cols);
  out.bins.resize(out.rows * out.cols);
  std::vector<double> column(out.rows);
  for (std::size_t j = 0; j < out.cols; ++j) {
    for (std::size_t i = 0; i < out.rows; ++i) {
      column[i] = x(i, j);
      if (!std::isfinite(column[i])) throw InvalidArgument("tree features must be finite");
    }
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    std::vector<std::size_t> cumulative;  // rows with value <= distinct[k]
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (distinct.empty() || sorted[i] != distinct.back()) {
        distinct.push_back(sorted[i]);
        cumulative.push_back(0);
      }
      cumulative.back() = i + 1;
    }
    auto& cuts = out.thresholds[j];
    if (distinct.size() <= max_bins) {
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k)
        cuts.push_back(midpoint(distinct[k], distinct[k + 1]));
    } else {
      // Equal-frequency cuts between distinct values.
      std::size_t k = 0;
      for (std::size_t b = 1; b < max_bins; ++b) {
        const std::size_t rank = b * out.rows / max_bins;
        while (k + 1 < distinct.size() && cumulative[k] < rank) ++k;
        if (k + 1 >= distinct.size()) break;
        const double t = midpoint(distinct[k], distinct[k + 1]);
        if (cuts.empty() || t > cuts.back()) cuts.push_back(t);
      }
    }
    for (std::size_t i = 0; i < out.rows; ++i)
      out.bins[j * out.rows + i] = static_cast<std::uint16_t>(
          std::lower_bound(cuts.begin(), cuts.end(), column[i]) - cuts.begin());
  }
  return out;
}

enum class Criterion { gini, logistic_gradient };

struct BuilderParams {
  std::size_t max_depth;
  std::size_t min_leaf;
  std::size_t max_features;
  double leaf_l2;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedFeatures& data, Criterion criterion, const BuilderParams& params,
              std::span<const double> labels, std::span<const double> weights, Rng* rng)
      : data_(data), criterion_(criterion), params_(params), labels_(labels), weights_(weights),
        rng_(rng) {}

  void set_gradients(std::span<const double> grad, std::span<const double> hess,
                     std::span<const double> scores) {
    grad_ = grad;
    hess_ = hess;
    scores_ = scores;
  }

  Tree build(std::vector<std::uint32_t> rows) {
    tree_ = Tree{};
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Stats {
    double a = 0.0;  // positive weight (gini) or gradient sum
    double b = 0.0;  // total weight (gini) or hessian sum
    double n = 0.0;  // weighted row count
    void add(const Stats& o) {
      a += o.a;
      b += o.b;
      n += o.n;
    }
  };

  Stats row_stats(std::uint32_t i) const {
    if (criterion_ == Criterion::gini) {
      const double w = weights_.empty() ? 1.0 : weights_[i];
      return {w * labels_[i], w, w};
    }
    return {grad_[i], hess_[i], 1.0};
  }

  static double gini(const Stats& s) {
    if (s.b <= 0) return 0.0;
    const double p = s.a / s.b;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
  }

  double score_term(const Stats& s) const { return s.a * s.a / (s.b + params_.leaf_l2); }

  double gain(const Stats& parent, const Stats& left, const Stats& right) const {
    if (criterion_ == Criterion::gini)
      return gini(parent) - (left.b / parent.b) * gini(left) - (right.b / parent.b) * gini(right);
    return score_term(left) + score_term(right) - score_term(parent);
  }

  double leaf_value(std::span<const std::uint32_t> rows, const Stats& total) const {
    if (criterion_ == Criterion::gini) return total.b > 0 ? total.a / total.b - 0.5 : 0.0;
    return exact_logistic_leaf(rows);
  }

  // Root of sum_i (sigmoid(F_i + v) - y_i) + l2 * v, found by safeguarded Newton.
  double exact_logistic_leaf(std::span<const std::uint32_t> rows) const {
    const double l2 = params_.leaf_l2;
    auto deriv = [&](double v, double* second) {
      double d = l2 * v, h = l2;
      for (auto i : rows) {
        const double p = sigmoid(scores_[i] + v);
        d += p - labels_[i];
        h += p * (1.0 - p);
      }
      if (second) *second = h;
      return d;
    };
    const double d0 = deriv(0.0, nullptr);
    if (d0 == 0.0) return 0.0;
    double lo = 0.0, hi = 0.0;
    double step = 1.0;
    constexpr double kBound = 1e6;
    if (d0 < 0) {
      hi = step;
      while (deriv(hi, nullptr) < 0 && hi < kBound) lo = hi, hi *= 2;
    } else {
      lo = -step;
      while (deriv(lo, nullptr) > 0 && lo > -kBound) hi = lo, lo *= 2;
    }
    double v = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      double h = 0.0;
      const double d = deriv(v, &h);
      if (d == 0.0) break;
      if (d < 0) lo = v; else hi = v;
      double next = h > 0 ? v - d / h : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - v) <= 1e-15 * std::max(1.0, std::abs(v))) {
        v = next;
        break;
      }
      v = next;
    }
    return v;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(data_.cols);
    std::iota(f.begin(), f.end(), std::size_t{0});
    if (rng_ && params_.max_features < data_.cols) {
      for (std::size_t k = 0; k < params_.max_features; ++k) {
        const auto j = k + rng_->uniform_index(f.size() - k);
        std::swap(f[k], f[j]);
      }
      f.resize(params_.max_features);
      std::sort(f.begin(), f.end());
    }
    return f;
  }

  std::int32_t grow(std::vector<std::uint32_t>& rows, std::size_t depth) {
    const auto node_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    Stats total;
    for (auto i : rows) total.add(row_stats(i));

    bool stop = depth >= params_.max_depth || total.n < 2.0 * static_cast<double>(params_.min_leaf);
    if (criterion_ == Criterion::gini) stop = stop || total.a <= 0.0 || total.a >= total.b;
    if (stop) {
      tree_.nodes[node_id].value = leaf_value(rows, total);
      return node_id;
    }

    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best_feature = 0, best_bin = 0;
    bool found = false;
    std::vector<Stats> hist;
    const double min_leaf = static_cast<double>(params_.min_leaf);
    for (const auto j : candidate_features()) {
      const auto& cuts = data_.thresholds[j];
      if (cuts.empty()) continue;
      hist.assign(cuts.size() + 1, Stats{});
      for (auto i : rows) hist[data_.bin(i, j)].add(row_stats(i));
      Stats left;
      for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
        left.add(hist[b]);
        const Stats right{total.a - left.a, total.b - left.b, total.n - left.n};
        if (left.n < min_leaf || right.n < min_leaf || left.n <= 0 || right.n <= 0) continue;
        const double g = gain(total, left, right);
        if (g > best_gain) {
          best_gain = g;
          best_feature = j;
          best_bin = b;
          found = true;
        }
      }
    }
    // Zero-gain splits are allowed: XOR-like targets only separate one level down.
    if (!found || best_gain < -1e-12) {
      tree_.nodes[node_id].value = leaf_value(rows, total);
      return node_id;
    }

    std::vector<std::uint32_t> left_rows, right_rows;
    for (auto i : rows) (data_.bin(i, best_feature) <= best_bin ? left_rows : right_rows).push_back(i);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[node_id].feature = static_cast<std::int32_t>(best_feature);
    tree_.nodes[node_id].threshold = data_.thresholds[best_feature][best_bin];
    const auto l = grow(left_rows, depth + 1);
    const auto r = grow(right_rows, depth + 1);
    tree_.nodes[node_id].left = l;
    tree_.nodes[node_id].right = r;
    return node_id;
  }

  const BinnedFeatures& data_;
  Criterion criterion_;
  BuilderParams params_;
  std::span<const double> labels_;
  std::span<const double> weights_;
  Rng* rng_;
  std::span<const double> grad_, hess_, scores_;
  Tree tree_;
};

void check_tree_input(const DenseDataset& train) {
  if (train.size() == 0) throw InvalidArgument("cannot grow a tree on an empty training set");
  if (train.rows.rows() != train.labels.size()) throw InvalidArgument("row and label counts differ");
}

std::vector<double> label_values(const DenseDataset& train) {
  std::vector<double> y(train.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = to_int(train.labels[i]);
  return y;
}

ClassifierModel make_ensemble(Algorithm a, const DenseDataset& train, const TrainConfig& config,
                              TreeEnsembleParams params) {
  ClassifierModel m;
  m.algorithm = a;
  m.feature_dimension = train.rows.cols();
  m.config = config;
  m.params = std::move(params);
  return m;
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

}  // namespace

double Tree::evaluate(std::span<const double> x) const {
  std::size_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& n = nodes[k];
    k = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[k].value;
}

double Tree::evaluate(SparseRowView x) const {
  std::size_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& n = nodes[k];
    const auto f = static_cast<std::uint32_t>(n.feature);
    const auto it = std::lower_bound(x.indices.begin(), x.indices.end(), f);
    const double v = (it != x.indices.end() && *it == f) ? x.values[it - x.indices.begin()] : 0.0;
    k = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
  return nodes[k].value;
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    const auto [k, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes[k].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes[k].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[k].right), d + 1);
    }
  }
  return best;
}

ClassifierModel fit_decision_tree(const DenseDataset& train, const TrainConfig& config) {
  check_tree_input(train);
  const auto data = bin_features(train.rows, config.max_bins);
  const auto y = label_values(train);
  const std::size_t d = train.rows.cols();
  const BuilderParams params{config.max_depth, std::max<std::size_t>(1, config.min_leaf),
                             config.max_features == 0 ? d : std::min(d, config.max_features), 0.0};
  Rng rng(derive_seed(config.seed, 0x7ee));
  TreeBuilder builder(data, Criterion::gini, params, y, {}, &rng);
  TreeEnsembleParams ensemble;
  ensemble.trees.push_back(builder.build(all_rows(train.size())));
  return make_ensemble(Algorithm::decision_tree, train, config, std::move(ensemble));
}

ClassifierModel fit_random_forest(const DenseDataset& train, const TrainConfig& config) {
  check_tree_input(train);
  if (config.n_trees < 1) throw InvalidArgument("a forest needs at least one tree");
  const auto data = bin_features(train.rows, config.max_bins);
  const auto y = label_values(train);
  const std::size_t n = train.size(), d = train.rows.cols();
  const std::size_t max_features =
      config.max_features == 0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))))
          : std::min(d, config.max_features);
  const BuilderParams params{config.max_depth, std::max<std::size_t>(1, config.min_leaf), max_features, 0.0};

  TreeEnsembleParams ensemble;
  ensemble.trees.resize(config.n_trees);
  parallel_for(
      config.n_trees,
      [&](std::size_t t) {
        Rng rng(derive_seed(config.seed, 0xf0e57 + t));
        std::vector<double> weights;
        std::vector<std::uint32_t> rows;
        if (config.bootstrap) {
          weights.assign(n, 0.0);
          for (std::size_t k = 0; k < n; ++k) weights[rng.uniform_index(n)] += 1.0;
          for (std::uint32_t i = 0; i < n; ++i)
            if (weights[i] > 0) rows.push_back(i);
        } else {
          rows = all_rows(n);
        }
        TreeBuilder builder(data, Criterion::gini, params, y, weights, &rng);
        ensemble.trees[t] = builder.build(std::move(rows));
      },
      config.threads);
  ensemble.tree_weight = config.n_trees == 1 ? 1.0 : 1.0 / static_cast<double>(config.n_trees);
  return make_ensemble(Algorithm::random_forest, train, config, std::move(ensemble));
}

ClassifierModel fit_gbdt(const DenseDataset& train, const TrainConfig& config) {
  check_tree_input(train);
  if (!(config.shrinkage > 0.0 && config.shrinkage <= 1.0))
    throw InvalidArgument("shrinkage must lie in (0, 1]");
  if (!(config.leaf_l2 >= 0.0)) throw InvalidArgument("leaf_l2 must be non-negative");
  const auto data = bin_features(train.rows, config.max_bins);
  const auto y = label_values(train);
  const std::size_t n = train.size(), d = train.rows.cols();

  const double positives = std::accumulate(y.begin(), y.end(), 0.0);
  const double rate = std::clamp(positives / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  TreeEnsembleParams ensemble;
  ensemble.base_score = std::log(rate / (1.0 - rate));
  ensemble.tree_weight = config.shrinkage;

  const BuilderParams params{config.max_depth, std::max<std::size_t>(1, config.min_leaf),
                             config.max_features == 0 ? d : std::min(d, config.max_features),
                             config.leaf_l2};
  Rng rng(derive_seed(config.seed, 0x6bd7));
  std::vector<double> scores(n, ensemble.base_score), grad(n), hess(n);
  for (std::size_t round = 0; round < config.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(scores[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    TreeBuilder builder(data, Criterion::logistic_gradient, params, y, {}, &rng);
    builder.set_gradients(grad, hess, scores);
    auto tree = builder.build(all_rows(n));
    for (std::size_t i = 0; i < n; ++i) scores[i] += config.shrinkage * tree.evaluate(train.rows.row(i));
    ensemble.trees.push_back(std::move(tree));
  }
  return make_ensemble(Algorithm::gbdt, train, config, std::move(ensemble));
}

double mean_logistic_loss(std::span<const double> scores, std::span<const Sentiment> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw InvalidArgument("scores and labels must be non-empty and aligned");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double y = labels[i] == Sentiment::positive ? 1.0 : -1.0;
    const double z = -y * scores[i];
    total += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return total / static_cast<double>(scores.size());
}

}  // namespace drugrec
