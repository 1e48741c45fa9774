#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "drugrec/dense_features.hpp"
#include "drugrec/error.hpp"
#include "drugrec/rng.hpp"

namespace drugrec {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

class NegativeSampler {
 public:
  explicit NegativeSampler(std::span<const std::uint64_t> counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::size_t dimension,
                               std::vector<float> values)
    : tokens_(std::move(tokens)), dimension_(dimension), values_(std::move(values)) {
  if (values_.size() != tokens_.size() * dimension_)
    throw InvalidArgument("embedding values do not match token count times dimension");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (!index_.emplace(tokens_[i], i).second)
      throw InvalidArgument("duplicate embedding token '" + tokens_[i] + "'");
}

std::span<const float> EmbeddingTable::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return {};
  return vector(it->second);
}

void EmbeddingTable::save(std::ostream& out) const {
  out << tokens_.size() << ' ' << dimension_ << '\n';
  char buf[32];
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i];
    for (float v : vector(i)) {
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(v));
      out << buf;
    }
    out << '\n';
  }
}

EmbeddingTable EmbeddingTable::load(std::istream& in) {
  std::size_t count = 0, dim = 0;
  if (!(in >> count >> dim)) throw FormatError("embedding file lacks a '<count> <dim>' header");
  std::vector<std::string> tokens(count);
  std::vector<float> values(count * dim);
  std::string value;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> tokens[i])) throw FormatError("embedding file truncated at row " + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(in >> value)) throw FormatError("embedding row " + std::to_string(i) + " is short");
      values[i * dim + k] = std::strtof(value.c_str(), nullptr);
    }
  }
  return EmbeddingTable(std::move(tokens), dim, std::move(values));
}

EmbeddingTable train_word2vec(std::span<const Tokens> docs, const Word2VecConfig& config,
                              std::vector<double>* epoch_loss) {
  if (config.dimension < 1) throw InvalidArgument("embedding dimension must be at least 1");
  if (config.window < 1) throw InvalidArgument("context window must be at least 1");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& d : docs)
    for (const auto& t : d) ++counts[t];
  std::vector<std::pair<std::string, std::uint64_t>> vocab;
  for (auto& [t, c] : counts)
    if (c >= config.min_count) vocab.emplace_back(t, c);
  if (vocab.empty()) throw InvalidArgument("cannot train embeddings on an empty corpus");
  std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint64_t> freq;
  std::vector<std::string> tokens;
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    index.emplace(vocab[i].first, i);
    tokens.push_back(vocab[i].first);
    freq.push_back(vocab[i].second);
  }

  // Documents as vocabulary ids; OOV tokens drop out before windowing.
  std::vector<std::vector<std::uint32_t>> corpus;
  corpus.reserve(docs.size());
  std::uint64_t total_tokens = 0;
  for (const auto& d : docs) {
    auto& ids = corpus.emplace_back();
    for (const auto& t : d)
      if (auto it = index.find(t); it != index.end()) ids.push_back(it->second);
    total_tokens += ids.size();
  }

  const std::size_t dim = config.dimension;
  const std::size_t n_vocab = tokens.size();
  Rng rng(derive_seed(config.seed, 0x77327665));
  std::vector<float> input(n_vocab * dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& v : input) v = static_cast<float>(rng.uniform(-half, half));
  std::vector<float> output(n_vocab * dim, 0.0f);
  const NegativeSampler sampler(freq);

  std::vector<float> grad(dim);
  const double total_steps = static_cast<double>(config.epochs * total_tokens) + 1.0;
  std::uint64_t processed = 0;
  if (epoch_loss) epoch_loss->clear();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::uint64_t pairs = 0;
    for (const auto& ids : corpus) {
      for (std::size_t i = 0; i < ids.size(); ++i, ++processed) {
        const double alpha =
            config.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps);
        const std::size_t reach = config.window - rng.uniform_index(config.window);
        const std::size_t lo = i >= reach ? i - reach : 0;
        const std::size_t hi = std::min(ids.size() - 1, i + reach);
        float* center = &input[ids[i] * dim];
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          std::fill(grad.begin(), grad.end(), 0.0f);
          for (std::size_t s = 0; s <= config.negatives; ++s) {
            std::size_t target;
            double label;
            if (s == 0) {
              target = ids[j];
              label = 1.0;
            } else {
              target = sampler.draw(rng);
              if (target == ids[j]) continue;
              label = 0.0;
            }
            float* out = &output[target * dim];
            double score = 0.0;
            for (std::size_t k = 0; k < dim; ++k) score += static_cast<double>(center[k]) * out[k];
            loss_sum += label > 0 ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
            const auto g = static_cast<float>((label - sigmoid(score)) * alpha);
            for (std::size_t k = 0; k < dim; ++k) {
              grad[k] += g * out[k];
              out[k] += g * center[k];
            }
          }
          for (std::size_t k = 0; k < dim; ++k) center[k] += grad[k];
          ++pairs;
        }
      }
    }
    if (epoch_loss) epoch_loss->push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }

  EmbeddingTable table(std::move(tokens), dim, std::move(input));
  table.config = config;
  return table;
}

DenseVector doc_vector(std::span<const std::string> tokens, const EmbeddingTable& table) {
  DenseVector mean(table.dimension(), 0.0);
  std::size_t matched = 0;
  for (const auto& t : tokens) {
    const auto v = table.find(t);
    if (v.empty()) continue;
    for (std::size_t k = 0; k < v.size(); ++k) mean[k] += v[k];
    ++matched;
  }
  if (matched > 0)
    for (auto& x : mean) x /= static_cast<double>(matched);
  return mean;
}

DenseMatrix embedding_matrix(std::span<const Tokens> docs, const EmbeddingTable& table) {
  DenseMatrix m(0, table.dimension());
  for (const auto& d : docs) m.append(doc_vector(d, table));
  return m;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace drugrec
