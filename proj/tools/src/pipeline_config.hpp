#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <drugrec/learn.hpp>

namespace drugrec::cli {

enum class Representation { bow, tfidf, word2vec, manual };

std::string_view to_string(Representation r) noexcept;
std::optional<Representation> parse_representation(std::string_view name);
inline constexpr Representation kAllRepresentations[] = {Representation::bow, Representation::tfidf,
                                                         Representation::word2vec, Representation::manual};

struct Experiment {
  Representation rep = Representation::bow;
  Algorithm model = Algorithm::perceptron;

  /// "<rep>.<model>", the stem of the model artifact.
  std::string id() const;
  friend bool operator==(const Experiment&, const Experiment&) = default;
};

/// Parses "rep:model" (or "rep.model").
Experiment parse_experiment(std::string_view text);

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::string output_dir;
  std::uint64_t seed = 1;
  double train_fraction = 0.75;
  std::size_t threads = 0;

  // sparse representations
  std::uint32_t ngram_low = 1;
  std::uint32_t ngram_high = 2;
  std::uint32_t min_df = 2;

  // word2vec
  std::size_t w2v_dimension = 100;
  std::size_t w2v_window = 5;
  std::size_t w2v_negatives = 5;
  std::size_t w2v_epochs = 5;
  double w2v_learning_rate = 0.025;
  std::size_t w2v_min_count = 1;

  // SMOTE
  bool smote_enabled = true;
  double smote_ratio = 0.7;
  std::size_t smote_k = 5;
  /// Sparse neighbor search switches to the `smote_coarse_features` most
  /// frequent columns once the training split has this many rows.
  std::size_t smote_coarse_min_rows = 20000;
  std::size_t smote_coarse_features = 256;

  /// Hyperparameters per algorithm; seed and threads come from the fields above.
  std::map<Algorithm, TrainConfig> models;
  std::vector<Experiment> experiments;
  std::vector<Experiment> winners;

  // recommendation view
  std::size_t top_n = 4;
  std::size_t top_conditions = 5;
  bool mean_by_reviews = false;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

PipelineConfig default_pipeline_config();

std::string to_json(const PipelineConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(std::string_view text);

/// FNV-1a over the canonical JSON with output_dir and threads removed.
std::string config_hash(const PipelineConfig& c);

/// The algorithm's settings with the global seed and thread count applied.
TrainConfig train_config_for(const PipelineConfig& c, Algorithm a);

}  // namespace drugrec::cli
