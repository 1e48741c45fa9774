#include "pipeline_config.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include <drugrec/error.hpp>

namespace drugrec::cli {

namespace {

using json = nlohmann::ordered_json;

json train_config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},       {"learning_rate", c.learning_rate}, {"l2_lambda", c.l2_lambda},
          {"fit_intercept", c.fit_intercept}, {"nb_alpha", c.nb_alpha}, {"max_depth", c.max_depth},
          {"n_trees", c.n_trees},     {"min_leaf", c.min_leaf},           {"max_features", c.max_features},
          {"bootstrap", c.bootstrap}, {"max_bins", c.max_bins},           {"shrinkage", c.shrinkage},
          {"leaf_l2", c.leaf_l2}};
}

template <typename T>
void read_field(const json& j, const char* key, T& field, std::set<std::string>& seen) {
  if (!j.contains(key)) return;
  seen.insert(key);
  field = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& seen, const std::string& where) {
  for (const auto& [k, _] : j.items())
    if (!seen.count(k)) throw InvalidArgument("unknown config key '" + where + k + "'");
}

TrainConfig train_config_from(const json& j, TrainConfig c, const std::string& where) {
  std::set<std::string> seen;
  read_field(j, "epochs", c.epochs, seen);
  read_field(j, "learning_rate", c.learning_rate, seen);
  read_field(j, "l2_lambda", c.l2_lambda, seen);
  read_field(j, "fit_intercept", c.fit_intercept, seen);
  read_field(j, "nb_alpha", c.nb_alpha, seen);
  read_field(j, "max_depth", c.max_depth, seen);
  read_field(j, "n_trees", c.n_trees, seen);
  read_field(j, "min_leaf", c.min_leaf, seen);
  read_field(j, "max_features", c.max_features, seen);
  read_field(j, "bootstrap", c.bootstrap, seen);
  read_field(j, "max_bins", c.max_bins, seen);
  read_field(j, "shrinkage", c.shrinkage, seen);
  read_field(j, "leaf_l2", c.leaf_l2, seen);
  reject_unknown(j, seen, where);
  return c;
}

json experiments_json(const std::vector<Experiment>& v) {
  auto arr = json::array();
  for (const auto& e : v) arr.push_back(std::string(to_string(e.rep)) + ":" + std::string(to_string(e.model)));
  return arr;
}

std::vector<Experiment> experiments_from(const json& j) {
  std::vector<Experiment> out;
  for (const auto& e : j) out.push_back(parse_experiment(e.get<std::string>()));
  return out;
}

json to_json_object(const PipelineConfig& c) {
  json models = json::object();
  for (const auto& [a, tc] : c.models) models[std::string(drugrec::to_string(a))] = train_config_json(tc);
  return {{"inputs", c.inputs},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"train_fraction", c.train_fraction},
          {"threads", c.threads},
          {"ngram_low", c.ngram_low},
          {"ngram_high", c.ngram_high},
          {"min_df", c.min_df},
          {"w2v_dimension", c.w2v_dimension},
          {"w2v_window", c.w2v_window},
          {"w2v_negatives", c.w2v_negatives},
          {"w2v_epochs", c.w2v_epochs},
          {"w2v_learning_rate", c.w2v_learning_rate},
          {"w2v_min_count", c.w2v_min_count},
          {"smote_enabled", c.smote_enabled},
          {"smote_ratio", c.smote_ratio},
          {"smote_k", c.smote_k},
          {"smote_coarse_min_rows", c.smote_coarse_min_rows},
          {"smote_coarse_features", c.smote_coarse_features},
          {"models", models},
          {"experiments", experiments_json(c.experiments)},
          {"winners", experiments_json(c.winners)},
          {"top_n", c.top_n},
          {"top_conditions", c.top_conditions},
          {"mean_by_reviews", c.mean_by_reviews}};
}

}  // namespace

std::string_view to_string(Representation r) noexcept {
  switch (r) {
    case Representation::bow: return "bow";
    case Representation::tfidf: return "tfidf";
    case Representation::word2vec: return "word2vec";
    case Representation::manual: return "manual";
  }
  return "?";
}

std::optional<Representation> parse_representation(std::string_view name) {
  for (auto r : kAllRepresentations)
    if (to_string(r) == name) return r;
  return std::nullopt;
}

std::string Experiment::id() const {
  return std::string(to_string(rep)) + "." + std::string(drugrec::to_string(model));
}

Experiment parse_experiment(std::string_view text) {
  const auto sep = text.find_first_of(":.");
  if (sep == std::string_view::npos) throw InvalidArgument("expected rep:model, got '" + std::string(text) + "'");
  const auto rep = parse_representation(text.substr(0, sep));
  const auto model = parse_algorithm(text.substr(sep + 1));
  if (!rep) throw InvalidArgument("unknown representation '" + std::string(text.substr(0, sep)) + "'");
  if (!model) throw InvalidArgument("unknown model '" + std::string(text.substr(sep + 1)) + "'");
  return {*rep, *model};
}

PipelineConfig default_pipeline_config() {
  PipelineConfig c;
  for (auto a : {Algorithm::multinomial_nb, Algorithm::logistic_regression, Algorithm::perceptron, Algorithm::ridge,
                 Algorithm::linear_svc, Algorithm::sgd_hinge, Algorithm::decision_tree, Algorithm::random_forest,
                 Algorithm::gbdt})
    c.models[a] = default_config(a);
  for (auto rep : {Representation::bow, Representation::tfidf})
    for (auto a : {Algorithm::logistic_regression, Algorithm::multinomial_nb, Algorithm::sgd_hinge,
                   Algorithm::linear_svc, Algorithm::perceptron, Algorithm::ridge})
      c.experiments.push_back({rep, a});
  for (auto rep : {Representation::word2vec, Representation::manual})
    for (auto a : {Algorithm::decision_tree, Algorithm::random_forest, Algorithm::gbdt})
      c.experiments.push_back({rep, a});
  c.winners = {{Representation::bow, Algorithm::perceptron},
               {Representation::tfidf, Algorithm::linear_svc},
               {Representation::word2vec, Algorithm::gbdt},
               {Representation::manual, Algorithm::random_forest}};
  return c;
}

std::string to_json(const PipelineConfig& c) { return to_json_object(c).dump(2); }

PipelineConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  PipelineConfig c = default_pipeline_config();
  std::set<std::string> seen;
  try {
    read_field(j, "inputs", c.inputs, seen);
    read_field(j, "output_dir", c.output_dir, seen);
    read_field(j, "seed", c.seed, seen);
    read_field(j, "train_fraction", c.train_fraction, seen);
    read_field(j, "threads", c.threads, seen);
    read_field(j, "ngram_low", c.ngram_low, seen);
    read_field(j, "ngram_high", c.ngram_high, seen);
    read_field(j, "min_df", c.min_df, seen);
    read_field(j, "w2v_dimension", c.w2v_dimension, seen);
    read_field(j, "w2v_window", c.w2v_window, seen);
    read_field(j, "w2v_negatives", c.w2v_negatives, seen);
    read_field(j, "w2v_epochs", c.w2v_epochs, seen);
    read_field(j, "w2v_learning_rate", c.w2v_learning_rate, seen);
    read_field(j, "w2v_min_count", c.w2v_min_count, seen);
    read_field(j, "smote_enabled", c.smote_enabled, seen);
    read_field(j, "smote_ratio", c.smote_ratio, seen);
    read_field(j, "smote_k", c.smote_k, seen);
    read_field(j, "smote_coarse_min_rows", c.smote_coarse_min_rows, seen);
    read_field(j, "smote_coarse_features", c.smote_coarse_features, seen);
    read_field(j, "top_n", c.top_n, seen);
    read_field(j, "top_conditions", c.top_conditions, seen);
    read_field(j, "mean_by_reviews", c.mean_by_reviews, seen);
    if (j.contains("models")) {
      seen.insert("models");
      for (const auto& [name, body] : j.at("models").items()) {
        const auto a = parse_algorithm(name);
        if (!a) throw InvalidArgument("unknown model '" + name + "' in config");
        c.models[*a] = train_config_from(body, c.models[*a], "models." + name + ".");
      }
    }
    if (j.contains("experiments")) {
      seen.insert("experiments");
      c.experiments = experiments_from(j.at("experiments"));
    }
    if (j.contains("winners")) {
      seen.insert("winners");
      c.winners = experiments_from(j.at("winners"));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field has the wrong type: ") + e.what());
  }
  reject_unknown(j, seen, "");
  return c;
}

std::string config_hash(const PipelineConfig& c) {
  auto j = to_json_object(c);
  j.erase("output_dir");
  j.erase("threads");
  const auto text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainConfig train_config_for(const PipelineConfig& c, Algorithm a) {
  const auto it = c.models.find(a);
  TrainConfig t = it != c.models.end() ? it->second : default_config(a);
  t.seed = c.seed;
  t.threads = c.threads;
  return t;
}

}  // namespace drugrec::cli
