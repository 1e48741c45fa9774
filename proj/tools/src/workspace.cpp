#include "workspace.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <drugrec/dense_features.hpp>
#include <drugrec/error.hpp>
#include <drugrec/evaluate.hpp>
#include <drugrec/io.hpp>
#include <drugrec/recommend.hpp>
#include <drugrec/resample.hpp>
#include <drugrec/sparse_features.hpp>

namespace drugrec::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifest = "manifest.json";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string split_file(bool train) { return train ? "prep/train.jsonl" : "prep/test.jsonl"; }

std::string transformer_file(Representation rep) {
  switch (rep) {
    case Representation::bow: return "features/bow.json";
    case Representation::tfidf: return "features/tfidf.json";
    case Representation::word2vec: return "features/word2vec.txt";
    case Representation::manual: return "features/manual.json";
  }
  return {};
}

void write_split(const fs::path& path, const std::vector<ReviewRecord>& records, const std::vector<Tokens>& tokens) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      json j = {{"id", r.unique_id},
                {"drug", r.drug_name},
                {"condition", r.condition ? json(*r.condition) : json(nullptr)},
                {"review", r.review_text},
                {"rating", r.rating},
                {"date", to_iso(r.date)},
                {"useful", r.useful_count},
                {"tokens", tokens[i]}};
      out << j.dump() << '\n';
    }
  });
}

PreparedSplit read_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  PreparedSplit s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      ReviewRecord r;
      r.unique_id = j.at("id").get<std::int64_t>();
      r.drug_name = j.at("drug").get<std::string>();
      if (!j.at("condition").is_null()) r.condition = j.at("condition").get<std::string>();
      r.review_text = j.at("review").get<std::string>();
      r.rating = j.at("rating").get<int>();
      const auto date = parse_date(j.at("date").get<std::string>());
      if (!date) throw FormatError("bad date");
      r.date = *date;
      r.useful_count = j.at("useful").get<std::int64_t>();
      s.records.push_back(std::move(r));
      s.tokens.push_back(j.at("tokens").get<Tokens>());
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return s;
}

template <typename T, typename Load>
T load_with(const fs::path& path, Load load) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return load(in);
}

std::vector<std::uint32_t> most_frequent_columns(const Vocabulary& vocab, std::size_t f) {
  std::vector<std::uint32_t> cols(vocab.size());
  std::iota(cols.begin(), cols.end(), 0u);
  std::stable_sort(cols.begin(), cols.end(), [&](std::uint32_t a, std::uint32_t b) {
    return vocab.document_frequency(a) > vocab.document_frequency(b);
  });
  cols.resize(std::min(f, cols.size()));
  std::sort(cols.begin(), cols.end());
  return cols;
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const Sentiment> labels) {
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Sentiment::positive));
  return {pos, labels.size() - pos};
}

}  // namespace

DependencyError::DependencyError(const fs::path& missing, std::string_view producer)
    : Error("missing dependency '" + missing.string() + "'; run `" + std::string(producer) + "` first") {}

std::vector<Sentiment> PreparedSplit::labels() const {
  std::vector<Sentiment> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(derive_label(r.rating));
  return out;
}

Workspace::Workspace(PipelineConfig config, bool force, std::ostream& log)
    : config_(std::move(config)), hash_(config_hash(config_)), force_(force), log_(log), root_(config_.output_dir) {
  if (root_.empty()) throw InvalidArgument("no output directory configured");
  if (config_.train_fraction <= 0.0 || config_.train_fraction >= 1.0)
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  if (config_.ngram_low < 1 || config_.ngram_high < config_.ngram_low)
    throw InvalidArgument("ngram range must satisfy 1 <= low <= high");
  if (config_.smote_ratio <= 0.0 || config_.smote_ratio > 1.0)
    throw InvalidArgument("smote_ratio must lie in (0, 1]");
  fs::create_directories(root_);
  write_file_atomic(path("config.json"), to_json(config_) + "\n");
}

fs::path Workspace::model_path(const Experiment& e) const { return path("models/" + e.id() + ".json"); }

bool Workspace::up_to_date(const std::string& stage, const std::vector<std::string>& artifacts) const {
  if (force_ || !fs::exists(path(kManifest))) return false;
  try {
    const auto m = json::parse(read_file(path(kManifest)));
    const auto& s = m.at("stages").at(stage);
    if (s.at("config_hash") != hash_) return false;
  } catch (const std::exception&) {
    return false;
  }
  for (const auto& a : artifacts)
    if (!fs::exists(path(a))) return false;
  log_ << "[" << stage << "] up to date\n";
  return true;
}

void Workspace::record_stage(const std::string& stage, const std::vector<std::string>& artifacts) {
  json m = json::object();
  if (fs::exists(path(kManifest))) {
    try {
      m = json::parse(read_file(path(kManifest)));
    } catch (const json::exception&) {
      m = json::object();
    }
  }
  m["config_hash"] = hash_;
  m["stages"][stage] = {{"config_hash", hash_}, {"completed_at", utc_timestamp()}, {"artifacts", artifacts}};
  write_file_atomic(path(kManifest), m.dump(2) + "\n");
}

void Workspace::require(const std::string& relative, std::string_view producer) const {
  if (!fs::exists(path(relative))) throw DependencyError(path(relative), producer);
}

std::vector<ReviewRecord> Workspace::load_inputs(CleaningReport* report) {
  if (config_.inputs.empty()) throw InvalidArgument("no input file given (use --input)");
  std::vector<ReviewRecord> all;
  for (const auto& in : config_.inputs) {
    if (!fs::exists(in)) throw Error("input file not found: " + in);
    auto parsed = parse_tsv_file(in);
    if (!parsed.errors.empty()) {
      log_ << in << ": skipped " << parsed.errors.size() << " malformed row(s); first at line "
           << parsed.errors.front().line << ": " << parsed.errors.front().message << '\n';
    }
    all.insert(all.end(), std::make_move_iterator(parsed.records.begin()),
               std::make_move_iterator(parsed.records.end()));
  }
  return clean_corpus(all, report);
}

void Workspace::stats() {
  const std::vector<std::string> artifacts = {"stats/stats.csv", "stats/stats.json"};
  if (up_to_date("stats", artifacts)) return;
  CleaningReport report;
  const auto records = load_inputs(&report);
  auto s = summarize(records);
  s.cleaning = report;
  write_file_atomic(path(artifacts[0]), [&](std::ostream& out) { write_stats_csv(out, s); });
  write_file_atomic(path(artifacts[1]), stats_to_json(s) + "\n");
  log_ << "[stats] " << report.input_rows << " rows read, " << report.output_rows << " kept ("
       << s.positive << " positive, " << s.negative << " negative)\n";
  record_stage("stats", artifacts);
}

void Workspace::prep() {
  const std::vector<std::string> artifacts = {split_file(true), split_file(false), "prep/summary.json"};
  if (up_to_date("prep", artifacts)) return;
  CleaningReport report;
  const auto records = load_inputs(&report);
  if (records.size() < 2) throw InvalidArgument("need at least two cleaned rows to split");
  auto parts = drugrec::split(records, config_.train_fraction, config_.seed);
  json summary = {{"cleaned_rows", records.size()}};
  for (bool train : {true, false}) {
    auto& rows = train ? parts.train : parts.test;
    std::vector<Tokens> tokens;
    tokens.reserve(rows.size());
    for (const auto& r : rows) tokens.push_back(preprocess_review(r).tokens);
    write_split(path(split_file(train)), rows, tokens);
    std::vector<Sentiment> labels;
    for (const auto& r : rows) labels.push_back(derive_label(r.rating));
    const auto [pos, neg] = class_counts(labels);
    summary[train ? "train" : "test"] = {{"rows", rows.size()}, {"positive", pos}, {"negative", neg}};
    splits_[train] = PreparedSplit{std::move(rows), std::move(tokens)};
  }
  write_file_atomic(path(artifacts[2]), summary.dump(2) + "\n");
  log_ << "[prep] train " << splits_[true].records.size() << ", test " << splits_[false].records.size() << '\n';
  record_stage("prep", artifacts);
}

const PreparedSplit& Workspace::split(bool train) {
  auto it = splits_.find(train);
  if (it != splits_.end()) return it->second;
  require(split_file(train), "prep");
  return splits_[train] = read_split(path(split_file(train)));
}

void Workspace::featurize(Representation rep, bool export_matrix) {
  const std::string stage = "featurize." + std::string(to_string(rep));
  std::vector<std::string> artifacts = {transformer_file(rep)};
  const std::string stem = "features/" + std::string(to_string(rep));
  if (export_matrix) {
    artifacts.push_back(stem + ".train.coo");
    artifacts.push_back(stem + ".test.coo");
  }
  if (up_to_date(stage, artifacts)) return;
  const auto& train = split(true);
  const auto out = path(transformer_file(rep));
  switch (rep) {
    case Representation::bow:
    case Representation::tfidf: {
      const TfIdfModel model(
          fit_vocabulary(train.tokens, NgramRange{static_cast<int>(config_.ngram_low), static_cast<int>(config_.ngram_high)}, config_.min_df));
      write_file_atomic(out, [&](std::ostream& o) { model.save(o); });
      log_ << "[" << stage << "] vocabulary of " << model.vocabulary().size() << " grams\n";
      break;
    }
    case Representation::word2vec: {
      Word2VecConfig w;
      w.dimension = config_.w2v_dimension;
      w.window = config_.w2v_window;
      w.negatives = config_.w2v_negatives;
      w.epochs = config_.w2v_epochs;
      w.learning_rate = config_.w2v_learning_rate;
      w.min_count = config_.w2v_min_count;
      w.seed = config_.seed;
      std::vector<double> loss;
      const auto table = train_word2vec(train.tokens, w, &loss);
      write_file_atomic(out, [&](std::ostream& o) { table.save(o); });
      log_ << "[" << stage << "] " << table.size() << " vectors; final epoch loss "
           << (loss.empty() ? 0.0 : loss.back()) << '\n';
      break;
    }
    case Representation::manual: {
      const auto enc = ConditionEncoder::fit(train.records);
      write_file_atomic(out, json{{"conditions", enc.conditions()}}.dump(2) + "\n");
      log_ << "[" << stage << "] " << enc.conditions().size() << " condition codes\n";
      break;
    }
  }
  features_.erase({rep, true});
  features_.erase({rep, false});
  if (export_matrix) {
    for (bool t : {true, false}) {
      const auto& m = features(rep, t);
      write_file_atomic(path(artifacts[t ? 1 : 2]),
                        [&](std::ostream& o) { write_coordinate(o, m.sparse ? m.s : to_sparse(m.d)); });
    }
  }
  record_stage(stage, artifacts);
}

const FeatureMatrix& Workspace::features(Representation rep, bool train) {
  const auto key = std::make_pair(rep, train);
  if (auto it = features_.find(key); it != features_.end()) return it->second;
  require(transformer_file(rep), "featurize --rep " + std::string(to_string(rep)));
  const auto& data = split(train);
  const auto file = path(transformer_file(rep));
  FeatureMatrix m;
  switch (rep) {
    case Representation::bow: {
      const auto model = load_with<TfIdfModel>(file, [](std::istream& in) { return TfIdfModel::load(in); });
      m.s = bow_matrix(data.tokens, model.vocabulary());
      break;
    }
    case Representation::tfidf: {
      const auto model = load_with<TfIdfModel>(file, [](std::istream& in) { return TfIdfModel::load(in); });
      m.s = tfidf_matrix(data.tokens, model);
      break;
    }
    case Representation::word2vec: {
      const auto table = load_with<EmbeddingTable>(file, [](std::istream& in) { return EmbeddingTable::load(in); });
      m.sparse = false;
      m.d = embedding_matrix(data.tokens, table);
      break;
    }
    case Representation::manual: {
      const auto j = json::parse(read_file(file));
      const auto enc = ConditionEncoder::from_conditions(j.at("conditions").get<std::vector<std::string>>());
      m.sparse = false;
      m.d = manual_feature_matrix(data.records, enc);
      break;
    }
  }
  return features_[key] = std::move(m);
}

void Workspace::train(const Experiment& e) {
  const std::string stage = "train." + e.id();
  const std::string artifact = "models/" + e.id() + ".json";
  if (up_to_date(stage, {artifact})) return;
  const auto& x = features(e.rep, true);
  const auto labels = split(true).labels();
  const auto [pos, neg] = class_counts(labels);

  SmoteConfig sc;
  sc.k_neighbors = config_.smote_k;
  sc.target_ratio = config_.smote_ratio;
  sc.seed = config_.seed;
  sc.threads = config_.threads;
  if (x.sparse && labels.size() >= config_.smote_coarse_min_rows) {
    const auto model = load_with<TfIdfModel>(path(transformer_file(e.rep)),
                                             [](std::istream& in) { return TfIdfModel::load(in); });
    sc.coarse_columns = most_frequent_columns(model.vocabulary(), config_.smote_coarse_features);
  }

  const auto tc = train_config_for(config_, e.model);
  ClassifierModel model;
  std::size_t synthetic = 0;
  if (x.sparse) {
    auto data = SparseDataset::original(x.s, labels);
    if (config_.smote_enabled) data = smote(data, sc);
    synthetic = data.size() - labels.size();
    model = fit(e.model, data, tc);
  } else {
    auto data = DenseDataset::original(x.d, labels);
    if (config_.smote_enabled) data = smote(data, sc);
    synthetic = data.size() - labels.size();
    model = fit(e.model, data, tc);
  }
  write_file_atomic(path(artifact), [&](std::ostream& o) { model.save(o); });
  log_ << "[" << stage << "] " << pos << " positive / " << neg << " negative, " << synthetic
       << " synthetic rows\n";
  record_stage(stage, {artifact});
}

ClassifierModel Workspace::load_model(const Experiment& e) const {
  const auto p = model_path(e);
  if (!fs::exists(p))
    throw DependencyError(p, "train --rep " + std::string(to_string(e.rep)) + " --model " +
                                 std::string(drugrec::to_string(e.model)));
  return load_with<ClassifierModel>(p, [](std::istream& in) { return ClassifierModel::load(in); });
}

void Workspace::evaluate(const std::vector<Experiment>& experiments) {
  const std::vector<std::string> artifacts = {"reports/evaluation.csv", "reports/evaluation.json"};
  // Every model must exist before any work starts, so the error names the first gap.
  for (const auto& e : experiments) (void)load_model(e);
  std::vector<EvaluationReport> reports;
  const auto labels = split(false).labels();
  for (const auto& e : experiments) {
    const auto model = load_model(e);
    const auto& x = features(e.rep, false);
    const auto scores = x.sparse ? model.decision_scores(x.s) : model.decision_scores(x.d);
    reports.push_back(make_report(scores, labels, std::string(drugrec::to_string(e.model)),
                                  std::string(to_string(e.rep))));
    const auto& r = reports.back();
    log_ << "[evaluate] " << e.id() << ": accuracy " << r.accuracy.value << ", auc " << r.auc << '\n';
  }
  write_file_atomic(path(artifacts[0]), [&](std::ostream& o) { write_reports_csv(o, reports); });
  write_file_atomic(path(artifacts[1]), reports_to_json(reports) + "\n");
  record_stage("evaluate", artifacts);
}

void Workspace::recommend() {
  const std::vector<std::string> artifacts = {"recommend/recommendations.csv", "recommend/recommendations.json",
                                              "recommend/all.csv"};
  if (config_.winners.size() != kVotingModels)
    throw InvalidArgument("recommendation needs exactly " + std::to_string(kVotingModels) + " winner models, got " +
                          std::to_string(config_.winners.size()));
  std::vector<ClassifierModel> models;
  for (const auto& w : config_.winners) models.push_back(load_model(w));

  const auto& test = split(false);
  std::vector<std::vector<double>> scores;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& x = features(config_.winners[k].rep, false);
    scores.push_back(x.sparse ? models[k].decision_scores(x.s) : models[k].decision_scores(x.d));
  }
  const auto norm = normalize_usefulcount(test.records);
  std::vector<ScoredReview> scored;
  scored.reserve(test.records.size());
  std::vector<Sentiment> preds(kVotingModels);
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    const auto& r = test.records[i];
    if (!r.condition) continue;
    for (std::size_t k = 0; k < kVotingModels; ++k)
      preds[k] = scores[k][i] > 0.0 ? Sentiment::positive : Sentiment::negative;
    const auto c = combine_predictions(r.unique_id, preds);
    scored.push_back({*r.condition, r.drug_name, c.votes, norm.at(r.unique_id)});
  }
  auto table = score_drugs(scored, config_.mean_by_reviews ? ScoreDivisor::drug_reviews : ScoreDivisor::distinct_drugs);
  for (const auto& w : config_.winners) table.models.push_back(w.id());

  std::vector<std::string> conditions;
  if (config_.top_conditions > 0) conditions = most_reviewed_conditions(test.records, config_.top_conditions);
  write_file_atomic(path(artifacts[0]),
                    [&](std::ostream& o) { write_recommendations_csv(o, table, conditions, config_.top_n); });
  write_file_atomic(path(artifacts[1]), recommendations_to_json(table, conditions, config_.top_n) + "\n");
  write_file_atomic(path(artifacts[2]), [&](std::ostream& o) { write_recommendations_csv(o, table); });
  log_ << "[recommend] " << table.conditions.size() << " conditions scored\n";
  record_stage("recommend", artifacts);
}

void Workspace::pipeline() {
  stats();
  prep();
  std::vector<Experiment> all = config_.experiments;
  for (const auto& w : config_.winners)
    if (std::find(all.begin(), all.end(), w) == all.end()) all.push_back(w);
  std::set<Representation> reps;
  for (const auto& e : all) reps.insert(e.rep);
  for (auto rep : reps) featurize(rep, false);
  for (const auto& e : all) train(e);
  evaluate(config_.experiments);
  recommend();
}

}  // namespace drugrec::cli
