#include "cli.hpp"

#include <cstdlib>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include <drugrec/error.hpp>
#include <drugrec/io.hpp>

#include "pipeline_config.hpp"
#include "workspace.hpp"

namespace drugrec::cli {

namespace {

struct Overrides {
  std::string config_file;
  std::vector<std::string> inputs;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_fraction;
  std::optional<std::size_t> threads;
  std::optional<std::uint32_t> min_df;
  std::optional<std::size_t> w2v_dimension;
  std::optional<std::size_t> w2v_epochs;
  std::optional<double> smote_ratio;
  std::optional<std::size_t> smote_k;
  bool smote_off = false;
  std::optional<std::size_t> top_n;
  std::optional<std::size_t> top_conditions;
  bool mean_by_reviews = false;
  std::vector<std::string> winners;
  bool force = false;
};

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config_file.empty() ? default_pipeline_config() : config_from_json(read_file(o.config_file));
  if (!o.inputs.empty()) c.inputs = o.inputs;
  if (o.output) c.output_dir = *o.output;
  if (c.output_dir.empty()) {
    const char* env = std::getenv("DRUGREC_OUTPUT_DIR");
    c.output_dir = (env && *env) ? env : "drugrec_out";
  }
  if (o.seed) c.seed = *o.seed;
  if (o.train_fraction) c.train_fraction = *o.train_fraction;
  if (o.threads) c.threads = *o.threads;
  if (o.min_df) c.min_df = *o.min_df;
  if (o.w2v_dimension) c.w2v_dimension = *o.w2v_dimension;
  if (o.w2v_epochs) c.w2v_epochs = *o.w2v_epochs;
  if (o.smote_ratio) c.smote_ratio = *o.smote_ratio;
  if (o.smote_k) c.smote_k = *o.smote_k;
  if (o.smote_off) c.smote_enabled = false;
  if (o.top_n) c.top_n = *o.top_n;
  if (o.top_conditions) c.top_conditions = *o.top_conditions;
  if (o.mean_by_reviews) c.mean_by_reviews = true;
  if (!o.winners.empty()) {
    c.winners.clear();
    for (const auto& w : o.winners) c.winners.push_back(parse_experiment(w));
  }
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drug-review sentiment pipeline and drug recommender", "drugrec"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("-c,--config", o.config_file, "JSON pipeline config; flags override its fields")
      ->check(CLI::ExistingFile);
  app.add_option("-i,--input", o.inputs, "Review TSV file(s), concatenated before cleaning");
  app.add_option("-o,--output", o.output, "Output directory (default: $DRUGREC_OUTPUT_DIR or ./drugrec_out)");
  app.add_option("--seed", o.seed, "Seed for splitting, embeddings, SMOTE and training");
  app.add_option("--train-fraction", o.train_fraction, "Fraction of cleaned rows used for training");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores); results do not depend on it");
  app.add_option("--min-df", o.min_df, "Minimum document frequency of a vocabulary gram");
  app.add_option("--w2v-dim", o.w2v_dimension, "Word embedding dimension");
  app.add_option("--w2v-epochs", o.w2v_epochs, "Word embedding training epochs");
  app.add_option("--smote-ratio", o.smote_ratio, "Minority/majority ratio after SMOTE");
  app.add_option("--smote-k", o.smote_k, "SMOTE neighbor count");
  app.add_flag("--smote-off", o.smote_off, "Train on the original class balance");
  app.add_flag("--force", o.force, "Recompute stages even when cached artifacts match the config");

  auto* stats = app.add_subcommand("stats", "Corpus summaries after cleaning");
  auto* prep = app.add_subcommand("prep", "Clean, split and preprocess; caches token lists");

  auto* featurize = app.add_subcommand("featurize", "Fit feature transformers on the training split");
  std::vector<std::string> reps;
  bool export_matrix = false;
  featurize->add_option("--rep", reps, "bow, tfidf, word2vec or manual (default: all)")
      ->check(CLI::IsMember({"bow", "tfidf", "word2vec", "manual"}));
  featurize->add_flag("--export-matrix", export_matrix, "Also write train/test matrices in coordinate format");

  auto* train = app.add_subcommand("train", "Fit one model, or every configured experiment");
  std::string train_rep, train_model;
  train->add_option("--rep", train_rep, "Feature representation")
      ->check(CLI::IsMember({"bow", "tfidf", "word2vec", "manual"}));
  train->add_option("--model", train_model, "Algorithm name");

  auto* evaluate = app.add_subcommand("evaluate", "Score trained models on the test split");

  auto* recommend = app.add_subcommand("recommend", "Rank drugs per condition from the four winner models");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage, resuming from cached artifacts");
  for (auto* sub : {recommend, pipeline}) {
    sub->add_option("--top-n", o.top_n, "Drugs listed per condition (0 = all)");
    sub->add_option("--conditions", o.top_conditions, "Most-reviewed conditions listed (0 = all)");
    sub->add_flag("--mean-by-reviews", o.mean_by_reviews, "Divide a drug's score by its review count");
    sub->add_option("--winners", o.winners, "Four rep:model pairs")->expected(4);
  }

  std::vector<const char*> argv = {"drugrec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    Workspace ws(resolve(o), o.force, out);
    if (*stats) {
      ws.stats();
    } else if (*prep) {
      ws.prep();
    } else if (*featurize) {
      if (reps.empty())
        for (auto r : kAllRepresentations) reps.emplace_back(to_string(r));
      for (const auto& r : reps) ws.featurize(*parse_representation(r), export_matrix);
    } else if (*train) {
      if (train_rep.empty() != train_model.empty())
        throw InvalidArgument("--rep and --model must be given together");
      if (train_rep.empty()) {
        for (const auto& e : ws.config().experiments) ws.train(e);
      } else {
        ws.train(parse_experiment(train_rep + ":" + train_model));
      }
    } else if (*evaluate) {
      ws.evaluate(ws.config().experiments);
    } else if (*recommend) {
      ws.recommend();
    } else if (*pipeline) {
      ws.pipeline();
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace drugrec::cli
