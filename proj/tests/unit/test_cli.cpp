#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <drugrec/io.hpp>

#include "cli.hpp"
#include "fixture.hpp"
#include "pipeline_config.hpp"

namespace drugrec::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int status;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = drugrec::testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    input_ = (dir_ / "reviews.tsv").string();
    drugrec::testing::write_fixture(input_, {.rows = 400});
  }
  fs::path dir_;
  std::string input_;
};

TEST(PipelineConfig, JsonRoundTripIsIdentity) {
  auto c = default_pipeline_config();
  c.inputs = {"a.tsv", "b.tsv"};
  c.output_dir = "out";
  c.seed = 42;
  c.models[Algorithm::gbdt].shrinkage = 0.25;
  c.winners[0] = {Representation::tfidf, Algorithm::ridge};
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(config_from_json(to_json(default_pipeline_config())), default_pipeline_config());
}

TEST(PipelineConfig, HashTracksMeaningfulFields) {
  const auto base = default_pipeline_config();
  auto c = base;
  c.output_dir = "elsewhere";
  c.threads = 7;
  EXPECT_EQ(config_hash(c), config_hash(base));
  c.seed = 2;
  EXPECT_NE(config_hash(c), config_hash(base));
  c = base;
  c.models[Algorithm::perceptron].epochs = 11;
  EXPECT_NE(config_hash(c), config_hash(base));
  c = base;
  c.smote_ratio = 0.6;
  EXPECT_NE(config_hash(c), config_hash(base));
}

TEST(PipelineConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json("{\"sed\": 3}"), InvalidArgument);
  EXPECT_THROW(config_from_json("{\"seed\": \"x\"}"), InvalidArgument);
  EXPECT_THROW(config_from_json("{\"winners\": [\"bow:svm\"]}"), InvalidArgument);
  EXPECT_THROW(config_from_json("[1]"), InvalidArgument);
  EXPECT_EQ(config_from_json("{}"), default_pipeline_config());
}

TEST_F(CliTest, EvaluateWithoutTrainNamesModelFile) {
  const auto r = run_cli({"evaluate", "-o", (dir_ / "out").string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("models/bow.logistic_regression.json"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingInputFails) {
  const auto r = run_cli({"stats", "--input", (dir_ / "nope.tsv").string(), "-o", (dir_ / "out").string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("nope.tsv"), std::string::npos);
  EXPECT_NE(run_cli({"bogus"}).status, 0);
}

TEST_F(CliTest, TrainWithoutFeaturizeNamesTransformer) {
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(run_cli({"prep", "-i", input_, "-o", out}).status, 0);
  const auto r = run_cli({"train", "--rep", "tfidf", "--model", "linear_svc", "-i", input_, "-o", out});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("features/tfidf.json"), std::string::npos) << r.err;
}

TEST_F(CliTest, StagesRunIndividuallyAndResume) {
  const auto out = (dir_ / "out").string();
  const std::vector<std::string> common = {"-i", input_, "-o", out, "--seed", "3"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), common.begin(), common.end());
    return run_cli(a);
  };
  ASSERT_EQ(with({"stats"}).status, 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "stats/stats.csv"));
  ASSERT_EQ(with({"prep"}).status, 0);
  ASSERT_EQ(with({"featurize", "--rep", "tfidf", "--export-matrix"}).status, 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "features/tfidf.train.coo"));
  ASSERT_EQ(with({"train", "--rep", "tfidf", "--model", "linear_svc"}).status, 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "models/tfidf.linear_svc.json"));
  const auto again = with({"train", "--rep", "tfidf", "--model", "linear_svc"});
  EXPECT_NE(again.out.find("up to date"), std::string::npos);
  const auto manifest = read_file(fs::path(out) / "manifest.json");
  EXPECT_NE(manifest.find("train.tfidf.linear_svc"), std::string::npos);
  EXPECT_NE(manifest.find("config_hash"), std::string::npos);
}

TEST_F(CliTest, RecommendEmitsTopFourOfTopFive) {
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(run_cli({"pipeline", "-i", input_, "-o", out}).status, 0);
  const auto r = run_cli({"recommend", "-o", out, "--top-n", "4", "--conditions", "5"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::ifstream in(fs::path(out) / "recommend/recommendations.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "condition,rank,drug,final_score");
  std::map<std::string, int> per_condition;
  while (std::getline(in, line)) ++per_condition[line.substr(0, line.find(','))];
  EXPECT_EQ(per_condition.size(), 5u);
  for (const auto& [c, n] : per_condition) EXPECT_LE(n, 4) << c;
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  auto c = default_pipeline_config();
  c.inputs = {input_};
  c.seed = 5;
  c.experiments = {{Representation::bow, Algorithm::multinomial_nb}};
  const auto cfg_path = dir_ / "config.json";
  write_file_atomic(cfg_path, to_json(c));
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg_path.string(), "-o", out, "--seed", "6", "--smote-off"}).status, 0);
  const auto resolved = config_from_json(read_file(fs::path(out) / "config.json"));
  EXPECT_EQ(resolved.seed, 6u);
  EXPECT_FALSE(resolved.smote_enabled);
  EXPECT_EQ(resolved.experiments.size(), 1u);
}

}  // namespace
}  // namespace drugrec::cli
