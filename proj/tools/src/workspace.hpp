#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <drugrec/corpus.hpp>
#include <drugrec/learn.hpp>
#include <drugrec/matrix.hpp>
#include <drugrec/textprep.hpp>

#include "pipeline_config.hpp"

namespace drugrec::cli {

/// A stage needs an artifact an earlier stage produces.
class DependencyError : public Error {
 public:
  DependencyError(const std::filesystem::path& missing, std::string_view producer);
};

/// Train or test rows with their cached token lists.
struct PreparedSplit {
  std::vector<ReviewRecord> records;
  std::vector<Tokens> tokens;

  std::vector<Sentiment> labels() const;
};

/// Either matrix type; exactly one is populated.
struct FeatureMatrix {
  bool sparse = true;
  SparseMatrix s;
  DenseMatrix d;

  std::size_t rows() const { return sparse ? s.rows() : d.rows(); }
};

/// Output directory, resolved config, manifest and in-process caches.
/// Stages skip work whose artifacts exist under the same config hash
/// unless `force` is set.
class Workspace {
 public:
  Workspace(PipelineConfig config, bool force, std::ostream& log);

  const PipelineConfig& config() const noexcept { return config_; }
  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path path(const std::string& relative) const { return root_ / relative; }

  void stats();
  void prep();
  void featurize(Representation rep, bool export_matrix);
  void train(const Experiment& e);
  void evaluate(const std::vector<Experiment>& experiments);
  void recommend();
  void pipeline();

  std::filesystem::path model_path(const Experiment& e) const;

 private:
  bool up_to_date(const std::string& stage, const std::vector<std::string>& artifacts) const;
  void record_stage(const std::string& stage, const std::vector<std::string>& artifacts);
  void require(const std::string& relative, std::string_view producer) const;

  std::vector<ReviewRecord> load_inputs(CleaningReport* report);
  const PreparedSplit& split(bool train);
  const FeatureMatrix& features(Representation rep, bool train);
  ClassifierModel load_model(const Experiment& e) const;

  PipelineConfig config_;
  std::string hash_;
  bool force_;
  std::ostream& log_;
  std::filesystem::path root_;
  std::map<bool, PreparedSplit> splits_;
  std::map<std::pair<Representation, bool>, FeatureMatrix> features_;
};

}  // namespace drugrec::cli
