#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drugrec/corpus.hpp"
#include "drugrec/matrix.hpp"

namespace drugrec {

enum class Provenance : std::uint8_t { original, synthetic };

/// Where a synthetic row came from: row = parent + lambda * (neighbor - parent).
/// Parent and neighbor are row indices of the matrix that was resampled.
struct SyntheticOrigin {
  std::size_t parent = 0;
  std::size_t neighbor = 0;
  double lambda = 0.0;
};

/// Feature rows with aligned labels. `origins` has one entry per synthetic
/// row, in row order.
template <typename Matrix>
struct LabeledMatrix {
  Matrix rows;
  std::vector<Sentiment> labels;
  std::vector<Provenance> provenance;
  std::vector<SyntheticOrigin> origins;

  std::size_t size() const noexcept { return labels.size(); }

  static LabeledMatrix original(Matrix m, std::vector<Sentiment> labels) {
    if (m.rows() != labels.size()) throw InvalidArgument("row and label counts differ");
    LabeledMatrix out{std::move(m), std::move(labels), {}, {}};
    out.provenance.assign(out.labels.size(), Provenance::original);
    return out;
  }
};

using SparseDataset = LabeledMatrix<SparseMatrix>;
using DenseDataset = LabeledMatrix<DenseMatrix>;

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  double target_ratio = 0.7;  // minority / majority after resampling
  std::uint64_t seed = 1;
  /// When non-empty, neighbor distances use only these columns (coarse mode).
  std::vector<std::uint32_t> coarse_columns;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// floor(ratio * majority), the minority count SMOTE stops at.
std::size_t smote_target_count(std::size_t majority, double ratio);

/// k nearest rows of `rows` to row `query`, by Euclidean distance, excluding
/// the query itself. Ties go to the lower index. Requires k < rows.rows().
std::vector<std::size_t> knn_minority(const DenseMatrix& rows, std::size_t query, std::size_t k);
std::vector<std::size_t> knn_minority(const SparseMatrix& rows, std::size_t query, std::size_t k);

/// Oversamples the minority class of `train` with synthetic interpolated rows
/// until it reaches smote_target_count(). Original rows are kept unchanged and
/// in order; synthetic rows follow them. Returns the input unchanged when the
/// minority is already at or above the target.
SparseDataset smote(const SparseDataset& train, const SmoteConfig& config);
DenseDataset smote(const DenseDataset& train, const SmoteConfig& config);

}  // namespace drugrec
