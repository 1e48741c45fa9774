#include "drugrec/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drugrec/error.hpp"
#include "drugrec/parallel.hpp"
#include "drugrec/rng.hpp"

namespace drugrec {

namespace {

struct Candidate {
  double distance;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    return distance != o.distance ? distance < o.distance : index < o.index;
  }
};

double row_distance(const DenseMatrix& m, std::size_t a, std::size_t b) {
  return squared_distance(m.row(a), m.row(b));
}
double row_distance(const SparseMatrix& m, std::size_t a, std::size_t b) {
  return squared_distance(m.row(a), m.row(b));
}

template <typename Matrix>
std::vector<std::size_t> knn_impl(const Matrix& rows, std::size_t query, std::size_t k) {
  const std::size_t n = rows.rows();
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k >= n)
    throw InvalidArgument("k = " + std::to_string(k) + " needs more than k minority rows, have " +
                          std::to_string(n));
  if (query >= n) throw InvalidArgument("query row out of range");
  std::vector<Candidate> heap;  // max-heap of the best k so far
  heap.reserve(k + 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == query) continue;
    const Candidate c{row_distance(rows, query, j), j};
    if (heap.size() < k) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end());
    }
  }
  std::sort_heap(heap.begin(), heap.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (const auto& c : heap) out.push_back(c.index);
  return out;
}

DenseMatrix select_rows(const DenseMatrix& m, std::span<const std::size_t> rows,
                        std::span<const std::uint32_t> columns) {
  DenseMatrix out(0, columns.empty() ? m.cols() : columns.size());
  std::vector<double> buf;
  for (auto r : rows) {
    if (columns.empty()) {
      out.append(m.row(r));
      continue;
    }
    buf.clear();
    for (auto c : columns) buf.push_back(m(r, c));
    out.append(buf);
  }
  return out;
}

SparseMatrix select_sparse_rows(const SparseMatrix& m, std::span<const std::size_t> rows) {
  SparseMatrix out(m.cols());
  for (auto r : rows) out.append(m.row(r));
  return out;
}

DenseMatrix project_sparse(const SparseMatrix& m, std::span<const std::size_t> rows,
                           std::span<const std::uint32_t> columns) {
  std::vector<std::uint32_t> sorted(columns.begin(), columns.end());
  std::sort(sorted.begin(), sorted.end());
  DenseMatrix out(rows.size(), sorted.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = m.row(rows[i]);
    std::size_t c = 0;
    for (std::size_t k = 0; k < r.nnz() && c < sorted.size(); ++k) {
      while (c < sorted.size() && sorted[c] < r.indices[k]) ++c;
      if (c < sorted.size() && sorted[c] == r.indices[k]) out(i, c) = r.values[k];
    }
  }
  return out;
}

double interpolate(double a, double b, double lambda) {
  const double v = a + lambda * (b - a);
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

void append_synthetic(DenseMatrix& out, const DenseMatrix& src, std::size_t a, std::size_t b,
                      double lambda) {
  std::vector<double> row(src.cols());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = interpolate(src(a, j), src(b, j), lambda);
  out.append(row);
}

void append_synthetic(SparseMatrix& out, const SparseMatrix& src, std::size_t a, std::size_t b,
                      double lambda) {
  const auto ra = src.row(a), rb = src.row(b);
  SparseVector v;
  v.dimension = src.cols();
  std::size_t i = 0, j = 0;
  auto push = [&](std::uint32_t idx, double x, double y) {
    const double w = interpolate(x, y, lambda);
    if (w != 0.0) v.entries.push_back({idx, w});
  };
  while (i < ra.nnz() || j < rb.nnz()) {
    if (j >= rb.nnz() || (i < ra.nnz() && ra.indices[i] < rb.indices[j])) {
      push(ra.indices[i], ra.values[i], 0.0);
      ++i;
    } else if (i >= ra.nnz() || rb.indices[j] < ra.indices[i]) {
      push(rb.indices[j], 0.0, rb.values[j]);
      ++j;
    } else {
      push(ra.indices[i], ra.values[i], rb.values[j]);
      ++i;
      ++j;
    }
  }
  out.append(v);
}

// Neighbor lists (as minority positions) for the first `parents` minority rows.
std::vector<std::vector<std::size_t>> minority_neighbors(const DenseMatrix& m,
                                                         std::span<const std::size_t> minority,
                                                         std::size_t parents, const SmoteConfig& cfg) {
  for (auto c : cfg.coarse_columns)
    if (c >= m.cols()) throw InvalidArgument("coarse column out of range");
  const auto sub = select_rows(m, minority, cfg.coarse_columns);
  std::vector<std::vector<std::size_t>> out(parents);
  parallel_for(parents, [&](std::size_t p) { out[p] = knn_impl(sub, p, cfg.k_neighbors); }, cfg.threads);
  return out;
}

std::vector<std::vector<std::size_t>> minority_neighbors(const SparseMatrix& m,
                                                         std::span<const std::size_t> minority,
                                                         std::size_t parents, const SmoteConfig& cfg) {
  std::vector<std::vector<std::size_t>> out(parents);
  if (!cfg.coarse_columns.empty()) {
    for (auto c : cfg.coarse_columns)
      if (c >= m.cols()) throw InvalidArgument("coarse column out of range");
    const auto sub = project_sparse(m, minority, cfg.coarse_columns);
    parallel_for(parents, [&](std::size_t p) { out[p] = knn_impl(sub, p, cfg.k_neighbors); }, cfg.threads);
  } else {
    const auto sub = select_sparse_rows(m, minority);
    parallel_for(parents, [&](std::size_t p) { out[p] = knn_impl(sub, p, cfg.k_neighbors); }, cfg.threads);
  }
  return out;
}

template <typename Matrix>
LabeledMatrix<Matrix> smote_impl(const LabeledMatrix<Matrix>& train, const SmoteConfig& cfg) {
  if (train.rows.rows() != train.labels.size())
    throw InvalidArgument("row and label counts differ");
  if (cfg.k_neighbors < 1) throw InvalidArgument("SMOTE needs k >= 1");
  if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0))
    throw InvalidArgument("SMOTE target ratio must lie in (0, 1]");
  std::size_t positives = 0;
  for (auto l : train.labels) positives += l == Sentiment::positive;
  const std::size_t negatives = train.labels.size() - positives;
  if (positives == 0 || negatives == 0) throw InvalidArgument("SMOTE needs both classes present");

  LabeledMatrix<Matrix> out = train;
  if (out.provenance.size() != out.labels.size())
    out.provenance.assign(out.labels.size(), Provenance::original);

  const Sentiment minority_label = positives < negatives ? Sentiment::positive : Sentiment::negative;
  const std::size_t majority = std::max(positives, negatives);
  const std::size_t minority_count = std::min(positives, negatives);
  const std::size_t target = smote_target_count(majority, cfg.target_ratio);
  if (minority_count >= target) return out;
  if (minority_count <= cfg.k_neighbors)
    throw InvalidArgument("SMOTE needs more than k = " + std::to_string(cfg.k_neighbors) +
                          " minority rows, have " + std::to_string(minority_count));

  std::vector<std::size_t> minority;
  minority.reserve(minority_count);
  for (std::size_t i = 0; i < train.labels.size(); ++i)
    if (train.labels[i] == minority_label) minority.push_back(i);

  const std::size_t needed = target - minority_count;
  const std::size_t parents = std::min(needed, minority_count);
  const auto neighbors = minority_neighbors(train.rows, minority, parents, cfg);

  for (std::size_t s = 0; s < needed; ++s) {
    const std::size_t p = s % minority_count;
    Rng rng(derive_seed(cfg.seed, s));
    const std::size_t nb = neighbors[p][rng.uniform_index(cfg.k_neighbors)];
    const double lambda = rng.uniform_closed01();
    append_synthetic(out.rows, train.rows, minority[p], minority[nb], lambda);
    out.labels.push_back(minority_label);
    out.provenance.push_back(Provenance::synthetic);
    out.origins.push_back({minority[p], minority[nb], lambda});
  }
  return out;
}

}  // namespace

std::size_t smote_target_count(std::size_t majority, double ratio) {
  const long double v = static_cast<long double>(ratio) * static_cast<long double>(majority);
  return static_cast<std::size_t>(std::floor(v + 1e-9L));
}

std::vector<std::size_t> knn_minority(const DenseMatrix& rows, std::size_t query, std::size_t k) {
  return knn_impl(rows, query, k);
}

std::vector<std::size_t> knn_minority(const SparseMatrix& rows, std::size_t query, std::size_t k) {
  return knn_impl(rows, query, k);
}

SparseDataset smote(const SparseDataset& train, const SmoteConfig& config) {
  return smote_impl(train, config);
}

DenseDataset smote(const DenseDataset& train, const SmoteConfig& config) {
  return smote_impl(train, config);
}

}  // namespace drugrec
