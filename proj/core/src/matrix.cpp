#include "drugrec/matrix.hpp"

#include <string>

namespace drugrec {

void validate(const SparseVector& v) {
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    const auto& e = v.entries[i];
    if (e.index >= v.dimension)
      throw InvalidArgument("sparse index " + std::to_string(e.index) + " outside dimension " +
                            std::to_string(v.dimension));
    if (i > 0 && v.entries[i - 1].index >= e.index)
      throw InvalidArgument("sparse indices must strictly increase");
    if (e.weight == 0.0) throw InvalidArgument("sparse vector stores an explicit zero");
  }
}

double SparseRowView::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

void SparseMatrix::append(const SparseVector& v) {
  if (v.dimension != cols_)
    throw InvalidArgument("row dimension " + std::to_string(v.dimension) +
                          " does not match matrix columns " + std::to_string(cols_));
  validate(v);
  for (const auto& e : v.entries) {
    indices_.push_back(e.index);
    values_.push_back(e.weight);
  }
  row_ptr_.push_back(values_.size());
}

void SparseMatrix::append(SparseRowView v) {
  for (std::size_t i = 0; i < v.nnz(); ++i) {
    if (v.indices[i] >= cols_ || (i > 0 && v.indices[i - 1] >= v.indices[i]))
      throw InvalidArgument("malformed sparse row");
    if (v.values[i] == 0.0) continue;
    indices_.push_back(v.indices[i]);
    values_.push_back(v.values[i]);
  }
  row_ptr_.push_back(values_.size());
}

void DenseMatrix::append(std::span<const double> values) {
  if (cols_ == 0 && data_.empty()) cols_ = values.size();
  if (values.size() != cols_)
    throw InvalidArgument("dense row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(cols_));
  data_.insert(data_.end(), values.begin(), values.end());
}

SparseMatrix to_sparse(const DenseMatrix& dense) {
  SparseMatrix out(dense.cols());
  SparseVector row;
  row.dimension = dense.cols();
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    row.entries.clear();
    const auto r = dense.row(i);
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) row.entries.push_back({static_cast<std::uint32_t>(j), r[j]});
    out.append(row);
  }
  return out;
}

DenseMatrix to_dense(const SparseMatrix& sparse) {
  DenseMatrix out(sparse.rows(), sparse.cols());
  for (std::size_t i = 0; i < sparse.rows(); ++i) {
    const auto r = sparse.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) out(i, r.indices[k]) = r.values[k];
  }
  return out;
}

double dot(SparseRowView a, std::span<const double> dense) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.nnz(); ++k) s += a.values[k] * dense[a.indices[k]];
  return s;
}

double squared_distance(SparseRowView a, SparseRowView b) noexcept {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() && j < b.nnz()) {
    if (a.indices[i] == b.indices[j]) {
      const double d = a.values[i++] - b.values[j++];
      s += d * d;
    } else if (a.indices[i] < b.indices[j]) {
      s += a.values[i] * a.values[i];
      ++i;
    } else {
      s += b.values[j] * b.values[j];
      ++j;
    }
  }
  for (; i < a.nnz(); ++i) s += a.values[i] * a.values[i];
  for (; j < b.nnz(); ++j) s += b.values[j] * b.values[j];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace drugrec
