#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drugrec/error.hpp"

namespace drugrec {

struct SparseEntry {
  std::uint32_t index;
  double weight;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector. Indices strictly increase, are below `dimension`,
/// and no stored weight is zero.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dimension = 0;

  std::size_t nnz() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Throws InvalidArgument when `v` breaks the SparseVector invariants.
void validate(const SparseVector& v);

/// Read-only view of one sparse row.
struct SparseRowView {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  double squared_norm() const noexcept;
};

/// Compressed sparse row matrix with a fixed column count.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols) {}

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  SparseRowView row(std::size_t i) const noexcept {
    const auto b = row_ptr_[i], e = row_ptr_[i + 1];
    return {std::span(indices_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
  }

  /// Appends a row. Entries must satisfy the SparseVector invariants for cols().
  void append(const SparseVector& v);
  void append(SparseRowView v);

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) noexcept { return std::span(data_).subspan(i * cols_, cols_); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  void append(std::span<const double> values);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

SparseMatrix to_sparse(const DenseMatrix& dense);
DenseMatrix to_dense(const SparseMatrix& sparse);

double dot(SparseRowView a, std::span<const double> dense) noexcept;
double squared_distance(SparseRowView a, SparseRowView b) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace drugrec
