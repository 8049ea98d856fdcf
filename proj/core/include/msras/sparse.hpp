#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace msras {

using index_t = std::int64_t;

/// One (row, col, value) entry used during assembly. Duplicates are summed
/// when compressing to CSR.
struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

/// Compressed-sparse-row matrix. Column indices are sorted and unique within
/// each row. This is the carrier for every operator in the solver (B, B_j,
/// B_S, A_a, eigenpencil blocks).
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(index_t nrows, index_t ncols) : nrows_(nrows), ncols_(ncols), offsets_(static_cast<std::size_t>(nrows) + 1, 0) {}

  /// Compress a triplet list. Triplets are sorted by (row, col) and duplicate
  /// positions are summed in that deterministic order, so rebuilding from the
  /// same triplet sequence is bit-identical.
  static SparseMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> triplets);

  /// Dense-looking construction helper for tests and small operators.
  /// `rows` holds one initializer row per matrix row; zeros are dropped.
  static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows);

  static SparseMatrix identity(index_t n);

  index_t rows() const { return nrows_; }
  index_t cols() const { return ncols_; }
  index_t nnz() const { return static_cast<index_t>(values_.size()); }

  std::span<const index_t> row_offsets() const { return offsets_; }
  std::span<const index_t> col_indices() const { return indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mutable() { return values_; }

  std::span<const index_t> row_cols(index_t r) const {
    return {indices_.data() + offsets_[r], static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
  }
  std::span<const double> row_values(index_t r) const {
    return {values_.data() + offsets_[r], static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
  }

  /// Value at (r, c); zero if not stored. Binary search per call.
  double coeff(index_t r, index_t c) const;

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// y = A^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrix transpose() const;

  /// Drops stored entries with |value| <= threshold (structural cleanup).
  SparseMatrix pruned(double threshold = 0.0) const;

  /// Largest absolute entry; 0 for an empty matrix.
  double max_abs() const;

  /// max_r sum_c |a_rc| (operator inf-norm).
  double norm_inf() const;

  bool empty() const { return nrows_ == 0 || ncols_ == 0; }

private:
  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<index_t> offsets_{0};
  std::vector<index_t> indices_;
  std::vector<double> values_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);

/// Entry (i, j) of the result is A(rows[i], cols[j]). Index sets must be
/// sorted, unique and in range.
SparseMatrix submatrix(const SparseMatrix& a, std::span<const index_t> rows, std::span<const index_t> cols);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// R * A * Rt with explicit conformity checks (realizes Galerkin products
/// such as the coarse operator).
SparseMatrix triple_product(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& rt);

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);

/// (A + A^T)/2, exactly symmetric in floating point.
SparseMatrix symmetric_part(const SparseMatrix& a);

/// diag(d_row) * A * diag(d_col). Entry scale factors are formed as
/// d_row[i]*d_col[j] first so a symmetric input with d_row == d_col stays
/// exactly symmetric.
SparseMatrix scale_rows_cols(const SparseMatrix& a, std::span<const double> d_row, std::span<const double> d_col);

/// ||A - A^T||_max.
double asymmetry(const SparseMatrix& a);

// -- small dense vector kernels shared by the Krylov and Lanczos code --------
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

}  // namespace msras
