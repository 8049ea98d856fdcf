#include "msras/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msras {

SparseMatrix SparseMatrix::from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw std::out_of_range("SparseMatrix::from_triplets: entry out of bounds");
  }
  // stable sort: duplicate (row, col) entries are summed in insertion
  // order, which keeps shared-term assemblies bit-identical
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(nrows, ncols);
  m.indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (index_t r = 0; r < nrows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      const index_t c = triplets[i].col;
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
        v += triplets[i].value;
        ++i;
      }
      m.indices_.push_back(c);
      m.values_.push_back(v);
    }
    m.offsets_[static_cast<std::size_t>(r) + 1] = static_cast<index_t>(m.indices_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  const index_t nrows = static_cast<index_t>(rows.size());
  index_t ncols = 0;
  for (const auto& r : rows) ncols = std::max(ncols, static_cast<index_t>(r.size()));
  std::vector<Triplet> trip;
  for (index_t i = 0; i < nrows; ++i)
    for (index_t j = 0; j < static_cast<index_t>(rows[i].size()); ++j)
      if (rows[i][j] != 0.0) trip.push_back({i, j, rows[i][j]});
  return from_triplets(nrows, ncols, std::move(trip));
}

SparseMatrix SparseMatrix::identity(index_t n) {
  std::vector<Triplet> trip(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) trip[static_cast<std::size_t>(i)] = {i, i, 1.0};
  return from_triplets(n, n, std::move(trip));
}

double SparseMatrix::coeff(index_t r, index_t c) const {
  if (r < 0 || r >= nrows_ || c < 0 || c >= ncols_) throw std::out_of_range("SparseMatrix::coeff");
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(offsets_[r] + (it - cols.begin()))];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<index_t>(x.size()) != ncols_ || static_cast<index_t>(y.size()) != nrows_)
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  for (index_t r = 0; r < nrows_; ++r) {
    double s = 0.0;
    for (index_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * x[indices_[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(nrows_));
  multiply(x, y);
  return y;
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (static_cast<index_t>(x.size()) != nrows_ || static_cast<index_t>(y.size()) != ncols_)
    throw std::invalid_argument("SparseMatrix::multiply_transpose: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (index_t r = 0; r < nrows_; ++r)
    for (index_t k = offsets_[r]; k < offsets_[r + 1]; ++k) y[indices_[k]] += values_[k] * x[r];
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(ncols_, nrows_);
  t.indices_.resize(values_.size());
  t.values_.resize(values_.size());
  std::vector<index_t> count(static_cast<std::size_t>(ncols_), 0);
  for (index_t c : indices_) ++count[c];
  for (index_t c = 0; c < ncols_; ++c) t.offsets_[c + 1] = t.offsets_[c] + count[c];
  std::vector<index_t> next(t.offsets_.begin(), t.offsets_.end() - 1);
  for (index_t r = 0; r < nrows_; ++r) {
    for (index_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const index_t pos = next[indices_[k]]++;
      t.indices_[pos] = r;
      t.values_[pos] = values_[k];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::pruned(double threshold) const {
  SparseMatrix m(nrows_, ncols_);
  m.indices_.reserve(values_.size());
  m.values_.reserve(values_.size());
  for (index_t r = 0; r < nrows_; ++r) {
    for (index_t k = offsets_[r]; k < offsets_[r + 1]; ++k)
      if (std::abs(values_[k]) > threshold) {
        m.indices_.push_back(indices_[k]);
        m.values_.push_back(values_[k]);
      }
    m.offsets_[static_cast<std::size_t>(r) + 1] = static_cast<index_t>(m.indices_.size());
  }
  return m;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (index_t r = 0; r < nrows_; ++r) {
    double s = 0.0;
    for (index_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) { return a.multiply(x); }

SparseMatrix submatrix(const SparseMatrix& a, std::span<const index_t> rows, std::span<const index_t> cols) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw std::out_of_range("submatrix: row index out of range");
    if (i > 0 && rows[i] <= rows[i - 1]) throw std::invalid_argument("submatrix: row set not sorted/unique");
  }
  std::vector<index_t> col_map(static_cast<std::size_t>(a.cols()), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= a.cols()) throw std::out_of_range("submatrix: col index out of range");
    if (j > 0 && cols[j] <= cols[j - 1]) throw std::invalid_argument("submatrix: col set not sorted/unique");
    col_map[cols[j]] = static_cast<index_t>(j);
  }

  std::vector<Triplet> trip;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const index_t r = rows[i];
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      const index_t lc = col_map[rc[k]];
      if (lc >= 0) trip.push_back({static_cast<index_t>(i), lc, rv[k]});
    }
  }
  return SparseMatrix::from_triplets(static_cast<index_t>(rows.size()), static_cast<index_t>(cols.size()), std::move(trip));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  // Gustavson row-by-row product with a dense accumulator and marker array.
  std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<index_t> flag(static_cast<std::size_t>(b.cols()), -1);
  std::vector<index_t> marked;
  std::vector<Triplet> trip;
  for (index_t r = 0; r < a.rows(); ++r) {
    marked.clear();
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      const double alpha = av[k];
      auto bc = b.row_cols(ac[k]);
      auto bv = b.row_values(ac[k]);
      for (std::size_t l = 0; l < bc.size(); ++l) {
        if (flag[bc[l]] != r) {
          flag[bc[l]] = r;
          acc[bc[l]] = 0.0;
          marked.push_back(bc[l]);
        }
        acc[bc[l]] += alpha * bv[l];
      }
    }
    std::sort(marked.begin(), marked.end());
    for (index_t c : marked) trip.push_back({r, c, acc[c]});
  }
  return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(trip));
}

SparseMatrix triple_product(const SparseMatrix& r, const SparseMatrix& a, const SparseMatrix& rt) {
  if (r.cols() != a.rows() || a.cols() != rt.rows() || r.rows() != rt.cols())
    throw std::invalid_argument("triple_product: dimension mismatch");
  return multiply(multiply(r, a), rt);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: dimension mismatch");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
  for (index_t r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) trip.push_back({r, ac[k], alpha * av[k]});
    auto bc = b.row_cols(r);
    auto bv = b.row_values(r);
    for (std::size_t k = 0; k < bc.size(); ++k) trip.push_back({r, bc[k], beta * bv[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trip));
}

SparseMatrix symmetric_part(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_part: matrix not square");
  return add(a, a.transpose(), 0.5, 0.5);
}

SparseMatrix scale_rows_cols(const SparseMatrix& a, std::span<const double> d_row, std::span<const double> d_col) {
  if (static_cast<index_t>(d_row.size()) != a.rows() || static_cast<index_t>(d_col.size()) != a.cols())
    throw std::invalid_argument("scale_rows_cols: dimension mismatch");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nnz()));
  for (index_t r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      const double s = d_row[r] * d_col[ac[k]];
      if (s != 0.0) trip.push_back({r, ac[k], av[k] * s});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trip));
}

double asymmetry(const SparseMatrix& a) {
  const SparseMatrix d = add(a, a.transpose(), 1.0, -1.0);
  return d.max_abs();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

}  // namespace msras
