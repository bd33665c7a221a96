#include "nsfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace nsfem {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
                           std::vector<int> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != values_.size()) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || static_cast<std::size_t>(col_idx_[k]) >= cols_ ||
          (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])) {
        throw std::invalid_argument("SparseMatrix: column indices must be in range and increasing");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::vector<int> count(rows, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const Triplet& t = triplets[k];
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= rows || t.col < 0 ||
        static_cast<std::size_t>(t.col) >= cols) {
      throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
    }
    double v = 0.0;
    std::size_t j = k;
    // Sum in sorted order so the result does not depend on input order of
    // distinct entries; ties keep stable input order.
    while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col) {
      v += triplets[j].value;
      ++j;
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(v);
    ++count[t.row];
    k = j;
  }
  for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + count[i];
  return m;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_idx_.begin() + row_ptr_.at(i);
  const auto end = col_idx_.begin() + row_ptr_.at(i + 1);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return values_[it - col_idx_.begin()];
}

double* SparseMatrix::find(std::size_t i, std::size_t j) {
  const auto begin = col_idx_.begin() + row_ptr_[i];
  const auto end = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return nullptr;
  return &values_[it - col_idx_.begin()];
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ &&
         col_idx_ == other.col_idx_;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

void SparseMatrix::multiply_add(double alpha, std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw std::invalid_argument("SparseMatrix::multiply_add: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] += alpha * s;
  }
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != rows_ || y.size() != cols_) throw std::invalid_argument("SparseMatrix::bilinear: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * y[col_idx_[k]];
    total += x[i] * s;
  }
  return total;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<int> count(cols_, 0);
  for (int c : col_idx_) ++count[c];
  for (std::size_t j = 0; j < cols_; ++j) t.row_ptr_[j + 1] = t.row_ptr_[j] + count[j];
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<int> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = static_cast<int>(i);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  SparseMatrix s = *this;
  for (double& v : s.values_) v *= alpha;
  return s;
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseMatrix::submatrix(std::span<const int> keep_rows, std::span<const int> keep_cols) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < keep_cols.size(); ++j) col_map.at(keep_cols[j]) = static_cast<int>(j);
  const bool monotone = std::is_sorted(keep_cols.begin(), keep_cols.end());

  SparseMatrix s(keep_rows.size(), keep_cols.size());
  std::vector<std::pair<int, double>> row;
  for (std::size_t r = 0; r < keep_rows.size(); ++r) {
    const int i = keep_rows[r];
    row.clear();
    for (int k = row_ptr_.at(i); k < row_ptr_.at(i + 1); ++k) {
      const int c = col_map[col_idx_[k]];
      if (c >= 0) row.emplace_back(c, values_[k]);
    }
    if (!monotone) std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      s.col_idx_.push_back(c);
      s.values_.push_back(v);
    }
    s.row_ptr_[r + 1] = static_cast<int>(s.col_idx_.size());
  }
  return s;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: dimension mismatch");
  std::vector<int> row_ptr(a.rows() + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(std::max(a.nnz(), b.nnz()));
  vals.reserve(std::max(a.nnz(), b.nnz()));
  constexpr int kEnd = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    int ka = a.row_ptr()[i], kb = b.row_ptr()[i];
    const int ea = a.row_ptr()[i + 1], eb = b.row_ptr()[i + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? a.col_idx()[ka] : kEnd;
      const int cb = kb < eb ? b.col_idx()[kb] : kEnd;
      if (ca == cb) {
        cols.push_back(ca);
        vals.push_back(alpha * a.values()[ka++] + beta * b.values()[kb++]);
      } else if (ca < cb) {
        cols.push_back(ca);
        vals.push_back(alpha * a.values()[ka++]);
      } else {
        cols.push_back(cb);
        vals.push_back(beta * b.values()[kb++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

void write_matrix_market(const SparseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %d %.17g\n", i + 1, m.col_idx()[k] + 1, m.values()[k]);
      out << buf;
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace nsfem
