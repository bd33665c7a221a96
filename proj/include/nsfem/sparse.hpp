#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace nsfem {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros are kept so that operators assembled from
/// the same connectivity share one sparsity pattern.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
               std::vector<int> col_idx, std::vector<double> values);

  /// Duplicate entries are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Entry (i, j), zero if not stored.
  double at(std::size_t i, std::size_t j) const;
  /// Pointer to the stored value, or nullptr.
  double* find(std::size_t i, std::size_t j);

  bool same_pattern(const SparseMatrix& other) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// y += alpha * A x
  void multiply_add(double alpha, std::span<const double> x, std::span<double> y) const;
  /// x^T A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  SparseMatrix transpose() const;
  SparseMatrix scaled(double alpha) const;

  double frobenius_norm() const;
  double max_abs() const;

  /// Rows `keep_rows`, columns `keep_cols` (both given as old indices, in
  /// the order they appear in the result).
  SparseMatrix submatrix(std::span<const int> keep_rows, std::span<const int> keep_cols) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// alpha*A + beta*B on the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);

/// MatrixMarket coordinate real general, 1-based.
void write_matrix_market(const SparseMatrix& m, std::ostream& out);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace nsfem
