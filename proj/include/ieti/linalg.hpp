#pragma once
// Minimal dense/sparse linear algebra used by every other module: CSR storage,
// vector kernels, a sparse SPD factorization, and a pivoted symmetric-indefinite
// factorization with inertia reporting.
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ieti {

using Vector = std::vector<double>;

struct LinalgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : LinalgError {
  using LinalgError::LinalgError;
};
struct NotPositiveDefinite : LinalgError {
  using LinalgError::LinalgError;
};
struct SingularMatrix : LinalgError {
  using LinalgError::LinalgError;
};

double dot(const Vector& x, const Vector& y);
void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x
double norm2(const Vector& x);
void scale(double alpha, Vector& x);

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }

  Vector multiply(const Vector& x) const;
  Vector multiply_transposed(const Vector& x) const;
  DenseMatrix multiplied_by(const DenseMatrix& b) const;
  DenseMatrix transposed() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// Plain Cholesky on dense SPD input; throws NotPositiveDefinite otherwise.
class DenseCholesky {
 public:
  DenseCholesky() = default;
  explicit DenseCholesky(const DenseMatrix& a);
  Vector solve(const Vector& b) const;
  std::size_t size() const { return l_.rows(); }

 private:
  DenseMatrix l_;
};

DenseMatrix dense_inverse_spd(const DenseMatrix& a);

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed-sparse-row matrix with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
               std::vector<int> col_idx, std::vector<double> values);
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const DenseMatrix& a, double drop_tol = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(int i, int j) const;  // 0 when absent
  DenseMatrix to_dense() const;
  SparseMatrix transposed() const;
  SparseMatrix submatrix(const std::vector<int>& keep_rows,
                         const std::vector<int>& keep_cols) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& m, const Vector& x);
Vector spmv_transposed(const SparseMatrix& m, const Vector& x);

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

// Sparse SPD solver (LDL^T with fill-reducing ordering; dense path for small n).
class SpdFactorization {
 public:
  SpdFactorization();
  ~SpdFactorization();
  SpdFactorization(SpdFactorization&&) noexcept;
  SpdFactorization& operator=(SpdFactorization&&) noexcept;
  SpdFactorization(const SpdFactorization&) = delete;
  SpdFactorization& operator=(const SpdFactorization&) = delete;

  Vector solve(const Vector& b) const;
  void solve_inplace(Vector& b) const;
  Inertia inertia() const;
  std::size_t size() const;

 private:
  friend SpdFactorization factor_spd(const SparseMatrix&);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SpdFactorization factor_spd(const SparseMatrix& m);

// Symmetric indefinite LDL^T with Bunch–Kaufman pivoting (dense or as fallback
// of an unpivoted sparse attempt); reports inertia, throws SingularMatrix.
class SymmetricIndefiniteFactorization {
 public:
  SymmetricIndefiniteFactorization();
  ~SymmetricIndefiniteFactorization();
  SymmetricIndefiniteFactorization(SymmetricIndefiniteFactorization&&) noexcept;
  SymmetricIndefiniteFactorization& operator=(SymmetricIndefiniteFactorization&&) noexcept;
  SymmetricIndefiniteFactorization(const SymmetricIndefiniteFactorization&) = delete;
  SymmetricIndefiniteFactorization& operator=(const SymmetricIndefiniteFactorization&) = delete;

  Vector solve(const Vector& b) const;
  Inertia inertia() const;
  std::size_t size() const;
  DenseMatrix reconstruct() const;  // P^T L D L^T P for validation

 private:
  friend SymmetricIndefiniteFactorization factor_symmetric_indefinite(const SparseMatrix&);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SymmetricIndefiniteFactorization factor_symmetric_indefinite(const SparseMatrix& m);

}  // namespace ieti
