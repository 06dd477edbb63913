#include "ieti/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ieti {

namespace {

constexpr double kPivotRelTol = 1e-12;
constexpr std::size_t kDenseCutoff = 64;

void require(bool cond, const char* what) {
  if (!cond) throw DimensionMismatch(what);
}

}  // namespace

// ---- vector kernels ---------------------------------------------------------

double dot(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double norm2(const Vector& x) { return std::sqrt(dot(x, x)); }

void scale(double alpha, Vector& x) {
  for (double& v : x) v *= alpha;
}

// ---- dense matrices -----------------------------------------------------------

Vector DenseMatrix::multiply(const Vector& x) const {
  require(x.size() == cols_, "DenseMatrix::multiply: size mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    const double* row = a_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector DenseMatrix::multiply_transposed(const Vector& x) const {
  require(x.size() == rows_, "DenseMatrix::multiply_transposed: size mismatch");
  Vector y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = a_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * x[i];
  }
  return y;
}

DenseMatrix DenseMatrix::multiplied_by(const DenseMatrix& b) const {
  require(cols_ == b.rows(), "DenseMatrix::multiplied_by: size mismatch");
  DenseMatrix c(rows_, b.cols());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseCholesky::DenseCholesky(const DenseMatrix& a) {
  require(a.rows() == a.cols(), "DenseCholesky: matrix not square");
  const std::size_t n = a.rows();
  l_ = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0))
      throw NotPositiveDefinite("DenseCholesky: nonpositive pivot at index " + std::to_string(j));
    const double lj = std::sqrt(d);
    l_(j, j) = lj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / lj;
    }
  }
}

Vector DenseCholesky::solve(const Vector& b) const {
  const std::size_t n = l_.rows();
  require(b.size() == n, "DenseCholesky::solve: size mismatch");
  Vector x = b;
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
    x[i] = s / l_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

DenseMatrix dense_inverse_spd(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  DenseCholesky chol(a);
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vector col = chol.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  // symmetrize to kill roundoff skew
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

// ---- sparse matrices ----------------------------------------------------------

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<int> row_ptr,
                           std::vector<int> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size())
    throw DimensionMismatch("SparseMatrix: inconsistent CSR arrays");
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) throw DimensionMismatch("SparseMatrix: offsets decrease");
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= static_cast<int>(cols_))
        throw DimensionMismatch("SparseMatrix: column index out of bounds");
      if (k > row_ptr_[r] && col_idx_[k - 1] >= col_idx_[k])
        throw DimensionMismatch("SparseMatrix: column indices not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t t = 0; t < triplets.size();) {
    const int r = triplets[t].row;
    const int c = triplets[t].col;
    if (r < 0 || r >= static_cast<int>(rows) || c < 0 || c >= static_cast<int>(cols))
      throw DimensionMismatch("from_triplets: index out of bounds");
    double v = 0.0;
    while (t < triplets.size() && triplets[t].row == r && triplets[t].col == c) {
      v += triplets[t].value;
      ++t;
    }
    col_idx.push_back(c);
    values.push_back(v);
    ++row_ptr[r + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tol) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > drop_tol)
        t.push_back({static_cast<int>(i), static_cast<int>(j), a(i, j)});
  return from_triplets(a.rows(), a.cols(), std::move(t));
}

double SparseMatrix::coeff(int i, int j) const {
  for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_idx_[k] == j) return values_[k];
  return 0.0;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  return d;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      t.push_back({col_idx_[k], static_cast<int>(i), values_[k]});
  return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::submatrix(const std::vector<int>& keep_rows,
                                     const std::vector<int>& keep_cols) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < keep_cols.size(); ++j) col_map[keep_cols[j]] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    const int r = keep_rows[i];
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int jc = col_map[col_idx_[k]];
      if (jc >= 0) t.push_back({static_cast<int>(i), jc, values_[k]});
    }
  }
  return from_triplets(keep_rows.size(), keep_cols.size(), std::move(t));
}

Vector spmv(const SparseMatrix& m, const Vector& x) {
  require(x.size() == m.cols(), "spmv: size mismatch");
  Vector y(m.rows(), 0.0);
  const auto& rp = m.row_ptr();
  const auto& ci = m.col_idx();
  const auto& v = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] = s;
  }
  return y;
}

Vector spmv_transposed(const SparseMatrix& m, const Vector& x) {
  require(x.size() == m.rows(), "spmv_transposed: size mismatch");
  Vector y(m.cols(), 0.0);
  const auto& rp = m.row_ptr();
  const auto& ci = m.col_idx();
  const auto& v = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (int k = rp[i]; k < rp[i + 1]; ++k) y[ci[k]] += v[k] * x[i];
  return y;
}

// ---- SPD factorization ----------------------------------------------------------

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
      t.emplace_back(static_cast<int>(i), m.col_idx()[k], m.values()[k]);
  Eigen::SparseMatrix<double> e(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

double diag_scale(const SparseMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s = std::max(s, std::abs(m.coeff(i, i)));
  if (s == 0.0)
    for (double v : m.values()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

struct SpdFactorization::Impl {
  std::size_t n = 0;
  bool dense = false;
  DenseCholesky chol;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Inertia inert;
};

SpdFactorization::SpdFactorization() : impl_(new Impl) {}
SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

std::size_t SpdFactorization::size() const { return impl_->n; }

Vector SpdFactorization::solve(const Vector& b) const {
  Vector x = b;
  solve_inplace(x);
  return x;
}

void SpdFactorization::solve_inplace(Vector& b) const {
  require(b.size() == impl_->n, "SpdFactorization::solve: size mismatch");
  if (impl_->n == 0) return;
  if (impl_->dense) {
    b = impl_->chol.solve(b);
    return;
  }
  Eigen::Map<Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = impl_->ldlt.solve(bv);
  std::copy(x.data(), x.data() + x.size(), b.begin());
}

Inertia SpdFactorization::inertia() const { return impl_->inert; }

SpdFactorization factor_spd(const SparseMatrix& m) {
  require(m.rows() == m.cols(), "factor_spd: matrix not square");
  SpdFactorization f;
  f.impl_->n = m.rows();
  if (m.rows() == 0) return f;
  if (m.rows() < kDenseCutoff) {
    f.impl_->dense = true;
    f.impl_->chol = DenseCholesky(m.to_dense());  // throws NotPositiveDefinite
    f.impl_->inert = {static_cast<int>(m.rows()), 0, 0};
    return f;
  }
  f.impl_->dense = false;
  auto em = to_eigen(m);
  f.impl_->ldlt.compute(em);
  if (f.impl_->ldlt.info() != Eigen::Success)
    throw NotPositiveDefinite("factor_spd: factorization failed");
  const double tol = kPivotRelTol * diag_scale(m);
  Eigen::VectorXd d = f.impl_->ldlt.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > tol))
      throw NotPositiveDefinite("factor_spd: nonpositive pivot at index " + std::to_string(i));
  }
  f.impl_->inert = {static_cast<int>(m.rows()), 0, 0};
  return f;
}

// ---- symmetric indefinite factorization ------------------------------------------

namespace {

// Dense Bunch–Kaufman LDL^T with partial (rook-free) pivoting.
struct BunchKaufman {
  std::size_t n = 0;
  DenseMatrix l;            // unit lower triangular
  std::vector<double> d1;   // diagonal of D (1x1 blocks) / block entries
  std::vector<double> doff; // subdiagonal of D; doff[k] != 0 marks a 2x2 block at (k,k+1)
  std::vector<int> perm;    // position -> original index
  Inertia inert;

  void factor(DenseMatrix w, double scale) {
    n = w.rows();
    const double tol = kPivotRelTol * (scale > 0.0 ? scale : 1.0);
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    l = DenseMatrix(n, n);
    d1.assign(n, 0.0);
    doff.assign(n, 0.0);
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);

    auto swap_rows_cols = [&](std::size_t a, std::size_t b, std::size_t k) {
      if (a == b) return;
      std::swap(perm[a], perm[b]);
      for (std::size_t j = 0; j < k; ++j) std::swap(l(a, j), l(b, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(w(a, j), w(b, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(w(i, a), w(i, b));
    };

    std::size_t k = 0;
    while (k < n) {
      double lambda = 0.0;
      std::size_t r = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(w(i, k)) > lambda) {
          lambda = std::abs(w(i, k));
          r = i;
        }
      int pivot_size = 1;
      if (lambda > 0.0 && std::abs(w(k, k)) < alpha * lambda) {
        double sigma = 0.0;
        for (std::size_t i = k; i < n; ++i)
          if (i != r) sigma = std::max(sigma, std::abs(w(i, r)));
        if (std::abs(w(k, k)) * sigma >= alpha * lambda * lambda) {
          pivot_size = 1;
        } else if (std::abs(w(r, r)) >= alpha * sigma) {
          swap_rows_cols(k, r, k);
          pivot_size = 1;
        } else {
          swap_rows_cols(k + 1, r, k);
          pivot_size = 2;
        }
      }

      if (pivot_size == 1) {
        const double d = w(k, k);
        if (std::abs(d) <= tol)
          throw SingularMatrix("factor_symmetric_indefinite: zero pivot at index " +
                               std::to_string(k));
        l(k, k) = 1.0;
        d1[k] = d;
        if (d > 0)
          ++inert.positive;
        else
          ++inert.negative;
        for (std::size_t i = k + 1; i < n; ++i) {
          const double lik = w(i, k) / d;
          l(i, k) = lik;
          if (lik == 0.0) continue;
          for (std::size_t j = k + 1; j <= i; ++j) {
            const double upd = lik * w(j, k);
            w(i, j) -= upd;
            if (j != i) w(j, i) -= upd;
          }
        }
        ++k;
      } else {
        const double e11 = w(k, k), e21 = w(k + 1, k), e22 = w(k + 1, k + 1);
        const double det = e11 * e22 - e21 * e21;
        if (std::abs(det) <= tol * std::max({std::abs(e11), std::abs(e22), std::abs(e21), tol}))
          throw SingularMatrix("factor_symmetric_indefinite: singular 2x2 pivot at index " +
                               std::to_string(k));
        if (det < 0.0) {
          ++inert.positive;
          ++inert.negative;
        } else if (e11 + e22 > 0.0) {
          inert.positive += 2;
        } else {
          inert.negative += 2;
        }
        l(k, k) = 1.0;
        l(k + 1, k + 1) = 1.0;
        d1[k] = e11;
        d1[k + 1] = e22;
        doff[k] = e21;
        const double i11 = e22 / det, i12 = -e21 / det, i22 = e11 / det;
        for (std::size_t i = k + 2; i < n; ++i) {
          const double a1 = w(i, k), a2 = w(i, k + 1);
          const double l1 = a1 * i11 + a2 * i12;
          const double l2 = a1 * i12 + a2 * i22;
          l(i, k) = l1;
          l(i, k + 1) = l2;
          if (l1 == 0.0 && l2 == 0.0) continue;
          for (std::size_t j = k + 2; j <= i; ++j) {
            const double upd = l1 * w(j, k) + l2 * w(j, k + 1);
            w(i, j) -= upd;
            if (j != i) w(j, i) -= upd;
          }
        }
        k += 2;
      }
    }
  }

  // Solve P A P^T = L D L^T, i.e. A x = b via x = P^T (L^-T D^-1 L^-1) P b.
  Vector solve(const Vector& b) const {
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[perm[i]];
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i];
      for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t k = 0; k < n;) {
      if (doff[k] != 0.0) {
        const double det = d1[k] * d1[k + 1] - doff[k] * doff[k];
        const double y1 = y[k], y2 = y[k + 1];
        y[k] = (d1[k + 1] * y1 - doff[k] * y2) / det;
        y[k + 1] = (-doff[k] * y1 + d1[k] * y2) / det;
        k += 2;
      } else {
        y[k] /= d1[k];
        ++k;
      }
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * y[j];
      y[ii] = s;
    }
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm[i]] = y[i];
    return x;
  }

  // Rebuild A = P^T (L D L^T) P for validation.
  DenseMatrix reconstruct() const {
    DenseMatrix ld(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double v = l(i, k) * d1[k];
        if (k + 1 < n && doff[k] != 0.0) v += l(i, k + 1) * doff[k];
        if (k > 0 && doff[k - 1] != 0.0) v += l(i, k - 1) * doff[k - 1];
        ld(i, k) = v;
      }
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += ld(i, k) * l(j, k);
        a(perm[i], perm[j]) = s;
      }
    return a;
  }
};

}  // namespace

struct SymmetricIndefiniteFactorization::Impl {
  std::size_t n = 0;
  bool dense = true;
  BunchKaufman bk;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Inertia inert;
};

SymmetricIndefiniteFactorization::SymmetricIndefiniteFactorization() : impl_(new Impl) {}
SymmetricIndefiniteFactorization::~SymmetricIndefiniteFactorization() = default;
SymmetricIndefiniteFactorization::SymmetricIndefiniteFactorization(
    SymmetricIndefiniteFactorization&&) noexcept = default;
SymmetricIndefiniteFactorization& SymmetricIndefiniteFactorization::operator=(
    SymmetricIndefiniteFactorization&&) noexcept = default;

std::size_t SymmetricIndefiniteFactorization::size() const { return impl_->n; }
Inertia SymmetricIndefiniteFactorization::inertia() const { return impl_->inert; }

Vector SymmetricIndefiniteFactorization::solve(const Vector& b) const {
  require(b.size() == impl_->n, "SymmetricIndefiniteFactorization::solve: size mismatch");
  if (impl_->n == 0) return {};
  if (impl_->dense) return impl_->bk.solve(b);
  Vector x = b;
  Eigen::Map<Eigen::VectorXd> bv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd s = impl_->ldlt.solve(bv);
  std::copy(s.data(), s.data() + s.size(), x.begin());
  return x;
}

DenseMatrix SymmetricIndefiniteFactorization::reconstruct() const {
  if (impl_->n == 0) return {};
  if (impl_->dense) return impl_->bk.reconstruct();
  // P^T L D L^T P from the Eigen factorization.
  const auto n = static_cast<Eigen::Index>(impl_->n);
  Eigen::MatrixXd lmat = impl_->ldlt.matrixL().toDense() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd core = lmat * impl_->ldlt.vectorD().asDiagonal() * lmat.transpose();
  Eigen::MatrixXd full = impl_->ldlt.permutationPinv() * core * impl_->ldlt.permutationP();
  DenseMatrix out(impl_->n, impl_->n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = full(i, j);
  return out;
}

SymmetricIndefiniteFactorization factor_symmetric_indefinite(const SparseMatrix& m) {
  require(m.rows() == m.cols(), "factor_symmetric_indefinite: matrix not square");
  SymmetricIndefiniteFactorization f;
  f.impl_->n = m.rows();
  if (m.rows() == 0) return f;
  const double scale = diag_scale(m);

  if (m.rows() >= kDenseCutoff) {
    // Unpivoted sparse LDL^T is fast when it works; validate it with a probe
    // solve and fall back to the robust dense path when it does not.
    auto em = to_eigen(m);
    f.impl_->ldlt.compute(em);
    if (f.impl_->ldlt.info() == Eigen::Success) {
      const double tol = kPivotRelTol * (scale > 0.0 ? scale : 1.0);
      Eigen::VectorXd d = f.impl_->ldlt.vectorD();
      bool d_ok = true;
      Inertia inert;
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) <= tol) {
          d_ok = false;
          break;
        }
        if (d[i] > 0)
          ++inert.positive;
        else
          ++inert.negative;
      }
      if (d_ok) {
        Eigen::VectorXd probe = Eigen::VectorXd::LinSpaced(d.size(), 1.0, 2.0);
        Eigen::VectorXd x = f.impl_->ldlt.solve(probe);
        const double resid = (em * x - probe).norm();
        if (x.allFinite() && resid <= 1e-8 * probe.norm()) {
          f.impl_->dense = false;
          f.impl_->inert = inert;
          return f;
        }
      }
    }
  }

  f.impl_->dense = true;
  f.impl_->bk.factor(m.to_dense(), scale);  // throws SingularMatrix
  f.impl_->inert = f.impl_->bk.inert;
  return f;
}

}  // namespace ieti
