#pragma once

#include <vector>

#include "gtg/errors.hpp"

namespace gtg {

// Minimal dense row-major matrix. Only what the kernels here need: storage,
// indexing, identity.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Symmetric matrix with one packed lower triangle, so a(i,j) == a(j,i) holds
// exactly by construction.
class SymMatrix {
public:
  explicit SymMatrix(int dim);

  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const std::vector<double>& d);
  // averages the two triangles of an (approximately symmetric) square matrix
  static SymMatrix symmetric_part(const Matrix& m);

  int dim() const { return dim_; }

  double at(int i, int j) const { return tri_[pack(i, j)]; }
  void set(int i, int j, double v) { tri_[pack(i, j)] = v; }

  double trace() const;
  double max_abs() const;     // max |a_ij|
  double frobenius() const;
  Matrix to_full() const;

  const std::vector<double>& packed() const { return tri_; }

  bool operator==(const SymMatrix& o) const { return dim_ == o.dim_ && tri_ == o.tri_; }

private:
  size_t pack(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<size_t>(i) * (i + 1) / 2 + j;
  }

  int dim_;
  std::vector<double> tri_;
};

// A SymMatrix whose positive definiteness has been checked (Cholesky succeeds
// at construction). Passing one around is the proof the check happened.
class SpdMatrix {
public:
  explicit SpdMatrix(SymMatrix m);  // throws NotPositiveDefinite

  const SymMatrix& sym() const { return m_; }
  operator const SymMatrix&() const { return m_; }

  int dim() const { return m_.dim(); }
  double at(int i, int j) const { return m_.at(i, j); }

  bool operator==(const SpdMatrix& o) const { return m_ == o.m_; }

private:
  SymMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]; orthonormal
};

// a = L L^T with L lower triangular, strictly positive diagonal.
// Throws NotPositiveDefinite when a pivot is <= 0.
Matrix cholesky(const SymMatrix& a);

// Cyclic Jacobi rotations; converged when the off-diagonal Frobenius norm
// drops below 1e-12 * ||a||_F (at most 100 sweeps). Eigenvalues descending.
EigenDecomposition sym_eigen(const SymMatrix& a);

// Solves a v = lambda b v by Cholesky whitening: with b = L L^T the values are
// the eigenvalues of L^-1 a L^-T and the vectors are L^-T y. Descending order;
// when a is SPD as well, all values are strictly positive.
EigenDecomposition generalized_eigen(const SymMatrix& a, const SpdMatrix& b);
std::vector<double> generalized_eigenvalues(const SymMatrix& a, const SpdMatrix& b);

}  // namespace gtg
