#include "gtg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtg {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionMismatch("SymMatrix dimension must be >= 1");
  tri_.assign(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::symmetric_part(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("symmetric_part needs a square matrix");
  SymMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m.at(i, j) + m.at(j, i)));
  return s;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : tri_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += at(i, j) * at(i, j);
  return std::sqrt(s);
}

Matrix SymMatrix::to_full() const {
  Matrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m.at(i, j) = at(i, j);
  return m;
}

SpdMatrix::SpdMatrix(SymMatrix m) : m_(std::move(m)) {
  cholesky(m_);  // throws NotPositiveDefinite if the claim is false
}

Matrix cholesky(const SymMatrix& a) {
  const int n = a.dim();
  Matrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (s <= 0.0) throw NotPositiveDefinite("cholesky: pivot <= 0 at row " + std::to_string(i));
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return l;
}

namespace {

// One cyclic Jacobi pass infrastructure shared by sym_eigen / generalized_eigen.
EigenDecomposition jacobi_eigen(const SymMatrix& input) {
  const int n = input.dim();
  Matrix a = input.to_full();
  Matrix v = Matrix::identity(n);

  const double stop = 1e-12 * input.frobenius();
  const int max_sweeps = 100;

  auto off_frobenius = [&]() {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += 2.0 * a.at(p, q) * a.at(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_frobenius() <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double app = a.at(p, p);
        const double aqq = a.at(q, q);
        // rotation angle from tau = cot(2*theta); t is tan(theta)
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v.at(k, p);
          const double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // sort descending, carrying eigenvector columns along
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a.at(x, x) > a.at(y, y); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a.at(order[k], order[k]);
    for (int r = 0; r < n; ++r) out.vectors.at(r, k) = v.at(r, order[k]);
  }
  return out;
}

// solve L X = B for lower-triangular L (forward substitution, column-wise)
Matrix forward_solve(const Matrix& l, const Matrix& b) {
  const int n = l.rows();
  Matrix x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      double s = b.at(i, c);
      for (int k = 0; k < i; ++k) s -= l.at(i, k) * x.at(k, c);
      x.at(i, c) = s / l.at(i, i);
    }
  }
  return x;
}

// solve L^T X = B (back substitution, column-wise)
Matrix backward_solve_transposed(const Matrix& l, const Matrix& b) {
  const int n = l.rows();
  Matrix x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = n - 1; i >= 0; --i) {
      double s = b.at(i, c);
      for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * x.at(k, c);
      x.at(i, c) = s / l.at(i, i);
    }
  }
  return x;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.at(j, i) = m.at(i, j);
  return t;
}

}  // namespace

EigenDecomposition sym_eigen(const SymMatrix& a) { return jacobi_eigen(a); }

EigenDecomposition generalized_eigen(const SymMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("generalized_eigen: dimensions " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  const Matrix l = cholesky(b);
  // M = L^-1 a L^-T, assembled as (L^-1 (L^-1 a)^T)^T; symmetrize the
  // round-off before Jacobi
  const Matrix y = forward_solve(l, a.to_full());
  const Matrix m = transpose(forward_solve(l, transpose(y)));
  EigenDecomposition whitened = jacobi_eigen(SymMatrix::symmetric_part(m));
  whitened.vectors = backward_solve_transposed(l, whitened.vectors);
  return whitened;
}

std::vector<double> generalized_eigenvalues(const SymMatrix& a, const SpdMatrix& b) {
  return generalized_eigen(a, b).values;
}

}  // namespace gtg
