#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perdec/ratfun.hpp"

namespace perdec {

// Dense row-major matrix over an exact field-like scalar.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * cols, T(0)) {}
  Matrix(int rows, int cols, std::vector<T> data) : r_(rows), c_(cols), d_(std::move(data)) {
    if (static_cast<int>(d_.size()) != rows * cols)
      throw Error(ErrorKind::InvalidSystem, "matrix data size mismatch");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    r_ = static_cast<int>(rows.size());
    c_ = r_ ? static_cast<int>(rows.begin()->size()) : 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != c_) throw Error(ErrorKind::InvalidSystem, "ragged matrix");
      d_.insert(d_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }
  T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * c_ + j]; }
  const T& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * c_ + j]; }

  Matrix block(int r0, int c0, int nr, int nc) const {
    Matrix m(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }
  void set_block(int r0, int c0, const Matrix& b) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }
  Matrix select_cols(const std::vector<int>& idx) const {
    Matrix m(r_, static_cast<int>(idx.size()));
    for (int i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) m(i, static_cast<int>(j)) = (*this)(i, idx[j]);
    return m;
  }
  Matrix select_rows(const std::vector<int>& idx) const {
    Matrix m(static_cast<int>(idx.size()), c_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < c_; ++j) m(static_cast<int>(i), j) = (*this)(idx[i], j);
    return m;
  }
  Matrix transpose() const {
    Matrix m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  bool is_zero() const {
    for (const auto& x : d_)
      if (!(x == T(0))) return false;
    return true;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix m = a;
    for (std::size_t i = 0; i < m.d_.size(); ++i) m.d_[i] = m.d_[i] + b.d_[i];
    return m;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same(a, b);
    Matrix m = a;
    for (std::size_t i = 0; i < m.d_.size(); ++i) m.d_[i] = m.d_[i] - b.d_[i];
    return m;
  }
  friend Matrix operator-(const Matrix& a) {
    Matrix m = a;
    for (auto& x : m.d_) x = -x;
    return m;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw Error(ErrorKind::InvalidSystem, "matrix product shape mismatch");
    Matrix m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (x == T(0)) continue;
        for (int j = 0; j < b.c_; ++j)
          if (!(b(k, j) == T(0))) m(i, j) = m(i, j) + x * b(k, j);
      }
    return m;
  }
  friend Matrix operator*(const T& s, const Matrix& a) {
    Matrix m = a;
    for (auto& x : m.d_) x = s * x;
    return m;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  // Column operations used by Hermite reduction.
  void swap_cols(int i, int j) {
    for (int r = 0; r < r_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }
  void scale_col(int j, const T& s) {
    for (int r = 0; r < r_; ++r) (*this)(r, j) = (*this)(r, j) * s;
  }
  // col_j += s * col_i
  void add_col(int j, int i, const T& s) {
    for (int r = 0; r < r_; ++r)
      if (!((*this)(r, i) == T(0))) (*this)(r, j) = (*this)(r, j) + s * (*this)(r, i);
  }
  void swap_rows(int i, int j) {
    for (int c = 0; c < c_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }

 private:
  static void check_same(const Matrix& a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw Error(ErrorKind::InvalidSystem, "matrix shape mismatch");
  }
  int r_ = 0, c_ = 0;
  std::vector<T> d_;
};

using QMatrix = Matrix<Q>;
using RatMat = Matrix<RatFun>;

inline Matrix<Q> hstack(const Matrix<Q>& a, const Matrix<Q>& b) {
  if (a.rows() != b.rows() && !a.empty() && !b.empty())
    throw Error(ErrorKind::InvalidSystem, "hstack row mismatch");
  int r = a.empty() ? b.rows() : a.rows();
  Matrix<Q> m(r, a.cols() + b.cols());
  if (a.rows() == r) m.set_block(0, 0, a);
  if (b.rows() == r) m.set_block(0, a.cols(), b);
  return m;
}

inline Matrix<Q> vstack(const Matrix<Q>& a, const Matrix<Q>& b) {
  int c = a.rows() == 0 ? b.cols() : a.cols();
  Matrix<Q> m(a.rows() + b.rows(), c);
  if (a.rows()) m.set_block(0, 0, a);
  if (b.rows()) m.set_block(a.rows(), 0, b);
  return m;
}

inline RatMat to_ratmat(const QMatrix& m) {
  RatMat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = RatFun(m(i, j));
  return r;
}

// Reduced row echelon form over Q; returns pivot columns.
inline std::vector<int> rref(QMatrix& m) {
  std::vector<int> piv;
  int row = 0;
  for (int c = 0; c < m.cols() && row < m.rows(); ++c) {
    int p = -1;
    for (int i = row; i < m.rows(); ++i)
      if (m(i, c) != 0) { p = i; break; }
    if (p < 0) continue;
    m.swap_rows(p, row);
    Q inv = Q(1) / m(row, c);
    for (int j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, c) == 0) continue;
      Q f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    piv.push_back(c);
    ++row;
  }
  return piv;
}

inline int rank(QMatrix m) { return static_cast<int>(rref(m).size()); }

// Basis of {x : A x = 0}, as columns.
inline QMatrix nullspace(const QMatrix& a) {
  QMatrix m = a;
  auto piv = rref(m);
  std::vector<int> free;
  for (int c = 0, k = 0; c < a.cols(); ++c) {
    if (k < static_cast<int>(piv.size()) && piv[k] == c) { ++k; continue; }
    free.push_back(c);
  }
  QMatrix n(a.cols(), static_cast<int>(free.size()));
  for (std::size_t f = 0; f < free.size(); ++f) {
    n(free[f], static_cast<int>(f)) = 1;
    for (std::size_t k = 0; k < piv.size(); ++k) n(piv[k], static_cast<int>(f)) = -m(static_cast<int>(k), free[f]);
  }
  return n;
}

// A particular solution X of A X = B (free variables set to zero), or nullopt.
inline std::optional<QMatrix> solve(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidSystem, "solve shape mismatch");
  QMatrix aug = hstack(a, b);
  if (a.rows() == 0) return QMatrix(a.cols(), b.cols());
  auto piv = rref(aug);
  QMatrix x(a.cols(), b.cols());
  for (std::size_t k = 0; k < piv.size(); ++k) {
    if (piv[k] >= a.cols()) return std::nullopt;
    for (int j = 0; j < b.cols(); ++j) x(piv[k], j) = aug(static_cast<int>(k), a.cols() + j);
  }
  return x;
}

inline QMatrix inverse(const QMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Singular, "inverse of non-square matrix");
  auto x = solve(a, QMatrix::identity(a.rows()));
  if (!x || rank(a) != a.rows()) throw Error(ErrorKind::Singular, "singular constant matrix");
  return *x;
}

inline Q det(QMatrix m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidSystem, "det of non-square matrix");
  Q d = 1;
  int n = m.rows();
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (m(i, c) != 0) { p = i; break; }
    if (p < 0) return 0;
    if (p != c) { m.swap_rows(p, c); d = -d; }
    d *= m(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Q f = m(i, c) / m(c, c);
      for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

// det(zI - A) by the Faddeev-LeVerrier recursion.
inline Poly charpoly(const QMatrix& a) {
  int n = a.rows();
  std::vector<Q> c(n + 1, Q(0));
  c[n] = 1;
  QMatrix m(n, n);  // M_0 = 0
  for (int k = 1; k <= n; ++k) {
    m = a * m;
    for (int i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
    QMatrix am = a * m;
    Q tr = 0;
    for (int i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / k;
  }
  return Poly(std::move(c));
}

inline QMatrix power(const QMatrix& a, int k) {
  QMatrix r = QMatrix::identity(a.rows());
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

}  // namespace perdec
