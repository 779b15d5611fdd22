#pragma once

// Small dense matrix and Gauss-Jordan routines that work over both exact
// rationals and doubles. Floating-point heavy lifting (SVD, eigenvalues)
// goes through Eigen instead; this header exists for the exact paths.

#include "rnlie/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <optional>
#include <vector>

namespace rnlie::dense {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, T(0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<T> column(int c) const {
    std::vector<T> out(rows_);
    for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }
  std::vector<T> row(int r) const {
    return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r) * cols_,
                          data_.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols_);
  }

  void append_row(const std::vector<T>& values) {
    if (rows_ == 0 && cols_ == 0) cols_ = static_cast<int>(values.size());
    assert(static_cast<int>(values.size()) == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    assert(static_cast<int>(v.size()) == cols_);
    std::vector<T> out(rows_, T(0));
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Eigen::MatrixXd to_eigen(const Matrix<T>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out(r, c) = to_double(m(r, c));
  return out;
}

template <class T>
Matrix<T> from_eigen(const Eigen::MatrixXd& m) {
  Matrix<T> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out(r, c) = from_double<T>(m(r, c));
  return out;
}

/// In-place reduced row echelon form. Returns pivot columns in order.
/// Floating point uses partial pivoting with the absolute tolerance `tol`.
template <class T>
std::vector<int> rref(Matrix<T>& m, double tol = 1e-12) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int best = -1;
    if constexpr (is_exact_v<T>) {
      for (int r = row; r < m.rows(); ++r)
        if (m(r, col) != 0) {
          best = r;
          break;
        }
    } else {
      double best_abs = tol;
      for (int r = row; r < m.rows(); ++r)
        if (std::abs(m(r, col)) > best_abs) {
          best_abs = std::abs(m(r, col));
          best = r;
        }
    }
    if (best < 0) continue;
    if (best != row)
      for (int c = 0; c < m.cols(); ++c) std::swap(m(row, c), m(best, c));
    T inv = T(1) / m(row, col);
    for (int c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || is_zero(m(r, col), 0.0)) continue;
      T f = m(r, col);
      for (int c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class T>
int rank(Matrix<T> m, double tol = 1e-12) {
  return static_cast<int>(rref(m, tol).size());
}

/// Kernel basis from the free-variable parametrization of the rref: one
/// column per free variable, with a 1 in that variable's slot.
template <class T>
Matrix<T> null_space(Matrix<T> m, double tol = 1e-12) {
  const int n = m.cols();
  auto pivots = rref(m, tol);
  std::vector<bool> is_pivot(n, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix<T> basis(n, static_cast<int>(free_cols.size()));
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    int fc = free_cols[f];
    basis(fc, static_cast<int>(f)) = T(1);
    for (std::size_t p = 0; p < pivots.size(); ++p) basis(pivots[p], static_cast<int>(f)) = -m(static_cast<int>(p), fc);
  }
  return basis;
}

/// Unique solution of a square or overdetermined consistent system, if any.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& a, const std::vector<T>& b, double tol = 1e-12) {
  Matrix<T> aug(a.rows(), a.cols() + 1);
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
    aug(r, a.cols()) = b[r];
  }
  auto pivots = rref(aug, tol);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;  // inconsistent
  if (static_cast<int>(pivots.size()) != a.cols()) return std::nullopt;  // not unique
  std::vector<T> x(a.cols());
  for (int r = 0; r < a.cols(); ++r) x[r] = aug(r, a.cols());
  return x;
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& a, double tol = 1e-12) {
  const int n = a.rows();
  if (a.cols() != n) return std::nullopt;
  Matrix<T> aug(n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) aug(r, c) = a(r, c);
    aug(r, n + r) = T(1);
  }
  auto pivots = rref(aug, tol);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  Matrix<T> inv(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv(r, c) = aug(r, n + c);
  return inv;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace rnlie::dense
