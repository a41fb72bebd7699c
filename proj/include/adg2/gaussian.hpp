#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adg2 {

using Rational = mpq_class;

// Exact complex number with rational real and imaginary parts.
struct GaussQ {
  Rational re;
  Rational im;

  GaussQ() : re(0), im(0) {}
  GaussQ(const Rational& r) : re(r), im(0) {}  // NOLINT(implicit)
  GaussQ(int r) : re(r), im(0) {}              // NOLINT(implicit)
  GaussQ(const Rational& r, const Rational& i) : re(r), im(i) {}

  static GaussQ i() { return GaussQ(0, 1); }

  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ conj() const { return GaussQ(re, -im); }
  Rational norm2() const { return re * re + im * im; }

  GaussQ& operator+=(const GaussQ& o) { re += o.re; im += o.im; return *this; }
  GaussQ& operator-=(const GaussQ& o) { re -= o.re; im -= o.im; return *this; }
  GaussQ& operator*=(const GaussQ& o);
  GaussQ& operator/=(const GaussQ& o);
};

GaussQ operator+(GaussQ a, const GaussQ& b);
GaussQ operator-(GaussQ a, const GaussQ& b);
GaussQ operator-(const GaussQ& a);
GaussQ operator*(GaussQ a, const GaussQ& b);
GaussQ operator/(GaussQ a, const GaussQ& b);
bool operator==(const GaussQ& a, const GaussQ& b);
inline bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }
std::ostream& operator<<(std::ostream& os, const GaussQ& z);

inline bool is_zero(const Rational& r) { return r == 0; }
inline bool is_zero(const GaussQ& z) { return z.is_zero(); }
inline Rational conj(const Rational& r) { return r; }
inline GaussQ conj(const GaussQ& z) { return z.conj(); }
inline Rational abs_value(const Rational& r) { return abs(r); }
// Squared modulus for GaussQ keeps everything rational.
inline Rational abs_value(const GaussQ& z) { return z.norm2(); }

// Dense matrix over an exact field (Rational or GaussQ).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<T> values) : Matrix(rows, cols) {
    if (values.size() != rows * cols) throw std::invalid_argument("Matrix: initializer size mismatch");
    std::size_t k = 0;
    for (const auto& v : values) data_[k++] = v;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!adg2::is_zero(v)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix adjoint() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = adg2::conj((*this)(i, j));
    return t;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (adg2::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;
using GMatrix = Matrix<GaussQ>;

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (is_zero(a(i, j))) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

template <class T>
Matrix<T> commutator(const Matrix<T>& a, const Matrix<T>& b) {
  return a * b - b * a;
}

template <class T>
Matrix<T> anticommutator(const Matrix<T>& a, const Matrix<T>& b) {
  return a * b + b * a;
}

template <class T>
T trace(const Matrix<T>& a) {
  T t(0);
  for (std::size_t i = 0; i < a.rows() && i < a.cols(); ++i) t += a(i, i);
  return t;
}

// Largest |entry| (squared modulus for GaussQ); zero exactly iff the matrix is zero.
template <class T>
Rational max_abs(const Matrix<T>& a) {
  Rational m(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Rational v = abs_value(a(i, j));
      if (v > m) m = v;
    }
  return m;
}

// Basis of the right null space, by reduced row echelon form.
template <class T>
std::vector<std::vector<T>> nullspace(Matrix<T> a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && is_zero(a(p, c))) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(p, j), a(r, j));
    T inv = T(1) / a(r, c);
    for (std::size_t j = 0; j < cols; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(a(i, c))) continue;
      T f = a(i, c);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(cols, T(0));
    v[f] = T(1);
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a(k, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
std::size_t rank(const Matrix<T>& a) {
  return a.cols() - nullspace(a).size();
}

// Solves a x = b for square invertible a; throws if singular.
template <class T>
std::vector<T> solve(Matrix<T> a, std::vector<T> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve: shape mismatch");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && is_zero(a(p, c))) ++p;
    if (p == n) throw std::domain_error("solve: singular matrix");
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      std::swap(b[p], b[c]);
    }
    T inv = T(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) a(c, j) *= inv;
    b[c] *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || is_zero(a(i, c))) continue;
      T f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(c, j);
      b[i] -= f * b[c];
    }
  }
  return b;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  Matrix<T> inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> e(n, T(0));
    e[j] = T(1);
    auto x = solve(a, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
  }
  return inv;
}

GMatrix to_gaussian(const QMatrix& m);
std::string to_string(const GaussQ& z);

}  // namespace adg2
