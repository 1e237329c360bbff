#pragma once

#include "afrelay/numerics/precision.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace afrelay::numerics {

// std::complex is unspecified for non-builtin scalars, so the big-float backend
// needs its own complex type. Both backends share this one.
template <class Real>
struct Complex {
  Real re{};
  Real im{};

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Real& s) {
    re /= s;
    im /= s;
    return *this;
  }
};

template <class Real>
Complex<Real> operator+(Complex<Real> a, const Complex<Real>& b) {
  return a += b;
}
template <class Real>
Complex<Real> operator-(Complex<Real> a, const Complex<Real>& b) {
  return a -= b;
}
template <class Real>
Complex<Real> operator-(const Complex<Real>& a) {
  return {-a.re, -a.im};
}
template <class Real>
Complex<Real> operator*(const Complex<Real>& a, const Complex<Real>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class Real>
Complex<Real> operator*(Complex<Real> a, const Real& s) {
  return a *= s;
}
template <class Real>
Complex<Real> operator*(const Real& s, Complex<Real> a) {
  return a *= s;
}
template <class Real>
Complex<Real> operator/(Complex<Real> a, const Real& s) {
  return a /= s;
}
template <class Real>
Complex<Real> operator/(const Complex<Real>& a, const Complex<Real>& b) {
  Real den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
template <class Real>
bool operator==(const Complex<Real>& a, const Complex<Real>& b) {
  return a.re == b.re && a.im == b.im;
}

template <class Real>
Complex<Real> conj(const Complex<Real>& a) {
  return {a.re, -a.im};
}
template <class Real>
Real abs2(const Complex<Real>& a) {
  return a.re * a.re + a.im * a.im;
}
template <class Real>
Real abs(const Complex<Real>& a) {
  using std::sqrt;
  return sqrt(abs2(a));
}

template <class Real>
using Vector = std::vector<Complex<Real>>;

template <class Real>
Real norm2(const Vector<Real>& v) {
  Real s = 0;
  for (const auto& x : v) s += abs2(x);
  return s;
}

/// Dense row-major complex matrix.
template <class Real>
class Matrix {
 public:
  using Scalar = Complex<Real>;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(Real(1));
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Scalar& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const Scalar& operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  const std::vector<Scalar>& data() const { return data_; }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj((*this)(i, j));
    return out;
  }

  Matrix& operator*=(const Real& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Real frobenius_norm2() const {
    Real s = 0;
    for (const auto& x : data_) s += abs2(x);
    return s;
  }
  Real frobenius_norm() const {
    using std::sqrt;
    return sqrt(frobenius_norm2());
  }

  bool all_finite() const {
    for (const auto& x : data_)
      if (!RealTraits<Real>::is_finite(x.re) || !RealTraits<Real>::is_finite(x.im)) return false;
    return true;
  }

  template <class Other>
  Matrix<Other> cast() const {
    Matrix<Other> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const auto& x = (*this)(i, j);
        out(i, j) = Complex<Other>(Other(x.re), Other(x.im));
      }
    return out;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

template <class Real>
Matrix<Real> operator*(const Matrix<Real>& a, const Matrix<Real>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  Matrix<Real> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto& aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

template <class Real>
Vector<Real> operator*(const Matrix<Real>& a, const Vector<Real>& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  Vector<Real> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] += a(i, k) * x[k];
  return out;
}

template <class Real>
Matrix<Real> operator+(Matrix<Real> a, const Matrix<Real>& b) {
  return a += b;
}
template <class Real>
Matrix<Real> operator-(Matrix<Real> a, const Matrix<Real>& b) {
  return a -= b;
}
template <class Real>
Matrix<Real> operator*(Matrix<Real> a, const Real& s) {
  return a *= s;
}

/// ‖A − A†‖_F / ‖A‖_F (0 for the zero matrix).
template <class Real>
Real relative_asymmetry(const Matrix<Real>& a) {
  Real den = a.frobenius_norm();
  if (den == 0) return Real(0);
  return (a - a.adjoint()).frobenius_norm() / den;
}

template <class Real>
Matrix<Real> hermitian_part(const Matrix<Real>& a) {
  Matrix<Real> h = a + a.adjoint();
  h *= Real(0.5);
  return h;
}

template <class Real>
Complex<Real> trace(const Matrix<Real>& a) {
  Complex<Real> t;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

}  // namespace afrelay::numerics
