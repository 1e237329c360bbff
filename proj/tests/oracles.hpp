#pragma once

// Reference computations used by the tests. Each one takes a different route
// from the library code it checks.

#include "afrelay/numerics/linalg.hpp"
#include "afrelay/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using afrelay::numerics::Complex;
using afrelay::numerics::Matrix;

/// Euler's constant from H_n - log n with the Euler-Maclaurin tail terms.
/// Truncation error is about 1/(240 n^8).
template <class Real>
Real gamma_by_limit(std::uint64_t n) {
  using std::log;
  Real h = 0;
  for (std::uint64_t k = n; k >= 1; --k) h += Real(1) / Real(k);
  const Real x = Real(n);
  const Real x2 = x * x;
  return h - log(x) - 1 / (2 * x) + 1 / (12 * x2) - 1 / (120 * x2 * x2) + 1 / (252 * x2 * x2 * x2);
}

/// Determinant by Gaussian elimination with partial pivoting.
template <class Real>
Complex<Real> determinant(Matrix<Real> a) {
  const std::size_t n = a.rows();
  Complex<Real> det(Real(1));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs2(a(i, k)) > abs2(a(piv, k))) piv = i;
    if (abs2(a(piv, k)) == 0) return Complex<Real>();
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det = det * a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex<Real> f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

/// R_I and R_N written out as explicit products:
///   R_I = p0 prod(a_i^2) (H_n..H_1)(H_n..H_1)^H
///   R_N = n0 sum_{l=2}^{n+1} prod_{i>=l}(a_i^2) (H_n..H_l)(H_n..H_l)^H
template <class Real>
struct DirectCovariances {
  Matrix<Real> RI, RN;
};

template <class Real>
DirectCovariances<Real> direct_covariances(const std::vector<Matrix<Real>>& H, const std::vector<Real>& alpha,
                                           double p0, double n0) {
  const std::size_t n = H.size();
  const std::size_t d = H.front().rows();
  auto tail = [&](std::size_t l) {  // H_n ... H_l and the gain product, l is 1-based
    Matrix<Real> P = Matrix<Real>::identity(d);
    Real g = 1;
    for (std::size_t i = l; i <= n; ++i) {
      P = H[i - 1] * P;
      g *= alpha[i - 1] * alpha[i - 1];
    }
    Matrix<Real> out = P * P.adjoint();
    out *= g;
    return out;
  };
  DirectCovariances<Real> out;
  out.RI = tail(1);
  out.RI *= Real(p0);
  out.RN = Matrix<Real>(d, d);
  for (std::size_t l = 2; l <= n + 1; ++l) out.RN += tail(l);
  out.RN *= Real(n0);
  return out;
}

/// Roots of det(R_I - x R_N) located by a sign scan over log x followed by
/// bisection. These are the eigenvalues of R_I R_N^-1, found without any
/// factorization of R_N. Returned as log x, descending.
template <class Real>
std::vector<Real> pencil_log_roots(const Matrix<Real>& RI, const Matrix<Real>& RN, double lo, double hi,
                                   double step = 0.05, int bisections = 400) {
  using std::exp;
  const std::size_t d = RI.rows();
  auto f = [&](const Real& logx) {
    Matrix<Real> m = RN;
    m *= -exp(logx);
    m += RI;
    return determinant(m).re;
  };
  std::vector<Real> roots;
  Real a = Real(lo);
  Real fa = f(a);
  for (double x = lo + step; x <= hi + 1e-12; x += step) {
    Real b = Real(x);
    Real fb = f(b);
    if ((fa > 0) != (fb > 0)) {
      Real l = a, r = b, fl = fa;
      for (int it = 0; it < bisections; ++it) {
        Real m = (l + r) / 2;
        Real fm = f(m);
        if ((fm > 0) == (fl > 0)) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      roots.push_back((l + r) / 2);
    }
    a = b;
    fa = fb;
  }
  if (roots.size() != d) throw std::runtime_error("pencil_log_roots: scan did not separate every root");
  std::reverse(roots.begin(), roots.end());
  return roots;
}

template <class Real>
Real relative_frobenius(const Matrix<Real>& a, const Matrix<Real>& b) {
  Matrix<Real> diff = a - b;
  return diff.frobenius_norm() / b.frobenius_norm();
}

}  // namespace oracle
