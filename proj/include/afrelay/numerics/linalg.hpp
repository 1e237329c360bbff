#pragma once

#include "afrelay/errors.hpp"
#include "afrelay/numerics/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace afrelay::numerics {

template <class Real>
struct QrResult {
  Matrix<Real> Q;
  Matrix<Real> R;
};

template <class Real>
struct EigenDecomposition {
  std::vector<Real> values;  // descending
  Matrix<Real> vectors;      // column k pairs with values[k]
};

namespace detail {

template <class Real>
Complex<Real> unit_phase(const Complex<Real>& z) {
  Real m = abs(z);
  if (m == 0) return Complex<Real>(Real(1));
  return z / m;
}

// Off-diagonal tolerance for Jacobi: relative 10^-(digits-4) at big-float.
// At double the digits rule would ask for 1e-12 only, which loses the small
// eigenvalues; a few ulps of the norm is what the rotations can deliver.
template <class Real>
Real jacobi_tolerance() {
  if constexpr (std::is_same_v<Real, double>) {
    return 4 * RealTraits<double>::epsilon();
  } else {
    using std::pow;
    int digits = static_cast<int>(RealTraits<Real>::digits());
    return pow(Real(10), -(digits - 4));
  }
}

template <class Real>
Real hermitian_tolerance() {
  using std::sqrt;
  return sqrt(RealTraits<Real>::epsilon()) * 16;
}

}  // namespace detail

/// Householder QR with the diagonal of R made real and positive.
/// Throws DegenerateFactorization when a column is numerically dependent on
/// the previous ones.
template <class Real>
QrResult<Real> qr_decompose(const Matrix<Real>& A) {
  using std::sqrt;
  if (!A.square()) throw std::invalid_argument("qr_decompose: matrix must be square");
  const std::size_t n = A.rows();
  Matrix<Real> R = A;
  Matrix<Real> Q = Matrix<Real>::identity(n);
  const Real scale = A.frobenius_norm();
  const Real floor = scale * Real(16) * Real(static_cast<double>(n)) * RealTraits<Real>::epsilon();
  if (scale == 0 && n > 0) throw DegenerateFactorization(0);

  Vector<Real> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    Real below = 0;
    for (std::size_t i = k + 1; i < n; ++i) below += abs2(R(i, k));
    Real norm = sqrt(below + abs2(R(k, k)));
    if (!(norm > floor)) throw DegenerateFactorization(k);

    Complex<Real> ph = detail::unit_phase(R(k, k));
    if (below != 0) {
      // v = x - alpha e_k with alpha = -ph*norm; reflector I - 2 v v^H / |v|^2.
      for (std::size_t i = 0; i < n; ++i) v[i] = Complex<Real>();
      v[k] = R(k, k) + ph * norm;
      for (std::size_t i = k + 1; i < n; ++i) v[i] = R(i, k);
      Real vnorm2 = 0;
      for (std::size_t i = k; i < n; ++i) vnorm2 += abs2(v[i]);
      const Real beta = Real(2) / vnorm2;
      for (std::size_t j = k; j < n; ++j) {
        Complex<Real> s;
        for (std::size_t i = k; i < n; ++i) s += conj(v[i]) * R(i, j);
        s *= beta;
        for (std::size_t i = k; i < n; ++i) R(i, j) -= v[i] * s;
      }
      for (std::size_t i = 0; i < n; ++i) {
        Complex<Real> s;
        for (std::size_t j = k; j < n; ++j) s += Q(i, j) * v[j];
        s *= beta;
        for (std::size_t j = k; j < n; ++j) Q(i, j) -= s * conj(v[j]);
      }
      for (std::size_t i = k + 1; i < n; ++i) R(i, k) = Complex<Real>();
      ph = -ph;  // R(k,k) is now -ph*norm
    }
    // Rotate the phase out of R(k,k) into column k of Q.
    const Complex<Real> cph = conj(ph);
    for (std::size_t j = k; j < n; ++j) R(k, j) = cph * R(k, j);
    R(k, k) = Complex<Real>(R(k, k).re);
    for (std::size_t i = 0; i < n; ++i) Q(i, k) = Q(i, k) * ph;
  }
  return {std::move(Q), std::move(R)};
}

/// Cyclic Jacobi for Hermitian matrices. Eigenvalues are returned descending;
/// ties keep the order of the original diagonal positions.
template <class Real>
EigenDecomposition<Real> eig_hermitian(const Matrix<Real>& input) {
  using std::abs;
  using std::sqrt;
  if (!input.square()) throw std::invalid_argument("eig_hermitian: matrix must be square");
  const Real asym = relative_asymmetry(input);
  if (asym > detail::hermitian_tolerance<Real>()) throw NotHermitian(to_double(asym));

  const std::size_t n = input.rows();
  Matrix<Real> a = hermitian_part(input);
  Matrix<Real> V = Matrix<Real>::identity(n);
  const Real target = a.frobenius_norm() * detail::jacobi_tolerance<Real>();

  auto off_mass = [&] {
    Real s = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2 * abs2(a(p, q));
    return sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_mass() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real g = abs(a(p, q));
        if (g == 0) continue;
        const Complex<Real> eiphi = a(p, q) / g;
        const Complex<Real> emiphi = conj(eiphi);
        const Real zeta = (a(q, q).re - a(p, p).re) / (2 * g);
        Real t;
        if (zeta == 0) {
          t = 1;
        } else {
          t = Real(zeta > 0 ? 1 : -1) / (abs(zeta) + sqrt(1 + zeta * zeta));
        }
        const Real c = 1 / sqrt(1 + t * t);
        const Real s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex<Real> akp = a(k, p);
          const Complex<Real> akq = emiphi * a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
          a(p, k) = conj(a(k, p));
          a(q, k) = conj(a(k, q));
        }
        a(p, p) = Complex<Real>(a(p, p).re - t * g);
        a(q, q) = Complex<Real>(a(q, q).re + t * g);
        a(p, q) = Complex<Real>();
        a(q, p) = Complex<Real>();

        for (std::size_t k = 0; k < n; ++k) {
          const Complex<Real> vkp = V(k, p);
          const Complex<Real> vkq = emiphi * V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return a(l, l).re > a(r, r).re; });
  EigenDecomposition<Real> out;
  out.values.reserve(n);
  out.vectors = Matrix<Real>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]).re);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[k]);
  }
  return out;
}

/// Lower-triangular L with A = L L^H.
template <class Real>
Matrix<Real> cholesky(const Matrix<Real>& A) {
  using std::sqrt;
  if (!A.square()) throw std::invalid_argument("cholesky: matrix must be square");
  const std::size_t n = A.rows();
  Matrix<Real> L(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Real diag = A(j, j).re;
    for (std::size_t k = 0; k < j; ++k) diag -= abs2(L(j, k));
    if (!(diag > 0)) throw NotPositiveDefinite(j);
    const Real ljj = sqrt(diag);
    L(j, j) = Complex<Real>(ljj);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex<Real> s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * conj(L(j, k));
      L(i, j) = s / ljj;
    }
  }
  return L;
}

/// Solves L X = B for lower-triangular L.
template <class Real>
Matrix<Real> solve_lower(const Matrix<Real>& L, const Matrix<Real>& B) {
  const std::size_t n = L.rows();
  if (!L.square() || B.rows() != n) throw std::invalid_argument("solve_lower: shape mismatch");
  Matrix<Real> X = B;
  for (std::size_t c = 0; c < B.cols(); ++c)
    for (std::size_t i = 0; i < n; ++i) {
      Complex<Real> s = X(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * X(k, c);
      X(i, c) = s / L(i, i);
    }
  return X;
}

/// L^-1 A L^-H for Hermitian A and lower-triangular L.
template <class Real>
Matrix<Real> whiten(const Matrix<Real>& A, const Matrix<Real>& L) {
  Matrix<Real> Y = solve_lower(L, A);             // L^-1 A
  Matrix<Real> S = solve_lower(L, Y.adjoint());   // L^-1 (L^-1 A)^H = L^-1 A L^-H
  return hermitian_part(S);
}

/// Log-eigenvalues of the graded Hermitian positive definite matrix
/// diag(e^scale) * A * diag(e^scale), where A has unit diagonal.
///
/// Rotations act on A and the scales directly, so the small eigenvalues keep
/// full relative accuracy however far apart the scales are, as long as A
/// itself is well conditioned. Returned descending.
template <class Real>
std::vector<Real> graded_log_eigenvalues(Matrix<Real> A, std::vector<Real> scale) {
  using std::abs;
  using std::exp;
  using std::log1p;
  using std::sqrt;
  const std::size_t n = A.rows();
  if (!A.square() || scale.size() != n) throw std::invalid_argument("graded_log_eigenvalues: shape mismatch");
  const Real tol = 4 * RealTraits<Real>::epsilon();

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real g = abs(A(p, q));
        if (!(g > tol)) continue;
        rotated = true;
        const Complex<Real> emiphi = conj(A(p, q) / g);
        const Real x = scale[p];
        const Real y = scale[q];
        const Real u = exp(-abs(x - y));
        const Real w = (1 - u * u) / (2 * g);
        const Real tau = 1 / (w + sqrt(u * u + w * w));
        const Real c = 1 / sqrt(1 + tau * tau * u * u);
        Real dp, dq, s_yx, s_xy;  // s*e^(y-x), s*e^(x-y)
        if (y >= x) {
          dp = -tau * g;
          dq = tau * g * u * u;
          s_yx = tau * c;
          s_xy = tau * c * u * u;
        } else {
          dp = tau * g * u * u;
          dq = -tau * g;
          s_yx = -tau * c * u * u;
          s_xy = -tau * c;
        }
        if (!(1 + dp > 0) || !(1 + dq > 0)) throw NotPositiveDefinite(1 + dp > 0 ? q : p);
        const Real np = 1 / sqrt(1 + dp);
        const Real nq = 1 / sqrt(1 + dq);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex<Real> akp = A(k, p);
          const Complex<Real> akq = emiphi * A(k, q);
          A(k, p) = (c * akp - s_yx * akq) * np;
          A(k, q) = (s_xy * akp + c * akq) * nq;
          A(p, k) = conj(A(k, p));
          A(q, k) = conj(A(k, q));
        }
        A(p, q) = Complex<Real>();
        A(q, p) = Complex<Real>();
        scale[p] += log1p(dp) / 2;
        scale[q] += log1p(dq) / 2;
      }
    }
    if (!rotated) break;
  }

  for (auto& s : scale) s *= 2;
  std::stable_sort(scale.begin(), scale.end(), [](const Real& l, const Real& r) { return l > r; });
  return scale;
}

}  // namespace afrelay::numerics
