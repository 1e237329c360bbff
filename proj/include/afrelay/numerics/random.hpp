#pragma once

#include "afrelay/numerics/matrix.hpp"

#include <cstdint>
#include <random>

namespace afrelay::numerics {

using Rng = std::mt19937_64;

double standard_normal(Rng& rng);

/// Circularly symmetric complex Gaussian with total variance `variance`
/// (each of the real and imaginary parts gets half).
Complex<double> sample_complex_gaussian(double variance, Rng& rng);

/// exp(a + sqrt(b) Z), so a = E log X and b = Var log X.
double sample_lognormal(double a, double b, Rng& rng);

/// rows x cols matrix of i.i.d. CN(0, variance) entries, drawn row by row.
template <class Real>
Matrix<Real> sample_gaussian_matrix(std::size_t rows, std::size_t cols, double variance, Rng& rng) {
  Matrix<Real> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      auto z = sample_complex_gaussian(variance, rng);
      m(i, j) = Complex<Real>(Real(z.re), Real(z.im));
    }
  return m;
}

template <class Real>
Vector<Real> sample_gaussian_vector(std::size_t n, double variance, Rng& rng) {
  Vector<Real> v(n);
  for (auto& x : v) {
    auto z = sample_complex_gaussian(variance, rng);
    x = Complex<Real>(Real(z.re), Real(z.im));
  }
  return v;
}

/// Seeds for replica r of a run with base seed s: s + r. Kept in one place so
/// the manifest and the runner agree.
inline std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica) { return base + replica; }

}  // namespace afrelay::numerics
