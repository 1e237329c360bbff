#pragma once

#include "afrelay/numerics/precision.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>

namespace afrelay::numerics {

using Rational = boost::multiprecision::cpp_rational;

/// Euler-Mascheroni constant, 120 significant digits.
inline constexpr const char* kEulerGammaDigits =
    "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063291746749514631447"
    "2498070824809605";

template <class Real>
Real euler_gamma() {
  if constexpr (std::is_same_v<Real, double>) {
    return 0.57721566490153286060651209008240243;
  } else {
    return Real(kEulerGammaDigits);
  }
}

/// H_k = 1 + 1/2 + ... + 1/k, exact. H_0 = 0.
Rational harmonic(std::uint64_t k);

/// H_k summed in floating point, smallest terms first.
template <class Real>
Real harmonic_real(std::uint64_t k) {
  Real s = 0;
  for (std::uint64_t j = k; j >= 1; --j) s += Real(1) / Real(j);
  return s;
}

/// psi(k) = H_{k-1} - gamma for integer k >= 1.
template <class Real>
Real digamma_int(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("digamma_int: k must be >= 1");
  return harmonic_real<Real>(static_cast<std::uint64_t>(k - 1)) - euler_gamma<Real>();
}

template <class Real>
Real to_real(const Rational& q) {
  if constexpr (std::is_same_v<Real, double>) {
    return q.convert_to<double>();
  } else {
    return Real(numerator(q)) / Real(denominator(q));
  }
}

}  // namespace afrelay::numerics
