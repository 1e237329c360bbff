#include "afrelay/numerics/random.hpp"

#include <cmath>
#include <stdexcept>

namespace afrelay::numerics {

double standard_normal(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return n01(rng);
}

Complex<double> sample_complex_gaussian(double variance, Rng& rng) {
  if (!(variance > 0)) throw std::invalid_argument("sample_complex_gaussian: variance must be > 0");
  const double sd = std::sqrt(variance / 2);
  double re = standard_normal(rng);
  double im = standard_normal(rng);
  return {sd * re, sd * im};
}

double sample_lognormal(double a, double b, Rng& rng) {
  if (!(b > 0)) throw std::invalid_argument("sample_lognormal: b must be > 0");
  return std::exp(a + std::sqrt(b) * standard_normal(rng));
}

}  // namespace afrelay::numerics
