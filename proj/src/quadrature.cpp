#include "afrelay/numerics/quadrature.hpp"

#include "afrelay/numerics/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace afrelay::numerics {

double GammaRule::expect(const std::function<double(double)>& f) const {
  double s = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
  return s;
}

GammaRule gamma_rule(double shape, std::size_t count) {
  if (!(shape > 0) || count == 0) throw std::invalid_argument("gamma_rule: need shape > 0 and at least one node");
  const double alpha = shape - 1;
  // Jacobi matrix of the monic Laguerre recurrence.
  Matrix<double> J(count, count);
  for (std::size_t j = 0; j < count; ++j) {
    J(j, j) = Complex<double>(2.0 * static_cast<double>(j) + alpha + 1);
    if (j + 1 < count) {
      double jj = static_cast<double>(j + 1);
      double off = std::sqrt(jj * (jj + alpha));
      J(j, j + 1) = Complex<double>(off);
      J(j + 1, j) = Complex<double>(off);
    }
  }
  auto eig = eig_hermitian(J);
  GammaRule rule;
  rule.shape = shape;
  double total = 0;
  for (std::size_t k = 0; k < count; ++k) {
    rule.nodes.push_back(eig.values[k]);
    double w = abs2(eig.vectors(0, k));
    rule.weights.push_back(w);
    total += w;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

}  // namespace afrelay::numerics
