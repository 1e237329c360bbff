#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace afrelay::numerics {

/// Nodes and weights for E f(G), G ~ Gamma(shape, 1). Weights sum to 1.
struct GammaRule {
  double shape = 1;
  std::vector<double> nodes;
  std::vector<double> weights;

  double expect(const std::function<double(double)>& f) const;
};

/// Generalized Gauss-Laguerre rule (alpha = shape - 1) by Golub-Welsch.
GammaRule gamma_rule(double shape, std::size_t nodes = 64);

}  // namespace afrelay::numerics
