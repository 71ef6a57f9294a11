#pragma once

#include <vector>

namespace rdspde {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on (a, b); endpoints are never nodes.
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace rdspde
