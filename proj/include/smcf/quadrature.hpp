#pragma once

#include <vector>

namespace smcf {

/// Gauss-Legendre rule mapped to the reference element [0, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

}  // namespace smcf
