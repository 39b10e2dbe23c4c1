#pragma once

#include <vector>

namespace vit {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [a, b] with weights summing to (b - a).
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss-Hermite rule for a standard normal variable: weights sum to 1,
/// nodes are in units of sigma.
QuadratureRule gauss_hermite_normal(int n);

/// Sum in a fixed order with Neumaier compensation.
double compensated_sum(const std::vector<double>& values);

}  // namespace vit
