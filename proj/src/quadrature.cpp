#include "vit/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vit/error.hpp"

namespace vit {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, int n, double mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diagonal(k);
    jacobi(k + 1, k) = off_diagonal(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Golub-Welsch eigensolve failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  detail::require(n >= 1, "quadrature needs at least one node");
  detail::require(b > a, "empty integration interval");
  Eigen::VectorXd beta(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k) beta(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule rule = golub_welsch(beta, n, 2.0);

  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = mid + half * rule.nodes[k];
    rule.weights[k] *= half;
  }
  return rule;
}

QuadratureRule gauss_hermite_normal(int n) {
  detail::require(n >= 1, "quadrature needs at least one node");
  // Probabilists' Hermite recurrence: off-diagonal sqrt(k).
  Eigen::VectorXd beta(std::max(n - 1, 1));
  for (int k = 1; k < n; ++k) beta(k - 1) = std::sqrt(static_cast<double>(k));
  QuadratureRule rule = golub_welsch(beta, n, 1.0);
  // Clean up the symmetric rule so that +x and -x carry identical weights.
  for (int k = 0; k < n / 2; ++k) {
    const int m = n - 1 - k;
    const double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[m] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[m] = x;
    rule.weights[k] = rule.weights[m] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace vit
