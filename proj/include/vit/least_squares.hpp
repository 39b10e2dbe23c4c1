#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

// Damped Gauss-Newton (Levenberg-Marquardt) for weighted residuals with
// forward-difference Jacobians.
namespace vit {

enum class FitStatus {
  Converged,
  MaxIterations,
  RankDeficient,  // a parameter (named in offending_parameter) is not identifiable
};

const char* to_string(FitStatus status);

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T J)^{-1} of the weighted residuals
  double residual_norm = 0.0;  // weighted sum of squares
  bool converged = false;
  int iterations = 0;
  FitStatus status = FitStatus::MaxIterations;
  std::string offending_parameter;
  /// Weighted sum of squares after each accepted step, starting at the
  /// initial point. Never increases.
  std::vector<double> cost_history;

  std::size_t index(const std::string& name) const;
  double value(const std::string& name) const;
  double error(const std::string& name) const;
  bool has(const std::string& name) const;
};

struct LeastSquaresProblem {
  std::vector<std::string> names;
  /// Magnitude below which the finite-difference step stops shrinking with |p|.
  std::vector<double> typical_scale;
  /// Lower bounds; -infinity for none.
  std::vector<double> lower;
  std::size_t residual_count = 0;
  /// Weighted residuals (data - model)/sigma.
  std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)> residuals;
};

struct LmOptions {
  int max_iterations = 200;
  double relative_step = 1e-6;
  double cost_tolerance = 1e-12;
  double step_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double rank_tolerance = 1e-12;
};

Eigen::MatrixXd forward_difference_jacobian(const LeastSquaresProblem& problem,
                                            const Eigen::VectorXd& p, const Eigen::VectorXd& r0,
                                            double relative_step);

/// Index of a non-identifiable parameter in J, or -1. A zero column, or an
/// eigenvalue of the column-normalised J^T J below tolerance x largest,
/// flags the parameter with the largest share of that eigenvector.
int rank_deficient_parameter(const Eigen::MatrixXd& jacobian, double tolerance);

FitResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd start,
                              const LmOptions& options = {});

}  // namespace vit
