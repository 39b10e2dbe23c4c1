#include "vit/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vit/error.hpp"

namespace vit {

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged:
      return "converged";
    case FitStatus::MaxIterations:
      return "max_iterations";
    case FitStatus::RankDeficient:
      return "rank_deficient";
  }
  return "unknown";
}

std::size_t FitResult::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no fit parameter named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

bool FitResult::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

double FitResult::value(const std::string& name) const { return params(index(name)); }

double FitResult::error(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  if (covariance.rows() <= i) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(std::max(covariance(i, i), 0.0));
}

Eigen::MatrixXd forward_difference_jacobian(const LeastSquaresProblem& problem,
                                            const Eigen::VectorXd& p, const Eigen::VectorXd& r0,
                                            double relative_step) {
  const Eigen::Index n = p.size();
  Eigen::MatrixXd jac(r0.size(), n);
  Eigen::VectorXd shifted = p;
  Eigen::VectorXd r(r0.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = relative_step * std::max(std::abs(p(j)), problem.typical_scale[j]);
    shifted(j) = p(j) + h;
    problem.residuals(shifted, r);
    jac.col(j) = (r - r0) / h;
    shifted(j) = p(j);
  }
  return jac;
}

int rank_deficient_parameter(const Eigen::MatrixXd& jacobian, double tolerance) {
  const Eigen::Index n = jacobian.cols();
  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = jacobian.col(j).norm();
  const double largest = norms.maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(norms(j) > std::sqrt(tolerance) * largest) || !std::isfinite(norms(j))) {
      return static_cast<int>(j);
    }
  }
  Eigen::MatrixXd scaled = jacobian;
  for (Eigen::Index j = 0; j < n; ++j) scaled.col(j) /= norms(j);
  const Eigen::MatrixXd normal = scaled.transpose() * scaled;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(n - 1);
  if (lo < tolerance * hi) {
    Eigen::Index worst = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
    return static_cast<int>(worst);
  }
  return -1;
}

FitResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd start,
                              const LmOptions& options) {
  const auto n = static_cast<Eigen::Index>(problem.names.size());
  detail::require(start.size() == n, "start vector does not match parameter list");
  detail::require(static_cast<Eigen::Index>(problem.typical_scale.size()) == n &&
                      static_cast<Eigen::Index>(problem.lower.size()) == n,
                  "parameter metadata is incomplete");
  detail::require(problem.residual_count >= static_cast<std::size_t>(n),
                  "fewer residuals than free parameters");

  FitResult result;
  result.names = problem.names;

  auto clamp = [&](Eigen::VectorXd& p) {
    for (Eigen::Index j = 0; j < n; ++j) p(j) = std::max(p(j), problem.lower[j]);
  };
  clamp(start);

  // Identifiability is judged in units of each parameter's typical scale.
  auto scaled_columns = [&](const Eigen::MatrixXd& jac) {
    Eigen::MatrixXd scaled = jac;
    for (Eigen::Index j = 0; j < n; ++j) scaled.col(j) *= problem.typical_scale[j];
    return scaled;
  };

  Eigen::VectorXd p = start;
  Eigen::VectorXd r(problem.residual_count);
  problem.residuals(p, r);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw DomainError("residuals are not finite at the start point");
  result.cost_history.push_back(cost);

  Eigen::MatrixXd jac = forward_difference_jacobian(problem, p, r, options.relative_step);
  if (const int bad = rank_deficient_parameter(scaled_columns(jac), options.rank_tolerance); bad >= 0) {
    result.params = p;
    result.residual_norm = cost;
    result.status = FitStatus::RankDeficient;
    result.offending_parameter = problem.names[bad];
    return result;
  }

  double damping = options.initial_damping;
  Eigen::VectorXd trial_r(problem.residual_count);
  bool done = cost == 0.0;
  int iter = 0;
  while (!done && iter < options.max_iterations) {
    ++iter;
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    const Eigen::VectorXd diag = normal.diagonal();

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index j = 0; j < n; ++j) damped(j, j) += damping * std::max(diag(j), 1e-300);
      Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      Eigen::VectorXd trial = p + step;
      clamp(trial);
      step = trial - p;
      problem.residuals(trial, trial_r);
      const double trial_cost = trial_r.squaredNorm();

      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double drop = cost - trial_cost;
        p = trial;
        r = trial_r;
        cost = trial_cost;
        result.cost_history.push_back(cost);
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        double scaled_step = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          scaled_step = std::max(scaled_step,
                                 std::abs(step(j)) / std::max(std::abs(p(j)), problem.typical_scale[j]));
        }
        if (drop <= options.cost_tolerance * cost || scaled_step <= options.step_tolerance || cost == 0.0) {
          done = true;
        }
      } else {
        damping *= 10.0;
        if (damping > 1e16) {
          // No step decreases the objective: a stationary point at working precision.
          done = true;
          break;
        }
      }
    }
    if (!done) jac = forward_difference_jacobian(problem, p, r, options.relative_step);
  }

  result.params = p;
  result.residual_norm = cost;
  result.iterations = iter;
  result.converged = done;
  result.status = done ? FitStatus::Converged : FitStatus::MaxIterations;

  jac = forward_difference_jacobian(problem, p, r, options.relative_step);
  if (const int bad = rank_deficient_parameter(scaled_columns(jac), options.rank_tolerance); bad >= 0) {
    result.status = FitStatus::RankDeficient;
    result.converged = false;
    result.offending_parameter = problem.names[bad];
    result.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    return result;
  }
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  result.covariance = normal.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  result.covariance = 0.5 * (result.covariance + result.covariance.transpose());
  return result;
}

}  // namespace vit
