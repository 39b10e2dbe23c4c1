#include <doctest.h>

#include <cmath>
#include <random>

#include "vit/least_squares.hpp"

using namespace vit;

namespace {

struct Data {
  std::vector<double> x, y, s;
};

Data decay_data(double amp, double rate, double noise, std::uint64_t seed) {
  Data d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const double x = 0.1 * i;
    d.x.push_back(x);
    d.y.push_back(amp * std::exp(-rate * x) + noise * gauss(rng));
    d.s.push_back(noise > 0.0 ? noise : 1.0);
  }
  return d;
}

LeastSquaresProblem decay_problem(const Data& d) {
  LeastSquaresProblem p;
  p.names = {"amp", "rate"};
  p.typical_scale = {1.0, 1.0};
  p.lower = {-INFINITY, 0.0};
  p.residual_count = d.x.size();
  p.residuals = [&d](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = (d.y[i] - q(0) * std::exp(-q(1) * d.x[i])) / d.s[i];
    }
  };
  return p;
}

}  // namespace

TEST_CASE("noiseless exponential decay is recovered exactly") {
  const Data d = decay_data(2.5, 0.7, 0.0, 1);
  Eigen::VectorXd start(2);
  start << 1.0, 2.0;
  const FitResult f = levenberg_marquardt(decay_problem(d), start);
  CHECK(f.converged);
  CHECK(f.status == FitStatus::Converged);
  CHECK(f.value("amp") == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(f.value("rate") == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(f.residual_norm < 1e-14);
}

TEST_CASE("cost history never increases") {
  const Data d = decay_data(2.5, 0.7, 0.05, 2);
  Eigen::VectorXd start(2);
  start << 10.0, 5.0;
  const FitResult f = levenberg_marquardt(decay_problem(d), start);
  REQUIRE(f.cost_history.size() >= 2);
  for (std::size_t i = 1; i < f.cost_history.size(); ++i) CHECK(f.cost_history[i] <= f.cost_history[i - 1]);
  CHECK(f.cost_history.back() == f.residual_norm);
}

TEST_CASE("Rosenbrock valley") {
  LeastSquaresProblem p;
  p.names = {"x", "y"};
  p.typical_scale = {1.0, 1.0};
  p.lower = {-INFINITY, -INFINITY};
  p.residual_count = 2;
  p.residuals = [](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    r(0) = 10.0 * (q(1) - q(0) * q(0));
    r(1) = 1.0 - q(0);
  };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  const FitResult f = levenberg_marquardt(p, start);
  CHECK(f.converged);
  CHECK(f.value("x") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.value("y") == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("straight-line covariance equals the normal-matrix inverse") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  const std::vector<double> y = {1.1, 2.9, 5.2, 6.8, 9.1, 11.0};
  const double sigma = 0.2;
  LeastSquaresProblem p;
  p.names = {"a", "b"};
  p.typical_scale = {1.0, 1.0};
  p.lower = {-INFINITY, -INFINITY};
  p.residual_count = x.size();
  p.residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < x.size(); ++i) r(static_cast<Eigen::Index>(i)) = (y[i] - q(0) - q(1) * x[i]) / sigma;
  };
  Eigen::VectorXd start = Eigen::VectorXd::Zero(2);
  const FitResult f = levenberg_marquardt(p, start);

  double s0 = 0, s1 = 0, s2 = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma * sigma);
    s0 += w, s1 += w * x[i], s2 += w * x[i] * x[i], sy += w * y[i], sxy += w * x[i] * y[i];
  }
  const double det = s0 * s2 - s1 * s1;
  CHECK(f.value("b") == doctest::Approx((s0 * sxy - s1 * sy) / det).epsilon(1e-7));
  CHECK(f.value("a") == doctest::Approx((s2 * sy - s1 * sxy) / det).epsilon(1e-7));
  CHECK(f.covariance(0, 0) == doctest::Approx(s2 / det).epsilon(1e-6));
  CHECK(f.covariance(1, 1) == doctest::Approx(s0 / det).epsilon(1e-6));
  CHECK(f.covariance(0, 1) == doctest::Approx(-s1 / det).epsilon(1e-6));
  CHECK(f.error("b") == doctest::Approx(std::sqrt(s0 / det)).epsilon(1e-6));
}

TEST_CASE("non-identifiable parameters are named") {
  const Data d = decay_data(2.5, 0.7, 0.0, 1);
  SUBCASE("parameter absent from the model") {
    LeastSquaresProblem p = decay_problem(d);
    p.names.push_back("ghost");
    p.typical_scale.push_back(1.0);
    p.lower.push_back(-INFINITY);
    Eigen::VectorXd start(3);
    start << 1.0, 1.0, 0.0;
    const FitResult f = levenberg_marquardt(p, start);
    CHECK(f.status == FitStatus::RankDeficient);
    CHECK_FALSE(f.converged);
    CHECK(f.offending_parameter == "ghost");
  }
  SUBCASE("product degeneracy") {
    LeastSquaresProblem p;
    p.names = {"a", "b"};
    p.typical_scale = {1.0, 1.0};
    p.lower = {-INFINITY, -INFINITY};
    p.residual_count = d.x.size();
    p.residuals = [&d](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
      for (std::size_t i = 0; i < d.x.size(); ++i) r(static_cast<Eigen::Index>(i)) = d.y[i] - q(0) * q(1) * d.x[i];
    };
    Eigen::VectorXd start(2);
    start << 1.0, 1.0;
    const FitResult f = levenberg_marquardt(p, start);
    CHECK(f.status == FitStatus::RankDeficient);
    CHECK_FALSE(f.offending_parameter.empty());
  }
}

TEST_CASE("lower bounds hold and iteration cap is reported") {
  const Data d = decay_data(2.5, 0.7, 0.0, 1);
  LeastSquaresProblem p = decay_problem(d);
  p.lower = {3.0, 0.0};
  Eigen::VectorXd start(2);
  start << 4.0, 1.0;
  const FitResult f = levenberg_marquardt(p, start);
  CHECK(f.value("amp") >= 3.0);

  LmOptions once;
  once.max_iterations = 1;
  start << 10.0, 5.0;
  const FitResult g = levenberg_marquardt(decay_problem(d), start, once);
  CHECK(g.status == FitStatus::MaxIterations);
  CHECK_FALSE(g.converged);
  CHECK(std::string(to_string(g.status)) == "max_iterations");
}

TEST_CASE("finite-difference Jacobian against the analytic one") {
  const Data d = decay_data(2.5, 0.7, 0.0, 1);
  const LeastSquaresProblem p = decay_problem(d);
  Eigen::VectorXd q(2);
  q << 2.0, 0.5;
  Eigen::VectorXd r0(p.residual_count);
  p.residuals(q, r0);
  const Eigen::MatrixXd j = forward_difference_jacobian(p, q, r0, 1e-7);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CHECK(j(k, 0) == doctest::Approx(-std::exp(-0.5 * d.x[i])).epsilon(1e-5));
    CHECK(j(k, 1) == doctest::Approx(2.0 * d.x[i] * std::exp(-0.5 * d.x[i])).epsilon(1e-5));
  }
}

TEST_CASE("fit result accessors") {
  FitResult f;
  f.names = {"a"};
  f.params = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(f.has("a"));
  CHECK_FALSE(f.has("b"));
  CHECK(f.value("a") == 3.0);
  CHECK(std::isnan(f.error("a")));
  CHECK_THROWS_AS(f.value("b"), std::out_of_range);
}
