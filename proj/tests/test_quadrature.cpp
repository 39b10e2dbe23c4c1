#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vit/quadrature.hpp"
#include "vit/units.hpp"

using namespace vit;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const QuadratureRule r = gauss_legendre(n, 0.0, 2.0);
    const double wsum = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // degree 2n-1 is exact
    const int deg = 2 * n - 1;
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.nodes[i], deg);
    CHECK(q == doctest::Approx(std::pow(2.0, deg + 1) / (deg + 1)).epsilon(1e-12));
  }
}

TEST_CASE("Gauss-Legendre averages cos^2 to one half") {
  const QuadratureRule r = gauss_legendre(32, 0.0, units::kPi / 2.0);
  double q = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) q += r.weights[i] * std::pow(std::cos(r.nodes[i]), 2);
  CHECK(q / (units::kPi / 2.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Gauss-Hermite normal moments") {
  const QuadratureRule r = gauss_hermite_normal(12);
  double m0 = 0, m1 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i], w = r.weights[i];
    m0 += w, m1 += w * x, m2 += w * x * x, m4 += w * x * x * x * x;
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(m1) < 1e-14);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  // symmetric rule
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.nodes.size() - 1 - i]));
  }
}

TEST_CASE("compensated sum recovers cancelled digits") {
  const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
  CHECK(compensated_sum({}) == 0.0);
}
