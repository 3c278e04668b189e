#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "extremal/error.hpp"
#include "extremal/quadrature.hpp"

using Catch::Approx;
using namespace extremal;

TEST_CASE("adaptive Simpson integrates smooth functions", "[quadrature]") {
  const double v = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  REQUIRE(std::abs(v - 2.0) < 1e-10);

  const double w = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 3.0);
  REQUIRE(std::abs(w - std::expm1(3.0)) < 1e-10 * std::expm1(3.0));

  REQUIRE(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  REQUIRE(adaptive_simpson([](double x) { return x; }, 1.0, 0.0) == Approx(-0.5));
}

TEST_CASE("adaptive Simpson agrees with a dense trapezoid oracle", "[quadrature]") {
  auto g = [](double s) { return std::exp(-s * s) * std::cos(3.0 * s); };
  const double oracle = trapezoid(g, 0.0, 2.0, 1'000'000);
  REQUIRE(std::abs(adaptive_simpson(g, 0.0, 2.0) - oracle) < 1e-10);
}

TEST_CASE("non-finite integrand values raise QuadratureError", "[quadrature]") {
  REQUIRE_THROWS_AS(adaptive_simpson([](double s) { return 1.0 / s; }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("cumulative table matches direct quadrature", "[quadrature]") {
  auto g = [](double s) { return std::exp(s) * (1.0 + s * s); };
  CumulativeIntegral table(g, 2.0, 64);
  for (double t : {0.0, 0.01, 0.3, 1.0, 1.37, 2.0}) {
    const double direct = adaptive_simpson(g, 0.0, t);
    REQUIRE(std::abs(table(t) - direct) <= 1e-10 * std::max(1.0, direct));
  }
  REQUIRE_THROWS_AS(table(2.5), DomainError);
}

TEST_CASE("origin substitution handles an integrable singularity", "[quadrature]") {
  // int_0^x s^-0.4 ds = x^0.6 / 0.6
  auto g = [](double s) { return std::pow(s, -0.4); };
  CumulativeIntegral table(g, 1.5, 32, 2.0 / (2.0 * 0.8 - 1.0));
  for (double t : {1e-6, 0.01, 0.04, 0.5, 1.5}) {
    const double exact = std::pow(t, 0.6) / 0.6;
    REQUIRE(std::abs(table(t) - exact) <= 1e-9 * exact);
  }
}
