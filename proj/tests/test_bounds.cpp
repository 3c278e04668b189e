#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "extremal/bounds.hpp"
#include "extremal/error.hpp"
#include "root_oracle.hpp"

using Catch::Approx;
using namespace extremal;

namespace {

void require_coefficients(const QuarticPoly& q, double c4, double c2, double c1, double c0) {
  REQUIRE(q.c4 == Approx(c4).margin(1e-14));
  REQUIRE(q.c2 == Approx(c2).margin(1e-14));
  REQUIRE(q.c1 == Approx(c1).margin(1e-14));
  REQUIRE(q.c0 == Approx(c0).margin(1e-14));
}

}  // namespace

TEST_CASE("general quartic coefficients", "[bounds]") {
  require_coefficients(build_poly(1.0, 1.0), 1, -8, 4, 0);
  require_coefficients(build_poly(1.5, 1.5), 0.25, -4, -2, 2);
  REQUIRE_THROWS_AS(build_poly(1.0, 2.0), DomainError);
  REQUIRE_THROWS_AS(build_poly(0.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(build_poly(1.2, 1.1), DomainError);
  REQUIRE(build_poly(1.0, 1.0)(1.0) == Approx(-3.0));
}

TEST_CASE("power-case quartic", "[bounds]") {
  const auto q3 = build_poly_power(3.0);
  require_coefficients(q3, 16, -96, 72, -12);
  const auto g3 = build_poly(2.0 / 3.0, 2.0 / 3.0);
  require_coefficients(g3, 16.0 / 9.0, -32.0 / 3.0, 8.0, -4.0 / 3.0);
  REQUIRE(q3.c4 == Approx(9.0 * g3.c4));
  REQUIRE(q3.c2 == Approx(9.0 * g3.c2));
  REQUIRE(q3.c1 == Approx(9.0 * g3.c1));
  REQUIRE(q3.c0 == Approx(9.0 * g3.c0));
  require_coefficients(build_poly_power(2.0), 9, -48, 40, -8);
  REQUIRE_THROWS_AS(build_poly_power(1.0), DomainError);
}

TEST_CASE("singular-power quartic", "[bounds]") {
  require_coefficients(build_poly_singular_power(2.0), 1, -16.0 / 9.0, -8.0 / 27.0, 8.0 / 81.0);
  require_coefficients(build_poly_singular_power(3.0), 1, -3, 0, 3.0 / 16.0);
  REQUIRE_THROWS_AS(build_poly_singular_power(1.0), DomainError);

  RootOptions from_zero;
  from_zero.scan_from = 0.0;
  const double beta = largest_root(build_poly_singular_power(2.0), from_zero).alpha_star;
  const double alpha = largest_root(build_poly(1.5, 1.5)).alpha_star;
  REQUIRE(std::abs(beta - alpha / 3.0) < 1e-8);
}

TEST_CASE("largest root agrees with the dense-scan oracle", "[bounds][oracle]") {
  const double a1 = oracle::largest_root_general(1.0, 1.0);
  const auto r1 = largest_root(build_poly(1.0, 1.0));
  REQUIRE(std::abs(r1.alpha_star - a1) < 1e-8);
  REQUIRE(r1.alpha_star == Approx(2.53407).margin(1e-5));
  REQUIRE(r1.width <= 1e-12);
  // alpha (alpha^3 - 8 alpha + 4): the largest root of the cubic factor.
  const double cubic = r1.alpha_star;
  REQUIRE(std::abs(cubic * cubic * cubic - 8 * cubic + 4) < 1e-9);

  const double a2 = oracle::largest_root_general(1.5, 1.5);
  REQUIRE(std::abs(largest_root(build_poly(1.5, 1.5)).alpha_star - a2) < 1e-8);
  REQUIRE(a2 == Approx(4.178).margin(1e-3));
}

TEST_CASE("largest root rejects P(1) >= 0", "[bounds]") {
  QuarticPoly bad;
  bad.c4 = 1.0;
  bad.c2 = 0.0;
  bad.c1 = 0.0;
  bad.c0 = 1.0;
  REQUIRE_THROWS_AS(largest_root(bad), InconsistentInput);
  RootOptions from_zero;
  from_zero.scan_from = 0.0;
  REQUIRE_THROWS_AS(largest_root(bad, from_zero), InconsistentInput);
}

TEST_CASE("root invariants over random admissible exponents", "[bounds][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.01, 1.99);
  for (int i = 0; i < 200; ++i) {
    double tm = dist(rng);
    double tp = dist(rng);
    if (tm > tp) std::swap(tm, tp);
    const auto q = build_poly(tm, tp);
    INFO("tau = (" << tm << ", " << tp << ")");
    REQUIRE(q(1.0) == Approx((2 - tm) * (2 - tm) - 4.0));
    REQUIRE(q(1.0) < 0.0);
    const auto r = largest_root(q);
    REQUIRE(r.alpha_star > 1.0);
    REQUIRE(std::abs(q(r.alpha_star)) <= 1e-10 * q.scale() * std::pow(r.alpha_star, 4));
    const double below = q(r.alpha_star - 1e-6);
    const double above = q(r.alpha_star + 1e-6);
    REQUIRE(below <= 0.0);
    REQUIRE(above >= 0.0);
    for (double d = 0.05; d <= 1.0; d += 0.05) REQUIRE(q(r.alpha_star + d) > 0.0);

    const double c = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    QuarticPoly scaled = q;
    scaled.c4 *= c;
    scaled.c2 *= c;
    scaled.c1 *= c;
    scaled.c0 *= c;
    REQUIRE(std::abs(largest_root(scaled).alpha_star - r.alpha_star) < 1e-10);
  }
}

TEST_CASE("power and singular-power quartics against the general construction",
          "[bounds][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(1.0001, 10.0);
  RootOptions from_zero;
  from_zero.scan_from = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double p = dist(rng);
    INFO("p = " << p);
    const double tp = (p - 1) / p;
    const double general_p = largest_root(build_poly(tp, tp)).alpha_star;
    REQUIRE(std::abs(largest_root(build_poly_power(p)).alpha_star - general_p) < 1e-8);

    const double ts = (p + 1) / p;
    const double general_s = largest_root(build_poly(ts, ts)).alpha_star;
    const double beta = largest_root(build_poly_singular_power(p), from_zero).alpha_star;
    REQUIRE(std::abs(beta - general_s * (p - 1) / (p + 1)) < 1e-8);
  }
}

TEST_CASE("dimension bound formulas", "[bounds]") {
  const double a1 = largest_root(build_poly(1.0, 1.0)).alpha_star;
  const auto reg = dimension_bound(a1, 1.0, Kind::Regular);
  REQUIRE(reg.n_quartic == Approx(4.0 * a1 + 2.0));
  REQUIRE(reg.n_quartic == Approx(12.136).margin(1e-3));
  REQUIRE(reg.n_8tau == 8.0);
  REQUIRE(reg.max_dim == 12);

  const double t7 = 1.57863;
  const double a7 = largest_root(build_poly(t7, t7)).alpha_star;
  REQUIRE(a7 == Approx(4.683).margin(1e-3));
  const auto sing = dimension_bound(a7, t7, Kind::Singular);
  REQUIRE(sing.n_quartic == Approx(7.0).margin(1e-3));
  REQUIRE(sing.max_dim == 7);

  const auto small = dimension_bound(2.0, 0.5, Kind::Singular);
  REQUIRE(small.n_8tau == 16.0);
  REQUIRE(small.n_combined >= 16.0);
  REQUIRE(small.max_dim == largest_integer_below(small.n_combined));

  // Regular with tau > 1 picks up the max{1, tau} factor.
  const auto big = dimension_bound(3.0, 1.5, Kind::Regular);
  REQUIRE(big.n_quartic == Approx((4 * 3.0 * 0.5 + 3.0) / 1.5 * 1.5));

  REQUIRE(largest_integer_below(12.0) == 11);
  REQUIRE(largest_integer_below(12.1) == 12);
  REQUIRE_THROWS_AS(dimension_bound(0.9, 1.0, Kind::Regular), DomainError);
  REQUIRE_THROWS_AS(dimension_bound(2.0, 2.0, Kind::Regular), DomainError);
}

TEST_CASE("regular dimension bound along tau <= 1", "[bounds][property]") {
  double prev = std::numeric_limits<double>::infinity();
  for (double tau = 0.1; tau <= 1.0 + 1e-12; tau += 0.01) {
    const double a = largest_root(build_poly(tau, tau)).alpha_star;
    const double n = dimension_bound(a, tau, Kind::Regular).n_combined;
    if (!(n < prev)) WARN("regular dimension bound not decreasing at tau = " << tau);
    prev = n;
  }
}

TEST_CASE("bound pipeline reproduces the headline dimensions", "[bounds]") {
  const auto e = bound_pipeline(make_builtin("exp"));
  REQUIRE(e.bound.max_dim == 12);
  REQUIRE(e.tau.tau_plus == 1.0);

  const auto s = bound_pipeline(make_builtin("singular_power", {2.0}));
  REQUIRE(s.bound.max_dim == 7);
  REQUIRE(s.bound.n_quartic == Approx(7.57).margin(0.01));

  const auto big = bound_pipeline(make_builtin("power", {1e6}));
  REQUIRE(big.bound.max_dim == 12);

  const auto ep = bound_pipeline(make_builtin("exp_pow", {2.0}));
  REQUIRE(ep.bound.max_dim == 12);

  REQUIRE_THROWS_AS(bound_pipeline(make_builtin("t_log_t")), NonConvergence);
}

TEST_CASE("negativity certificates", "[bounds]") {
  const auto a = certify_negativity(AlphaFormula::A, 2.0 / 3.0, 1.0, 1e-3);
  REQUIRE(a.certified);
  REQUIRE(a.min_margin > 0.0);
  for (const auto& [tau, value] : a.grid) REQUIRE(value < 0.0);
  REQUIRE(a.grid.back().first == 1.0);

  const auto b = certify_negativity(AlphaFormula::B, 1.0, 1.57863, 1e-3);
  REQUIRE(b.certified);
  REQUIRE(b.min_margin > 0.0);
  REQUIRE(b.argmin_tau == Approx(1.57863));

  const auto b_low = certify_negativity(AlphaFormula::B, 2.0 / 3.0, 1.0, 1e-3);
  REQUIRE(b_low.certified);

  // alpha = 2.6 lies above alpha*(1) so P > 0 there.
  const auto fixed = certify_negativity([](double) { return 2.6; }, 1.0, 1.0, 1e-3);
  REQUIRE_FALSE(fixed.certified);
  REQUIRE(fixed.grid.size() == 1);
  REQUIRE(fixed.grid[0].second == Approx(2.0176).margin(1e-12));

  // Past the threshold tau the formula-B certificate must fail.
  REQUIRE_FALSE(certify_negativity(AlphaFormula::B, 1.0, 1.6, 1e-3).certified);
}

TEST_CASE("threshold inversions", "[bounds]") {
  const auto tau7 = threshold_solve(7, Kind::Singular, ScanParameter::Tau);
  REQUIRE(tau7.parameter == Approx(1.57863).margin(5e-5));
  REQUIRE(tau7.hi - tau7.lo <= 1e-6);

  const auto p7 = threshold_solve(7, Kind::Singular, ScanParameter::P);
  REQUIRE(p7.parameter == Approx(1.72822).margin(5e-4));
  REQUIRE(std::abs(tau7.parameter - (p7.parameter + 1) / p7.parameter) < 1e-5);

  const auto p8 = threshold_solve(8, Kind::Singular, ScanParameter::P);
  REQUIRE(p8.parameter == Approx(2.2609).margin(5e-4));

  REQUIRE_THROWS_AS(threshold_solve(12, Kind::Regular, ScanParameter::P), DomainError);
  REQUIRE_THROWS_AS(threshold_solve(1, Kind::Singular, ScanParameter::P), DomainError);
}
