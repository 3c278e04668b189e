#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "extremal/error.hpp"
#include "extremal/radial.hpp"

using Catch::Approx;
using namespace extremal;

namespace {

std::vector<double> sample(const RadialGrid& g, double (*fn)(double)) {
  std::vector<double> out;
  for (double r : g.radii()) out.push_back(fn(r));
  return out;
}

double u0_at(int M, double lambda) {
  const auto g = discretize(3, M);
  return solve_at_lambda(g, make_builtin("exp"), lambda).u0();
}

}  // namespace

TEST_CASE("discretize preconditions", "[radial]") {
  REQUIRE_THROWS_AS(discretize(3, 32), DomainError);
  REQUIRE_THROWS_AS(discretize(0, 128), DomainError);
  REQUIRE_NOTHROW(discretize(3, 64));
}

TEST_CASE("weights sum to the ball volume", "[radial]") {
  for (int n : {1, 2, 3, 5, 8}) {
    for (int M : {64, 257, 512}) {
      const auto g = discretize(n, M);
      double sum = 0.0;
      for (double w : g.weights()) {
        REQUIRE(w > 0.0);
        sum += w;
      }
      const double volume = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
      REQUIRE(std::abs(sum - volume) <= 1e-8 * volume);
    }
  }
}

TEST_CASE("Laplacian is exact on 1 - r^2", "[radial]") {
  for (int n : {1, 2, 3, 7}) {
    const auto g = discretize(n, 256);
    const auto lap = g.laplacian(sample(g, [](double r) { return 1.0 - r * r; }));
    for (double value : lap) REQUIRE(value == Approx(-2.0 * n).epsilon(1e-9));
  }
}

TEST_CASE("n = 1 reduces to the standard second difference", "[radial]") {
  const auto g = discretize(1, 256);
  const double h = g.spacing();
  auto phi = sample(g, [](double r) { return std::cos(2.0 * r) + r * r * r; });
  const auto lap = g.laplacian(phi);
  for (int i = 1; i < 256; ++i) {
    REQUIRE(lap[i] == Approx((phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h)).epsilon(1e-10));
  }
  // Even extension at the origin.
  REQUIRE(lap[0] == Approx(2.0 * (phi[1] - phi[0]) / (h * h)).epsilon(1e-10));
}

TEST_CASE("Laplacian converges at second order on a smooth profile", "[radial]") {
  auto err = [](int M) {
    const auto g = discretize(3, M);
    const auto lap = g.laplacian(sample(g, [](double r) { return std::cos(r * r); }));
    double worst = 0.0;
    for (int i = 0; i < M; ++i) {
      const double r = g.radii()[i];
      // Delta cos(r^2) in R^3 = -6 sin(r^2) - 4 r^2 cos(r^2)
      const double exact = -6.0 * std::sin(r * r) - 4.0 * r * r * std::cos(r * r);
      worst = std::max(worst, std::abs(lap[i] - exact));
    }
    return worst;
  };
  const double ratio = err(128) / err(256);
  REQUIRE(ratio > 3.5);
  REQUIRE(ratio < 4.5);
}

TEST_CASE("stiffness is symmetric positive definite", "[radial]") {
  const auto g = discretize(3, 128);
  const BandLDLT ldlt(g.stiffness());
  REQUIRE(ldlt.ok());
  REQUIRE(ldlt.negative_pivots() == 0);
}

TEST_CASE("lambda = 0 gives the exact zero state", "[radial]") {
  const auto g = discretize(3, 128);
  const auto s = solve_at_lambda(g, make_builtin("exp"), 0.0);
  REQUIRE(s.residual == 0.0);
  for (double x : s.u) REQUIRE(x == 0.0);
  for (double x : s.v) REQUIRE(x == 0.0);
  REQUIRE_THROWS_AS(solve_at_lambda(g, make_builtin("exp"), -1.0), DomainError);
}

TEST_CASE("exp at lambda = 1 converges and refines at second order", "[radial]") {
  const auto g = discretize(3, 256);
  const auto s = solve_at_lambda(g, make_builtin("exp"), 1.0);
  REQUIRE(s.residual < 1e-10);
  REQUIRE(s.u0() > 0.0);
  REQUIRE(s.u.back() == 0.0);
  REQUIRE(s.v.back() == 0.0);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    REQUIRE(s.u[i] >= 0.0);
    REQUIRE(s.v[i] >= 0.0);
  }
  // Richardson: the 256/512 difference is predicted by the 128/256 one / 4.
  const double a = u0_at(128, 1.0);
  const double b = u0_at(256, 1.0);
  const double c = u0_at(512, 1.0);
  REQUIRE(std::abs(b - c) <= 4.0 * std::abs(a - b) / 4.0);
  REQUIRE(std::abs(b - c) > 0.0);
}

TEST_CASE("small lambda matches the linearised solution", "[radial]") {
  // For lambda -> 0, u ~ lambda w with Delta^2 w = 1, w = (3 r^4 - 10 r^2 + 7) / 360 in R^3.
  const auto g = discretize(3, 512);
  const double lambda = 1e-6;
  const auto s = solve_at_lambda(g, make_builtin("exp"), lambda);
  for (std::size_t i = 0; i < s.u.size(); i += 64) {
    const double r = g.radii()[i];
    const double w = (3.0 * r * r * r * r - 10.0 * r * r + 7.0) / 360.0;
    REQUIRE(s.u[i] / lambda == Approx(w).margin(2e-5));
  }
}

TEST_CASE("beyond the fold there is no solution", "[radial]") {
  const auto g = discretize(3, 256);
  // lambda* is near 32.6 for this problem; ten times that is far outside.
  REQUIRE_THROWS_AS(solve_at_lambda(g, make_builtin("exp"), 326.0), NoSolution);
}

TEST_CASE("Newton agrees with the monotone iteration on the minimal branch", "[radial]") {
  const auto g = discretize(3, 128);
  SolveOptions opts;
  opts.cross_check = true;
  for (const auto& nl : {make_builtin("exp"), make_builtin("singular_power", {2.0})}) {
    const double lambda = nl.singular() ? 10.0 : 25.0;
    const auto s = solve_at_lambda(g, nl, lambda, nullptr, opts);
    REQUIRE(s.method == "newton");
    REQUIRE(s.picard_iters > 0);
    REQUIRE(s.residual < 1e-10);
    REQUIRE(s.max_u() < nl.a_f());
  }
}

TEST_CASE("Newton seeded on the upper branch falls back to the minimal solution", "[radial]") {
  const auto g = discretize(3, 128);
  const auto nl = make_builtin("exp");
  const auto lower = solve_at_lambda(g, nl, 20.0);
  // A large seed sends Newton to the unstable solution.
  RadialState seed = lower;
  for (double& x : seed.u) x *= 6.0;
  const auto s = solve_at_lambda(g, nl, 20.0, &seed);
  REQUIRE(s.u0() == Approx(lower.u0()).epsilon(1e-8));
}

TEST_CASE("seed validation", "[radial]") {
  const auto g = discretize(3, 128);
  const auto nl = make_builtin("singular_power", {2.0});
  RadialState bad;
  bad.u.assign(129, 1.5);
  REQUIRE_THROWS_AS(solve_at_lambda(g, nl, 1.0, &bad), DomainError);
  bad.u.assign(10, 0.0);
  REQUIRE_THROWS_AS(solve_at_lambda(g, nl, 1.0, &bad), DomainError);
}

TEST_CASE("discrete Green identity: int v = lambda int psi f(u)", "[radial]") {
  const auto g = discretize(3, 256);
  const auto nl = make_builtin("exp");
  const auto s = solve_at_lambda(g, nl, 15.0);
  // psi solves -Delta_h psi = 1, so psi^T K v = lambda psi^T C f.
  const int M = g.intervals();
  std::vector<double> psi(M + 1, 0.0);
  {
    const BandLDLT k(g.stiffness());
    std::vector<double> rhs(g.cells().begin(), g.cells().begin() + M);
    k.solve_in_place(rhs);
    std::copy(rhs.begin(), rhs.end(), psi.begin());
  }
  std::vector<double> psi_f(M + 1);
  for (int i = 0; i <= M; ++i) psi_f[i] = psi[i] * nl.f(s.u[i]);
  REQUIRE(g.integrate(s.v) == Approx(15.0 * g.integrate(psi_f)).epsilon(1e-9));
  // psi is (1 - r^2)/6 exactly, since the scheme is exact on quadratics.
  for (int i = 0; i <= M; i += 32) {
    const double r = g.radii()[i];
    REQUIRE(psi[i] == Approx((1.0 - r * r) / 6.0).margin(1e-12));
  }
}
