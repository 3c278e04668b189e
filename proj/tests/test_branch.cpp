#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "extremal/diagnostics.hpp"
#include "extremal/error.hpp"

using Catch::Approx;
using namespace extremal;

namespace {

const Branch& exp_branch() {
  static const Branch b = trace_branch(discretize(3, 256), make_builtin("exp"), 0.05, 1e-4);
  return b;
}

const Branch& singular_branch() {
  static const Branch b =
      trace_branch(discretize(3, 256), make_builtin("singular_power", {2.0}), 0.05, 1e-4);
  return b;
}

RadialState zero_state(const RadialGrid& g) {
  RadialState s;
  s.u.assign(g.intervals() + 1, 0.0);
  s.v.assign(g.intervals() + 1, 0.0);
  return s;
}

}  // namespace

TEST_CASE("trace preconditions", "[branch]") {
  const auto g = discretize(3, 64);
  REQUIRE_THROWS_AS(trace_branch(g, make_builtin("exp"), 1e-4, 1e-4), DomainError);
  REQUIRE_THROWS_AS(trace_branch(g, make_builtin("exp"), 0.1, 0.0), DomainError);
}

TEST_CASE("exp branch is monotone, semistable and bracketed", "[branch]") {
  const auto& b = exp_branch();
  REQUIRE(b.states.size() > 100);
  REQUIRE(b.bracket_width() <= 2e-4);
  REQUIRE(b.lambda_star_estimate > 30.0);
  REQUIRE(b.lambda_star_estimate < 35.0);
  for (std::size_t k = 0; k < b.states.size(); ++k) {
    REQUIRE(b.stability[k].mu_min >= -1e-6);
    if (k == 0) continue;
    REQUIRE(b.states[k].lambda > b.states[k - 1].lambda);
    REQUIRE(b.states[k].u0() > b.states[k - 1].u0());
    // Pointwise ordering of minimal solutions.
    for (std::size_t i = 0; i < b.states[k].u.size(); ++i) {
      REQUIRE(b.states[k].u[i] >= b.states[k - 1].u[i]);
    }
  }
  // Positivity of both components.
  for (const auto& s : b.states) {
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      REQUIRE(s.u[i] >= 0.0);
      REQUIRE(s.v[i] >= 0.0);
    }
  }
}

TEST_CASE("singular branch stays away from the blow-up point", "[branch]") {
  const auto& b = singular_branch();
  REQUIRE_FALSE(b.empty());
  REQUIRE(b.bracket_width() <= 2e-4);
  for (const auto& s : b.states) REQUIRE(s.max_u() <= 1.0 - 1e-3);
}

TEST_CASE("the stability eigenvalue decreases towards the fold", "[branch]") {
  const auto& b = exp_branch();
  REQUIRE(b.stability.back().mu_min < b.stability.front().mu_min);
  for (const auto& r : b.stability) REQUIRE(r.mu_min >= b.stability.back().mu_min);
}

TEST_CASE("failure at the first step gives an empty branch", "[branch]") {
  const auto g = discretize(3, 64);
  const auto b = trace_branch(g, make_builtin("exp"), 500.0, 200.0);
  REQUIRE(b.empty());
  REQUIRE(b.lambda_star_bracket.first == 0.0);
  REQUIRE(b.stop_reason.rfind("empty branch", 0) == 0);
}

TEST_CASE("zero state diagnostics", "[diagnostics]") {
  const auto g = discretize(3, 128);
  const auto nl = make_builtin("exp");
  const auto s = zero_state(g);
  const auto rec = diagnostics(g, nl, s, {1.0, 2.0}, 1.2, 1.0);
  const double volume = 4.0 * std::acos(-1.0) / 3.0;
  REQUIRE(rec.int_f == Approx(volume).epsilon(1e-10));
  REQUIRE(rec.int_neg_lap == 0.0);
  REQUIRE(rec.energy == 0.0);
  REQUIRE(rec.key.lhs == 0.0);
  REQUIRE(rec.i_alpha == 0.0);
  REQUIRE(rec.pointwise_margin == 0.0);
  REQUIRE(rec.lq_f[1] == Approx(std::sqrt(volume)).epsilon(1e-10));
  REQUIRE(check_pointwise_lower_bound(g, nl, s) == 0.0);
}

TEST_CASE("diagnostics preconditions", "[diagnostics]") {
  const auto g = discretize(3, 64);
  const auto s = zero_state(g);
  REQUIRE_THROWS_AS(diagnostics(g, make_builtin("exp"), s, {1.0}, 0.5), DomainError);
  REQUIRE_THROWS_AS(diagnostics(g, make_builtin("exp"), s, {}, 1.2), DomainError);
}

TEST_CASE("Theta table agrees with direct quadrature and a halved table", "[diagnostics]") {
  for (const auto& nl : {make_builtin("exp"), make_builtin("singular_power", {2.0})}) {
    for (double alpha : {0.8, 1.0, 1.2, 2.0}) {
      const double top = nl.singular() ? 0.6 : 1.7;
      const ThetaTable full(nl, alpha, top, 4096);
      const ThetaTable half(nl, alpha, top, 2048);
      auto integrand = [&](double s) {
        const double ft = eval_f_tilde(nl, s);
        const double d1 = nl.df(s);
        const double b = 1.0 - ft * nl.d2f(s) / (2.0 * d1 * d1);
        return alpha * alpha * std::pow(ft, 2.0 * alpha - 2.0) * std::pow(d1, 2.0 - alpha) * b * b;
      };
      for (double t : {0.1, 0.33, top}) {
        REQUIRE(full(t) == Approx(half(t)).epsilon(1e-9));
        if (alpha >= 1.0) {
          REQUIRE(full(t) == Approx(adaptive_simpson(integrand, 0.0, t)).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("Theta dominates theta squared over t", "[diagnostics]") {
  // Theta(t) >= 0 and, by Cauchy-Schwarz, theta(t)^2 <= t Theta(t).
  const auto nl = make_builtin("exp");
  const ThetaTable table(nl, 1.2, 2.0);
  for (double t : {0.05, 0.5, 1.0, 2.0}) {
    REQUIRE(table(t) > 0.0);
    REQUIRE(theta_squared(nl, 1.2, t) <= t * table(t) * (1.0 + 1e-10));
  }
}

TEST_CASE("branch diagnostics satisfy the pointwise and key inequalities", "[diagnostics]") {
  const auto g = discretize(3, 256);
  const double h2 = g.spacing() * g.spacing();
  struct Case {
    const Branch* branch;
    Nonlinearity nl;
    double tau;
  };
  for (const auto& c : {Case{&exp_branch(), make_builtin("exp"), 1.0},
                        Case{&singular_branch(), make_builtin("singular_power", {2.0}), 1.5}}) {
    const std::size_t mid = mid_branch_index(*c.branch);
    for (std::size_t k : {std::size_t{0}, mid, c.branch->states.size() - 1}) {
      for (double alpha : {0.8, 1.2, 2.0}) {
        const auto rec = diagnostics(g, c.nl, c.branch->states[k], {1.0, 2.0}, alpha, c.tau);
        REQUIRE(rec.key.holds(1e-3));
        REQUIRE(rec.pointwise_margin >= -10.0 * h2);
        REQUIRE(rec.int_f > 0.0);
        REQUIRE(rec.energy >= 0.0);
      }
    }
  }
}

TEST_CASE("f' = p f^((p+1)/p) pointwise for singular_power", "[diagnostics]") {
  const auto nl = make_builtin("singular_power", {2.0});
  const auto& s = singular_branch().states.back();
  for (double u : s.u) REQUIRE(nl.df(u) == Approx(2.0 * std::pow(nl.f(u), 1.5)).epsilon(1e-12));
}

TEST_CASE("diagnostics refine at second order", "[diagnostics]") {
  const auto nl = make_builtin("exp");
  auto rec = [&](int M) {
    const auto g = discretize(3, M);
    return diagnostics(g, nl, solve_at_lambda(g, nl, 16.0), {1.0, 2.0}, 1.2, 1.0);
  };
  const auto a = rec(128);
  const auto b = rec(256);
  const auto c = rec(512);
  for (auto get : {+[](const DiagnosticsRecord& r) { return r.int_f; },
                   +[](const DiagnosticsRecord& r) { return r.int_neg_lap; },
                   +[](const DiagnosticsRecord& r) { return r.energy; },
                   +[](const DiagnosticsRecord& r) { return r.key.lhs; },
                   +[](const DiagnosticsRecord& r) { return r.i_alpha; }}) {
    const double coarse = std::abs(get(a) - get(b));
    const double fine = std::abs(get(b) - get(c));
    REQUIRE(fine <= 4.0 * coarse / 4.0 + 1e-12);
  }
}

TEST_CASE("uniformity report", "[diagnostics]") {
  const auto g = discretize(3, 256);
  const auto nl = make_builtin("singular_power", {2.0});
  const auto report = branch_uniformity_report(singular_branch(), g, nl, {1.0, 2.0}, 1.2, 1.5);
  REQUIRE(report.lambdas.size() == singular_branch().states.size());
  const auto* lap = report.find("int_neglap");
  REQUIRE(lap != nullptr);
  REQUIRE(lap->cap_rule == "torsion");
  REQUIRE(lap->bounded);
  const auto* intf = report.find("int_f");
  REQUIRE(intf != nullptr);
  REQUIRE(intf->bounded);
  REQUIRE(report.find("fprime_Lq1") != nullptr);
  REQUIRE(report.find("f_L2") != nullptr);

  Branch empty;
  REQUIRE(branch_uniformity_report(empty, g, nl, {1.0}, 1.2, 1.5).empty());
}

TEST_CASE("margin calibration", "[diagnostics]") {
  const auto g = discretize(3, 256);
  const auto cal = calibrate_margin(exp_branch(), g, make_builtin("exp"), 64);
  REQUIRE(cal.lambdas.size() >= 5);
  REQUIRE(std::isfinite(cal.constant));
  for (double m : cal.fine) REQUIRE(m >= -cal.constant * cal.h_fine * cal.h_fine);
}
