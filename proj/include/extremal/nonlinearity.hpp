#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "extremal/quadrature.hpp"

namespace extremal {

enum class Kind { Regular, Singular };

std::string to_string(Kind kind);

using ScalarFn = std::function<double(double)>;

/// Analytic extras a nonlinearity may carry. Everything here is optional and
/// only short-circuits a numerical route.
struct ClosedForms {
  std::optional<ScalarFn> antiderivative;  // F with F(0) = 0
  std::optional<ScalarFn> ratio;           // f f'' / f'^2, evaluated without overflow
  std::optional<ScalarFn> log_f;           // log f(t)
  std::optional<double> constant_ratio;    // exact when f f''/f'^2 is constant
};

/// A nonlinearity f : [0, a_f) -> R_+ with its first two derivatives.
class Nonlinearity {
 public:
  Nonlinearity(std::string name, Kind kind, double a_f, ScalarFn f, ScalarFn df, ScalarFn d2f,
               ClosedForms closed = {});

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  bool singular() const noexcept { return kind_ == Kind::Singular; }
  /// Blow-up point; +inf for regular nonlinearities.
  double a_f() const noexcept { return a_f_; }
  bool in_domain(double t) const noexcept { return t >= 0.0 && t < a_f_; }

  double f(double t) const { return f_(t); }
  double df(double t) const { return df_(t); }
  double d2f(double t) const { return d2f_(t); }

  /// f(t) f''(t) / f'(t)^2, via the closed form when one is attached.
  double ratio(double t) const;
  /// log f(t), via the closed form when one is attached.
  double log_f(double t) const;

  const ClosedForms& closed_forms() const noexcept { return closed_; }

 private:
  std::string name_;
  Kind kind_;
  double a_f_;
  ScalarFn f_;
  ScalarFn df_;
  ScalarFn d2f_;
  ClosedForms closed_;
};

/// Builtin catalog: exp, exp_pow (alpha > 0), power (p > 1),
/// singular_power (p > 1), t_log_t. Throws DomainError on an unknown name or
/// out-of-range parameter.
Nonlinearity make_builtin(const std::string& name, const std::vector<double>& params = {});

/// User-supplied nonlinearity from callbacks. Missing derivatives fall back to
/// finite differences; supplied derivatives are cross-checked against finite
/// differences at load time (DomainError on mismatch).
Nonlinearity make_custom(std::string name, Kind kind, double a_f, ScalarFn f,
                         std::optional<ScalarFn> df = std::nullopt,
                         std::optional<ScalarFn> d2f = std::nullopt);

// ---------------------------------------------------------------------------
// Sampling schedules that accumulate at a_f.

struct SamplingSpec {
  int k_min = -1;  // -1 selects the default for the kind
  int k_max = -1;
  /// Samples whose f, f', f'' exceed this are dropped (overflow guard).
  double overflow_guard = 1e300;
};

/// t = a_f (1 - 10^-k), k = 1..12 (singular) or t = 10^k, k = 0..8 (regular).
std::vector<double> sample_points(const Nonlinearity& nl, const SamplingSpec& spec = {});

// ---------------------------------------------------------------------------
// Admissibility: smooth, increasing, convex, f(0) > 0, blow-up at a_f.

struct SampleCheck {
  double t = 0.0;
  bool evaluated = true;
  bool increasing = true;
  bool convex = true;
  std::string failure;  // evaluation failure, empty when fine
};

struct AdmissibilityReport {
  bool positive_at_origin = false;
  std::vector<SampleCheck> samples;
  /// Blow-up (singular) or superlinearity (regular) along the schedule. For
  /// regular f this is a finite-sample proxy of f(t)/t -> infinity.
  bool growth = false;
  std::string growth_detail;
  bool pass = false;
};

AdmissibilityReport check_admissibility(const Nonlinearity& nl, const SamplingSpec& spec = {});

// ---------------------------------------------------------------------------
// Derived scalar functions.

/// F(t) = int_0^t f. Closed form when available, else adaptive quadrature at
/// relative tolerance 1e-10.
double eval_F(const Nonlinearity& nl, double t);
/// f(t) - f(0).
double eval_f_tilde(const Nonlinearity& nl, double t);
/// sqrt(2 max(F(t) - t, 0)).
double eval_g(const Nonlinearity& nl, double t);
/// H(t) = int_0^t f''(s) sqrt(F(s)) ds, relative tolerance 1e-8.
double eval_H(const Nonlinearity& nl, double t);

/// Cumulative table for H on [0, upper]; used where H is needed at many points.
CumulativeIntegral make_H_table(const Nonlinearity& nl, double upper, int panels = 1024);

// ---------------------------------------------------------------------------
// Curvature exponents.

struct TauEstimate {
  double tau_minus = 0.0;
  double tau_plus = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, f f''/f'^2)
  std::vector<double> extrapolated;
  bool converged = false;
  double tolerance = 1e-8;
};

TauEstimate estimate_tau(const Nonlinearity& nl, const SamplingSpec& spec = {},
                         double tolerance = 1e-8);

/// True when F(t) grows without bound as t -> a_f.
bool check_F_blowup(const Nonlinearity& nl);

struct WeakConvexityReport {
  bool holds = false;
  double epsilon = 0.0;
  double tail_min = 0.0;        // smallest sampled value in the tail
  double extrapolated = 0.0;    // intercept of a fit against 1/log t
  std::vector<std::pair<double, double>> samples;
  std::string conclusion;       // "bounded for n <= 7" when holds
};

/// Tail check of f^{1+eps/4} f'' / f'^2 staying above a positive margin.
WeakConvexityReport check_weak_convexity_tail(const Nonlinearity& nl, double epsilon,
                                      double margin = 1e-2);

}  // namespace extremal
