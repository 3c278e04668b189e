#include <cmath>
#include <limits>
#include <string>

#include "extremal/error.hpp"
#include "extremal/nonlinearity.hpp"

namespace extremal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_param(const std::string& name, const std::vector<double>& params,
                     const char* label) {
  if (params.size() != 1) {
    throw DomainError(name + " expects exactly one parameter (" + label + ")");
  }
  return params[0];
}

Nonlinearity make_exp() {
  ClosedForms c;
  c.antiderivative = [](double t) { return std::expm1(t); };
  c.constant_ratio = 1.0;
  c.log_f = [](double t) { return t; };
  auto e = [](double t) { return std::exp(t); };
  return {"exp", Kind::Regular, kInf, e, e, e, c};
}

// f(t) = exp(t^a). f f''/f'^2 = 1 + (a - 1) / (a t^a).
Nonlinearity make_exp_pow(double a) {
  if (!(a > 0.0)) throw DomainError("exp_pow exponent must be positive");
  auto f = [a](double t) { return std::exp(std::pow(t, a)); };
  auto df = [a](double t) {
    if (t == 0.0) return a == 1.0 ? 1.0 : (a > 1.0 ? 0.0 : kInf);
    return a * std::pow(t, a - 1.0) * std::exp(std::pow(t, a));
  };
  auto d2f = [a](double t) {
    if (t == 0.0) {
      if (a == 1.0 || a == 2.0) return a;  // exp(t): 1, exp(t^2): 2
      return a > 2.0 ? 0.0 : (a > 1.0 ? kInf : -kInf);
    }
    const double ta = std::pow(t, a);
    return std::exp(ta) * (a * a * std::pow(t, 2.0 * a - 2.0) + a * (a - 1.0) * std::pow(t, a - 2.0));
  };
  ClosedForms c;
  c.ratio = [a](double t) { return 1.0 + (a - 1.0) / (a * std::pow(t, a)); };
  c.log_f = [a](double t) { return std::pow(t, a); };
  if (a == 1.0) {
    c.antiderivative = [](double t) { return std::expm1(t); };
    c.constant_ratio = 1.0;
  }
  return {"exp_pow", Kind::Regular, kInf, f, df, d2f, c};
}

// f(t) = (1 + t)^p, ratio (p - 1)/p.
Nonlinearity make_power(double p) {
  if (!(p > 1.0)) throw DomainError("power family requires p > 1");
  ClosedForms c;
  c.antiderivative = [p](double t) { return std::expm1((p + 1.0) * std::log1p(t)) / (p + 1.0); };
  c.constant_ratio = (p - 1.0) / p;
  c.log_f = [p](double t) { return p * std::log1p(t); };
  return {"power",
          Kind::Regular,
          kInf,
          [p](double t) { return std::pow(1.0 + t, p); },
          [p](double t) { return p * std::pow(1.0 + t, p - 1.0); },
          [p](double t) { return p * (p - 1.0) * std::pow(1.0 + t, p - 2.0); },
          c};
}

// f(t) = (1 - t)^-p on [0, 1), ratio (p + 1)/p.
Nonlinearity make_singular_power(double p) {
  if (!(p > 1.0)) throw DomainError("singular_power family requires p > 1");
  ClosedForms c;
  c.antiderivative = [p](double t) {
    return std::expm1((1.0 - p) * std::log1p(-t)) / (p - 1.0);
  };
  c.constant_ratio = (p + 1.0) / p;
  c.log_f = [p](double t) { return -p * std::log1p(-t); };
  return {"singular_power",
          Kind::Singular,
          1.0,
          [p](double t) { return std::pow(1.0 - t, -p); },
          [p](double t) { return p * std::pow(1.0 - t, -p - 1.0); },
          [p](double t) { return p * (p + 1.0) * std::pow(1.0 - t, -p - 2.0); },
          c};
}

// Smooth convex blend equal to s log s (s = 1 + t) up to the constant 1.
// No closed-form F is attached, so F goes through quadrature.
Nonlinearity make_t_log_t() {
  ClosedForms c;
  c.ratio = [](double t) {
    const double L = std::log1p(t);
    return (1.0 + (1.0 + t) * L) / ((1.0 + t) * (L + 1.0) * (L + 1.0));
  };
  return {"t_log_t",
          Kind::Regular,
          kInf,
          [](double t) { return 1.0 + (1.0 + t) * std::log1p(t); },
          [](double t) { return std::log1p(t) + 1.0; },
          [](double t) { return 1.0 / (1.0 + t); },
          c};
}

// Second-order finite differences that stay inside [0, hi).
double fd_first(const ScalarFn& fn, double t, double hi) {
  const double h = 1e-5 * std::max(1.0, std::abs(t));
  if (t - h >= 0.0 && t + h < hi) return (fn(t + h) - fn(t - h)) / (2.0 * h);
  if (t - h < 0.0) return (-3.0 * fn(t) + 4.0 * fn(t + h) - fn(t + 2.0 * h)) / (2.0 * h);
  return (3.0 * fn(t) - 4.0 * fn(t - h) + fn(t - 2.0 * h)) / (2.0 * h);
}

double fd_second(const ScalarFn& fn, double t, double hi) {
  const double h = 1e-4 * std::max(1.0, std::abs(t));
  if (t - h >= 0.0 && t + h < hi) return (fn(t + h) - 2.0 * fn(t) + fn(t - h)) / (h * h);
  if (t - h < 0.0) {
    return (2.0 * fn(t) - 5.0 * fn(t + h) + 4.0 * fn(t + 2.0 * h) - fn(t + 3.0 * h)) / (h * h);
  }
  return (2.0 * fn(t) - 5.0 * fn(t - h) + 4.0 * fn(t - 2.0 * h) - fn(t - 3.0 * h)) / (h * h);
}

void validate_derivative(const std::string& label, const ScalarFn& fn, const ScalarFn& deriv,
                         Kind kind, double a_f) {
  const double span = kind == Kind::Singular ? a_f : 4.0;
  // Keep the probes well inside the domain so the stencil stays smooth.
  const double limit = kind == Kind::Singular ? 0.9 * a_f : std::numeric_limits<double>::infinity();
  for (double frac : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8}) {
    const double t = frac * span;
    if (t >= limit) continue;
    const double expected = fd_first(fn, t, kind == Kind::Singular ? a_f : kInf);
    const double got = deriv(t);
    const double scale = std::max({std::abs(expected), std::abs(got), 1e-8});
    if (!(std::abs(expected - got) <= 1e-4 * scale)) {
      throw DomainError(label + " disagrees with finite differences at t = " + std::to_string(t) +
                        " (" + std::to_string(got) + " vs " + std::to_string(expected) + ")");
    }
  }
}

}  // namespace

Nonlinearity make_builtin(const std::string& name, const std::vector<double>& params) {
  if (name == "exp") {
    if (!params.empty()) throw DomainError("exp takes no parameters");
    return make_exp();
  }
  if (name == "exp_pow") return make_exp_pow(require_param(name, params, "alpha"));
  if (name == "power") return make_power(require_param(name, params, "p"));
  if (name == "singular_power") return make_singular_power(require_param(name, params, "p"));
  if (name == "t_log_t") {
    if (!params.empty()) throw DomainError("t_log_t takes no parameters");
    return make_t_log_t();
  }
  throw DomainError("unknown nonlinearity family '" + name + "'");
}

Nonlinearity make_custom(std::string name, Kind kind, double a_f, ScalarFn f,
                         std::optional<ScalarFn> df, std::optional<ScalarFn> d2f) {
  if (!f) throw DomainError("custom nonlinearity needs f");
  const double hi = kind == Kind::Singular ? a_f : kInf;
  if (kind == Kind::Singular && !(std::isfinite(a_f) && a_f > 0.0)) {
    throw DomainError("singular nonlinearity needs a finite a_f > 0");
  }
  ScalarFn d1 = df ? *df : ScalarFn([f, hi](double t) { return fd_first(f, t, hi); });
  ScalarFn d2;
  if (d2f) {
    d2 = *d2f;
  } else if (df) {
    d2 = [d1, hi](double t) { return fd_first(d1, t, hi); };
  } else {
    d2 = [f, hi](double t) { return fd_second(f, t, hi); };
  }
  if (df) validate_derivative("f'", f, d1, kind, a_f);
  if (d2f) validate_derivative("f''", d1, d2, kind, a_f);
  return {std::move(name), kind, kind == Kind::Singular ? a_f : kInf, f, d1, d2};
}

}  // namespace extremal
