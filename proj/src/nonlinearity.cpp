#include "extremal/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "extremal/error.hpp"

namespace extremal {

std::string to_string(Kind kind) { return kind == Kind::Regular ? "regular" : "singular"; }

Nonlinearity::Nonlinearity(std::string name, Kind kind, double a_f, ScalarFn f, ScalarFn df,
                           ScalarFn d2f, ClosedForms closed)
    : name_(std::move(name)),
      kind_(kind),
      a_f_(a_f),
      f_(std::move(f)),
      df_(std::move(df)),
      d2f_(std::move(d2f)),
      closed_(std::move(closed)) {
  if (kind == Kind::Regular && !std::isinf(a_f)) {
    throw DomainError("regular nonlinearity must have a_f = +inf");
  }
  if (kind == Kind::Singular && !(std::isfinite(a_f) && a_f > 0.0)) {
    throw DomainError("singular nonlinearity needs a finite a_f > 0");
  }
  if (!f_ || !df_ || !d2f_) throw DomainError("nonlinearity callbacks must be set");
}

double Nonlinearity::ratio(double t) const {
  if (closed_.constant_ratio) return *closed_.constant_ratio;
  if (closed_.ratio) return (*closed_.ratio)(t);
  const double d1 = df_(t);
  return f_(t) * d2f_(t) / (d1 * d1);
}

double Nonlinearity::log_f(double t) const {
  if (closed_.log_f) return (*closed_.log_f)(t);
  return std::log(f_(t));
}

namespace {

void require_domain(const Nonlinearity& nl, double t) {
  if (!nl.in_domain(t)) {
    throw DomainError("t = " + std::to_string(t) + " outside [0, a_f) for " + nl.name());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> sample_points(const Nonlinearity& nl, const SamplingSpec& spec) {
  std::vector<double> ts;
  if (nl.singular()) {
    const int lo = spec.k_min < 0 ? 1 : spec.k_min;
    const int hi = spec.k_max < 0 ? 12 : spec.k_max;
    for (int k = lo; k <= hi; ++k) ts.push_back(nl.a_f() * (1.0 - std::pow(10.0, -k)));
  } else {
    const int lo = spec.k_min < 0 ? 0 : spec.k_min;
    const int hi = spec.k_max < 0 ? 8 : spec.k_max;
    for (int k = lo; k <= hi; ++k) ts.push_back(std::pow(10.0, k));
  }
  return ts;
}

namespace {

bool overflowed(double x, double guard) { return !std::isfinite(x) || std::abs(x) > guard; }

/// Finite-sample proxy for "x_k -> +infinity": either the sequence overflowed,
/// or it is increasing and its last increments do not decay geometrically.
bool grows_without_bound(const std::vector<double>& xs) {
  if (xs.empty()) return false;
  if (std::isinf(xs.back()) && xs.back() > 0) return true;
  if (xs.size() < 4) return false;
  const std::size_t n = xs.size();
  for (std::size_t i = n - 3; i < n; ++i) {
    const double prev = xs[i] - xs[i - 1];
    if (!(prev > 0.0)) return false;
    if (i + 1 < n) {
      const double next = xs[i + 1] - xs[i];
      if (next < 0.9 * prev) return false;
    }
  }
  return true;
}

}  // namespace

AdmissibilityReport check_admissibility(const Nonlinearity& nl, const SamplingSpec& spec) {
  AdmissibilityReport rep;
  const double f0 = nl.f(0.0);
  rep.positive_at_origin = std::isfinite(f0) && f0 > 0.0;

  std::vector<double> ts;
  const double start = nl.singular() ? 0.9 * nl.a_f() : 1.0;
  for (int i = 0; i < 10; ++i) ts.push_back(start * i / 10.0);
  for (double t : sample_points(nl, spec)) ts.push_back(t);

  bool all_ok = true;
  std::vector<double> growth;  // f (singular) or f(t)/t (regular) along the schedule
  const auto tail = sample_points(nl, spec);
  for (double t : ts) {
    SampleCheck s;
    s.t = t;
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    try {
      v0 = nl.f(t);
      v1 = nl.df(t);
      v2 = nl.d2f(t);
    } catch (const std::exception& e) {
      s.evaluated = false;
      s.failure = e.what();
    }
    if (s.evaluated) {
      if (std::isnan(v0) || std::isnan(v1) || std::isnan(v2)) {
        s.evaluated = false;
        s.failure = "NaN";
      } else if (overflowed(v0, spec.overflow_guard) || overflowed(v1, spec.overflow_guard) ||
                 overflowed(v2, spec.overflow_guard)) {
        // Past the overflow guard: counts toward growth but not as a failure.
        s.failure = "overflow";
        if (std::find(tail.begin(), tail.end(), t) != tail.end()) {
          growth.push_back(std::numeric_limits<double>::infinity());
        }
        rep.samples.push_back(s);
        continue;
      }
    }
    if (s.evaluated) {
      s.increasing = v1 >= 0.0;
      s.convex = v2 >= 0.0;
      if (std::find(tail.begin(), tail.end(), t) != tail.end() && t > 0.0) {
        growth.push_back(nl.singular() ? v0 : v0 / t);
      }
    }
    all_ok = all_ok && s.evaluated && s.increasing && s.convex;
    rep.samples.push_back(s);
  }
  // Stop at the first overflow; later samples add nothing.
  if (auto it = std::find_if(growth.begin(), growth.end(), [](double x) { return std::isinf(x); });
      it != growth.end()) {
    growth.erase(it + 1, growth.end());
  }
  rep.growth = grows_without_bound(growth);
  rep.growth_detail = nl.singular() ? "f(t) unbounded as t -> a_f"
                                    : "f(t)/t unbounded along t = 10^k (finite-sample proxy)";
  rep.pass = rep.positive_at_origin && all_ok && rep.growth;
  return rep;
}

// ---------------------------------------------------------------------------

double eval_F(const Nonlinearity& nl, double t) {
  require_domain(nl, t);
  if (t == 0.0) return 0.0;
  if (nl.closed_forms().antiderivative) return (*nl.closed_forms().antiderivative)(t);
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  return adaptive_simpson([&](double s) { return nl.f(s); }, 0.0, t, opts);
}

double eval_f_tilde(const Nonlinearity& nl, double t) {
  require_domain(nl, t);
  return nl.f(t) - nl.f(0.0);
}

double eval_g(const Nonlinearity& nl, double t) {
  const double d = eval_F(nl, t) - t;
  return std::sqrt(2.0 * std::max(d, 0.0));
}

double eval_H(const Nonlinearity& nl, double t) {
  require_domain(nl, t);
  if (t == 0.0) return 0.0;
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  auto integrand = [&](double s) { return nl.d2f(s) * std::sqrt(eval_F(nl, s)); };
  return adaptive_simpson(integrand, 0.0, t, opts);
}

CumulativeIntegral make_H_table(const Nonlinearity& nl, double upper, int panels) {
  if (!(upper >= 0.0) || !nl.in_domain(upper)) throw DomainError("H table upper bound out of domain");
  // F on the same grid is cheap when a closed form exists; otherwise build
  // its table first so the H integrand does not nest quadratures.
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  std::shared_ptr<CumulativeIntegral> f_table;
  if (!nl.closed_forms().antiderivative) {
    f_table = std::make_shared<CumulativeIntegral>([nl](double s) { return nl.f(s); }, upper,
                                                   panels, 1.0, opts);
  }
  auto integrand = [nl, f_table](double s) {
    const double F = f_table ? (*f_table)(s) : (*nl.closed_forms().antiderivative)(s);
    return nl.d2f(s) * std::sqrt(std::max(F, 0.0));
  };
  opts.rel_tol = 1e-9;
  return CumulativeIntegral(integrand, upper, panels, 1.0, opts);
}

// ---------------------------------------------------------------------------

TauEstimate estimate_tau(const Nonlinearity& nl, const SamplingSpec& spec, double tolerance) {
  TauEstimate est;
  est.tolerance = tolerance;
  const bool have_closed_ratio =
      nl.closed_forms().ratio.has_value() || nl.closed_forms().constant_ratio.has_value();
  for (double t : sample_points(nl, spec)) {
    if (!have_closed_ratio) {
      const double v0 = nl.f(t);
      const double v1 = nl.df(t);
      const double v2 = nl.d2f(t);
      if (overflowed(v0, spec.overflow_guard) || overflowed(v1, spec.overflow_guard) ||
          overflowed(v2, spec.overflow_guard)) {
        break;
      }
    }
    const double r = nl.ratio(t);
    if (!std::isfinite(r)) break;
    est.samples.emplace_back(t, r);
  }

  if (nl.closed_forms().constant_ratio) {
    est.tau_minus = est.tau_plus = *nl.closed_forms().constant_ratio;
    est.extrapolated.assign(1, est.tau_plus);
    est.converged = true;
    return est;
  }
  if (est.samples.empty()) return est;

  const std::size_t n = est.samples.size();
  const std::size_t first = n > 5 ? n - 5 : 0;
  std::vector<double> tail;
  for (std::size_t i = first; i < n; ++i) tail.push_back(est.samples[i].second);

  const auto [raw_lo, raw_hi] = std::minmax_element(tail.begin(), tail.end());
  const double scale = std::max(1.0, std::abs(tail.back()));
  double spread = *raw_hi - *raw_lo;
  if (spread <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    est.tau_minus = std::max(0.0, *raw_lo);
    est.tau_plus = std::max(est.tau_minus, *raw_hi);
    est.extrapolated = tail;
    est.converged = true;
    return est;
  }

  // Richardson extrapolation against a geometric error term with rate
  // estimated from consecutive differences (Aitken delta-squared).
  bool diverged = tail.size() < 3;
  for (std::size_t j = 0; j + 2 < tail.size(); ++j) {
    const double d1 = tail[j + 1] - tail[j];
    const double d2 = tail[j + 2] - tail[j + 1];
    if (d1 == 0.0) {
      est.extrapolated.push_back(tail[j + 2]);
      continue;
    }
    const double rho = d2 / d1;
    if (!(std::abs(rho) < 1.0)) {
      diverged = true;
      break;
    }
    est.extrapolated.push_back(tail[j + 2] + d2 * rho / (1.0 - rho));
  }
  if (diverged || est.extrapolated.empty()) {
    est.extrapolated.clear();
    est.tau_minus = std::max(0.0, *raw_lo);
    est.tau_plus = std::max(est.tau_minus, *raw_hi);
    est.converged = false;
    return est;
  }
  const auto [lo, hi] = std::minmax_element(est.extrapolated.begin(), est.extrapolated.end());
  est.tau_minus = std::max(0.0, *lo);
  est.tau_plus = std::max(est.tau_minus, *hi);
  spread = *hi - *lo;
  est.converged = spread < tolerance;
  return est;
}

bool check_F_blowup(const Nonlinearity& nl) {
  std::vector<double> ts;
  if (nl.singular()) {
    ts = sample_points(nl);
  } else {
    for (int k = 0; k <= 6; ++k) ts.push_back(10.0 * std::pow(2.0, k));
  }
  std::vector<double> values;
  for (double t : ts) {
    double F = 0.0;
    try {
      F = eval_F(nl, t);
    } catch (const QuadratureError&) {
      F = std::numeric_limits<double>::infinity();
    }
    if (std::isnan(F)) return false;
    values.push_back(F);
    if (std::isinf(F)) break;
  }
  return grows_without_bound(values);
}

WeakConvexityReport check_weak_convexity_tail(const Nonlinearity& nl, double epsilon,
                                              double margin) {
  if (nl.singular()) throw DomainError("tail convexity check applies to regular nonlinearities");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in [0, 1)");
  WeakConvexityReport rep;
  rep.epsilon = epsilon;
  for (double t : sample_points(nl)) {
    const double value = nl.ratio(t) * std::exp(0.25 * epsilon * nl.log_f(t));
    if (!std::isfinite(value)) break;
    rep.samples.emplace_back(t, value);
  }
  if (rep.samples.empty()) return rep;

  const std::size_t n = rep.samples.size();
  const std::size_t first = n > 5 ? n - 5 : 0;
  rep.tail_min = std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = first; i < n; ++i) {
    const auto [t, y] = rep.samples[i];
    rep.tail_min = std::min(rep.tail_min, y);
    if (t <= 1.0) continue;
    const double x = 1.0 / std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2 && (m * sxx - sx * sx) > 0.0) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.extrapolated = (sy - slope * sx) / m;
  } else {
    rep.extrapolated = rep.tail_min;
  }
  rep.holds = rep.tail_min > margin && rep.extrapolated > margin;
  if (rep.holds) rep.conclusion = "bounded for n <= 7";
  return rep;
}

}  // namespace extremal
