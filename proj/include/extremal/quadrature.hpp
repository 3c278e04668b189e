#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "extremal/error.hpp"

namespace extremal {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-14;
  int max_depth = 50;
  int initial_panels = 8;
};

namespace detail {

template <class Fn>
double simpson_step(Fn& f, double a, double b, double fa, double fm, double fb,
                    double whole, double eps, int depth, const QuadratureOptions& opts) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) {
    throw QuadratureError("non-finite integrand value on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth >= opts.max_depth) {
    throw QuadratureError("adaptive Simpson did not converge near t = " + std::to_string(m));
  }
  const double half = std::max(0.5 * eps, 0.5 * opts.abs_floor);
  return simpson_step(f, a, m, fa, flm, fm, left, half, depth + 1, opts) +
         simpson_step(f, m, b, fm, frm, fb, right, half, depth + 1, opts);
}

}  // namespace detail

/// Adaptive Simpson quadrature with interval bisection and Richardson
/// correction. The target error is max(abs_floor, rel_tol * |I|), where |I|
/// is estimated from a composite rule on `initial_panels` panels.
template <class Fn>
double adaptive_simpson(Fn&& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, opts);

  const int panels = std::max(1, opts.initial_panels);
  const double width = (b - a) / panels;
  std::vector<double> xs(panels + 1);
  std::vector<double> fx(panels + 1);
  std::vector<double> fm(panels);
  std::vector<double> coarse(panels);
  double estimate = 0.0;
  for (int i = 0; i <= panels; ++i) {
    xs[i] = (i == panels) ? b : a + i * width;
    fx[i] = f(xs[i]);
  }
  for (int i = 0; i < panels; ++i) {
    fm[i] = f(0.5 * (xs[i] + xs[i + 1]));
    coarse[i] = (xs[i + 1] - xs[i]) / 6.0 * (fx[i] + 4.0 * fm[i] + fx[i + 1]);
    estimate += coarse[i];
  }
  if (!std::isfinite(estimate)) {
    throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  const double tol = std::max(opts.abs_floor, opts.rel_tol * std::abs(estimate));
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    total += detail::simpson_step(f, xs[i], xs[i + 1], fx[i], fm[i], fx[i + 1], coarse[i],
                                  tol / panels, 0, opts);
  }
  return total;
}

/// Composite trapezoid rule on `panels` equal panels. Used as a brute-force
/// reference for the adaptive rule.
template <class Fn>
double trapezoid(Fn&& f, double a, double b, long panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.5 * (f(a) + f(b));
  for (long i = 1; i < panels; ++i) sum += f(a + static_cast<double>(i) * h);
  return sum * h;
}

/// Table of t -> int_0^t g(s) ds on [0, upper] with equal panels.
///
/// Values between table nodes are completed by adaptive quadrature on the
/// partial panel, so lookups carry the quadrature tolerance rather than an
/// interpolation error. An integrable singularity at s = 0 is handled by the
/// substitution s = s1 * w^m on the first panel (m = `origin_power` > 1).
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> integrand, double upper, int panels,
                     double origin_power = 1.0, QuadratureOptions opts = {});

  double operator()(double t) const;

  double upper() const noexcept { return upper_; }
  int panels() const noexcept { return static_cast<int>(table_.size()) - 1; }

 private:
  double integrate_from_origin(double t) const;

  std::function<double(double)> integrand_;
  double upper_ = 0.0;
  double width_ = 0.0;
  double origin_power_ = 1.0;
  QuadratureOptions opts_;
  std::vector<double> table_;
};

}  // namespace extremal
