#include "extremal/quadrature.hpp"

#include <algorithm>
#include <utility>

namespace extremal {

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> integrand, double upper,
                                       int panels, double origin_power, QuadratureOptions opts)
    : integrand_(std::move(integrand)),
      upper_(upper),
      origin_power_(origin_power),
      opts_(opts) {
  if (!(upper >= 0.0) || panels < 1) {
    throw DomainError("cumulative table needs upper >= 0 and at least one panel");
  }
  if (origin_power < 1.0) throw DomainError("origin_power must be >= 1");
  width_ = upper / panels;
  table_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
  if (upper == 0.0) return;
  table_[1] = integrate_from_origin(width_);
  for (int k = 1; k < panels; ++k) {
    const double a = k * width_;
    const double b = (k + 1 == panels) ? upper : a + width_;
    table_[k + 1] = table_[k] + adaptive_simpson(integrand_, a, b, opts_);
  }
}

double CumulativeIntegral::integrate_from_origin(double t) const {
  if (t <= 0.0) return 0.0;
  if (origin_power_ == 1.0) return adaptive_simpson(integrand_, 0.0, t, opts_);
  const double m = origin_power_;
  auto transformed = [&](double w) {
    if (w <= 0.0) return 0.0;
    return integrand_(t * std::pow(w, m)) * t * m * std::pow(w, m - 1.0);
  };
  return adaptive_simpson(transformed, 0.0, 1.0, opts_);
}

double CumulativeIntegral::operator()(double t) const {
  if (t < 0.0 || t > upper_ * (1.0 + 1e-12)) {
    throw DomainError("cumulative table lookup outside [0, upper]");
  }
  if (t <= 0.0 || upper_ == 0.0) return 0.0;
  const int last = panels();
  const int k = std::min(last - 1, static_cast<int>(t / width_));
  if (k == 0) return integrate_from_origin(t);
  const double a = k * width_;
  return table_[k] + adaptive_simpson(integrand_, a, t, opts_);
}

}  // namespace extremal
