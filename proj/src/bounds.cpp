#include "extremal/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extremal/error.hpp"

namespace extremal {

double QuarticPoly::scale() const noexcept {
  return std::max({std::abs(c4), std::abs(c2), std::abs(c1), std::abs(c0)});
}

QuarticPoly build_poly(double tau_minus, double tau_plus) {
  if (!(tau_minus > 0.0)) throw DomainError("tau_minus must be positive");
  if (!(tau_plus < 2.0)) throw DomainError("tau_plus must be below 2");
  if (!(tau_minus <= tau_plus)) throw DomainError("tau_minus must not exceed tau_plus");
  QuarticPoly q;
  q.c4 = (2.0 - tau_minus) * (2.0 - tau_minus);
  q.c2 = -8.0 * (2.0 - tau_plus);
  q.c1 = 4.0 * (4.0 - 3.0 * tau_plus);
  q.c0 = -4.0 * (1.0 - tau_plus);
  q.provenance = PolyProvenance::General;
  q.source = {tau_minus, tau_plus};
  return q;
}

QuarticPoly build_poly_power(double p) {
  if (!(p > 1.0)) throw DomainError("power quartic requires p > 1");
  QuarticPoly q;
  q.c4 = (p + 1.0) * (p + 1.0);
  q.c2 = -8.0 * p * (p + 1.0);
  q.c1 = 4.0 * p * (p + 3.0);
  q.c0 = -4.0 * p;
  q.provenance = PolyProvenance::PowerCase;
  q.source = {p};
  return q;
}

QuarticPoly build_poly_singular_power(double p) {
  if (!(p > 1.0)) throw DomainError("singular-power quartic requires p > 1");
  const double s = p + 1.0;
  QuarticPoly q;
  q.c4 = 1.0;
  q.c2 = -8.0 * p * (p - 1.0) / (s * s);
  q.c1 = 4.0 * p * (p - 1.0) * (p - 3.0) / (s * s * s);
  q.c0 = 4.0 * p * (p - 1.0) * (p - 1.0) / (s * s * s * s);
  q.provenance = PolyProvenance::SingularPowerCase;
  q.source = {p};
  return q;
}

namespace {

// Both are upper bounds on the modulus of every root; the smaller is used.
double root_modulus_bound(const QuarticPoly& q) {
  const double a = std::abs(q.c4);
  const double cauchy = 1.0 + std::max({std::abs(q.c2), std::abs(q.c1), std::abs(q.c0)}) / a;
  const double fujiwara = 2.0 * std::max({std::sqrt(std::abs(q.c2) / a),
                                          std::cbrt(std::abs(q.c1) / a),
                                          std::pow(std::abs(q.c0) / (2.0 * a), 0.25)});
  return std::min(cauchy, fujiwara);
}

}  // namespace

RootResult largest_root(const QuarticPoly& poly, const RootOptions& opts) {
  if (!(poly.c4 > 0.0)) throw InconsistentInput("leading coefficient must be positive");
  if (opts.scan_from >= 1.0 && !(poly(1.0) < 0.0)) {
    throw InconsistentInput("P(1) = " + std::to_string(poly(1.0)) +
                            " is not negative; no root above 1 is guaranteed");
  }
  const double upper = 1.0 + std::max(1.0, root_modulus_bound(poly));
  RootResult res;
  const auto steps = static_cast<long>(std::ceil((upper - opts.scan_from) / opts.scan_step));
  double a = opts.scan_from;
  double pa = poly(a);
  for (long i = 1; i <= steps; ++i) {
    const double b = std::min(upper, opts.scan_from + static_cast<double>(i) * opts.scan_step);
    const double pb = poly(b);
    if (pa == 0.0 && a > opts.scan_from) {
      res.roots.push_back(a);
    } else if ((pa < 0.0) != (pb < 0.0) && pb != 0.0) {
      double lo = a;
      double hi = b;
      double plo = pa;
      while (hi - lo > opts.bisect_width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double pm = poly(mid);
        if ((pm < 0.0) == (plo < 0.0)) {
          lo = mid;
          plo = pm;
        } else {
          hi = mid;
        }
      }
      res.roots.push_back(0.5 * (lo + hi));
      res.bracket_lo = lo;
      res.bracket_hi = hi;
    }
    a = b;
    pa = pb;
  }
  if (res.roots.empty()) {
    throw InconsistentInput("no sign change of the quartic found on the scan range");
  }
  res.alpha_star = res.roots.back();
  if (res.bracket_hi < res.alpha_star) res.bracket_lo = res.bracket_hi = res.alpha_star;
  res.width = res.bracket_hi - res.bracket_lo;
  return res;
}

int largest_integer_below(double n) { return static_cast<int>(std::ceil(n)) - 1; }

DimensionBound dimension_bound(double alpha_star, double tau_plus, Kind kind) {
  if (!(alpha_star > 1.0)) throw DomainError("alpha_star must exceed 1");
  if (!(tau_plus > 0.0 && tau_plus < 2.0)) throw DomainError("tau_plus must lie in (0, 2)");
  DimensionBound b;
  b.kind = kind;
  b.n_quartic = (4.0 * alpha_star * (2.0 - tau_plus) + 2.0 * tau_plus) / tau_plus;
  if (kind == Kind::Regular) b.n_quartic *= std::max(1.0, tau_plus);
  b.n_8tau = 8.0 / tau_plus;
  b.n_combined = std::max(b.n_quartic, b.n_8tau);
  b.max_dim = largest_integer_below(b.n_combined);
  return b;
}

PipelineReport bound_pipeline(const Nonlinearity& nl) {
  PipelineReport rep;
  rep.tau = estimate_tau(nl);
  if (!rep.tau.converged) {
    throw NonConvergence("tau estimate for " + nl.name() + " did not converge");
  }
  if (!(rep.tau.tau_minus > 0.0) || !(rep.tau.tau_plus < 2.0)) {
    throw DomainError("tau estimate outside 0 < tau_minus <= tau_plus < 2 for " + nl.name());
  }
  rep.poly = build_poly(rep.tau.tau_minus, rep.tau.tau_plus);
  rep.root = largest_root(rep.poly);
  rep.bound = dimension_bound(rep.root.alpha_star, rep.tau.tau_plus, nl.kind());
  return rep;
}

// ---------------------------------------------------------------------------

double alpha_of_tau(AlphaFormula formula, double tau) {
  const double base = 5.0 * tau / (2.0 - tau);
  return formula == AlphaFormula::A ? base / 2.0 : base / 4.0;
}

NegativityCertificate certify_negativity(const std::function<double(double)>& alpha_of,
                                         double tau_lo, double tau_hi, double grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  if (!(tau_lo > 0.0 && tau_lo <= tau_hi && tau_hi < 2.0)) {
    throw DomainError("certificate interval must satisfy 0 < tau_lo <= tau_hi < 2");
  }
  NegativityCertificate cert;
  cert.tau_lo = tau_lo;
  cert.tau_hi = tau_hi;
  cert.grid_step = grid_step;
  cert.min_margin = std::numeric_limits<double>::infinity();

  auto visit = [&](double tau, bool record) {
    const double value = build_poly(tau, tau)(alpha_of(tau));
    if (record) cert.grid.emplace_back(tau, value);
    ++cert.points;
    const double margin = std::isnan(value) ? -std::numeric_limits<double>::infinity() : -value;
    if (margin < cert.min_margin) {
      cert.min_margin = margin;
      cert.argmin_tau = tau;
    }
  };

  const auto steps = static_cast<long>(std::floor((tau_hi - tau_lo) / grid_step + 1e-9));
  for (long i = 0; i <= steps; ++i) visit(tau_lo + static_cast<double>(i) * grid_step, true);
  if (tau_lo + static_cast<double>(steps) * grid_step < tau_hi) visit(tau_hi, true);

  const double center = cert.argmin_tau;
  const double fine = grid_step / 100.0;
  for (int j = -100; j <= 100; ++j) {
    const double tau = center + j * fine;
    if (tau < tau_lo || tau > tau_hi || j == 0) continue;
    visit(tau, false);
  }
  cert.certified = cert.min_margin > 0.0;
  return cert;
}

NegativityCertificate certify_negativity(AlphaFormula formula, double tau_lo, double tau_hi,
                                         double grid_step) {
  return certify_negativity([formula](double tau) { return alpha_of_tau(formula, tau); }, tau_lo,
                            tau_hi, grid_step);
}

// ---------------------------------------------------------------------------

namespace {

double tau_of(double parameter, Kind kind, ScanParameter scan) {
  if (scan == ScanParameter::Tau) return parameter;
  return kind == Kind::Regular ? (parameter - 1.0) / parameter : (parameter + 1.0) / parameter;
}

struct ScanRange {
  double lo;
  double hi;
  bool logarithmic;
};

ScanRange scan_range(ScanParameter scan) {
  if (scan == ScanParameter::Tau) return {0.05, 1.99, false};
  return {1.001, 1.0e4, true};
}

}  // namespace

double n_quartic_of(double parameter, Kind kind, ScanParameter scan) {
  const double tau = tau_of(parameter, kind, scan);
  const RootResult root = largest_root(build_poly(tau, tau));
  return dimension_bound(root.alpha_star, tau, kind).n_quartic;
}

ThresholdResult threshold_solve(int target_dim, Kind kind, ScanParameter scan) {
  if (target_dim < 2) throw DomainError("target dimension must be at least 2");
  const ScanRange range = scan_range(scan);
  constexpr int kGrid = 400;
  std::vector<double> xs(kGrid + 1);
  std::vector<double> ns(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    const double s = static_cast<double>(i) / kGrid;
    xs[i] = range.logarithmic ? range.lo * std::pow(range.hi / range.lo, s)
                              : range.lo + s * (range.hi - range.lo);
    ns[i] = n_quartic_of(xs[i], kind, scan);
  }
  const bool increasing = ns.back() > ns.front();
  for (int i = 1; i <= kGrid; ++i) {
    if ((ns[i] > ns[i - 1]) != increasing || ns[i] == ns[i - 1]) {
      throw InconsistentInput("n_quartic is not monotone on the scan range near parameter " +
                              std::to_string(xs[i]));
    }
  }
  const double target = static_cast<double>(target_dim);
  int bracket = -1;
  for (int i = 1; i <= kGrid; ++i) {
    if ((ns[i - 1] - target) * (ns[i] - target) <= 0.0) {
      bracket = i;
      break;
    }
  }
  if (bracket < 0) {
    throw DomainError("target dimension " + std::to_string(target_dim) +
                      " not reached on the scan range [" + std::to_string(ns.front()) + ", " +
                      std::to_string(ns.back()) + "]");
  }
  double lo = xs[bracket - 1];
  double hi = xs[bracket];
  double nlo = ns[bracket - 1];
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double nm = n_quartic_of(mid, kind, scan);
    if ((nm - target > 0.0) == (nlo - target > 0.0)) {
      lo = mid;
      nlo = nm;
    } else {
      hi = mid;
    }
  }
  ThresholdResult r;
  r.parameter = 0.5 * (lo + hi);
  r.lo = lo;
  r.hi = hi;
  r.tau = tau_of(r.parameter, kind, scan);
  r.n_quartic = n_quartic_of(r.parameter, kind, scan);
  for (int i = 0; i <= kGrid; ++i) r.grid.emplace_back(xs[i], ns[i]);
  return r;
}

}  // namespace extremal
