#pragma once

#include <functional>
#include <string>
#include <vector>

#include "extremal/nonlinearity.hpp"

namespace extremal {

enum class PolyProvenance { General, PowerCase, SingularPowerCase };

/// c4 a^4 + c2 a^2 + c1 a + c0; the cubic term is identically zero.
struct QuarticPoly {
  double c4 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  PolyProvenance provenance = PolyProvenance::General;
  /// (tau_minus, tau_plus) for General, p otherwise.
  std::vector<double> source;

  double operator()(double alpha) const noexcept {
    const double a2 = alpha * alpha;
    return (c4 * a2 + c2) * a2 + c1 * alpha + c0;
  }
  double scale() const noexcept;
};

/// (2 - tm)^2 a^4 - 8(2 - tp) a^2 + 4(4 - 3 tp) a - 4(1 - tp).
/// Requires 0 < tau_minus <= tau_plus < 2.
QuarticPoly build_poly(double tau_minus, double tau_plus);
/// Same roots as build_poly((p-1)/p, (p-1)/p), coefficients scaled by p^2.
QuarticPoly build_poly_power(double p);
/// Roots are (p-1)/(p+1) times those of build_poly((p+1)/p, (p+1)/p).
QuarticPoly build_poly_singular_power(double p);

struct RootResult {
  std::vector<double> roots;  // sorted, all in (1, upper]
  double alpha_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double width = 0.0;
};

struct RootOptions {
  double scan_step = 1e-3;
  double bisect_width = 1e-12;
  /// Scan start; 1 for the dimension bound, 0 for rescaled polynomials whose
  /// roots may lie below 1.
  double scan_from = 1.0;
};

/// Scan for sign changes up to the Cauchy bound and bisect each bracket.
/// Throws InconsistentInput when no sign change exists (which, for build_poly
/// output, would contradict P(1) < 0).
RootResult largest_root(const QuarticPoly& poly, const RootOptions& opts = {});

struct DimensionBound {
  double n_quartic = 0.0;
  double n_8tau = 0.0;
  double n_combined = 0.0;
  int max_dim = 0;
  Kind kind = Kind::Regular;
};

/// Largest integer strictly below n.
int largest_integer_below(double n);

DimensionBound dimension_bound(double alpha_star, double tau_plus, Kind kind);

struct PipelineReport {
  TauEstimate tau;
  QuarticPoly poly;
  RootResult root;
  DimensionBound bound;
};

/// tau estimate -> quartic -> largest root -> dimension bound.
/// Throws NonConvergence when the tau estimate does not converge and
/// DomainError when the exponents fall outside 0 < tau_minus, tau_plus < 2.
PipelineReport bound_pipeline(const Nonlinearity& nl);

/// Test values of alpha as functions of tau used to certify alpha* > alpha.
enum class AlphaFormula {
  A,  // 5 tau / (2 (2 - tau))
  B,  // 5 tau / (4 (2 - tau))
};

double alpha_of_tau(AlphaFormula formula, double tau);

struct NegativityCertificate {
  bool certified = false;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double grid_step = 0.0;
  std::size_t points = 0;
  /// min over the grid of -P(alpha(tau), tau, tau); positive when certified.
  double min_margin = 0.0;
  double argmin_tau = 0.0;
  std::vector<std::pair<double, double>> grid;  // (tau, P)
};

/// Evaluates P(alpha(tau), tau, tau) on tau_lo, tau_lo + step, ..., tau_hi
/// (tau_hi always included), then refines by 100x around the smallest margin.
NegativityCertificate certify_negativity(const std::function<double(double)>& alpha_of,
                                         double tau_lo, double tau_hi, double grid_step);
NegativityCertificate certify_negativity(AlphaFormula formula, double tau_lo, double tau_hi,
                                         double grid_step = 1e-3);

enum class ScanParameter { Tau, P };

struct ThresholdResult {
  double parameter = 0.0;
  double tau = 0.0;
  double n_quartic = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::pair<double, double>> grid;  // (parameter, n_quartic) monotonicity scan
};

/// n_quartic as a function of tau (TauScan, tau_minus = tau_plus = tau) or of
/// p (PScan: power for Regular, singular_power for Singular).
double n_quartic_of(double parameter, Kind kind, ScanParameter scan);

/// Critical parameter where n_quartic = target_dim. Monotonicity of the map
/// is checked on the scan range first (InconsistentInput if violated);
/// DomainError when the target is not reached in range.
ThresholdResult threshold_solve(int target_dim, Kind kind, ScanParameter scan);

}  // namespace extremal
