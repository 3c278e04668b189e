#pragma once

#include <string>
#include <vector>

#include "extremal/branch.hpp"
#include "extremal/quadrature.hpp"

namespace extremal {

/// min over the nodes of v - sqrt(lambda) g(u).
double check_pointwise_lower_bound(const RadialGrid& grid, const Nonlinearity& nl,
                                   const RadialState& state);

/// Theta(t) = int_0^t theta'(s)^2 ds for theta = f_tilde^alpha / f'^(alpha/2),
/// tabulated on [0, upper].
class ThetaTable {
 public:
  ThetaTable(const Nonlinearity& nl, double alpha, double upper, int panels = 4096);
  double operator()(double t) const;
  double upper() const noexcept { return upper_; }

 private:
  double upper_;
  CumulativeIntegral table_;
};

/// theta(t)^2 = f_tilde^(2 alpha) / f'^alpha.
double theta_squared(const Nonlinearity& nl, double alpha, double t);

struct KeyInequality {
  double alpha = 0.0;
  double lhs = 0.0;  // int sqrt(f') theta^2
  double rhs = 0.0;
  double j1 = 0.0;   // int f^(2 alpha) / f'^(alpha - 1/2)
  double j2 = 0.0;   // int Theta^(2 alpha/(2 alpha - 1)) / f'^(1/(2(2 alpha - 1)))
  bool holds(double rel = 1e-3) const { return lhs <= rhs * (1.0 + rel); }
};

struct DiagnosticsRecord {
  double lambda = 0.0;
  double int_f = 0.0;
  double int_neg_lap = 0.0;
  double energy = 0.0;  // int sqrt(F(u)) H(u)
  std::vector<double> q_list;
  std::vector<double> lq_fprime;
  std::vector<double> lq_f;
  KeyInequality key;
  double i_alpha = 0.0;  // int f_tilde^(2 alpha) / f'^(alpha - 1/2)
  double q1 = 0.0;       // alpha (2/tau_+ - 1) + 1/2
  double q2 = 0.0;       // alpha (2 - tau_+) + tau_+/2
  double lq1_fprime = 0.0;
  double lq2_f = 0.0;
  double pointwise_margin = 0.0;
};

struct DiagnosticsOptions {
  int theta_panels = 4096;
  int h_panels = 1024;
};

/// Every diagnostic of a converged state. tau_plus feeds q1 and q2; pass 0
/// to skip those two norms. DomainError for alpha <= 1/2 or an empty q_list.
DiagnosticsRecord diagnostics(const RadialGrid& grid, const Nonlinearity& nl,
                              const RadialState& state, const std::vector<double>& q_list,
                              double alpha, double tau_plus = 0.0,
                              const DiagnosticsOptions& opts = {});

/// L^q norm over the ball of a nodal function.
double lq_norm(const RadialGrid& grid, const std::vector<double>& values, double q);

struct TrackedQuantity {
  std::string name;
  std::vector<double> values;  // one per branch state
  double max = 0.0;
  double mid_value = 0.0;
  double cap = 0.0;
  std::string cap_rule;
  bool bounded = false;
};

struct UniformityReport {
  std::vector<double> lambdas;
  std::size_t mid_index = 0;
  double cap_factor = 2.0;
  std::vector<TrackedQuantity> quantities;
  std::vector<DiagnosticsRecord> records;

  bool empty() const noexcept { return lambdas.empty(); }
  const TrackedQuantity* find(const std::string& name) const;
};

/// Tabulates the diagnostics along the branch. A tracked quantity is called
/// bounded when its maximum over the branch stays below its cap, which is
/// cap_factor times its value at the mid-branch state. The exception is
/// int_neglap, whose cap comes from int v = lambda int psi f(u) with
/// -Delta psi = 1: lambda* max(psi) times the cap of int_f.
UniformityReport branch_uniformity_report(const Branch& branch, const RadialGrid& grid,
                                          const Nonlinearity& nl,
                                          const std::vector<double>& q_list, double alpha,
                                          double tau_plus, double cap_factor = 2.0);

/// max of psi = (1 - r^2) / (2n), the torsion function of the unit ball.
double torsion_max(int n);

/// Empirical constant C in "margin >= -C h^2". Every `stride`-th fine-branch
/// state is re-solved on the grid with half the intervals; with d the largest
/// nodal difference of v - sqrt(lambda) g(u) on the shared radii, the O(h^2)
/// error on the fine grid is about d/3 and C = 2 d / (3 h_fine^2). States
/// beyond the coarse-grid fold are skipped.
struct MarginCalibration {
  double constant = 0.0;
  double h_fine = 0.0;
  std::size_t skipped = 0;
  std::vector<double> lambdas;
  std::vector<double> coarse;
  std::vector<double> fine;
};

MarginCalibration calibrate_margin(const Branch& fine, const RadialGrid& fine_grid,
                                   const Nonlinearity& nl, std::size_t stride = 16);

}  // namespace extremal
