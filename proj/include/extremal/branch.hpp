#pragma once

#include <string>
#include <utility>
#include <vector>

#include "extremal/radial.hpp"
#include "extremal/stability.hpp"

namespace extremal {

/// Accepted minimal-branch states in increasing lambda together with the
/// bracket on lambda* where the march stopped.
struct Branch {
  int dimension = 0;
  int intervals = 0;
  std::vector<RadialState> states;
  std::vector<StabilityReport> stability;  // one per state, the fold indicator
  double lambda_star_estimate = 0.0;
  std::pair<double, double> lambda_star_bracket{0.0, 0.0};
  std::string stop_reason;

  bool empty() const noexcept { return states.empty(); }
  double bracket_width() const { return lambda_star_bracket.second - lambda_star_bracket.first; }
};

struct TraceOptions {
  SolveOptions solve;
  double stability_tol = 1e-6;
  double eigen_tol = 1e-9;
  std::size_t max_states = 200000;
};

/// Marches lambda upward from 0 in steps of `lambda_step`, seeding each solve
/// with the previous state. A failed solve, or a state that is not
/// semistable, halves the step; the march stops at the first failure with a
/// step no larger than `step_floor`. Throws DomainError unless
/// lambda_step > step_floor > 0.
Branch trace_branch(const RadialGrid& grid, const Nonlinearity& nl, double lambda_step,
                    double step_floor, const TraceOptions& opts = {});

/// Index of the state whose lambda is closest to lambda*/2.
std::size_t mid_branch_index(const Branch& branch);

}  // namespace extremal
