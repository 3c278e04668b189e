#include "extremal/branch.hpp"

#include <cmath>

#include "extremal/error.hpp"

namespace extremal {

Branch trace_branch(const RadialGrid& grid, const Nonlinearity& nl, double lambda_step,
                    double step_floor, const TraceOptions& opts) {
  if (!(step_floor > 0.0) || !(lambda_step > step_floor)) {
    throw DomainError("need lambda_step > step_floor > 0");
  }
  Branch branch;
  branch.dimension = grid.dimension();
  branch.intervals = grid.intervals();
  double accepted = 0.0;
  double step = lambda_step;
  while (true) {
    const double target = accepted + step;
    const RadialState* seed = branch.states.empty() ? nullptr : &branch.states.back();
    std::string failure;
    try {
      RadialState state = solve_at_lambda(grid, nl, target, seed, opts.solve);
      StabilityReport report = stability_eigenvalue(grid, nl, state, opts.eigen_tol);
      if (report.semistable(opts.stability_tol) &&
          (branch.states.empty() || state.u0() > branch.states.back().u0())) {
        branch.states.push_back(std::move(state));
        branch.stability.push_back(report);
        accepted = target;
        if (branch.states.size() >= opts.max_states) {
          branch.stop_reason = "state limit reached";
          break;
        }
        continue;
      }
      failure = "state rejected (not semistable or not increasing)";
    } catch (const NoSolution& e) {
      failure = e.what();
    } catch (const SingularTouch& e) {
      failure = e.what();
    } catch (const NonConvergence& e) {
      failure = e.what();
    }
    if (step <= step_floor) {
      branch.stop_reason = failure;
      break;
    }
    step *= 0.5;
  }
  branch.lambda_star_bracket = {accepted, accepted + step};
  branch.lambda_star_estimate = accepted + 0.5 * step;
  if (branch.states.empty()) branch.stop_reason = "empty branch: " + branch.stop_reason;
  return branch;
}

std::size_t mid_branch_index(const Branch& branch) {
  if (branch.empty()) throw DomainError("empty branch");
  const double half = 0.5 * branch.lambda_star_estimate;
  std::size_t best = 0;
  for (std::size_t i = 1; i < branch.states.size(); ++i) {
    if (std::abs(branch.states[i].lambda - half) < std::abs(branch.states[best].lambda - half)) {
      best = i;
    }
  }
  return best;
}

}  // namespace extremal
