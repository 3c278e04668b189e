#include "extremal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extremal/error.hpp"

namespace extremal {

double check_pointwise_lower_bound(const RadialGrid& grid, const Nonlinearity& nl,
                                   const RadialState& state) {
  const double root = std::sqrt(state.lambda);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.intervals(); ++i) {
    margin = std::min(margin, state.v[i] - root * eval_g(nl, state.u[i]));
  }
  return margin;
}

double theta_squared(const Nonlinearity& nl, double alpha, double t) {
  const double ft = eval_f_tilde(nl, t);
  if (ft == 0.0) return 0.0;
  return std::pow(ft, 2.0 * alpha) / std::pow(nl.df(t), alpha);
}

ThetaTable::ThetaTable(const Nonlinearity& nl, double alpha, double upper, int panels)
    : upper_(upper) {
  if (!(alpha > 0.5)) throw DomainError("alpha must exceed 1/2");
  if (upper <= 0.0) return;
  auto integrand = [nl, alpha](double s) {
    const double ft = eval_f_tilde(nl, s);
    const double d1 = nl.df(s);
    if (ft == 0.0) return alpha == 1.0 ? d1 : 0.0;
    const double bracket = 1.0 - ft * nl.d2f(s) / (2.0 * d1 * d1);
    return alpha * alpha * std::pow(ft, 2.0 * alpha - 2.0) * std::pow(d1, 2.0 - alpha) *
           bracket * bracket;
  };
  const double power = alpha < 1.0 ? 2.0 / (2.0 * alpha - 1.0) : 1.0;
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.initial_panels = 2;
  table_ = CumulativeIntegral(integrand, upper, panels, power, opts);
}

double ThetaTable::operator()(double t) const {
  if (upper_ <= 0.0) {
    if (t == 0.0) return 0.0;
    throw DomainError("Theta evaluated outside its table");
  }
  return table_(std::min(t, upper_));
}

double lq_norm(const RadialGrid& grid, const std::vector<double>& values, double q) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * std::pow(std::abs(values[i]), q);
  return std::pow(s, 1.0 / q);
}

DiagnosticsRecord diagnostics(const RadialGrid& grid, const Nonlinearity& nl,
                              const RadialState& state, const std::vector<double>& q_list,
                              double alpha, double tau_plus, const DiagnosticsOptions& opts) {
  if (!(alpha > 0.5)) throw DomainError("alpha must exceed 1/2");
  if (q_list.empty()) throw DomainError("q list is empty");
  const int M = grid.intervals();
  if (static_cast<int>(state.u.size()) != M + 1) throw DomainError("state does not match grid");

  DiagnosticsRecord rec;
  rec.lambda = state.lambda;
  rec.q_list = q_list;
  const double top = std::max(0.0, state.max_u());

  std::vector<double> f(M + 1), df(M + 1);
  for (int i = 0; i <= M; ++i) {
    f[i] = nl.f(state.u[i]);
    df[i] = nl.df(state.u[i]);
  }
  rec.int_f = grid.integrate(f);
  rec.int_neg_lap = grid.integrate(state.v);

  std::vector<double> energy(M + 1, 0.0);
  if (top > 0.0) {
    const CumulativeIntegral h_table = make_H_table(nl, top, opts.h_panels);
    for (int i = 0; i <= M; ++i) {
      const double t = std::clamp(state.u[i], 0.0, top);
      energy[i] = std::sqrt(eval_F(nl, t)) * h_table(t);
    }
  }
  rec.energy = grid.integrate(energy);

  for (double q : q_list) {
    rec.lq_fprime.push_back(lq_norm(grid, df, q));
    rec.lq_f.push_back(lq_norm(grid, f, q));
  }

  const ThetaTable theta(nl, alpha, top, opts.theta_panels);
  const double conj = 2.0 * alpha / (2.0 * alpha - 1.0);
  std::vector<double> lhs(M + 1), j1(M + 1), j2(M + 1), ia(M + 1);
  for (int i = 0; i <= M; ++i) {
    const double t = std::clamp(state.u[i], 0.0, top);
    lhs[i] = std::sqrt(df[i]) * theta_squared(nl, alpha, t);
    j1[i] = std::pow(f[i], 2.0 * alpha) / std::pow(df[i], alpha - 0.5);
    j2[i] = std::pow(theta(t), conj) / std::pow(df[i], 1.0 / (2.0 * (2.0 * alpha - 1.0)));
    ia[i] = std::pow(eval_f_tilde(nl, t), 2.0 * alpha) / std::pow(df[i], alpha - 0.5);
  }
  rec.key.alpha = alpha;
  rec.key.lhs = grid.integrate(lhs);
  rec.key.j1 = grid.integrate(j1);
  rec.key.j2 = grid.integrate(j2);
  rec.key.rhs = alpha * alpha / (2.0 * alpha - 1.0) * std::pow(rec.key.j1, 1.0 / (2.0 * alpha)) *
                std::pow(rec.key.j2, 1.0 / conj);
  rec.i_alpha = grid.integrate(ia);

  if (tau_plus > 0.0) {
    rec.q1 = alpha * (2.0 / tau_plus - 1.0) + 0.5;
    rec.q2 = alpha * (2.0 - tau_plus) + 0.5 * tau_plus;
    rec.lq1_fprime = lq_norm(grid, df, rec.q1);
    rec.lq2_f = lq_norm(grid, f, rec.q2);
  }
  rec.pointwise_margin = check_pointwise_lower_bound(grid, nl, state);
  return rec;
}

const TrackedQuantity* UniformityReport::find(const std::string& name) const {
  for (const auto& q : quantities) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

namespace {

std::string format_q(double q) {
  std::string s = std::to_string(q);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

UniformityReport branch_uniformity_report(const Branch& branch, const RadialGrid& grid,
                                          const Nonlinearity& nl,
                                          const std::vector<double>& q_list, double alpha,
                                          double tau_plus, double cap_factor) {
  UniformityReport report;
  report.cap_factor = cap_factor;
  if (branch.empty()) return report;
  report.mid_index = mid_branch_index(branch);
  for (const auto& state : branch.states) {
    report.lambdas.push_back(state.lambda);
    report.records.push_back(diagnostics(grid, nl, state, q_list, alpha, tau_plus));
  }
  auto track = [&](std::string name, auto get) {
    TrackedQuantity q;
    q.name = std::move(name);
    for (const auto& rec : report.records) q.values.push_back(get(rec));
    q.max = *std::max_element(q.values.begin(), q.values.end());
    q.mid_value = q.values[report.mid_index];
    q.cap = cap_factor * q.mid_value;
    q.cap_rule = "mid-branch";
    q.bounded = std::isfinite(q.max) && q.max <= q.cap;
    report.quantities.push_back(std::move(q));
  };
  track("int_f", [](const DiagnosticsRecord& r) { return r.int_f; });
  track("int_neglap", [](const DiagnosticsRecord& r) { return r.int_neg_lap; });
  {
    auto& lap = report.quantities.back();
    lap.cap = branch.lambda_star_estimate * torsion_max(grid.dimension()) * report.quantities[0].cap;
    lap.cap_rule = "torsion";
    lap.bounded = std::isfinite(lap.max) && lap.max <= lap.cap;
  }
  track("energy", [](const DiagnosticsRecord& r) { return r.energy; });
  track("I_alpha", [](const DiagnosticsRecord& r) { return r.i_alpha; });
  if (tau_plus > 0.0) {
    track("fprime_Lq1", [](const DiagnosticsRecord& r) { return r.lq1_fprime; });
    track("f_Lq2", [](const DiagnosticsRecord& r) { return r.lq2_f; });
  }
  for (std::size_t k = 0; k < q_list.size(); ++k) {
    track("fprime_L" + format_q(q_list[k]), [k](const DiagnosticsRecord& r) { return r.lq_fprime[k]; });
    track("f_L" + format_q(q_list[k]), [k](const DiagnosticsRecord& r) { return r.lq_f[k]; });
  }
  return report;
}

double torsion_max(int n) { return 1.0 / (2.0 * n); }

MarginCalibration calibrate_margin(const Branch& fine, const RadialGrid& fine_grid,
                                   const Nonlinearity& nl, std::size_t stride) {
  if (fine_grid.intervals() % 2 != 0) throw DomainError("fine grid needs an even interval count");
  const RadialGrid coarse_grid(fine_grid.dimension(), fine_grid.intervals() / 2);
  MarginCalibration cal;
  cal.h_fine = fine_grid.spacing();
  double worst = 0.0;
  for (std::size_t k = 0; k < fine.states.size(); k += std::max<std::size_t>(1, stride)) {
    const RadialState& state = fine.states[k];
    RadialState seed;
    seed.lambda = state.lambda;
    for (std::size_t i = 0; i < state.u.size(); i += 2) seed.u.push_back(state.u[i]);
    RadialState coarse;
    try {
      coarse = solve_at_lambda(coarse_grid, nl, state.lambda, &seed);
    } catch (const NoSolution&) {
      ++cal.skipped;  // past the coarse-grid fold
      continue;
    } catch (const SingularTouch&) {
      ++cal.skipped;
      continue;
    }
    // v - sqrt(lambda) g(u) compared node by node on the shared radii.
    const double root = std::sqrt(state.lambda);
    for (int i = 0; i < coarse_grid.intervals(); ++i) {
      const double mc = coarse.v[i] - root * eval_g(nl, coarse.u[i]);
      const double mf = state.v[2 * i] - root * eval_g(nl, state.u[2 * i]);
      worst = std::max(worst, std::abs(mc - mf));
    }
    cal.lambdas.push_back(state.lambda);
    cal.coarse.push_back(check_pointwise_lower_bound(coarse_grid, nl, coarse));
    cal.fine.push_back(check_pointwise_lower_bound(fine_grid, nl, state));
  }
  cal.constant = 2.0 * worst / (3.0 * cal.h_fine * cal.h_fine);
  return cal;
}

}  // namespace extremal
