#include "extremal/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "extremal/bounds.hpp"
#include "extremal/diagnostics.hpp"
#include "extremal/error.hpp"
#include "extremal/report.hpp"

namespace extremal {

using nlohmann::json;

namespace {

constexpr const char* kBranchColumns[] = {
    "lambda",      "u0",     "mu_min",       "margin_lemma21", "int_f",
    "int_neglap",  "energy", "key_ineq_lhs", "key_ineq_rhs",   "I_alpha"};

class Context {
 public:
  Context(const RunConfig& config, std::filesystem::path dir) : config(config), dir(std::move(dir)) {}

  const RunConfig& config;
  std::filesystem::path dir;
  json result = json::object();
  json operations = json::array();
  std::vector<std::filesystem::path> files;
  bool all_ok = true;

  // Records one operation; checks is an object of name -> bool.
  void record(const std::string& name, const json& checks, const std::string& message = "") {
    bool ok = true;
    for (const auto& [key, value] : checks.items()) ok = ok && value.get<bool>();
    json op = {{"name", name}, {"status", ok ? "ok" : "failed"}, {"checks", checks}};
    if (!message.empty()) op["message"] = message;
    operations.push_back(op);
    all_ok = all_ok && ok;
  }

  void record_error(const std::string& name, const std::string& message) {
    operations.push_back({{"name", name}, {"status", "error"}, {"message", message}});
    all_ok = false;
  }

  // Runs fn, turning library errors into a recorded error for `name`.
  template <class Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      record_error(name, e.what());
    }
  }

  CsvWriter csv(const std::string& file, const std::vector<std::string>& columns) {
    files.push_back(dir / file);
    return CsvWriter(dir / file, columns);
  }
};

Kind kind_of(const std::string& s) { return s == "regular" ? Kind::Regular : Kind::Singular; }

json tau_json(const TauEstimate& t) {
  json samples = json::array();
  for (const auto& [x, r] : t.samples) samples.push_back({x, r});
  return {{"tau_minus", t.tau_minus}, {"tau_plus", t.tau_plus}, {"converged", t.converged},
          {"samples", samples}};
}

json bound_json(const PipelineReport& r) {
  return {{"tau_minus", r.tau.tau_minus},
          {"tau_plus", r.tau.tau_plus},
          {"coefficients", {{"c4", r.poly.c4}, {"c2", r.poly.c2}, {"c1", r.poly.c1}, {"c0", r.poly.c0}}},
          {"roots", r.root.roots},
          {"alpha_star", r.root.alpha_star},
          {"n_quartic", r.bound.n_quartic},
          {"n_8tau", r.bound.n_8tau},
          {"n_combined", r.bound.n_combined},
          {"max_dim", r.bound.max_dim},
          {"kind", to_string(r.bound.kind)},
          {"certificate", nullptr}};
}

json certificate_json(const std::string& formula, const NegativityCertificate& c) {
  return {{"formula", formula},       {"tau_lo", c.tau_lo},
          {"tau_hi", c.tau_hi},       {"step", c.grid_step},
          {"points", c.points},       {"certified", c.certified},
          {"min_margin", c.min_margin}, {"max_P", -c.min_margin},
          {"argmin_tau", c.argmin_tau}};
}

// ---------------------------------------------------------------------------

void run_tau(Context& ctx, const Nonlinearity& nl) {
  ctx.guarded("tau", [&] {
    const auto adm = check_admissibility(nl);
    const auto t = estimate_tau(nl);
    json out = tau_json(t);
    out["admissible"] = adm.pass;
    ctx.result["tau"] = out;
    ctx.record("tau", {{"admissible", adm.pass}, {"converged", t.converged}});
  });
}

void run_bounds(Context& ctx, const Nonlinearity& nl) {
  ctx.guarded("bounds", [&] {
    const auto r = bound_pipeline(nl);
    ctx.result["bounds"] = bound_json(r);
    ctx.record("bounds", {{"pipeline", true}});
  });
}

NegativityCertificate write_certificate(Context& ctx, AlphaFormula f, const std::string& name,
                                        double lo, double hi, double step) {
  const auto cert = certify_negativity(f, lo, hi, step);
  auto csv = ctx.csv("certificate_" + name + "_" + format_number(lo) + "_" + format_number(hi) +
                         ".csv",
                     {"tau", "alpha", "P"});
  for (const auto& [tau, p] : cert.grid) csv.row({tau, alpha_of_tau(f, tau), p});
  csv.close();
  ctx.result["certificates"].push_back(certificate_json(name, cert));
  return cert;
}

void run_certify(Context& ctx) {
  const auto& c = ctx.config;
  ctx.result["certificates"] = json::array();
  ctx.guarded("certify", [&] {
    json checks = json::object();
    if (c.formula == "both") {
      checks["A_[2/3,1]"] =
          write_certificate(ctx, AlphaFormula::A, "A", 2.0 / 3.0, 1.0, c.step).certified;
      checks["B_[1,1.57863]"] =
          write_certificate(ctx, AlphaFormula::B, "B", 1.0, 1.57863, c.step).certified;
      checks["B_[2/3,1]"] =
          write_certificate(ctx, AlphaFormula::B, "B", 2.0 / 3.0, 1.0, c.step).certified;
    } else {
      const AlphaFormula f = c.formula == "A" ? AlphaFormula::A : AlphaFormula::B;
      const double lo = c.tau_lo.value_or(f == AlphaFormula::A ? 2.0 / 3.0 : 1.0);
      const double hi = c.tau_hi.value_or(f == AlphaFormula::A ? 1.0 : 1.57863);
      checks[c.formula] = write_certificate(ctx, f, c.formula, lo, hi, c.step).certified;
    }
    ctx.record("certify", checks);
  });
}

void run_threshold(Context& ctx) {
  const auto& c = ctx.config;
  ctx.guarded("threshold", [&] {
    const auto scan = c.scan == "tau" ? ScanParameter::Tau : ScanParameter::P;
    const auto r = threshold_solve(c.dim, kind_of(c.kind), scan);
    auto csv = ctx.csv("threshold_scan.csv", {c.scan, "n_quartic"});
    for (const auto& [x, n] : r.grid) csv.row({x, n});
    csv.close();
    ctx.result["threshold"] = {{"dim", c.dim},          {"kind", c.kind},
                               {"scan", c.scan},        {"critical", r.parameter},
                               {"tau", r.tau},          {"n_quartic", r.n_quartic},
                               {"bracket", {r.lo, r.hi}}};
    ctx.record("threshold", {{"found", true}});
  });
}

double tau_plus_or_zero(const Nonlinearity& nl) {
  try {
    const auto t = estimate_tau(nl);
    if (t.converged && t.tau_plus > 0.0 && t.tau_plus < 2.0) return t.tau_plus;
  } catch (const Error&) {
  }
  return 0.0;
}

void run_solve(Context& ctx, const Nonlinearity& nl) {
  const auto& c = ctx.config;
  ctx.guarded("solve", [&] {
    const auto grid = discretize(c.n, c.M);
    SolveOptions opts;
    opts.tolerance = c.tolerance;
    const auto state = solve_at_lambda(grid, nl, c.lambda, nullptr, opts);
    const auto stab = stability_eigenvalue(grid, nl, state);
    const double tau = tau_plus_or_zero(nl);
    json diag = json::array();
    bool key_ok = true;
    for (double a : c.alphas) {
      const auto rec = diagnostics(grid, nl, state, c.q, a, tau);
      key_ok = key_ok && rec.key.holds(c.key_rel);
      diag.push_back({{"alpha", a},
                      {"int_f", rec.int_f},
                      {"int_neglap", rec.int_neg_lap},
                      {"energy", rec.energy},
                      {"lq_fprime", rec.lq_fprime},
                      {"lq_f", rec.lq_f},
                      {"key_ineq_lhs", rec.key.lhs},
                      {"key_ineq_rhs", rec.key.rhs},
                      {"I_alpha", rec.i_alpha},
                      {"margin_lemma21", rec.pointwise_margin}});
    }
    auto csv = ctx.csv("profile.csv", {"r", "u", "v"});
    for (int i = 0; i <= c.M; ++i) csv.row({grid.radii()[i], state.u[i], state.v[i]});
    csv.close();
    ctx.result["solve"] = {{"lambda", state.lambda},     {"u0", state.u0()},
                           {"max_u", state.max_u()},     {"residual", state.residual},
                           {"method", state.method},     {"newton_iters", state.newton_iters},
                           {"picard_iters", state.picard_iters}, {"mu_min", stab.mu_min},
                           {"eigvec_sign_changes", stab.eigvec_sign_changes},
                           {"q", c.q},                   {"diagnostics", diag}};
    ctx.record("solve", {{"converged", state.residual < c.tolerance || state.method == "exact"},
                         {"semistable", stab.semistable(c.stability_tol)},
                         {"key_inequality", key_ok}});
  });
}

struct SuiteOutcome {
  Branch branch;
  bool ok = false;
};

// Traces the branch, writes one CSV per alpha and checks the branch claims.
SuiteOutcome branch_suite(Context& ctx, const Nonlinearity& nl, const std::string& prefix,
                          const std::vector<double>& alphas, json& out) {
  const auto& c = ctx.config;
  const auto grid = discretize(c.n, c.M);
  TraceOptions opts;
  opts.solve.tolerance = c.tolerance;
  opts.stability_tol = c.stability_tol;
  SuiteOutcome outcome;
  outcome.branch = trace_branch(grid, nl, c.step, c.floor, opts);
  const Branch& b = outcome.branch;
  out["lambda_star_estimate"] = b.lambda_star_estimate;
  out["lambda_star_bracket"] = {b.lambda_star_bracket.first, b.lambda_star_bracket.second};
  out["states"] = b.states.size();
  out["stop_reason"] = b.stop_reason;
  json checks = {{"branch_nonempty", !b.empty()}};
  if (b.empty()) {
    ctx.record(prefix + "branch", checks, b.stop_reason);
    return outcome;
  }

  bool increasing = true;
  bool semistable = true;
  bool below = true;
  for (std::size_t k = 0; k < b.states.size(); ++k) {
    if (k > 0) increasing = increasing && b.states[k].u0() > b.states[k - 1].u0();
    semistable = semistable && b.stability[k].semistable(c.stability_tol);
    if (nl.singular()) below = below && b.states[k].max_u() <= nl.a_f() * (1.0 - 1e-3);
  }
  const auto cal = calibrate_margin(b, grid, nl, std::max<std::size_t>(1, b.states.size() / 40));
  const double h2 = grid.spacing() * grid.spacing();
  out["margin_constant"] = cal.constant;

  const double tau = tau_plus_or_zero(nl);
  bool margin_ok = true;
  bool key_ok = true;
  json uniformity = json::array();
  bool lap_bounded = true;
  for (double a : alphas) {
    const auto rep = branch_uniformity_report(b, grid, nl, c.q, a, tau, c.cap_factor);
    auto csv = ctx.csv(prefix + "branch_alpha" + format_number(a) + ".csv",
                       std::vector<std::string>(std::begin(kBranchColumns), std::end(kBranchColumns)));
    for (std::size_t k = 0; k < rep.records.size(); ++k) {
      const auto& r = rep.records[k];
      margin_ok = margin_ok && r.pointwise_margin >= -cal.constant * h2;
      key_ok = key_ok && r.key.holds(c.key_rel);
      csv.row({r.lambda, b.states[k].u0(), b.stability[k].mu_min, r.pointwise_margin, r.int_f,
               r.int_neg_lap, r.energy, r.key.lhs, r.key.rhs, r.i_alpha});
    }
    csv.close();
    json quantities = json::array();
    for (const auto& q : rep.quantities) {
      quantities.push_back({{"name", q.name}, {"max", q.max}, {"mid_value", q.mid_value},
                            {"cap", q.cap}, {"cap_rule", q.cap_rule}, {"bounded", q.bounded}});
      if (q.name == "int_neglap") lap_bounded = lap_bounded && q.bounded;
    }
    uniformity.push_back({{"alpha", a}, {"mid_lambda", rep.lambdas[rep.mid_index]},
                          {"quantities", quantities}});
  }
  out["uniformity"] = uniformity;
  out["max_u"] = b.states.back().max_u();
  out["mu_min_last"] = b.stability.back().mu_min;

  checks["bracket_width"] = b.bracket_width() <= 2.0 * c.floor;
  checks["u0_increasing"] = increasing;
  checks["semistable"] = semistable;
  checks["pointwise_margin"] = margin_ok;
  checks["key_inequality"] = key_ok;
  checks["int_neglap_bounded"] = lap_bounded;
  if (nl.singular()) checks["below_blowup"] = below;
  ctx.record(prefix + "branch", checks);
  outcome.ok = std::all_of(checks.begin(), checks.end(), [](const json& v) { return v.get<bool>(); });
  return outcome;
}

void run_sweep(Context& ctx, const Nonlinearity& nl) {
  ctx.guarded("branch", [&] {
    json out;
    branch_suite(ctx, nl, "", ctx.config.alphas, out);
    ctx.result["sweep"] = out;
  });
}

// Mesh convergence: lambda* at M and M/2, u(0) at the mid-branch lambda on
// M/4, M/2, M against the Richardson prediction.
void mesh_check(Context& ctx, const Nonlinearity& nl, const Branch& fine, const std::string& prefix) {
  const auto& c = ctx.config;
  if (c.M % 4 != 0 || c.M / 4 < 64 || fine.empty()) return;
  ctx.guarded(prefix + "mesh", [&] {
    const auto coarse_grid = discretize(c.n, c.M / 2);
    const Branch coarse = trace_branch(coarse_grid, nl, c.step, c.floor);
    const double rel = std::abs(coarse.lambda_star_estimate - fine.lambda_star_estimate) /
                       fine.lambda_star_estimate;
    const double lambda = fine.states[mid_branch_index(fine)].lambda;
    double u[3];
    for (int k = 0; k < 3; ++k) {
      const auto g = discretize(c.n, c.M >> (2 - k));
      u[k] = solve_at_lambda(g, nl, lambda).u0();
    }
    const double predicted = std::abs(u[0] - u[1]) / 4.0;
    const double observed = std::abs(u[1] - u[2]);
    ctx.result[prefix + "mesh"] = {{"lambda_star_coarse", coarse.lambda_star_estimate},
                                   {"lambda_star_fine", fine.lambda_star_estimate},
                                   {"lambda_star_rel_diff", rel},
                                   {"mid_lambda", lambda},
                                   {"u0", {u[0], u[1], u[2]}},
                                   {"richardson_predicted", predicted},
                                   {"observed", observed}};
    ctx.record(prefix + "mesh", {{"lambda_star_1pct", rel <= 0.01},
                                 {"u0_richardson_x5", observed <= 5.0 * predicted}});
  });
}

void run_verify(Context& ctx, const Nonlinearity& nl) {
  // Closed-form curvature exponents.
  ctx.guarded("tau_reproduction", [&] {
    struct Case {
      const char* name;
      std::vector<double> params;
      double expected;
    };
    const Case cases[] = {{"exp", {}, 1.0},
                          {"exp_pow", {0.5}, 1.0},
                          {"exp_pow", {2.0}, 1.0},
                          {"power", {3.0}, 2.0 / 3.0},
                          {"singular_power", {2.0}, 1.5}};
    json checks = json::object();
    json values = json::array();
    for (const auto& cs : cases) {
      const auto t = estimate_tau(make_builtin(cs.name, cs.params));
      std::string label = cs.name;
      if (!cs.params.empty()) label += "(" + format_number(cs.params[0]) + ")";
      checks[label] = std::abs(t.tau_minus - cs.expected) <= 1e-6 &&
                      std::abs(t.tau_plus - cs.expected) <= 1e-6;
      values.push_back({{"family", label}, {"tau_minus", t.tau_minus}, {"tau_plus", t.tau_plus},
                        {"expected", cs.expected}});
    }
    ctx.result["tau_reproduction"] = values;
    ctx.record("tau_reproduction", checks);
  });

  ctx.guarded("headline_dimensions", [&] {
    const auto e = bound_pipeline(make_builtin("exp"));
    const double p = 1.0 / (1.57863 - 1.0);
    const auto s = bound_pipeline(make_builtin("singular_power", {p}));
    ctx.result["headline_dimensions"] = {{"exp", bound_json(e)}, {"singular_power_p", p},
                                         {"singular_power", bound_json(s)}};
    ctx.record("headline_dimensions",
               {{"exp_max_dim_12", e.bound.max_dim == 12},
                {"singular_n_quartic_7", std::abs(s.bound.n_quartic - 7.0) <= 0.02}});
  });

  ctx.guarded("thresholds", [&] {
    const auto d7 = threshold_solve(7, Kind::Singular, ScanParameter::P);
    const auto d8 = threshold_solve(8, Kind::Singular, ScanParameter::P);
    const auto t7 = threshold_solve(7, Kind::Singular, ScanParameter::Tau);
    ctx.result["thresholds"] = {{"p_dim7", d7.parameter}, {"p_dim8", d8.parameter},
                                {"tau_dim7", t7.parameter}};
    ctx.record("thresholds",
               {{"p_dim7", std::abs(d7.parameter - 1.72822) <= 5e-4},
                {"p_dim8", std::abs(d8.parameter - 2.2609) <= 5e-4},
                {"tau_p_consistent",
                 std::abs(t7.parameter - (d7.parameter + 1.0) / d7.parameter) <= 1e-5}});
  });

  ctx.result["certificates"] = json::array();
  ctx.guarded("certificates", [&] {
    const bool a = write_certificate(ctx, AlphaFormula::A, "A", 2.0 / 3.0, 1.0, 1e-3).certified;
    const bool b = write_certificate(ctx, AlphaFormula::B, "B", 1.0, 1.57863, 1e-3).certified;
    ctx.record("certificates", {{"A_[2/3,1]", a}, {"B_[1,1.57863]", b}});
  });

  ctx.guarded("quartic_consistency", [&] {
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> dist(1.0001, 10.0);
    RootOptions from_zero;
    from_zero.scan_from = 0.0;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double p = dist(rng);
      const double tp = (p - 1.0) / p;
      const double ts = (p + 1.0) / p;
      const double gp = largest_root(build_poly(tp, tp)).alpha_star;
      const double gs = largest_root(build_poly(ts, ts)).alpha_star;
      worst = std::max(worst, std::abs(largest_root(build_poly_power(p)).alpha_star - gp));
      worst = std::max(worst, std::abs(largest_root(build_poly_singular_power(p), from_zero).alpha_star -
                                       gs * (p - 1.0) / (p + 1.0)));
    }
    ctx.result["quartic_consistency"] = {{"max_difference", worst}};
    ctx.record("quartic_consistency", {{"within_1e-8", worst <= 1e-8}});
  });

  run_bounds(ctx, nl);
  ctx.guarded("branch", [&] {
    json out;
    const auto suite = branch_suite(ctx, nl, "", {0.8, 1.2, 2.0}, out);
    ctx.result["branch"] = out;
    mesh_check(ctx, nl, suite.branch, "");
  });
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json fam = {{"name", c.family.name}};
  if (c.family.p) fam["p"] = *c.family.p;
  if (c.family.name == "custom") {
    fam["custom_kind"] = c.family.custom_kind;
    if (c.family.a_f) fam["a_f"] = *c.family.a_f;
    fam["f"] = c.family.f;
    if (!c.family.df.empty()) fam["df"] = c.family.df;
    if (!c.family.d2f.empty()) fam["d2f"] = c.family.d2f;
  }
  json out = {{"command", to_string(c.command)},
              {"family", fam},
              {"n", c.n},
              {"M", c.M},
              {"step", c.step},
              {"floor", c.floor},
              {"lambda", c.lambda},
              {"alphas", c.alphas},
              {"q", c.q},
              {"formula", c.formula},
              {"dim", c.dim},
              {"kind", c.kind},
              {"scan", c.scan},
              {"out", c.out},
              {"tolerance", c.tolerance},
              {"stability_tol", c.stability_tol},
              {"key_rel", c.key_rel},
              {"cap_factor", c.cap_factor}};
  if (c.tau_lo) out["tau_lo"] = *c.tau_lo;
  if (c.tau_hi) out["tau_hi"] = *c.tau_hi;
  return out;
}

RunManifest run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx(config, prepare_output(config));

  try {
    const Nonlinearity nl = make_family(config.family);
    switch (config.command) {
      case Command::Tau: run_tau(ctx, nl); break;
      case Command::Bounds: run_bounds(ctx, nl); break;
      case Command::Certify: run_certify(ctx); break;
      case Command::Threshold: run_threshold(ctx); break;
      case Command::Solve: run_solve(ctx, nl); break;
      case Command::Sweep: run_sweep(ctx, nl); break;
      case Command::Verify: run_verify(ctx, nl); break;
    }
  } catch (const Error& e) {
    ctx.record_error(to_string(config.command), e.what());
  }

  const auto result_path = ctx.dir / "result.json";
  {
    std::ofstream f(result_path, std::ios::binary);
    f << ctx.result.dump(2) << '\n';
    if (!f) throw Error("cannot write " + result_path.string());
  }
  ctx.files.push_back(result_path);

  json files = json::array();
  for (const auto& p : ctx.files) {
    files.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
  }
  RunManifest m;
  m.exit_code = ctx.all_ok ? 0 : 1;
  m.result = ctx.result;
  m.directory = ctx.dir;
  json grid = nullptr;
  if (config.command == Command::Solve || config.command == Command::Sweep ||
      config.command == Command::Verify) {
    grid = {{"n", config.n},
            {"M", config.M},
            {"scheme", "finite-volume radial Laplacian, Navier splitting"},
            {"weights", "exact dual-cell measures times sphere area"}};
  }
  m.document = {{"tool", "extremal"},
                {"version", tool_version()},
                {"command", to_string(config.command)},
                {"config", config_to_json(config)},
                {"grid", grid},
                {"tolerances",
                 {{"residual", config.tolerance},
                  {"stability", config.stability_tol},
                  {"key_inequality_rel", config.key_rel},
                  {"eigen", 1e-9}}},
                {"operations", ctx.operations},
                {"files", files},
                {"exit_code", m.exit_code},
                {"wall_time_seconds",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  std::ofstream f(ctx.dir / "manifest.json", std::ios::binary);
  f << m.document.dump(2) << '\n';
  return m;
}

}  // namespace extremal
