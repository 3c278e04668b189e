// Command-line front end: each subcommand maps flags onto config keys, an
// optional --config document supplies the rest, and flags win.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "extremal/error.hpp"
#include "extremal/report.hpp"
#include "extremal/run.hpp"

using namespace extremal;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::map<std::string, std::optional<std::string>> strings;
  std::map<std::string, std::optional<double>> reals;
  std::map<std::string, std::vector<double>> lists;
};

void add_string(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
                const std::string& help) {
  app->add_option(flag, f.strings[key], help);
}

void add_real(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
              const std::string& help) {
  app->add_option(flag, f.reals[key], help);
}

void add_list(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
              const std::string& help) {
  app->add_option(flag, f.lists[key], help)->delimiter(',');
}

void add_family(CLI::App* app, Flags& f) {
  add_string(app, f, "--family", "family", "exp, exp_pow, power, singular_power, t_log_t or custom");
  add_real(app, f, "--p", "p", "family parameter");
  add_string(app, f, "--custom-kind", "custom_kind", "regular or singular (custom family)");
  add_real(app, f, "--a-f", "a_f", "blow-up point (custom singular family)");
  add_string(app, f, "--f", "f", "f(t) expression (custom family)");
  add_string(app, f, "--df", "df", "f'(t) expression (custom family)");
  add_string(app, f, "--d2f", "d2f", "f''(t) expression (custom family)");
}

void add_grid(CLI::App* app, Flags& f) {
  add_real(app, f, "--n", "n", "dimension");
  add_real(app, f, "--M", "M", "grid intervals");
  add_real(app, f, "--tolerance", "tolerance", "relative residual tolerance");
  add_list(app, f, "--alphas", "alphas", "alpha values for the key inequality");
  add_list(app, f, "--q", "q", "exponents for the L^q norms");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extremal solutions of the biharmonic Gelfand problem: dimension bounds and radial branch checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", tool_version());
  Flags flags;
  app.add_option("--config", flags.config, "key = value config document; flags override it");
  add_string(&app, flags, "--out", "out", "output directory (relative to $EXTREMAL_OUT_ROOT when set)");

  auto* tau = app.add_subcommand("tau", "estimate tau_- and tau_+ of a nonlinearity");
  add_family(tau, flags);

  auto* bounds = app.add_subcommand("bounds", "quartic root and dimension bound for a nonlinearity");
  add_family(bounds, flags);

  auto* certify = app.add_subcommand("certify", "grid certificate that P_f(alpha(tau), tau, tau) < 0");
  add_string(certify, flags, "--formula", "formula", "A, B or both");
  add_real(certify, flags, "--tau-lo", "tau_lo", "interval start");
  add_real(certify, flags, "--tau-hi", "tau_hi", "interval end");
  add_real(certify, flags, "--step", "step", "grid step (default 1e-3)");

  auto* threshold = app.add_subcommand("threshold", "critical tau or p for a target dimension");
  add_real(threshold, flags, "--dim", "dim", "target dimension");
  add_string(threshold, flags, "--kind", "kind", "regular or singular");
  add_string(threshold, flags, "--scan", "scan", "tau or p");

  auto* solve = app.add_subcommand("solve", "minimal radial solution at one lambda");
  add_family(solve, flags);
  add_grid(solve, flags);
  add_real(solve, flags, "--lambda", "lambda", "parameter value");

  auto* sweep = app.add_subcommand("sweep", "trace the minimal branch up to the fold");
  add_family(sweep, flags);
  add_grid(sweep, flags);
  add_real(sweep, flags, "--step", "step", "initial lambda step");
  add_real(sweep, flags, "--floor", "floor", "smallest lambda step");
  add_real(sweep, flags, "--cap-factor", "cap_factor", "uniformity cap relative to mid-branch");

  auto* verify = app.add_subcommand("verify", "run the headline checks in one go");
  add_family(verify, flags);
  add_real(verify, flags, "--n", "n", "dimension");
  add_real(verify, flags, "--M", "M", "grid intervals");
  add_real(verify, flags, "--step", "step", "initial lambda step");
  add_real(verify, flags, "--floor", "floor", "smallest lambda step");
  add_list(verify, flags, "--q", "q", "exponents for the L^q norms");

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigMap values;
    if (flags.config) values = parse_document(slurp(*flags.config));
    values["command"] = ConfigValue{app.get_subcommands().front()->get_name()};
    for (const auto& [key, v] : flags.strings) {
      if (v) values[key] = ConfigValue{*v};
    }
    for (const auto& [key, v] : flags.reals) {
      if (v) values[key] = ConfigValue{*v};
    }
    for (const auto& [key, v] : flags.lists) {
      if (!v.empty()) values[key] = ConfigValue{v};
    }
    const RunConfig config = build_config(values);
    const RunManifest manifest = run(config);
    std::cout << manifest.result.dump(2) << '\n';
    for (const auto& op : manifest.document["operations"]) {
      std::cerr << op["status"].get<std::string>() << "  " << op["name"].get<std::string>();
      if (op.contains("message")) std::cerr << "  " << op["message"].get<std::string>();
      std::cerr << '\n';
    }
    std::cerr << "manifest: " << (manifest.directory / "manifest.json").string() << '\n';
    return manifest.exit_code;
  } catch (const ParseError& e) {
    std::cerr << "config parse error at " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
