#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "extremal/nonlinearity.hpp"

namespace extremal {

enum class Command { Tau, Bounds, Certify, Threshold, Solve, Sweep, Verify };

std::string to_string(Command command);
std::optional<Command> parse_command(const std::string& name);

/// One value from a config document or a command-line flag, with the place
/// it came from (line 0 for flags).
struct ConfigValue {
  std::variant<std::string, double, std::vector<double>> value;
  int line = 0;
  int column = 0;
};

using ConfigMap = std::map<std::string, ConfigValue>;

/// Parses `key = value` lines. Values are double-quoted strings, numbers, or
/// bracketed number lists; `#` starts a comment; `[section]` headers group
/// keys visually but do not namespace them, so each key may appear once.
/// Throws ParseError with line and column.
ConfigMap parse_document(const std::string& text);

struct FamilySpec {
  std::string name = "exp";
  std::optional<double> p;
  // custom family
  std::string custom_kind = "regular";
  std::optional<double> a_f;
  std::string f;
  std::string df;
  std::string d2f;
  int f_line = 0, f_column = 0, df_line = 0, df_column = 0, d2f_line = 0, d2f_column = 0;
};

struct RunConfig {
  Command command = Command::Bounds;
  FamilySpec family;
  int n = 3;
  int M = 512;
  double step = 0.05;     // lambda step, or tau step for certify (default 1e-3)
  double floor = 1e-4;
  double lambda = 1.0;
  std::vector<double> alphas{1.2};
  std::vector<double> q{1.0, 2.0};
  std::string formula = "both";  // A, B or both
  std::optional<double> tau_lo;
  std::optional<double> tau_hi;
  int dim = 7;
  std::string kind = "singular";
  std::string scan = "p";
  std::string out = "results";
  double tolerance = 1e-10;
  double stability_tol = 1e-6;
  double key_rel = 1e-3;
  double cap_factor = 2.0;
};

/// Every key the configuration understands.
const std::vector<std::string>& config_keys();

/// Fills defaults and validates. Throws ConfigError naming the key, or
/// ParseError for a malformed custom expression.
RunConfig build_config(const ConfigMap& values);

/// parse_document followed by build_config.
RunConfig parse_config(const std::string& text);

/// The nonlinearity a config describes.
Nonlinearity make_family(const FamilySpec& spec);

/// Output directory: `out`, under $EXTREMAL_OUT_ROOT when that is set and
/// `out` is relative.
std::filesystem::path output_directory(const RunConfig& config);

/// Creates the output directory and probes it with a write. Throws
/// ConfigError("out", ...) when that fails.
std::filesystem::path prepare_output(const RunConfig& config);

}  // namespace extremal
