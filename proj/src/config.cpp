#include "extremal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "extremal/error.hpp"
#include "extremal/expression.hpp"

namespace extremal {

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::Tau, "tau"},       {Command::Bounds, "bounds"}, {Command::Certify, "certify"},
    {Command::Threshold, "threshold"}, {Command::Solve, "solve"}, {Command::Sweep, "sweep"},
    {Command::Verify, "verify"},
};

class LineScanner {
 public:
  LineScanner(const std::string& text, int line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, static_cast<int>(pos_) + 1);
  }
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  int column() const { return static_cast<int>(pos_) + 1; }

  std::string identifier() {
    const std::size_t start = pos_;
    if (done() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
      fail("expected a key");
    }
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(char c, const char* what) {
    if (peek() != c) fail(std::string("expected ") + what);
    ++pos_;
  }

  double number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (*begin == '+') fail("expected a number");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    if (!std::isfinite(value)) fail("number is not finite");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string quoted() {
    expect('"', "'\"'");
    std::string out;
    while (true) {
      if (done()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (done()) fail("unterminated string");
        const char e = text_[pos_++];
        if (e != '"' && e != '\\') {
          --pos_;
          fail("unknown escape");
        }
        out.push_back(e);
      } else {
        out.push_back(c);
      }
    }
  }

  ConfigValue value() {
    ConfigValue v;
    v.line = line_;
    v.column = column();
    if (peek() == '"') {
      v.value = quoted();
    } else if (peek() == '[') {
      ++pos_;
      std::vector<double> list;
      skip_space();
      if (peek() != ']') {
        while (true) {
          skip_space();
          list.push_back(number());
          skip_space();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(']', "',' or ']'");
      v.value = std::move(list);
    } else if (done()) {
      fail("missing value");
    } else {
      v.value = number();
    }
    return v;
  }

 private:
  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

// Cuts a trailing comment, ignoring '#' inside quotes.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

class Reader {
 public:
  explicit Reader(const ConfigMap& values) : values_(values) {}

  const ConfigValue* find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  std::optional<std::string> string(const std::string& key) const {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&v->value)) return *s;
    throw ConfigError(key, "expected a string");
  }

  std::optional<double> real(const std::string& key) const {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* d = std::get_if<double>(&v->value)) return *d;
    throw ConfigError(key, "expected a number");
  }

  std::optional<int> integer(const std::string& key) const {
    const auto d = real(key);
    if (!d) return std::nullopt;
    if (*d != std::floor(*d) || std::abs(*d) > 1e9) throw ConfigError(key, "expected an integer");
    return static_cast<int>(*d);
  }

  std::optional<std::vector<double>> list(const std::string& key) const {
    const auto* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* l = std::get_if<std::vector<double>>(&v->value)) return *l;
    if (const auto* d = std::get_if<double>(&v->value)) return std::vector<double>{*d};
    throw ConfigError(key, "expected a list of numbers");
  }

 private:
  const ConfigMap& values_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

Expression compile(const std::string& text, int line, int column) {
  // Inside the quotes of a document value the expression starts one column later.
  return Expression::parse(text, line == 0 ? 1 : line, line == 0 ? 1 : column + 1);
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : kCommands) {
    if (c == command) return name;
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands) {
    if (name == n) return c;
  }
  return std::nullopt;
}

ConfigMap parse_document(const std::string& text) {
  ConfigMap out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    start = end + 1;

    const std::string body = strip_comment(line);
    LineScanner s(body, line_no);
    s.skip_space();
    if (s.done()) continue;
    if (s.peek() == '[') {
      s.expect('[', "'['");
      s.skip_space();
      s.identifier();
      s.skip_space();
      s.expect(']', "']'");
      s.skip_space();
      if (!s.done()) s.fail("unexpected text after section header");
      continue;
    }
    const int key_column = s.column();
    const std::string key = s.identifier();
    s.skip_space();
    s.expect('=', "'='");
    s.skip_space();
    ConfigValue value = s.value();
    s.skip_space();
    if (!s.done()) s.fail("unexpected text after value");
    if (out.count(key) != 0) {
      throw ParseError("duplicate key '" + key + "'", line_no, key_column);
    }
    out.emplace(key, std::move(value));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "command", "family", "p",       "custom_kind", "a_f",       "f",         "df",
      "d2f",     "n",      "M",       "step",        "floor",     "lambda",    "alphas",
      "q",       "formula", "tau_lo", "tau_hi",      "dim",       "kind",      "scan",
      "out",     "tolerance", "stability_tol", "key_rel", "cap_factor"};
  return keys;
}

RunConfig build_config(const ConfigMap& values) {
  const auto& keys = config_keys();
  for (const auto& [key, value] : values) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(key, "unknown key");
    }
  }
  const Reader r(values);
  RunConfig c;

  const auto command = r.string("command");
  require(command.has_value(), "command", "missing");
  const auto parsed = parse_command(*command);
  require(parsed.has_value(), "command", "unknown command '" + *command + "'");
  c.command = *parsed;

  if (auto v = r.string("family")) c.family.name = *v;
  c.family.p = r.real("p");
  const std::string& fam = c.family.name;
  if (fam == "power" || fam == "singular_power") {
    require(c.family.p.has_value(), "p", "required for family " + fam);
    require(*c.family.p > 1.0, "p", "p must exceed 1");
  } else if (fam == "exp_pow") {
    require(c.family.p.has_value(), "p", "required for family exp_pow");
    require(*c.family.p > 0.0, "p", "p must be positive");
  } else if (fam == "exp" || fam == "t_log_t" || fam == "custom") {
    require(!c.family.p.has_value(), "p", "family " + fam + " takes no parameter");
  } else {
    throw ConfigError("family", "unknown family '" + fam + "'");
  }
  for (const char* key : {"custom_kind", "a_f", "f", "df", "d2f"}) {
    require(fam == "custom" || r.find(key) == nullptr, key, "only valid for family custom");
  }
  if (fam == "custom") {
    if (auto v = r.string("custom_kind")) c.family.custom_kind = *v;
    require(c.family.custom_kind == "regular" || c.family.custom_kind == "singular", "custom_kind",
            "must be regular or singular");
    c.family.a_f = r.real("a_f");
    if (c.family.custom_kind == "singular") {
      require(c.family.a_f.has_value() && *c.family.a_f > 0.0, "a_f",
              "a singular family needs a_f > 0");
    } else {
      require(!c.family.a_f.has_value(), "a_f", "a regular family has a_f = infinity");
    }
    auto expr = [&](const char* key, std::string& text, int& line, int& column, bool needed) {
      const auto* v = r.find(key);
      if (v == nullptr) {
        require(!needed, key, "missing");
        return;
      }
      text = *r.string(key);
      line = v->line;
      column = v->column;
      compile(text, line, column);
    };
    expr("f", c.family.f, c.family.f_line, c.family.f_column, true);
    expr("df", c.family.df, c.family.df_line, c.family.df_column, false);
    expr("d2f", c.family.d2f, c.family.d2f_line, c.family.d2f_column, false);
  }

  if (auto v = r.integer("n")) c.n = *v;
  require(c.n >= 1, "n", "dimension must be at least 1");
  if (auto v = r.integer("M")) c.M = *v;
  require(c.M >= 64, "M", "grid needs at least 64 intervals");
  c.step = c.command == Command::Certify ? 1e-3 : 0.05;
  if (auto v = r.real("step")) c.step = *v;
  require(c.step > 0.0, "step", "must be positive");
  if (auto v = r.real("floor")) c.floor = *v;
  require(c.floor > 0.0, "floor", "must be positive");
  if (c.command == Command::Sweep || c.command == Command::Verify) {
    require(c.step > c.floor, "step", "must exceed floor");
  }
  if (auto v = r.real("lambda")) c.lambda = *v;
  require(c.lambda >= 0.0, "lambda", "must be nonnegative");
  if (auto v = r.list("alphas")) c.alphas = *v;
  require(!c.alphas.empty(), "alphas", "must not be empty");
  for (double a : c.alphas) require(a > 0.5, "alphas", "each alpha must exceed 1/2");
  if (auto v = r.list("q")) c.q = *v;
  require(!c.q.empty(), "q", "must not be empty");
  for (double q : c.q) require(q > 0.0, "q", "each q must be positive");
  if (auto v = r.string("formula")) c.formula = *v;
  require(c.formula == "A" || c.formula == "B" || c.formula == "both", "formula",
          "must be A, B or both");
  c.tau_lo = r.real("tau_lo");
  c.tau_hi = r.real("tau_hi");
  if (c.tau_lo || c.tau_hi) {
    require(c.formula != "both", "formula", "an explicit tau interval needs formula A or B");
    require(c.tau_lo.has_value(), "tau_lo", "missing");
    require(c.tau_hi.has_value(), "tau_hi", "missing");
    require(*c.tau_lo > 0.0, "tau_lo", "must be positive");
    require(*c.tau_hi < 2.0, "tau_hi", "must be below 2");
    require(*c.tau_lo < *c.tau_hi, "tau_lo", "must be below tau_hi");
  }
  if (auto v = r.integer("dim")) c.dim = *v;
  require(c.dim >= 2, "dim", "must be at least 2");
  if (auto v = r.string("kind")) c.kind = *v;
  require(c.kind == "regular" || c.kind == "singular", "kind", "must be regular or singular");
  if (auto v = r.string("scan")) c.scan = *v;
  require(c.scan == "tau" || c.scan == "p", "scan", "must be tau or p");
  if (auto v = r.string("out")) c.out = *v;
  require(!c.out.empty(), "out", "must not be empty");
  if (auto v = r.real("tolerance")) c.tolerance = *v;
  require(c.tolerance > 0.0, "tolerance", "must be positive");
  if (auto v = r.real("stability_tol")) c.stability_tol = *v;
  require(c.stability_tol > 0.0, "stability_tol", "must be positive");
  if (auto v = r.real("key_rel")) c.key_rel = *v;
  require(c.key_rel > 0.0, "key_rel", "must be positive");
  if (auto v = r.real("cap_factor")) c.cap_factor = *v;
  require(c.cap_factor > 1.0, "cap_factor", "must exceed 1");
  return c;
}

RunConfig parse_config(const std::string& text) { return build_config(parse_document(text)); }

Nonlinearity make_family(const FamilySpec& spec) {
  if (spec.name != "custom") {
    return make_builtin(spec.name, spec.p ? std::vector<double>{*spec.p} : std::vector<double>{});
  }
  auto wrap = [](const Expression& e) -> ScalarFn { return [e](double t) { return e(t); }; };
  const Expression f = compile(spec.f, spec.f_line, spec.f_column);
  std::optional<ScalarFn> df;
  std::optional<ScalarFn> d2f;
  if (!spec.df.empty()) df = wrap(compile(spec.df, spec.df_line, spec.df_column));
  if (!spec.d2f.empty()) d2f = wrap(compile(spec.d2f, spec.d2f_line, spec.d2f_column));
  const bool singular = spec.custom_kind == "singular";
  return make_custom("custom", singular ? Kind::Singular : Kind::Regular,
                     singular ? *spec.a_f : std::numeric_limits<double>::infinity(), wrap(f), df,
                     d2f);
}

std::filesystem::path output_directory(const RunConfig& config) {
  std::filesystem::path out(config.out);
  if (out.is_relative()) {
    if (const char* root = std::getenv("EXTREMAL_OUT_ROOT"); root != nullptr && *root != '\0') {
      return std::filesystem::path(root) / out;
    }
  }
  return out;
}

std::filesystem::path prepare_output(const RunConfig& config) {
  const auto dir = output_directory(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "probe") || !f.flush()) {
      throw ConfigError("out", "output directory is not writable: " + dir.string());
    }
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

}  // namespace extremal
