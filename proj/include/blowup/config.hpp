#pragma once

// Run configuration for the command-line front end.
//
// Grammar (UTF-8, one entry per line):
//   # comment            ; comment
//   [section]
//   key = value          numbers unquoted, expressions and names in "double quotes"
//
// Top-level keys (before any section) may only be `verb`.  Errors are
// collected over the whole file and reported together with line numbers.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/expression.hpp"
#include "blowup/limits.hpp"

namespace blowup {

enum class Verb { classify, profile, predict, solve, verify };

inline const char* to_string(Verb v) {
  switch (v) {
    case Verb::classify: return "classify";
    case Verb::profile: return "profile";
    case Verb::predict: return "predict";
    case Verb::solve: return "solve";
    case Verb::verify: return "verify";
  }
  return "?";
}

inline std::optional<Verb> parse_verb(const std::string& s) {
  for (Verb v : {Verb::classify, Verb::profile, Verb::predict, Verb::solve, Verb::verify})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

struct ConfigIssue {
  int line = 0;  // 0: not tied to a line (missing section, command line)
  std::string message;
};

inline std::string format_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream o;
  for (const auto& i : issues) {
    if (i.line > 0) o << "line " << i.line << ": ";
    o << i.message << '\n';
  }
  return o.str();
}

// Thrown with every issue found in a file.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<ConfigIssue> issues)
      : ConfigError(format_issues(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Raw key-value document.
struct ConfigEntry {
  std::string value;
  bool quoted = false;
  int line = 0;
};

struct ConfigDocument {
  // section -> key -> entry; the unnamed top section is "".
  std::map<std::string, std::map<std::string, ConfigEntry>> sections;
  std::map<std::string, int> section_lines;

  const ConfigEntry* find(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
  bool has(const std::string& section) const { return sections.count(section) > 0; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace detail

inline ConfigDocument lex_config(const std::string& text, std::vector<ConfigIssue>& issues) {
  ConfigDocument doc;
  std::string section;
  doc.sections[section];
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s[0] == '[') {
      const auto close = s.find(']');
      const std::string name = close == std::string::npos ? "" : detail::trim(s.substr(1, close - 1));
      if (close == std::string::npos || !detail::valid_name(name) ||
          !detail::trim(s.substr(close + 1)).empty()) {
        issues.push_back({line, "malformed section header '" + s + "'"});
        continue;
      }
      section = name;
      if (doc.section_lines.count(name)) {
        issues.push_back({line, "section [" + name + "] repeated (first at line " +
                                    std::to_string(doc.section_lines[name]) + ")"});
      } else {
        doc.section_lines[name] = line;
      }
      doc.sections[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line, "expected 'key = value'"});
      continue;
    }
    const std::string key = detail::trim(s.substr(0, eq));
    std::string rest = detail::trim(s.substr(eq + 1));
    if (!detail::valid_name(key)) {
      issues.push_back({line, "invalid key '" + key + "'"});
      continue;
    }
    ConfigEntry e;
    e.line = line;
    if (!rest.empty() && rest[0] == '"') {
      const auto close = rest.find('"', 1);
      if (close == std::string::npos) {
        issues.push_back({line, "unterminated string for '" + key + "'"});
        continue;
      }
      e.value = rest.substr(1, close - 1);
      e.quoted = true;
      const std::string tail = detail::trim(rest.substr(close + 1));
      if (!tail.empty() && tail[0] != '#' && tail[0] != ';') {
        issues.push_back({line, "unexpected text after the string for '" + key + "'"});
        continue;
      }
    } else {
      const auto hash = rest.find_first_of("#;");
      if (hash != std::string::npos) rest = detail::trim(rest.substr(0, hash));
      if (rest.empty()) {
        issues.push_back({line, "missing value for '" + key + "'"});
        continue;
      }
      e.value = rest;
    }
    auto& sec = doc.sections[section];
    const auto prev = sec.find(key);
    if (prev != sec.end()) {
      issues.push_back({line, "duplicate key '" + (section.empty() ? key : section + "." + key) + "' at lines " +
                                  std::to_string(prev->second.line) + " and " + std::to_string(line)});
      continue;
    }
    sec.emplace(key, e);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Typed configuration.

struct WeightSpec {
  std::string family;  // power | constant | exp-flat | E | W | values
  double C0 = 1, gamma = 0;                // power
  double c = 1;                            // constant, exp-flat
  double zeta = 1;                         // exp-flat
  double c0 = 1, alpha = 0, c1 = 1;        // E
  double d0 = 1, d1 = 1;                   // W
  double nu = std::numeric_limits<double>::infinity();  // values
  std::optional<Expression> E, W, k, dk;
  std::optional<double> zeta_hint, tau_hint;
};

struct NonlinearitySpec {
  double C = 1, rho = 2, B = 1;
  std::optional<Expression> eps;      // in u
  std::optional<Expression> eps_log;  // in s = ln u
  std::string tag = "pure_power";     // pure_power | rho_eta | rho0_tau
  double eta = 0, tau = 0, ell_star = 0;
};

struct BSpec {
  std::string form = "first_order";  // first_order | two_term
  double theta = 1, c_tilde = 0;
};

struct GeometrySpec {
  std::string kind = "interval";  // interval | ball | annulus
  double L = 1, R = 1, R0 = 0.5;
  int N = 3;
  double a = 0;
};

struct ManufacturedSpec {
  Expression u, du, d2u;  // in x
};

struct SolverSpec {
  int level = 2;
  double eps_b = 1e-7;
  std::string closure = "asymptotic";  // asymptotic | dirichlet-M | exact
  double M0 = 0;
  bool richardson = false;
  bool sensitivity = false;
  double newton_tol = 1e-10;
  int max_newton = 200;
};

struct ToleranceSpec {
  double tol = default_tolerance();
  double first_order = 0.02;
  double second_order = 0.10;
  double barrier = 0.02;
  double min_offset = 2.0;
  double order_min = 1.8;
};

struct ProfileSpec {
  double t_start = 0.1, ratio = 0.5;
  int points = 20;
};

struct VerifySpec {
  bool second_order = true;
  std::optional<double> barrier_eps;
  bool echo = false;
  int levels = 4;  // manufactured convergence: levels 0..levels-1
};

struct RunConfig {
  Verb verb = Verb::classify;
  std::optional<WeightSpec> weight;
  std::optional<NonlinearitySpec> nonlinearity;
  BSpec b;
  std::optional<GeometrySpec> geometry;
  std::optional<ManufacturedSpec> manufactured;
  SolverSpec solver;
  ToleranceSpec tolerances;
  ProfileSpec profile;
  VerifySpec verify;
};

namespace detail {

enum class ValueKind { number, integer, boolean, name, expression };

struct KeySchema {
  ValueKind kind;
  std::string variable;  // for expressions
};

inline const std::map<std::string, std::map<std::string, KeySchema>>& config_schema() {
  using K = ValueKind;
  static const std::map<std::string, std::map<std::string, KeySchema>> s{
      {"", {{"verb", {K::name, ""}}}},
      {"weight",
       {{"family", {K::name, ""}},       {"C0", {K::number, ""}},     {"gamma", {K::number, ""}},
        {"c", {K::number, ""}},          {"zeta", {K::number, ""}},   {"c0", {K::number, ""}},
        {"alpha", {K::number, ""}},      {"c1", {K::number, ""}},     {"d0", {K::number, ""}},
        {"d1", {K::number, ""}},         {"nu", {K::number, ""}},     {"E", {K::expression, "t"}},
        {"W", {K::expression, "t"}},     {"k", {K::expression, "t"}}, {"dk", {K::expression, "t"}},
        {"zeta_hint", {K::number, ""}}, {"tau_hint", {K::number, ""}}}},
      {"nonlinearity",
       {{"C", {K::number, ""}},
        {"rho", {K::number, ""}},
        {"B", {K::number, ""}},
        {"eps", {K::expression, "u"}},
        {"eps_log", {K::expression, "s"}},
        {"class", {K::name, ""}},
        {"eta", {K::number, ""}},
        {"tau", {K::number, ""}},
        {"ell_star", {K::number, ""}}}},
      {"b", {{"form", {K::name, ""}}, {"theta", {K::number, ""}}, {"c_tilde", {K::number, ""}}}},
      {"geometry",
       {{"kind", {K::name, ""}},
        {"L", {K::number, ""}},
        {"R", {K::number, ""}},
        {"R0", {K::number, ""}},
        {"N", {K::integer, ""}},
        {"a", {K::number, ""}}}},
      {"manufactured", {{"u", {K::expression, "x"}}, {"du", {K::expression, "x"}}, {"d2u", {K::expression, "x"}}}},
      {"solver",
       {{"level", {K::integer, ""}},
        {"eps_b", {K::number, ""}},
        {"closure", {K::name, ""}},
        {"M0", {K::number, ""}},
        {"richardson", {K::boolean, ""}},
        {"sensitivity", {K::boolean, ""}},
        {"newton_tol", {K::number, ""}},
        {"max_newton", {K::integer, ""}}}},
      {"tolerances",
       {{"tol", {K::number, ""}},
        {"first_order", {K::number, ""}},
        {"second_order", {K::number, ""}},
        {"barrier", {K::number, ""}},
        {"min_offset", {K::number, ""}},
        {"order_min", {K::number, ""}}}},
      {"profile", {{"t_start", {K::number, ""}}, {"ratio", {K::number, ""}}, {"points", {K::integer, ""}}}},
      {"verify",
       {{"second_order", {K::boolean, ""}},
        {"barrier_eps", {K::number, ""}},
        {"echo", {K::boolean, ""}},
        {"levels", {K::integer, ""}}}},
  };
  return s;
}

inline std::optional<double> parse_number(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || std::isnan(v)) return std::nullopt;
  return v;
}

// Typed access to one section with issue collection.
class SectionReader {
 public:
  SectionReader(const ConfigDocument& doc, std::string section, std::vector<ConfigIssue>& issues)
      : doc_(doc), section_(std::move(section)), issues_(issues) {}

  const ConfigEntry* entry(const std::string& key) const { return doc_.find(section_, key); }
  bool has(const std::string& key) const { return entry(key) != nullptr; }

  void number(const std::string& key, double& out, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity(), bool open_lo = false) {
    const auto* e = entry(key);
    if (!e) return;
    const auto v = parse_number(e->value);
    if (!v || e->quoted) {
      fail(*e, key, "expects a number, got '" + e->value + "'");
      return;
    }
    if (*v < lo || *v > hi || (open_lo && *v == lo)) {
      fail(*e, key, "value " + e->value + " is out of range " + range(lo, hi, open_lo));
      return;
    }
    out = *v;
  }
  void number(const std::string& key, std::optional<double>& out, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity(), bool open_lo = false) {
    if (!has(key)) return;
    double v = std::numeric_limits<double>::quiet_NaN();
    number(key, v, lo, hi, open_lo);
    if (!std::isnan(v)) out = v;
  }
  void integer(const std::string& key, int& out, int lo, int hi) {
    const auto* e = entry(key);
    if (!e) return;
    int v = 0;
    const auto r = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (e->quoted || r.ec != std::errc() || r.ptr != e->value.data() + e->value.size()) {
      fail(*e, key, "expects an integer, got '" + e->value + "'");
      return;
    }
    if (v < lo || v > hi) {
      fail(*e, key, "value " + e->value + " is out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return;
    }
    out = v;
  }
  void boolean(const std::string& key, bool& out) {
    const auto* e = entry(key);
    if (!e) return;
    if (e->value == "true") {
      out = true;
    } else if (e->value == "false") {
      out = false;
    } else {
      fail(*e, key, "expects true or false, got '" + e->value + "'");
    }
  }
  void name(const std::string& key, std::string& out, const std::set<std::string>& allowed) {
    const auto* e = entry(key);
    if (!e) return;
    if (!allowed.count(e->value)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(*e, key, "unknown value '" + e->value + "' (expected one of: " + list + ")");
      return;
    }
    out = e->value;
  }
  void expression(const std::string& key, std::optional<Expression>& out, const std::string& var) {
    const auto* e = entry(key);
    if (!e) return;
    if (!e->quoted) {
      fail(*e, key, "expression must be a quoted string");
      return;
    }
    try {
      out = Expression::parse(e->value, var);
    } catch (const ParseError& p) {
      fail(*e, key, "malformed expression \"" + e->value + "\": " + p.what());
    }
  }
  void require(const std::string& key, const std::string& why) {
    if (!has(key)) {
      const auto it = doc_.section_lines.find(section_);
      issues_.push_back({it == doc_.section_lines.end() ? 0 : it->second,
                         "[" + section_ + "] needs '" + key + "' " + why});
    }
  }
  void fail_at(const std::string& key, const std::string& msg) {
    const auto* e = entry(key);
    issues_.push_back({e ? e->line : 0, msg});
  }

 private:
  void fail(const ConfigEntry& e, const std::string& key, const std::string& msg) {
    issues_.push_back({e.line, (section_.empty() ? key : section_ + "." + key) + ": " + msg});
  }
  static std::string range(double lo, double hi, bool open_lo) {
    auto s = [](double x) {
      std::ostringstream o;
      o << x;
      return o.str();
    };
    return std::string(open_lo ? "(" : "[") + s(lo) + ", " + s(hi) + "]";
  }
  const ConfigDocument& doc_;
  std::string section_;
  std::vector<ConfigIssue>& issues_;
};

}  // namespace detail

// Applies `section.key=value` overrides (as produced by --sweep).
inline void apply_override(ConfigDocument& doc, const std::string& path, const std::string& value) {
  const auto dot = path.find('.');
  const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
  const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
  auto& e = doc.sections[section][key];
  e.value = value;
  e.quoted = !value.empty() && !detail::parse_number(value) && value != "true" && value != "false" &&
             detail::config_schema().count(section) && detail::config_schema().at(section).count(key) &&
             detail::config_schema().at(section).at(key).kind == detail::ValueKind::expression;
  if (!doc.section_lines.count(section)) doc.section_lines[section] = 0;
}

// Validates a lexed document for the requested verb.
inline RunConfig build_config(const ConfigDocument& doc, Verb verb, std::vector<ConfigIssue>& issues) {
  using detail::SectionReader;
  const double inf = std::numeric_limits<double>::infinity();
  RunConfig cfg;
  cfg.verb = verb;
  const auto& schema = detail::config_schema();

  for (const auto& [sec, keys] : doc.sections) {
    const auto s = schema.find(sec);
    if (s == schema.end()) {
      const auto it = doc.section_lines.find(sec);
      issues.push_back({it == doc.section_lines.end() ? 0 : it->second, "unknown section [" + sec + "]"});
      continue;
    }
    for (const auto& [key, e] : keys)
      if (!s->second.count(key))
        issues.push_back({e.line, "unknown key '" + (sec.empty() ? key : sec + "." + key) + "'"});
  }

  if (const auto* v = doc.find("", "verb")) {
    const auto pv = parse_verb(v->value);
    if (!pv)
      issues.push_back({v->line, "verb: unknown verb '" + v->value + "'"});
    else if (*pv != verb)
      issues.push_back({v->line, std::string("verb: file declares '") + v->value + "' but '" + to_string(verb) +
                                     "' was requested"});
  }

  if (doc.has("weight")) {
    SectionReader r(doc, "weight", issues);
    WeightSpec w;
    r.require("family", "(power, constant, exp-flat, E, W or values)");
    r.name("family", w.family, {"power", "constant", "exp-flat", "E", "W", "values"});
    r.number("C0", w.C0, 0, inf, true);
    r.number("gamma", w.gamma, 0, inf);
    r.number("c", w.c, 0, inf, true);
    r.number("zeta", w.zeta, 0, inf, true);
    r.number("c0", w.c0, 0, inf, true);
    r.number("alpha", w.alpha, 0, inf);
    r.number("c1", w.c1, 0, inf, true);
    r.number("d0", w.d0, 0, inf, true);
    r.number("d1", w.d1, 0, inf, true);
    r.number("nu", w.nu, 0, inf, true);
    r.number("zeta_hint", w.zeta_hint, 0, inf, true);
    r.number("tau_hint", w.tau_hint, 0, inf, true);
    r.expression("E", w.E, "t");
    r.expression("W", w.W, "t");
    r.expression("k", w.k, "t");
    r.expression("dk", w.dk, "t");
    if (w.family == "E") r.require("E", "for the E-representation");
    if (w.family == "W") r.require("W", "for the W-representation");
    if (w.family == "values") r.require("k", "for a weight given by values");
    cfg.weight = w;
  }

  if (doc.has("nonlinearity")) {
    SectionReader r(doc, "nonlinearity", issues);
    NonlinearitySpec n;
    r.number("C", n.C, 0, inf, true);
    // rho = 0 parses; the Keller-Osserman gate rejects it as a precondition.
    r.number("rho", n.rho, 0, inf);
    r.number("B", n.B, 0, inf, true);
    r.expression("eps", n.eps, "u");
    r.expression("eps_log", n.eps_log, "s");
    if (n.eps && n.eps_log) r.fail_at("eps_log", "nonlinearity: give eps or eps_log, not both");
    r.name("class", n.tag, {"pure_power", "rho_eta", "rho0_tau"});
    r.number("eta", n.eta, -inf, 0);
    r.number("tau", n.tau, 0, inf, true);
    r.number("ell_star", n.ell_star);
    if (n.tag == "rho0_tau") r.require("tau", "for class rho0_tau");
    if (n.tag != "pure_power" && !n.eps && !n.eps_log)
      r.fail_at("class", "nonlinearity: class " + n.tag + " needs an eps or eps_log expression");
    cfg.nonlinearity = n;
  }

  if (doc.has("b")) {
    SectionReader r(doc, "b", issues);
    r.name("form", cfg.b.form, {"first_order", "two_term"});
    r.number("theta", cfg.b.theta, 0, inf, true);
    r.number("c_tilde", cfg.b.c_tilde);
  }

  if (doc.has("geometry")) {
    SectionReader r(doc, "geometry", issues);
    GeometrySpec g;
    r.name("kind", g.kind, {"interval", "ball", "annulus"});
    r.number("L", g.L, 0, inf, true);
    r.number("R", g.R, 0, inf, true);
    r.number("R0", g.R0, 0, inf, true);
    r.integer("N", g.N, 1, 64);
    r.number("a", g.a);
    if (g.kind != "interval" && g.N < 3) r.fail_at("N", "geometry: balls and annuli need N >= 3");
    if (g.kind == "annulus" && !(g.R0 < g.R)) r.fail_at("R0", "geometry: annulus needs R0 < R");
    cfg.geometry = g;
  }

  if (doc.has("manufactured")) {
    SectionReader r(doc, "manufactured", issues);
    std::optional<Expression> u, du, d2u;
    r.require("u", "(exact solution)");
    r.require("du", "(first derivative)");
    r.require("d2u", "(second derivative)");
    r.expression("u", u, "x");
    r.expression("du", du, "x");
    r.expression("d2u", d2u, "x");
    if (u && du && d2u) cfg.manufactured = ManufacturedSpec{*u, *du, *d2u};
  }

  {
    SectionReader r(doc, "solver", issues);
    r.integer("level", cfg.solver.level, 0, 12);
    r.number("eps_b", cfg.solver.eps_b, 0, 0.1, true);
    r.name("closure", cfg.solver.closure, {"asymptotic", "dirichlet-M", "exact"});
    r.number("M0", cfg.solver.M0, 0, inf);
    r.boolean("richardson", cfg.solver.richardson);
    r.boolean("sensitivity", cfg.solver.sensitivity);
    r.number("newton_tol", cfg.solver.newton_tol, 0, 1, true);
    r.integer("max_newton", cfg.solver.max_newton, 1, 100000);
  }
  {
    SectionReader r(doc, "tolerances", issues);
    r.number("tol", cfg.tolerances.tol, 0, 1, true);
    r.number("first_order", cfg.tolerances.first_order, 0, 1, true);
    r.number("second_order", cfg.tolerances.second_order, 0, 1, true);
    r.number("barrier", cfg.tolerances.barrier, 0, 1, true);
    r.number("min_offset", cfg.tolerances.min_offset, 1, inf);
    r.number("order_min", cfg.tolerances.order_min, 0, inf, true);
  }
  {
    SectionReader r(doc, "profile", issues);
    r.number("t_start", cfg.profile.t_start, 0, inf, true);
    r.number("ratio", cfg.profile.ratio, 0, 1, true);
    if (cfg.profile.ratio == 1) r.fail_at("ratio", "profile.ratio must be below 1");
    r.integer("points", cfg.profile.points, 1, 10000);
  }
  {
    SectionReader r(doc, "verify", issues);
    r.boolean("second_order", cfg.verify.second_order);
    r.number("barrier_eps", cfg.verify.barrier_eps, 0, 0.25, true);
    r.boolean("echo", cfg.verify.echo);
    r.integer("levels", cfg.verify.levels, 2, 8);
  }

  // Sections each verb depends on.
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) issues.push_back({0, std::string(to_string(verb)) + " needs " + what});
  };
  switch (verb) {
    case Verb::classify: need(cfg.weight.has_value(), "a [weight] section"); break;
    case Verb::profile:
    case Verb::predict:
      need(cfg.weight.has_value(), "a [weight] section");
      need(cfg.nonlinearity.has_value(), "a [nonlinearity] section");
      break;
    case Verb::solve:
    case Verb::verify:
      need(cfg.geometry.has_value(), "a [geometry] section");
      need(cfg.nonlinearity.has_value(), "a [nonlinearity] section");
      need(cfg.weight.has_value() || doc.has("manufactured"), "a [weight] or [manufactured] section");
      if (cfg.weight && doc.has("manufactured"))
        issues.push_back({doc.section_lines.at("manufactured"), "[weight] and [manufactured] are exclusive"});
      if (cfg.solver.closure == "exact" && !doc.has("manufactured"))
        issues.push_back({0, "solver.closure = \"exact\" needs a [manufactured] section"});
      break;
  }
  return cfg;
}

// Parses and validates; throws ConfigErrors listing every problem.
inline RunConfig parse_config(const std::string& text, Verb verb,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  std::vector<ConfigIssue> issues;
  auto doc = lex_config(text, issues);
  for (const auto& [k, v] : overrides) apply_override(doc, k, v);
  auto cfg = build_config(doc, verb, issues);
  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(),
                     [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigErrors(std::move(issues));
  }
  return cfg;
}

}  // namespace blowup
