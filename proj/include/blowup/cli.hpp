#pragma once

// The five verbs of the command-line tool.  Each one reads a RunConfig,
// writes its artifacts into an output directory and returns an exit status:
//   0 ok, 1 configuration error, 2 precondition failure,
//   3 nonconvergence or numerical failure, 4 verification failure.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/bvp.hpp"
#include "blowup/config.hpp"
#include "blowup/expansion.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/profiles.hpp"
#include "blowup/report.hpp"
#include "blowup/weights.hpp"

namespace blowup::cli {

enum ExitCode : int { ok = 0, config_error = 1, precondition = 2, nonconvergence = 3, verification_failure = 4 };

// ---------------------------------------------------------------------------
// Builders from the typed config.

inline WeightFunction build_weight(const WeightSpec& w) {
  if (w.family == "power") return power_weight(w.C0, w.gamma);
  if (w.family == "constant") return constant_weight(w.c);
  if (w.family == "exp-flat") return exp_flat_weight(w.zeta, w.c);
  if (w.family == "E") {
    const Expression E = *w.E;
    return weight_from_E(w.c0, w.alpha, E, w.c1, "E-form E(t) = " + E.text());
  }
  if (w.family == "W") {
    const Expression W = *w.W;
    return weight_from_W(w.d0, w.d1, W, nullptr, "W-form W(t) = " + W.text());
  }
  if (w.family == "values") {
    const Expression k = *w.k;
    RealMap dk;
    if (w.dk) dk = *w.dk;
    return weight_from_values(k, dk, w.nu, "k(t) = " + k.text());
  }
  throw ConfigError("weight: unknown family '" + w.family + "'");
}

inline NonlinearityClass build_class(const NonlinearitySpec& n) {
  if (n.tag == "rho_eta") return NonlinearityClass::rho_eta(n.eta);
  if (n.tag == "rho0_tau") return NonlinearityClass::rho0_tau(n.tau, n.ell_star);
  return NonlinearityClass::pure_power();
}

inline Nonlinearity build_nonlinearity(const NonlinearitySpec& n) {
  NonlinearityOptions o;
  if (n.eps_log) {
    o.label = "C u^(rho+1) exp(int eps), eps(s) = " + n.eps_log->text();
    return make_nonlinearity_log(n.C, n.rho, n.B, *n.eps_log, build_class(n), o);
  }
  if (n.eps) {
    o.label = "C u^(rho+1) exp(int eps), eps(u) = " + n.eps->text();
    return make_nonlinearity(n.C, n.rho, n.B, *n.eps, build_class(n), o);
  }
  if (n.tag != "pure_power") throw ConfigError("nonlinearity: class " + n.tag + " needs eps");
  return pure_power_nonlinearity(n.C, n.rho);
}

inline BExpansion build_bexp(const BSpec& b) {
  return b.form == "two_term" ? BExpansion::two_term(b.theta, b.c_tilde) : BExpansion::first_order();
}

inline Geometry build_geometry(const GeometrySpec& g) {
  if (g.kind == "ball") return Geometry::ball(g.N, g.R);
  if (g.kind == "annulus") return Geometry::annulus(g.N, g.R0, g.R);
  return Geometry::interval(g.L);
}

inline ClassifyOptions classify_options(const WeightSpec& w) {
  ClassifyOptions o;
  o.zeta_hint = w.zeta_hint;
  o.tau_hint = w.tau_hint;
  return o;
}

inline Closure build_closure(const SolverSpec& s) {
  if (s.closure == "dirichlet-M") return Closure::dirichlet_M(s.M0);
  if (s.closure == "exact") return Closure::exact();
  return Closure::asymptotic();
}

// Objects a run needs, built (and thereby validated) before any heavy work.
struct Setup {
  std::optional<WeightFunction> k;
  std::optional<Nonlinearity> f;
  BExpansion bexp;
  std::optional<Geometry> geometry;
  std::optional<RadialProblem> problem;
};

inline Setup build_setup(const RunConfig& c) {
  Setup s;
  s.bexp = build_bexp(c.b);
  if (c.weight) s.k = build_weight(*c.weight);
  if (c.nonlinearity) s.f = build_nonlinearity(*c.nonlinearity);
  if (c.geometry) s.geometry = build_geometry(*c.geometry);
  if ((c.verb == Verb::solve || c.verb == Verb::verify) && s.geometry && s.f) {
    if (c.manufactured) {
      const auto& m = *c.manufactured;
      s.problem = manufactured_problem(ExactSolution{m.u, m.du, m.d2u}, *s.geometry, c.geometry->a, *s.f);
    } else if (s.k) {
      s.problem = weighted_problem(*s.geometry, c.geometry->a, *s.k, s.bexp, *s.f);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Text helpers.

inline std::string rate_formula(const ExpansionPrediction& p) {
  return p.rate_kind == RateKind::algebraic ? "u = xi0 h(d) (1 + chi d^varpi + o(d^varpi))"
                                            : "u = xi0 h(d) (1 + chi~ (-ln d)^(-tau) + o((-ln d)^(-tau)))";
}

// Lines stating a theorem constant, each naming its case and formula.
inline std::vector<std::string> constant_lines(const ExpansionPrediction& p) {
  std::vector<std::string> out;
  const std::string tag = "[" + p.case_tag + "] ";
  const std::string lead = p.order == 2 && p.rate_kind == RateKind::algebraic
                               ? "xi0 = (2/(2+rho))^(1/rho) (l1 = 0)"
                               : "xi0 = ((2 + l1 rho)/(2 + rho))^(1/rho)";
  out.push_back(tag + "xi0 = " + fmt17(p.leading) + "  via " + lead);
  out.push_back(tag + "phi_coefficient = " + fmt17(p.phi_leading) + "  via [2(2 + l1 rho)/rho^2]^(1/rho), u ~ " +
                "phi_coefficient * phi(d)");
  if (p.order == 2) {
    const bool alg = p.rate_kind == RateKind::algebraic;
    out.push_back(tag + (alg ? "varpi = " : "tau = ") + fmt17(p.rate) + "  via " + rate_formula(p));
    out.push_back(tag + (alg ? "chi = " : "chi~ = ") + fmt17(p.second_coeff) + "  via " + p.formula);
  }
  return out;
}

inline std::string estimate_text(const LimitEstimate& e) {
  return fmt17(e.value) + " (error " + fmt17(e.error) + (e.converged ? ", converged" : ", not converged") + ")";
}

// ---------------------------------------------------------------------------
// Verbs.

struct Context {
  const RunConfig& cfg;
  const Setup& setup;
  std::filesystem::path out;
  std::ostream& log;
};

inline int run_classify(const Context& c) {
  const auto rep = classify_weight(*c.setup.k, classify_options(*c.cfg.weight));
  std::ostringstream t;
  t << "weight: " << c.setup.k->label() << '\n';
  t << "subclass: " << to_string(rep.subclass) << '\n';
  t << "l0 = " << estimate_text(rep.ell0) << '\n';
  t << "l1 = " << estimate_text(rep.ell1) << '\n';
  if (rep.alpha) t << "alpha = " << fmt17(*rep.alpha) << '\n';
  if (rep.zeta) t << "zeta = " << fmt17(*rep.zeta) << '\n';
  if (rep.Lstar) t << "L* = " << estimate_text(*rep.Lstar) << '\n';
  if (rep.tau) t << "tau = " << fmt17(*rep.tau) << '\n';
  if (rep.Lsharp) t << "L# = " << estimate_text(*rep.Lsharp) << '\n';
  if (rep.index_of_reciprocal) t << "RV index of k(1/u) = " << estimate_text(*rep.index_of_reciprocal) << '\n';
  for (const auto& n : rep.notes) t << "note: " << n << '\n';
  write_file(c.out / "classify.txt", t.str());

  CsvTable csv({"quantity", "value", "error", "converged"});
  auto est = [&](const std::string& q, const LimitEstimate& e) {
    csv.add_text({q, fmt17(e.value), fmt17(e.error), e.converged ? "true" : "false"});
  };
  csv.add_text({"subclass", to_string(rep.subclass), "", ""});
  est("l0", rep.ell0);
  est("l1", rep.ell1);
  if (rep.alpha) csv.add_text({"alpha", fmt17(*rep.alpha), "", ""});
  if (rep.zeta) csv.add_text({"zeta", fmt17(*rep.zeta), "", ""});
  if (rep.Lstar) est("Lstar", *rep.Lstar);
  if (rep.tau) csv.add_text({"tau", fmt17(*rep.tau), "", ""});
  if (rep.Lsharp) est("Lsharp", *rep.Lsharp);
  if (rep.index_of_reciprocal) est("index_of_reciprocal", *rep.index_of_reciprocal);
  write_file(c.out / "classify.csv", csv.str());
  c.log << t.str();
  return ok;
}

inline int run_profile(const Context& c) {
  const BlowupProfile P(*c.setup.f, *c.setup.k);
  const auto& ps = c.cfg.profile;
  const auto grid = profile_grid(P, ps.points, ps.t_start, ps.ratio);
  if (grid.empty()) throw DomainError("profile: no usable grid point below t_start");
  CsvTable csv({"t", "h", "h'", "h''", "phi"});
  for (const auto& r : profile_table(P, grid)) csv.add({r.t, r.h, r.dh, r.d2h, r.phi});
  write_file(c.out / "profile.csv", csv.str());

  std::ostringstream t;
  t << "profile of f = " << c.setup.f->label() << ", k = " << c.setup.k->label() << '\n';
  t << "rows: " << csv.size() << " (t from " << fmt17(grid.front()) << " to " << fmt17(grid.back()) << ")\n";
  try {
    const auto rep = classify_weight(*c.setup.k, classify_options(*c.cfg.weight));
    AuxReportOptions o;
    o.t_start = ps.t_start;
    for (const auto& row : lemma_aux_report(P, rep, o)) {
      t << (row.pass ? "PASS " : "FAIL ") << row.name << ": " << row.formula;
      if (!row.divergence) t << ", target " << fmt17(row.target) << ", estimate " << estimate_text(row.estimate);
      t << '\n';
    }
  } catch (const Error& e) {
    t << "limit rows skipped: " << e.what() << '\n';
  }
  write_file(c.out / "profile.txt", t.str());
  c.log << t.str();
  return ok;
}

inline ExpansionPrediction make_prediction(const Context& c) {
  const auto rep = classify_weight(*c.setup.k, classify_options(*c.cfg.weight));
  return predict(*c.setup.f, rep, c.setup.bexp);
}

inline int run_predict(const Context& c) {
  const auto p = make_prediction(c);
  std::ostringstream t;
  for (const auto& line : constant_lines(p)) t << line << '\n';
  t << "[" << p.case_tag << "] leading term = xi0 h(d)  via u = [2(2+l1 rho)/rho^2]^(1/rho) phi(d) (1+o(1)) = xi0 h(d) (1+o(1))"
    << '\n';
  for (const auto& n : p.notes) t << "note: " << n << '\n';
  t << '\n';
  CsvTable csv({"key", "value"});
  for (const auto& [k, v] : p.record()) {
    t << k << " = " << v << '\n';
    csv.add_text({k, v});
  }
  write_file(c.out / "prediction.txt", t.str());
  write_file(c.out / "prediction.csv", csv.str());
  c.log << t.str();
  return ok;
}

// Solver pieces shared by solve and verify.
struct Solved {
  LargeSolution s;
  std::optional<BlowupProfile> P;
  std::optional<ExpansionPrediction> pred;
};

inline SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.eps_b = cfg.solver.eps_b;
  o.tol = cfg.tolerances.tol;
  o.newton_tol = cfg.solver.newton_tol;
  o.max_newton = cfg.solver.max_newton;
  o.sensitivity = cfg.solver.sensitivity;
  return o;
}

inline Solved solve_configured(const Context& c, const Closure& closure) {
  Solved r{LargeSolution{}, std::nullopt, std::nullopt};
  auto o = solve_options(c.cfg);
  if (c.setup.k) {
    r.P.emplace(*c.setup.f, *c.setup.k);
    r.pred = make_prediction(c);
    o.profile = r.P;
    o.prediction = r.pred;
  }
  const auto& pb = *c.setup.problem;
  r.s = c.cfg.solver.richardson ? solve_richardson(pb, c.cfg.solver.level, closure, o)
                                : solve_large_solution(pb, c.cfg.solver.level, closure, o);
  return r;
}

inline double safe_log_h(const BlowupProfile& P, double d) {
  try {
    return P.log_h(d);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Per-node columns: x, d, u, xi0 h(d), ratio, R(d), u_exact.
inline CsvTable solution_table(const Solved& r, const RadialProblem& pb) {
  CsvTable csv({"x", "d", "u", "xi0_h", "ratio", "R", "u_exact"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    const double d = r.s.distance[i];
    double lead = nan, ratio = nan, R = nan, exact = nan;
    if (r.P && r.pred) {
      lead = std::exp(std::log(r.pred->leading) + safe_log_h(*r.P, d));
      ratio = r.s.u(i) / lead;
      if (r.pred->order == 2) {
        const double scale =
            r.pred->rate_kind == RateKind::algebraic ? std::pow(d, -r.pred->rate) : std::pow(-std::log(d), r.pred->rate);
        R = (ratio - 1) * scale;
      }
    }
    if (pb.exact_log_u) {
      exact = std::exp(pb.exact_log_u(r.s.grid[i]));
      if (!r.P) ratio = r.s.u(i) / exact;
    }
    csv.add({r.s.grid[i], d, r.s.u(i), lead, ratio, R, exact});
  }
  return csv;
}

inline std::string diagnostics_text(const Solved& r, const RadialProblem& pb) {
  const auto& g = r.s.diagnostics;
  std::ostringstream t;
  t << "problem: " << pb.label << '\n';
  t << "geometry: " << r.s.geometry.describe() << ", a = " << fmt17(pb.a) << '\n';
  t << "closure: " << to_string(r.s.closure) << ", eps_b = " << fmt17(r.s.epsilon_b)
    << ", ln u(eps_b) = " << fmt17(r.s.boundary_log_value) << '\n';
  t << "mesh level: " << g.mesh_level << ", nodes: " << r.s.size() << '\n';
  t << "newton iterations: " << g.newton_iterations << ", line-search failures: " << g.line_search_failures
    << ", fallback sweeps: " << (g.fallback_used ? "yes" : "no") << '\n';
  t << "final scaled residual: " << fmt17(g.final_residual) << '\n';
  t << "residual history:";
  for (double v : g.residual_history) t << ' ' << fmt17(v);
  t << '\n';
  if (!g.M_sequence.empty()) {
    t << "ln M sequence:";
    for (double v : g.M_sequence) t << ' ' << fmt17(v);
    t << "\ninterior changes:";
    for (double v : g.M_changes) t << ' ' << fmt17(v);
    t << '\n';
  }
  if (g.sensitivity) t << "eps_b sensitivity (interior max |d ln u|): " << fmt17(*g.sensitivity) << '\n';
  if (!g.a_check.empty()) t << "a check: " << g.a_check << '\n';
  for (const auto& n : g.notes) t << "note: " << n << '\n';
  if (r.pred)
    for (const auto& line : constant_lines(*r.pred)) t << line << '\n';
  return t.str();
}

inline int run_solve(const Context& c) {
  const auto r = solve_configured(c, build_closure(c.cfg.solver));
  write_file(c.out / "solution.csv", solution_table(r, *c.setup.problem).str());
  const auto d = diagnostics_text(r, *c.setup.problem);
  write_file(c.out / "diagnostics.txt", d);
  c.log << d;
  return ok;
}

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string criterion_line(const Criterion& k) {
  return std::string(k.pass ? "PASS " : "FAIL ") + k.name + ": " + k.detail;
}

// Ratio series on the right-hand side, ordered by decreasing d.
inline Series ratio_series(const LargeSolution& s, const std::function<double(std::size_t)>& ratio,
                           const std::string& name) {
  Series out{name, {}, {}};
  for (std::size_t i = s.size(); i-- > 0;) {
    if (s.geometry.two_sided() && s.grid[i] < s.geometry.R0 + s.geometry.half_width()) continue;
    const double r = ratio(i);
    if (!std::isfinite(r)) continue;
    out.x.push_back(s.distance[i]);
    out.y.push_back(r);
  }
  std::reverse(out.x.begin(), out.x.end());
  std::reverse(out.y.begin(), out.y.end());
  return out;
}

inline void write_series(const Context& c, const Series& s, const std::string& stem, const std::string& ylabel,
                         const std::string& title, std::vector<double> refs) {
  write_file(c.out / (stem + ".dat"), plot_data(s, "d", ylabel));
  ChartOptions o;
  o.title = title;
  o.ylabel = ylabel;
  o.reference_lines = std::move(refs);
  write_file(c.out / (stem + ".svg"), svg_line_chart({s}, o));
}

inline std::vector<Criterion> verify_manufactured(const Context& c) {
  const auto& pb = *c.setup.problem;
  auto o = solve_options(c.cfg);
  std::vector<Criterion> out;
  CsvTable conv({"level", "max_log_error", "order"});
  std::vector<double> err;
  LargeSolution finest;
  for (int m = 0; m < c.cfg.verify.levels; ++m) {
    finest = solve_large_solution(pb, m, Closure::exact(), o);
    err.push_back(max_log_error(pb, finest));
    const double order = m == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(err[m - 1] / err[m]);
    conv.add({static_cast<double>(m), err.back(), order});
    if (m > 0) {
      Criterion k{"convergence order level " + std::to_string(m - 1) + "->" + std::to_string(m), false, {}};
      k.pass = order >= c.cfg.tolerances.order_min;
      k.detail = "order " + fmt17(order) + " >= " + fmt17(c.cfg.tolerances.order_min) + " [manufactured solution]";
      out.push_back(k);
    }
  }
  write_file(c.out / "convergence.csv", conv.str());
  const auto s = ratio_series(
      finest, [&](std::size_t i) { return std::exp(finest.log_u[i] - pb.exact_log_u(finest.grid[i])); }, "u/u*");
  write_series(c, s, "ratio", "u/u*", "u/u* against d (manufactured)", {1.0});
  return out;
}

inline std::vector<Criterion> verify_weighted(const Context& c) {
  std::vector<Criterion> out;
  const auto r = solve_configured(c, build_closure(c.cfg.solver));
  const auto& P = *r.P;
  const auto& pred = *r.pred;
  VerifyOptions vo;
  vo.first_order_tol = c.cfg.tolerances.first_order;
  vo.second_order_tol = c.cfg.tolerances.second_order;
  vo.min_offset = c.cfg.tolerances.min_offset;
  const std::string tag = "[" + pred.case_tag + "] ";

  const auto first = verify_first_order(r.s, pred, P, vo);
  out.push_back({"first-order ratio", first.pass,
                 tag + "u/(xi0 h(d)) -> 1 with xi0 = " + fmt17(pred.leading) + ": estimate " +
                     estimate_text(first.estimate) + ", tolerance " + fmt17(vo.first_order_tol) +
                     (first.note.empty() ? "" : "; " + first.note)});
  const auto series = ratio_series(
      r.s, [&](std::size_t i) { return std::exp(detail::log_ratio_to_leading(r.s, pred, P, i)); }, "u/(xi0 h)");
  write_series(c, series, "ratio", "u/(xi0 h(d))", "u/(xi0 h(d)) against d", {1.0});

  if (pred.order == 2 && c.cfg.verify.second_order) {
    const auto second = verify_second_order(r.s, pred, P, vo);
    const bool alg = pred.rate_kind == RateKind::algebraic;
    out.push_back({"second-order coefficient", second.pass,
                   tag + (alg ? "chi" : "chi~") + " = " + fmt17(second.target) + " via " + pred.formula +
                       ": fitted " + estimate_text(second.estimate) +
                       (second.inconclusive ? " (inconclusive)" : "") + (second.note.empty() ? "" : "; " + second.note)});
    Series Rs{"R(d)", {}, {}};
    for (const auto& smp : second.samples) {
      Rs.x.push_back(smp.x);
      Rs.y.push_back(smp.value);
    }
    std::reverse(Rs.x.begin(), Rs.x.end());
    std::reverse(Rs.y.begin(), Rs.y.end());
    write_series(c, Rs, "second_order", "R(d)", "second-order remainder R(d) against d", {second.target});
  }

  if (c.cfg.verify.barrier_eps) {
    const int order = pred.order == 2 && pred.rate_kind == RateKind::logarithmic ? 2 : 1;
    SubSuperOptions so;
    so.geometry = *c.setup.geometry;
    so.rel_tol = c.cfg.tolerances.barrier;
    const auto b = subsupersolution_check(P, pred, c.cfg.geometry->a, *c.cfg.verify.barrier_eps, order,
                                          c.setup.bexp, so);
    std::string d = tag + (order == 1 ? "B+/- -> -/+eps/(1-/+2eps)" : "J+/- -> -/+rho eps") + ": targets " +
                    fmt17(b.target_plus) + ", " + fmt17(b.target_minus) + "; limits " + fmt17(b.lim_plus.value) +
                    ", " + fmt17(b.lim_minus.value) + "; delta1 = " + (b.delta1 ? fmt17(*b.delta1) : "none");
    out.push_back({"sub/supersolution signs", b.pass, d});
    CsvTable csv({"d", "plus", "minus"});
    for (const auto& row : b.rows) csv.add({row.d, row.plus, row.minus});
    write_file(c.out / "barriers.csv", csv.str());
  }

  if (c.cfg.verify.echo) {
    const auto asym = r.s.closure == ClosureKind::asymptotic ? r : solve_configured(c, Closure::asymptotic());
    const auto dirM = r.s.closure == ClosureKind::dirichlet_M ? r : solve_configured(c, Closure::dirichlet_M(c.cfg.solver.M0));
    const auto e = uniqueness_echo(asym.s, dirM.s, 0.1, c.cfg.tolerances.tol);
    out.push_back({"uniqueness echo", e.pass,
                   "interior max |ln u_asym - ln u_dirM| = " + fmt17(e.difference) + " <= allowance " +
                       fmt17(e.allowance)});
  }
  write_file(c.out / "solution.csv", solution_table(r, *c.setup.problem).str());
  write_file(c.out / "diagnostics.txt", diagnostics_text(r, *c.setup.problem));
  return out;
}

inline int run_verify(const Context& c) {
  const auto crit = c.cfg.manufactured ? verify_manufactured(c) : verify_weighted(c);
  std::ostringstream t;
  bool all = true;
  for (const auto& k : crit) {
    t << criterion_line(k) << '\n';
    all = all && k.pass;
  }
  t << (all ? "RESULT PASS" : "RESULT FAIL") << '\n';
  write_file(c.out / "verify_report.txt", t.str());
  c.log << t.str();
  return all ? ok : verification_failure;
}

// ---------------------------------------------------------------------------
// Entry points.

// Parses, validates, builds and runs one configuration.  Errors are written
// to `err` and mapped onto exit codes.
inline int run(Verb verb, const std::string& config_text, const std::filesystem::path& out,
               const std::vector<std::pair<std::string, std::string>>& overrides, std::ostream& log, std::ostream& err) {
  try {
    const auto cfg = parse_config(config_text, verb, overrides);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec || !std::filesystem::is_directory(out)) throw ConfigError("cannot create output directory " + out.string());
    Setup setup;
    try {
      setup = build_setup(cfg);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    const Context c{cfg, setup, out, log};
    switch (verb) {
      case Verb::classify: return run_classify(c);
      case Verb::profile: return run_profile(c);
      case Verb::predict: return run_predict(c);
      case Verb::solve: return run_solve(c);
      case Verb::verify: return run_verify(c);
    }
    return ok;
  } catch (const ConfigError& e) {
    err << "configuration error:\n" << e.what() << (std::string(e.what()).ends_with('\n') ? "" : "\n");
    return config_error;
  } catch (const InvalidInput& e) {
    err << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return precondition;
  } catch (const ConvergenceError& e) {
    err << "nonconvergence: " << e.what() << '\n';
    return nonconvergence;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return nonconvergence;
  }
}

// `param=v1,v2,...` into (param, values).
inline std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw ConfigError("--sweep expects param=v1,v2,... (got '" + s + "')");
  std::vector<std::string> vals;
  std::stringstream in(s.substr(eq + 1));
  std::string v;
  while (std::getline(in, v, ','))
    if (!v.empty()) vals.push_back(v);
  if (vals.empty()) throw ConfigError("--sweep has no values");
  return {s.substr(0, eq), vals};
}

// Runs one entry per sweep value into out/<param>=<value>; returns the
// largest exit status.  Entries run sequentially so logs stay ordered.
inline int run_sweep(Verb verb, const std::string& config_text, const std::filesystem::path& out,
                     const std::string& sweep, std::ostream& log, std::ostream& err) {
  std::pair<std::string, std::vector<std::string>> sw;
  try {
    sw = parse_sweep(sweep);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return config_error;
  }
  int worst = ok;
  for (const auto& v : sw.second) {
    const auto dir = out / (sw.first + "=" + v);
    log << "== " << sw.first << " = " << v << '\n';
    worst = std::max(worst, run(verb, config_text, dir, {{sw.first, v}}, log, err));
  }
  return worst;
}

}  // namespace blowup::cli
