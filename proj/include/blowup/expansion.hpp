#pragma once

// Expansion constants of large solutions near the boundary and the dispatch
// of (weight subclass, nonlinearity class) pairs onto the first-order,
// algebraic-rate and logarithmic-rate statements.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/profiles.hpp"
#include "blowup/weights.hpp"

namespace blowup {

// xi0 = ((2 + l1 rho)/(2 + rho))^(1/rho).
inline double xi0(double rho, double ell1) {
  if (!(rho > 0)) throw InvalidInput("xi0: rho must be positive");
  if (ell1 < 0 || ell1 > 1) throw InvalidInput("xi0: l1 must lie in [0, 1]");
  return std::pow((2 + ell1 * rho) / (2 + rho), 1.0 / rho);
}

// Leading coefficient in front of phi: [2(2 + l1 rho)/rho^2]^(1/rho).
inline double phi_coefficient(double rho, double ell1) {
  if (!(rho > 0)) throw InvalidInput("phi_coefficient: rho must be positive");
  return std::pow(2 * (2 + ell1 * rho) / (rho * rho), 1.0 / rho);
}

// b = k(d)^2 (1 + c_tilde d^theta + o(d^theta)), or b = k^2 (1 + o(1)).
struct BExpansion {
  enum class Form { first_order, two_term };
  Form form = Form::first_order;
  double theta = 1.0;
  double c_tilde = 0.0;

  static BExpansion first_order() { return {}; }
  static BExpansion two_term(double theta, double c_tilde) {
    if (!(theta > 0)) throw InvalidInput("b-expansion: theta must be positive");
    return {Form::two_term, theta, c_tilde};
  }
};

enum class RateKind { none, algebraic, logarithmic };

struct ExpansionPrediction {
  int order = 1;
  double leading = 1;       // xi0, in front of h(d)
  double phi_leading = 1;   // in front of phi(d)
  RateKind rate_kind = RateKind::none;
  double rate = 0;          // varpi (algebraic) or tau (logarithmic)
  double second_coeff = 0;  // chi or chi-tilde
  std::string case_tag;     // e.g. "thm1.2(iii)"
  std::string formula;      // the formula used for second_coeff
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::string> notes;
  bool supported = true;

  // Flat key = value record, values with 17 significant digits.
  std::vector<std::pair<std::string, std::string>> record() const {
    auto num = [](double x) {
      std::ostringstream o;
      o.precision(17);
      o << x;
      return o.str();
    };
    std::vector<std::pair<std::string, std::string>> r;
    r.emplace_back("case_tag", case_tag);
    r.emplace_back("supported", supported ? "true" : "false");
    r.emplace_back("order", std::to_string(order));
    r.emplace_back("xi0", num(leading));
    r.emplace_back("phi_coefficient", num(phi_leading));
    r.emplace_back("rate_kind", rate_kind == RateKind::algebraic     ? "algebraic"
                                : rate_kind == RateKind::logarithmic ? "logarithmic"
                                                                     : "none");
    if (order == 2) {
      r.emplace_back(rate_kind == RateKind::algebraic ? "varpi" : "tau", num(rate));
      r.emplace_back(rate_kind == RateKind::algebraic ? "chi" : "chi_tilde", num(second_coeff));
      r.emplace_back("formula", formula);
    }
    for (const auto& [k, v] : inputs) r.emplace_back("input." + k, num(v));
    for (std::size_t i = 0; i < notes.size(); ++i) r.emplace_back("note" + std::to_string(i + 1), notes[i]);
    return r;
  }
};

// ---------------------------------------------------------------------------
// Algebraic rate (k in K0_zeta).

struct Theorem2Result {
  double varpi = 0;
  double chi = 0;
  double chi1 = 0;
  std::string sub_case;     // "i", "ii" or "iii"
  bool heaviside_tie = false;
};

// Heaviside with H(0) = 1: at theta = zeta both perturbations are of order d^varpi.
inline double heaviside(double x) { return x >= 0 ? 1.0 : 0.0; }

inline Theorem2Result chi_theorem2(double rho, double theta, double c_tilde, double zeta, double Lstar,
                                   const NonlinearityClass& fc) {
  if (!(rho > 0) || !(theta > 0) || !(zeta > 0)) throw InvalidInput("chi_theorem2: rho, theta, zeta must be positive");
  Theorem2Result r;
  r.varpi = std::min(theta, zeta);
  r.heaviside_tie = theta == zeta;
  r.chi1 = 0.5 * Lstar * heaviside(theta - zeta) - (c_tilde / rho) * heaviside(zeta - theta);
  r.chi = r.chi1;
  switch (fc.kind) {
    case NonlinearityClass::Kind::pure_power: r.sub_case = "i"; break;
    case NonlinearityClass::Kind::F_rho_eta:
      if (fc.eta == 0)
        throw PreconditionError("chi_theorem2: f in F_rho_eta needs eta != 0 (case ii); eta = 0 is covered only by F_rho0_tau");
      r.sub_case = "ii";
      break;
    case NonlinearityClass::Kind::F_rho0_tau: {
      const double tau1 = r.varpi / zeta;
      if (std::abs(fc.tau - tau1) > 1e-12 * std::max(1.0, tau1))
        throw PreconditionError("chi_theorem2: case (iii) needs tau = varpi/zeta = " + std::to_string(tau1) +
                                ", but f has tau = " + std::to_string(fc.tau));
      const double x0 = std::pow(2.0 / (2.0 + rho), 1.0 / rho);
      r.chi = r.chi1 - (fc.ell_star / rho) * std::pow(rho * zeta * Lstar / (2 * (1 + zeta)), tau1) *
                           (1.0 / (rho + 2) + std::log(x0));
      r.sub_case = "iii";
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Logarithmic rate (k in K01_tau).

struct Theorem3Result {
  double chi_tilde = 0;
  double chi2 = 0;
  std::string sub_case;  // "i" or "ii"
  bool degenerate = false;
};

// A pure power is handled as F_rho0_tau with l* = 0.  With allow_degenerate
// the formula value is returned even when the non-degeneracy condition
// fails (flagged in the result) instead of throwing.
inline Theorem3Result chi_theorem3(double rho, double ell1, double tau, double Lsharp, const NonlinearityClass& fc,
                                   bool allow_degenerate = false) {
  if (!(rho > 0) || !(tau > 0)) throw InvalidInput("chi_theorem3: rho and tau must be positive");
  if (!(ell1 > 0) || ell1 > 1) throw InvalidInput("chi_theorem3: needs l1 in (0, 1]");
  Theorem3Result r;
  r.chi2 = Lsharp / (2 + rho * ell1);
  r.chi_tilde = r.chi2;
  if (fc.kind == NonlinearityClass::Kind::F_rho_eta && fc.eta != 0) {
    r.sub_case = "i";
    if (Lsharp == 0) {
      r.degenerate = true;
      if (!allow_degenerate)
        throw PreconditionError("chi_theorem3: case (i) needs eta L# != 0, but L# = 0");
    }
    return r;
  }
  if (fc.kind == NonlinearityClass::Kind::F_rho_eta)
    throw PreconditionError("chi_theorem3: f in F_rho_eta with eta = 0 must be given as F_rho0_tau");
  const double ls = fc.kind == NonlinearityClass::Kind::F_rho0_tau ? fc.ell_star : 0.0;
  if (fc.kind == NonlinearityClass::Kind::F_rho0_tau && std::abs(fc.tau - tau) > 1e-12 * std::max(1.0, tau))
    throw PreconditionError("chi_theorem3: case (ii) needs the same tau for f and k (f: " + std::to_string(fc.tau) +
                            ", k: " + std::to_string(tau) + ")");
  r.sub_case = "ii";
  const double x0 = xi0(rho, ell1);
  r.chi_tilde = r.chi2 - (ls / rho) * std::pow(rho * ell1 / 2, tau) *
                             (2 * (1 - ell1) / ((rho + 2) * (rho * ell1 + 2)) + std::log(x0));
  const double cond = std::pow(ls * (ell1 - 1), 2) + Lsharp * Lsharp;
  if (cond == 0) {
    r.degenerate = true;
    if (!allow_degenerate)
      throw PreconditionError("chi_theorem3: case (ii) needs [l*(l1 - 1)]^2 + L#^2 != 0");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dispatch.

inline void echo_inputs(ExpansionPrediction& p, double rho, const WeightClassReport& rep, const NonlinearityClass& fc,
                        const BExpansion& b) {
  p.inputs.emplace_back("rho", rho);
  p.inputs.emplace_back("l1", rep.flat() ? 0.0 : rep.ell1.value);
  if (rep.zeta) p.inputs.emplace_back("zeta", *rep.zeta);
  if (rep.Lstar) p.inputs.emplace_back("Lstar", rep.Lstar->value);
  if (rep.tau) p.inputs.emplace_back("tau_k", *rep.tau);
  if (rep.Lsharp) p.inputs.emplace_back("Lsharp", rep.Lsharp->value);
  if (fc.kind == NonlinearityClass::Kind::F_rho_eta) p.inputs.emplace_back("eta", fc.eta);
  if (fc.kind == NonlinearityClass::Kind::F_rho0_tau) {
    p.inputs.emplace_back("tau_f", fc.tau);
    p.inputs.emplace_back("ell_star", fc.ell_star);
  }
  if (b.form == BExpansion::Form::two_term) {
    p.inputs.emplace_back("theta", b.theta);
    p.inputs.emplace_back("c_tilde", b.c_tilde);
  }
}

// First-order prediction: u ~ xi0 h(d) ~ [2(2 + l1 rho)/rho^2]^(1/rho) phi(d).
inline ExpansionPrediction predict_first_order(double rho, const WeightClassReport& rep) {
  if (!rep.ell1.converged && !rep.flat())
    throw PreconditionError("predict: weight is unclassified (l1 did not converge)");
  const double l1 = rep.flat() ? 0.0 : rep.ell1.value;
  ExpansionPrediction p;
  p.order = 1;
  p.leading = xi0(rho, std::clamp(l1, 0.0, 1.0));
  p.phi_leading = phi_coefficient(rho, std::clamp(l1, 0.0, 1.0));
  p.case_tag = "thm1.1";
  p.formula = "u = [2(2+l1 rho)/rho^2]^(1/rho) phi(d) (1+o(1)) = xi0 h(d) (1+o(1))";
  // The two statements agree: phi_coefficient * lim phi/h = xi0.
  const double gap = p.phi_leading * phi_over_h_limit(rho) / p.leading - 1.0;
  if (std::abs(gap) > 1e-12) throw ConvergenceError("predict: leading coefficients are inconsistent");
  return p;
}

inline ExpansionPrediction predict(const Nonlinearity& f, const WeightClassReport& rep, const BExpansion& b) {
  const double rho = f.rho();
  const auto& fc = f.tag();
  ExpansionPrediction p = predict_first_order(rho, rep);
  echo_inputs(p, rho, rep, fc, b);
  if (b.form == BExpansion::Form::first_order) return p;

  auto unsupported = [&](std::string why) {
    p.supported = false;
    p.case_tag = "thm1.1-only";
    p.notes.push_back("no two-term statement applies: " + why);
    return p;
  };
  if (rep.subclass == WeightSubclass::K0_zeta && rep.zeta && rep.Lstar) {
    Theorem2Result r;
    try {
      r = chi_theorem2(rho, b.theta, b.c_tilde, *rep.zeta, rep.Lstar->value, fc);
    } catch (const PreconditionError& e) {
      return unsupported(e.what());
    }
    p.order = 2;
    p.leading = std::pow(2.0 / (2.0 + rho), 1.0 / rho);
    p.rate_kind = RateKind::algebraic;
    p.rate = r.varpi;
    p.second_coeff = r.chi;
    p.case_tag = "thm1.2(" + r.sub_case + ")";
    p.formula = r.sub_case == "iii"
                    ? "chi = chi1 - (l*/rho) [rho zeta L*/(2(1+zeta))]^tau1 (1/(rho+2) + ln xi0), "
                      "chi1 = (L*/2) H(theta-zeta) - (c~/rho) H(zeta-theta)"
                    : "chi = chi1 = (L*/2) H(theta-zeta) - (c~/rho) H(zeta-theta)";
    if (r.heaviside_tie) p.notes.push_back("theta = zeta: Heaviside(0) taken as 1, both terms of chi1 active");
    return p;
  }
  if (rep.subclass == WeightSubclass::K01_tau && rep.tau && rep.Lsharp) {
    Theorem3Result r;
    double tau_used = *rep.tau;
    try {
      // An estimated L# within its own error of 0 counts as 0.
      double Ls = rep.Lsharp->value;
      if (std::abs(Ls) <= std::max(rep.Lsharp->error, 1e-8)) {
        if (Ls != 0) p.notes.push_back("L# = " + std::to_string(Ls) + " is within its error of 0 and is taken as 0");
        Ls = 0;
      }
      // k in K01_tau with constant L# also lies in K01_tau' with L# = 0 for
      // every tau' < tau, so an F_rho0_tau nonlinearity with a smaller tau
      // is matched at its own tau.
      double tau = *rep.tau;
      if (fc.kind == NonlinearityClass::Kind::F_rho0_tau && fc.tau < tau) {
        p.notes.push_back("k is in K01_tau for tau = " + std::to_string(tau) + "; used at tau = " +
                          std::to_string(fc.tau) + " with L# = 0");
        tau = fc.tau;
        Ls = 0;
      }
      r = chi_theorem3(rho, std::min(rep.ell1.value, 1.0), tau, Ls, fc);
      tau_used = tau;
    } catch (const PreconditionError& e) {
      return unsupported(e.what());
    }
    p.order = 2;
    p.rate_kind = RateKind::logarithmic;
    p.rate = tau_used;
    p.second_coeff = r.chi_tilde;
    p.case_tag = "thm1.3(" + r.sub_case + ")";
    p.formula = r.sub_case == "ii"
                    ? "chi~ = chi2 - (l*/rho)(rho l1/2)^tau [2(1-l1)/((rho+2)(rho l1+2)) + ln xi0], chi2 = L#/(2+rho l1)"
                    : "chi~ = chi2 = L#/(2+rho l1)";
    if (fc.kind == NonlinearityClass::Kind::pure_power) p.notes.push_back("pure power treated as F_rho0_tau with l* = 0");
    return p;
  }
  return unsupported(std::string("weight subclass ") + to_string(rep.subclass) +
                     " has no rate constant (needs K0_zeta or K01_tau)");
}

// ---------------------------------------------------------------------------
// H(t) = (-ln t)^tau (1 - k^2 f(xi0 h)/(xi0 h'')) -> rho chi-tilde.

struct ScriptHReport {
  LimitEstimate estimate;
  double target = 0;
  bool pass = false;
  std::vector<Sample> samples;
};

inline double script_H(const BlowupProfile& P, double x0, double tau, double t) {
  const auto p = P.point(t);
  const double lx = std::log(x0);
  const double x = 2 * p.log_k + P.f().log_f(p.log_h + lx) - lx - p.log_d2h;
  return std::pow(-std::log(t), tau) * -std::expm1(x);
}

// Passes within rel_tol of the target, measured against max(|target|, 0.05)
// so that a zero target gets an absolute band.
inline ScriptHReport script_H_check(const BlowupProfile& P, double x0, double tau, double target,
                                    const std::vector<double>& t_grid, double rel_tol = 0.02) {
  ScriptHReport r;
  r.target = target;
  for (double t : t_grid) r.samples.push_back({t, script_H(P, x0, tau, t)});
  r.estimate = limit_extrapolate(r.samples, Direction::to_zero);
  r.pass = std::isfinite(r.estimate.value) &&
           std::abs(r.estimate.value - target) <= rel_tol * std::max(std::abs(target), 0.05);
  return r;
}

}  // namespace blowup
