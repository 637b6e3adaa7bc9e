#pragma once

// Nonlinearities f(u) = C u^(rho+1) exp( int_B^u eps(t)/t dt ) for u >= B,
// continued by C u^(rho+1) below B, together with F = int_0^u f, the
// Keller-Osserman integral and the functionals Xi, T1, T2.
//
// Everything is carried in s = ln u.  Profiles reach u = exp(1000) and more,
// so eps is best given as a function of s; a function of u is accepted and
// wrapped, which limits the table to s < 700.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"
#include "blowup/quadrature.hpp"
#include "blowup/regvar.hpp"

namespace blowup {

struct NonlinearityClass {
  enum class Kind { pure_power, F_rho_eta, F_rho0_tau };
  Kind kind = Kind::pure_power;
  double eta = 0;       // F_rho_eta: eps or -eps is regularly varying with index eta
  double tau = 0;       // F_rho0_tau: (ln u)^tau eps(u) -> ell_star
  double ell_star = 0;

  static NonlinearityClass pure_power() { return {}; }
  static NonlinearityClass rho_eta(double eta) { return {Kind::F_rho_eta, eta, 0, 0}; }
  static NonlinearityClass rho0_tau(double tau, double ell_star) { return {Kind::F_rho0_tau, 0, tau, ell_star}; }
};

inline std::string to_string(const NonlinearityClass& c) {
  switch (c.kind) {
    case NonlinearityClass::Kind::pure_power: return "pure_power";
    case NonlinearityClass::Kind::F_rho_eta: return "F_rho_eta(eta=" + std::to_string(c.eta) + ")";
    case NonlinearityClass::Kind::F_rho0_tau:
      return "F_rho0_tau(tau=" + std::to_string(c.tau) + ", ell*=" + std::to_string(c.ell_star) + ")";
  }
  return "?";
}

struct NonlinearityOptions {
  // Right end of the tables in s = ln u; defaults to 700 for eps given in u
  // and 1500 for eps given in s.
  std::optional<double> s_max;
  double cell = 0.25;
  // Pure powers use closed forms for F and psi unless this is false.
  bool closed_form = true;
  // Relative tolerance used when validating the class tag.
  double class_tol = 1e-3;
  std::string label = "f";
};

class Nonlinearity {
 public:
  double C() const { return t_->C; }
  double rho() const { return t_->rho; }
  double B() const { return t_->B; }
  const NonlinearityClass& tag() const { return t_->tag; }
  const std::string& label() const { return t_->label; }
  bool uses_closed_form() const { return t_->closed; }
  // Largest s at which psi and Xi are free of the tail-closure error.
  double s_reliable() const { return t_->closed ? std::numeric_limits<double>::infinity() : t_->s_reliable; }
  double s_table_end() const { return t_->closed ? std::numeric_limits<double>::infinity() : t_->sN(); }

  // eps at u = e^s; zero below B.
  double eps(double s) const { return s < t_->sB ? 0.0 : t_->eps(s); }

  // int_{s1}^{s2} eps, both ends >= ln B.
  double eps_integral(double s1, double s2) const { return t_->eps_between(s1, s2); }

  double log_f(double s) const { return std::log(t_->C) + (t_->rho + 1) * s + t_->E(s); }
  double f(double u) const {
    if (u < 0) throw DomainError("f evaluated at negative u");
    if (u == 0) return 0.0;
    return std::exp(log_f(std::log(u)));
  }
  // f'(u) = f(u) (rho + 1 + eps(u)) / u.
  double log_fprime(double s) const { return log_f(s) - s + std::log(t_->rho + 1 + eps(s)); }
  double fprime(double u) const {
    if (u <= 0) return 0.0;
    return std::exp(log_fprime(std::log(u)));
  }
  // j(u) = f(u)/u, strictly increasing under (A1).
  double log_j(double s) const { return std::log(t_->C) + t_->rho * s + t_->E(s); }

  double log_F(double s) const { return t_->log_F(s); }
  double F(double u) const {
    if (u <= 0) return 0.0;
    return std::exp(log_F(std::log(u)));
  }
  // ln int_u^inf F^(-1/2).
  double log_Q(double s) const { return t_->log_Q(s); }
  // psi(u) = int_u^inf (2F)^(-1/2).
  double log_psi(double s) const { return log_Q(s) - 0.5 * std::numbers::ln2; }
  double psi(double u) const { return std::exp(log_psi(std::log(u))); }

  // Xi(u) = sqrt(F) / (f int_u^inf F^(-1/2)).
  double Xi(double s) const { return std::exp(0.5 * log_F(s) - log_f(s) - log_Q(s)); }

 private:
  struct Tables {
    double C = 1, rho = 1, B = 1, sB = 0, cell = 0.25, s_reliable = 0;
    bool closed = false;
    NonlinearityClass tag;
    std::string label;
    RealMap eps;
    std::vector<double> Ecum, LF, LQ;  // at s_i = sB + i cell

    using GL = boost::math::quadrature::gauss<double, 10>;

    double node(std::size_t i) const { return sB + cell * static_cast<double>(i); }
    double sN() const { return node(Ecum.size() - 1); }
    std::size_t cell_of(double s) const {
      const double x = (s - sB) / cell;
      const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(x)));
      return std::min(i, Ecum.size() - 2);
    }

    double eps_between(double s1, double s2) const {
      if (s1 == s2) return 0.0;
      const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s2 - s1) / cell)));
      double acc = 0;
      for (int c = 0; c < n; ++c) acc += GL::integrate(eps, s1 + (s2 - s1) * c / n, s1 + (s2 - s1) * (c + 1) / n);
      return acc;
    }

    double E(double s) const {
      if (closed || s <= sB) return 0.0;
      if (s >= sN()) return Ecum.back() + eps_between(sN(), s);
      const std::size_t i = cell_of(s);
      return Ecum[i] + GL::integrate(eps, node(i), s);
    }
    double log_f(double s) const { return std::log(C) + (rho + 1) * s + E(s); }

    double log_F_low(double s) const { return std::log(C) + (rho + 2) * s - std::log(rho + 2); }

    // ln int_a^b exp(log_f(x) + x) dx within one cell.
    double log_cell_F(double a, double b) const {
      const double shift = log_f(b) + b;
      const double part = GL::integrate([&](double x) { return std::exp(log_f(x) + x - shift); }, a, b);
      return shift + std::log(part);
    }
    double log_F(double s) const {
      if (closed || s <= sB) return log_F_low(s);
      if (s > sN()) throw DomainError("F requested beyond the table end s = " + std::to_string(sN()) + "; raise s_max");
      const std::size_t i = cell_of(s);
      if (s == node(i)) return LF[i];
      return detail::log_add(LF[i], log_cell_F(node(i), s));
    }

    double G(double s) const { return s - 0.5 * log_F(s); }
    double log_cell_Q(double a, double b) const {
      const double shift = G(a);
      const double part = GL::integrate([&](double x) { return std::exp(G(x) - shift); }, a, b);
      return shift + std::log(part);
    }
    double log_Q_closed(double s) const {
      return 0.5 * std::log((rho + 2) / C) + std::log(2.0 / rho) - 0.5 * rho * s;
    }
    double log_Q(double s) const {
      if (closed) return log_Q_closed(s);
      if (s > s_reliable)
        throw DomainError("psi requested beyond the reliable range s <= " + std::to_string(s_reliable) + "; raise s_max");
      if (s < sB) {
        // Below B, F is the pure power; integrate it in closed form up to B.
        const double a = 0.5 * std::log((rho + 2) / C) + std::log(2.0 / rho);
        const double low = a + std::log(-std::expm1(-0.5 * rho * (sB - s))) - 0.5 * rho * s;
        return detail::log_add(low, LQ[0]);
      }
      const std::size_t i = cell_of(s);
      if (s == node(i)) return LQ[i];
      return detail::log_add(LQ[i + 1], log_cell_Q(s, node(i + 1)));
    }

    void build(double s_max) {
      const std::size_t n = static_cast<std::size_t>(std::ceil((s_max - sB) / cell)) + 1;
      if (n < 8) throw InvalidInput("nonlinearity: s_max must exceed ln B by at least 2");
      Ecum.assign(n, 0.0);
      LF.assign(n, 0.0);
      LQ.assign(n, 0.0);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        Ecum[i + 1] = Ecum[i] + GL::integrate(eps, node(i), node(i + 1));
        if (!std::isfinite(Ecum[i + 1]))
          throw DomainError("nonlinearity: eps is not integrable near s = " + std::to_string(node(i)));
      }
      LF[0] = log_F_low(sB);
      for (std::size_t i = 0; i + 1 < n; ++i) LF[i + 1] = detail::log_add(LF[i], log_cell_F(node(i), node(i + 1)));
      // Tail closure at s_N: with G(s) = s - ln F / 2 and G' -> -rho/2 the
      // tail is exp(G)/(-G'), exact for pure powers.
      const double s_end = node(n - 1);
      const double p_eff = 0.5 * std::exp(log_f(s_end) + s_end - LF[n - 1]) - 1.0;
      if (!(p_eff > 0))
        throw PreconditionError("nonlinearity: int F^(-1/2) diverges at the table end (Keller-Osserman fails)");
      LQ[n - 1] = G(s_end) - std::log(p_eff);
      for (std::size_t i = n - 1; i-- > 0;) LQ[i] = detail::log_add(LQ[i + 1], log_cell_Q(node(i), node(i + 1)));
      // The closure error is damped by exp(-rho/2 (s_N - s)); 40 e-folds suffice.
      s_reliable = s_end - 80.0 / rho;
      if (s_reliable <= sB) throw InvalidInput("nonlinearity: s_max too small for rho; raise s_max");
    }
  };

  std::shared_ptr<const Tables> t_;

  friend Nonlinearity make_nonlinearity_log(double, double, double, RealMap, NonlinearityClass,
                                            const NonlinearityOptions&);
};

namespace detail {

inline void validate_class(const Nonlinearity& f, const RealMap& eps, double s_top, double tol) {
  const auto& tag = f.tag();
  const double sB = std::log(f.B());
  const double s_lo = std::max({sB + 1.0, 2.0, s_top / 256.0});
  // Geometric grid in s: corrections in powers of 1/ln u become geometric.
  std::vector<double> sg;
  for (double s = s_top; s >= s_lo && sg.size() < 10; s *= 0.5) sg.push_back(s);
  std::reverse(sg.begin(), sg.end());
  if (sg.size() < 4) throw InvalidInput("nonlinearity: table range too short to validate the class tag");
  LimitOptions lo;
  lo.tol = tol;
  switch (tag.kind) {
    case NonlinearityClass::Kind::pure_power:
      for (double s = sB; s <= s_top; s += 0.5)
        if (eps(s) != 0.0)
          throw ClassificationError("nonlinearity tagged pure_power but eps(u) = " + std::to_string(eps(s)) +
                                    " at ln u = " + std::to_string(s));
      return;
    case NonlinearityClass::Kind::F_rho0_tau: {
      if (!(tag.tau > 0)) throw InvalidInput("F_rho0_tau needs tau > 0");
      std::vector<Sample> smp;
      for (double s : sg) smp.push_back({s, std::pow(s, tag.tau) * eps(s)});
      const auto e = limit_extrapolate(smp, Direction::to_infinity, lo);
      if (!e.converged || std::abs(e.value - tag.ell_star) > tol * std::max(1.0, std::abs(tag.ell_star)))
        throw ClassificationError("nonlinearity tagged F_rho0_tau(tau=" + std::to_string(tag.tau) + ", ell*=" +
                                  std::to_string(tag.ell_star) + ") but (ln u)^tau eps(u) extrapolates to " +
                                  std::to_string(e.value) + (e.converged ? "" : " (not converged)"));
      return;
    }
    case NonlinearityClass::Kind::F_rho_eta: {
      if (!(tag.eta > -f.rho() - 2) || tag.eta > 0) throw InvalidInput("F_rho_eta needs -rho-2 < eta <= 0");
      const double sign = eps(sg.back()) > 0 ? 1.0 : -1.0;
      for (double s = sB + 0.5; s <= s_top; s += 0.5)
        if (!(sign * eps(s) > 0))
          throw ClassificationError("nonlinearity tagged F_rho_eta but eps changes sign or vanishes at ln u = " +
                                    std::to_string(s));
      // Index of |eps| in u: (ln|eps(s + ln xi)| - ln|eps(s)|)/ln xi along s.
      double worst = 0, est = 0;
      bool ok = true;
      for (double xi : {2.0, 4.0}) {
        std::vector<Sample> smp;
        for (double s : sg) {
          if (s + std::log(xi) > s_top) break;
          smp.push_back({s, (std::log(sign * eps(s + std::log(xi))) - std::log(sign * eps(s))) / std::log(xi)});
        }
        if (smp.size() < 4) {
          smp.clear();
          for (double s : sg) smp.push_back({s, (std::log(sign * eps(s)) - std::log(sign * eps(s - std::log(xi)))) / std::log(xi)});
        }
        const auto e = limit_extrapolate(smp, Direction::to_infinity, lo);
        ok = ok && e.converged;
        est = e.value;
        worst = std::max(worst, std::abs(e.value - tag.eta));
      }
      if (!ok || worst > tol * std::max(1.0, std::abs(tag.eta)))
        throw ClassificationError("nonlinearity tagged F_rho_eta(eta=" + std::to_string(tag.eta) +
                                  ") but the index of |eps| extrapolates to " + std::to_string(est));
      return;
    }
  }
}

}  // namespace detail

// eps given as a function of s = ln u.
inline Nonlinearity make_nonlinearity_log(double C, double rho, double B, RealMap eps_s, NonlinearityClass tag,
                                          const NonlinearityOptions& opt = {}) {
  // rho = 0 is the linear-growth boundary (f = C u), where Keller-Osserman fails.
  if (rho == 0) throw PreconditionError("nonlinearity: rho = 0 fails the Keller-Osserman condition (A2)");
  if (!(C > 0) || !(rho > 0) || !(B > 0)) throw InvalidInput("nonlinearity needs C, rho, B > 0");
  if (!eps_s) throw InvalidInput("nonlinearity needs an eps map (use 0 for pure powers)");
  auto t = std::make_shared<Nonlinearity::Tables>();
  t->C = C;
  t->rho = rho;
  t->B = B;
  t->sB = std::log(B);
  t->cell = opt.cell;
  t->tag = tag;
  t->label = opt.label;
  t->eps = eps_s;
  const double s_max = opt.s_max.value_or(1500.0);
  if (!(s_max > t->sB + 2)) throw InvalidInput("nonlinearity: s_max must exceed ln B + 2");

  // (A1): (ln(f/u))' = rho + eps(u) > 0 on [B, inf), sampled on the table.
  for (double s = t->sB; s <= s_max; s += opt.cell) {
    const double e = eps_s(s);
    if (!std::isfinite(e)) throw DomainError("nonlinearity: eps is not finite at ln u = " + std::to_string(s));
    if (!(rho + e > 0))
      throw PreconditionError("(A1) violated: f(u)/u is not increasing near u = exp(" + std::to_string(s) +
                              ") since rho + eps = " + std::to_string(rho + e));
  }
  // eps -> 0 along a geometric grid in s.
  {
    std::vector<Sample> smp;
    for (double s = s_max; s > std::max(t->sB + 1.0, 1.0) && smp.size() < 10; s *= 0.5) smp.push_back({s, eps_s(s)});
    if (smp.size() >= 4) {
      LimitOptions lo;
      lo.tol = opt.class_tol;
      const auto e = limit_extrapolate(smp, Direction::to_infinity, lo);
      if (std::abs(e.value) > opt.class_tol)
        throw InvalidInput("nonlinearity: eps(u) does not tend to 0 (extrapolated " + std::to_string(e.value) + ")");
    }
  }

  t->closed = tag.kind == NonlinearityClass::Kind::pure_power && opt.closed_form;
  Nonlinearity out;
  out.t_ = t;
  detail::validate_class(out, eps_s, s_max, opt.class_tol);
  if (!t->closed) t->build(s_max);
  return out;
}

// eps given as a function of u; the tables stop below u = 1e304.
inline Nonlinearity make_nonlinearity(double C, double rho, double B, RealMap eps_u, NonlinearityClass tag,
                                      NonlinearityOptions opt = {}) {
  if (!eps_u) throw InvalidInput("nonlinearity needs an eps map (use 0 for pure powers)");
  if (!opt.s_max) opt.s_max = 700.0;
  if (*opt.s_max > 700.0) throw InvalidInput("eps given in u limits s_max to 700; give eps in ln u instead");
  return make_nonlinearity_log(C, rho, B, [eps_u](double s) { return eps_u(std::exp(s)); }, tag, opt);
}

inline Nonlinearity pure_power_nonlinearity(double C, double rho, NonlinearityOptions opt = {}) {
  if (opt.label == "f") opt.label = "C u^(rho+1)";
  return make_nonlinearity_log(C, rho, 1.0, [](double) { return 0.0; }, NonlinearityClass::pure_power(), opt);
}

// ---------------------------------------------------------------------------
// Keller-Osserman: int_1^inf F^(-1/2) < inf.

struct KellerOssermanReport {
  bool holds = false;
  double integral = 0;                 // int_1^T F^(-1/2) at the last T
  LimitEstimate increment_ratio;       // lim I_{k+1}/I_k over doublings of T
  std::vector<double> increments;      // I_k = int_{2^k}^{2^(k+1)} F^(-1/2)
  std::string diagnostics;
};

// log_F is ln F as a function of s = ln u.  T doubles from 1; increments
// shrinking geometrically (extrapolated ratio < 1) mean convergence.
inline KellerOssermanReport keller_osserman_check(const RealMap& log_F, int doublings = 64) {
  KellerOssermanReport r;
  std::vector<Sample> ratios;
  double prev = 0;
  for (int k = 0; k < doublings; ++k) {
    const double a = k * std::numbers::ln2, b = (k + 1) * std::numbers::ln2;
    const double I = gauss_legendre([&](double s) { return std::exp(s - 0.5 * log_F(s)); }, a, b);
    if (!std::isfinite(I)) throw DomainError("keller_osserman_check: non-finite increment");
    r.increments.push_back(I);
    r.integral += I;
    if (k > 0) ratios.push_back({std::ldexp(1.0, k), I / prev});
    prev = I;
  }
  r.increment_ratio = limit_extrapolate(ratios, Direction::to_infinity);
  const double q = r.increment_ratio.value;
  r.holds = q < 1.0 - 1e-6;
  if (r.holds) {
    r.integral += prev * q / (1.0 - q);
    r.diagnostics = "increments shrink by the factor " + std::to_string(q) + " per doubling; tail closed geometrically";
  } else {
    r.diagnostics = "increments do not shrink (ratio " + std::to_string(q) + "): int F^(-1/2) diverges like a log";
  }
  return r;
}

inline KellerOssermanReport keller_osserman_check(const Nonlinearity& f, int doublings = 64) {
  return keller_osserman_check([&f](double s) { return f.log_F(s); }, doublings);
}

// ---------------------------------------------------------------------------
// Xi, T1, T2 and their limits.

inline double xi_functional(const Nonlinearity& f, double u) {
  if (u < f.B()) throw DomainError("xi_functional: u below B");
  return f.Xi(std::log(u));
}

inline double xi_limit(double rho) { return rho / (2 * (rho + 2)); }

// T1(u) = [rho/(2(rho+2)) - Xi(u)] (ln u)^tau, at s = ln u.
inline double T1_functional_log(const Nonlinearity& f, double tau, double s) {
  if (f.tag().kind == NonlinearityClass::Kind::pure_power) return 0.0;
  return (xi_limit(f.rho()) - f.Xi(s)) * std::pow(s, tau);
}

// T2(u) = [f(xi0 u)/(xi0 f(u)) - xi0^rho] (ln u)^tau
//       = xi0^rho expm1( int_{ln u}^{ln u + ln xi0} eps ) (ln u)^tau.
inline double T2_functional_log(const Nonlinearity& f, double tau, double xi0, double s) {
  if (!(xi0 > 0)) throw InvalidInput("T2: xi0 must be positive");
  if (f.tag().kind == NonlinearityClass::Kind::pure_power) return 0.0;
  if (s + std::log(xi0) < std::log(f.B())) throw DomainError("T2: xi0 u falls below B");
  return std::pow(xi0, f.rho()) * std::expm1(f.eps_integral(s, s + std::log(xi0))) * std::pow(s, tau);
}

inline double T1_functional(const Nonlinearity& f, double tau, double u) { return T1_functional_log(f, tau, std::log(u)); }
inline double T2_functional(const Nonlinearity& f, double tau, double xi0, double u) {
  return T2_functional_log(f, tau, xi0, std::log(u));
}

struct LemmaLimits {
  double T1 = 0, T2 = 0;
};

// Closed-form limits of T1 and T2.
inline LemmaLimits T_limits(const NonlinearityClass& c, double rho, double xi0) {
  if (c.kind != NonlinearityClass::Kind::F_rho0_tau) return {};
  return {-c.ell_star / ((rho + 2) * (rho + 2)), std::pow(xi0, rho) * c.ell_star * std::log(xi0)};
}

// Geometric grid in s = ln u inside the reliable range.
inline std::vector<double> log_grid(const Nonlinearity& f, int n = 10, double s_top = 0) {
  const double top = s_top > 0 ? s_top : std::min(f.s_reliable(), 640.0);
  std::vector<double> g;
  for (int i = n - 1; i >= 0; --i) g.push_back(top * std::ldexp(1.0, -i));
  return g;
}

// Extrapolated limits of T1, T2 as u -> inf on a geometric grid in ln u.
inline std::pair<LimitEstimate, LimitEstimate> T_limit_estimates(const Nonlinearity& f, double tau, double xi0,
                                                                 const std::vector<double>& s_grid,
                                                                 const LimitOptions& opt = {}) {
  std::vector<Sample> a, b;
  for (double s : s_grid) {
    a.push_back({s, T1_functional_log(f, tau, s)});
    b.push_back({s, T2_functional_log(f, tau, xi0, s)});
  }
  return {limit_extrapolate(a, Direction::to_infinity, opt), limit_extrapolate(b, Direction::to_infinity, opt)};
}

// f as a RegVarFunction on [max(B, 1), inf), evaluated in logs.
inline RegVarFunction as_regvar(const Nonlinearity& f) {
  return make_regvar_log([f](double u) { return f.log_f(std::log(u)); }, std::max(f.B(), 1.0), f.rho() + 1);
}

}  // namespace blowup
