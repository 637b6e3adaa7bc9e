#pragma once

// Blow-up profiles.  h solves psi(h(t)) = K(t) with psi(u) = int_u^inf (2F)^(-1/2)
// and K(t) = int_0^t k; phi solves f(phi)/phi = K(t)^(-2).  Everything is
// carried in logarithms: ln h reaches several thousand for flat weights.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/inverse.hpp"
#include "blowup/limits.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/regvar.hpp"
#include "blowup/weights.hpp"

namespace blowup {

struct ProfilePoint {
  double t = 0;
  double log_K = 0;      // ln int_0^t k
  double R = 0;          // K/k
  double G = 0;          // (K/k)'
  double log_k = 0;
  double log_h = 0;
  double log_neg_dh = 0;  // ln(-h')
  double log_d2h = 0;     // ln h''
  double Xi = 0;          // Xi(h(t))

  double h() const { return std::exp(log_h); }
  double dh() const { return -std::exp(log_neg_dh); }
  double d2h() const { return std::exp(log_d2h); }
};

enum class ProfileKind { h, phi };

class BlowupProfile {
 public:
  BlowupProfile(Nonlinearity f, WeightFunction k)
      : f_(std::move(f)), k_(std::move(k)), memo_(std::make_shared<Memo>()) {
    if (!keller_osserman_check(f_).holds)
      throw PreconditionError("profile: f fails the Keller-Osserman condition, so psi is infinite");
  }

  const Nonlinearity& f() const { return f_; }
  const WeightFunction& k() const { return k_; }

  // psi(u) = int_u^inf (2F)^(-1/2), as a function of s = ln u.
  double log_psi(double s) const { return f_.log_psi(s); }

  // Largest t with K(t) <= psi(B)/2, halved.
  double t_max() const {
    std::call_once(memo_->tmax_once, [this] {
      const double target = f_.log_psi(std::log(f_.B())) - std::numbers::ln2;
      const double hi = std::isfinite(k_.nu()) ? 0.999 * k_.nu() : 1e6;
      InverseOptions o;
      o.lower_limit = 0;
      o.upper_limit = hi;
      o.rel_tol = 1e-10;
      auto H = [this, hi](double t) {
        if (t <= 0) return -std::numeric_limits<double>::infinity();
        return weight_log_integral(k_, std::min(t, hi));
      };
      double t = 0;
      if (H(hi) <= target) {
        t = hi;
      } else {
        t = left_inverse(H, target, 0.0, std::min(1.0, 0.5 * hi), o);
      }
      memo_->tmax = 0.5 * t;
    });
    return memo_->tmax;
  }

  ProfilePoint point(double t) const {
    {
      std::lock_guard<std::mutex> lock(memo_->mu);
      const auto it = memo_->points.find(t);
      if (it != memo_->points.end()) return it->second;
    }
    const auto p = compute(t);
    std::lock_guard<std::mutex> lock(memo_->mu);
    memo_->points.emplace(t, p);
    return p;
  }

  double log_h(double t) const { return point(t).log_h; }
  double h(double t) const { return point(t).h(); }
  double dh(double t) const { return point(t).dh(); }
  double d2h(double t) const { return point(t).d2h(); }

  // ln phi(t), where f(phi)/phi = K(t)^(-2).
  double log_phi(double t) const {
    const double y = -2.0 * weight_log_integral(k_, t);
    const double sB = std::log(f_.B());
    if (y < f_.log_j(sB))
      throw DomainError("profile_phi: K(t)^(-2) < f(B)/B at t = " + std::to_string(t) + "; t is too large");
    InverseOptions o;
    o.lower_limit = sB;
    const double guess = sB + std::max(1.0, (y - f_.log_j(sB)) / f_.rho());
    return left_inverse([this](double s) { return f_.log_j(s); }, y, sB, guess, o);
  }
  double phi(double t) const { return std::exp(log_phi(t)); }

  // Residual |psi(h) - K| / K.
  double identity_residual(double t) const {
    const auto p = point(t);
    return std::abs(std::expm1(f_.log_psi(p.log_h) - p.log_K));
  }
  // Residual |f(phi)/phi - K^(-2)| K^2.
  double phi_identity_residual(double t) const {
    return std::abs(std::expm1(f_.log_j(log_phi(t)) + 2.0 * weight_log_integral(k_, t)));
  }

 private:
  struct Memo {
    std::mutex mu;
    std::map<double, ProfilePoint> points;
    std::once_flag tmax_once;
    double tmax = 0;
  };

  ProfilePoint compute(double t) const {
    if (!(t > 0) || !(t < k_.nu())) throw DomainError("profile: t outside (0, nu)");
    ProfilePoint p;
    p.t = t;
    const auto wr = weight_ratio(k_, t);
    p.log_k = k_.log_eval(t);
    p.R = wr.value;
    p.log_K = p.log_k + std::log(p.R);
    const double sB = std::log(f_.B());
    const double y = -p.log_K;
    if (!(y > -f_.log_psi(sB)))
      throw DomainError("profile_h: K(t) >= psi(B) at t = " + std::to_string(t) + "; the profile leaves the asymptotic regime");
    InverseOptions o;
    o.lower_limit = sB;
    o.upper_limit = f_.s_reliable();
    // psi ~ u^(-rho/2), so ln h ~ (2/rho) ln(1/K) is a good bracket.
    const double guess = std::max(sB + 1.0, std::min(2.0 * (y + f_.log_psi(sB)) / f_.rho() + sB + 1.0, o.upper_limit));
    p.log_h = left_inverse([this](double s) { return -f_.log_psi(s); }, y, sB, guess, o);
    p.G = weight_ratio_derivative(k_, t);
    p.Xi = f_.Xi(p.log_h);
    // h' = -k sqrt(2F(h)) and h'' = k^2 f(h) {1 + 2 Xi(h) [(K/k)' - 1]}.
    p.log_neg_dh = p.log_k + 0.5 * (std::numbers::ln2 + f_.log_F(p.log_h));
    const double brace = 1.0 + 2.0 * p.Xi * (p.G - 1.0);
    if (!(brace > 0)) throw DomainError("profile_h: h'' is not positive at t = " + std::to_string(t));
    p.log_d2h = 2.0 * p.log_k + f_.log_f(p.log_h) + std::log(brace);
    return p;
  }

  Nonlinearity f_;
  WeightFunction k_;
  std::shared_ptr<Memo> memo_;
};

// ---------------------------------------------------------------------------
// Properties of h near 0.

struct AuxRow {
  std::string name;
  std::string formula;
  double target = 0;
  bool divergence = false;  // the row asserts growth to +inf rather than a limit
  LimitEstimate estimate;
  bool pass = false;
};

struct AuxReportOptions {
  double rel_tol = 0.01;
  double t_start = 0.1;
  double ratio = 0.5;
  int points = 10;
};

// Geometric grid toward 0 inside (0, t_max) on which the profile can be
// evaluated.
inline std::vector<double> profile_grid(const BlowupProfile& P, int n, double t_start, double ratio) {
  std::vector<double> g;
  double t = std::min(t_start, P.t_max());
  for (int i = 0; static_cast<int>(g.size()) < n && i < 4 * n; ++i, t *= ratio) {
    try {
      P.point(t);
    } catch (const DomainError&) {
      if (g.empty()) continue;
      break;
    }
    g.push_back(t);
  }
  return g;
}

namespace detail {

inline bool row_passes(const LimitEstimate& e, double target, double tol) {
  return std::isfinite(e.value) && std::abs(e.value - target) <= tol * std::max(1.0, std::abs(target));
}

}  // namespace detail

// Rows (i)-(v) of the properties of h, each with its closed-form target.
inline std::vector<AuxRow> lemma_aux_report(const BlowupProfile& P, const WeightClassReport& rep,
                                            const AuxReportOptions& opt = {}) {
  const auto grid = profile_grid(P, opt.points, opt.t_start, opt.ratio);
  if (grid.size() < 6) throw DomainError("lemma_aux_report: fewer than 6 usable grid points");
  const double rho = P.f().rho();
  const double l1 = rep.flat() ? 0.0 : rep.ell1.value;
  std::vector<ProfilePoint> pts;
  for (double t : grid) pts.push_back(P.point(t));

  std::vector<AuxRow> rows;
  auto add = [&](std::string name, std::string formula, double target, auto&& value) {
    std::vector<Sample> s;
    for (const auto& p : pts) s.push_back({p.t, value(p)});
    AuxRow r{std::move(name), std::move(formula), target, false, {}, false};
    r.estimate = limit_extrapolate(s, Direction::to_zero);
    r.pass = detail::row_passes(r.estimate, target, opt.rel_tol);
    rows.push_back(std::move(r));
  };

  for (double xi : {0.5, 1.0, 2.0}) {
    add("(i) xi=" + std::to_string(xi), "h''/(k^2 f(xi h)) -> (2+rho l1)/(xi^(rho+1)(2+rho))",
        (2 + rho * l1) / (std::pow(xi, rho + 1) * (2 + rho)), [&](const ProfilePoint& p) {
          return std::exp(p.log_d2h - 2 * p.log_k - P.f().log_f(p.log_h + std::log(xi)));
        });
  }
  add("(ii) a", "h h''/h'^2 -> (2+rho l1)/2", (2 + rho * l1) / 2,
      [](const ProfilePoint& p) { return std::exp(p.log_h + p.log_d2h - 2 * p.log_neg_dh); });
  add("(ii) b", "ln k/ln h -> rho(l1-1)/2", rho * (l1 - 1) / 2,
      [](const ProfilePoint& p) { return p.log_k / p.log_h; });
  add("(iii) a", "h'/(t h'') -> -rho l1/(2+rho l1)", -rho * l1 / (2 + rho * l1),
      [](const ProfilePoint& p) { return -std::exp(p.log_neg_dh - std::log(p.t) - p.log_d2h); });
  add("(iii) b", "h/(t^2 h'') -> rho^2 l1^2/(2(2+rho l1))", rho * rho * l1 * l1 / (2 * (2 + rho * l1)),
      [](const ProfilePoint& p) { return std::exp(p.log_h - 2 * std::log(p.t) - p.log_d2h); });
  add("(iv) a", "h/(t h') -> -rho l1/2", -rho * l1 / 2,
      [](const ProfilePoint& p) { return -std::exp(p.log_h - std::log(p.t) - p.log_neg_dh); });
  add("(iv) b", "ln t/ln h -> -rho l1/2", -rho * l1 / 2, [](const ProfilePoint& p) { return std::log(p.t) / p.log_h; });

  if (rep.flat()) {
    for (double j : {0.5, 1.0, 2.0}) {
      std::vector<Sample> s;
      for (const auto& p : pts) s.push_back({p.t, j * std::log(p.t) + p.log_h});
      AuxRow r{"(v) j=" + std::to_string(j), "t^j h(t) -> inf", 0, true, {}, false};
      r.estimate = limit_extrapolate(s, Direction::to_zero);
      // ln(t^j h) must grow past ln 1e6 monotonically.
      r.pass = diverges_to_infinity(s, Direction::to_zero, std::log(1e6));
      rows.push_back(std::move(r));
    }
    if (rep.zeta && rep.Lstar) {
      const double z = *rep.zeta, L = rep.Lstar->value;
      add("(v) zeta", "h'/(t^(zeta+1) h'') -> -rho L*/(2(zeta+1))", -rho * L / (2 * (z + 1)),
          [z](const ProfilePoint& p) { return -std::exp(p.log_neg_dh - (z + 1) * std::log(p.t) - p.log_d2h); });
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Properties of phi.

// lim phi/h = [rho^2/(2(rho+2))]^(1/rho).
inline double phi_over_h_limit(double rho) { return std::pow(rho * rho / (2 * (rho + 2)), 1.0 / rho); }

inline LimitEstimate phi_over_h_estimate(const BlowupProfile& P, const std::vector<double>& grid,
                                         const LimitOptions& opt = {}) {
  std::vector<Sample> s;
  for (double t : grid) s.push_back({t, std::exp(P.log_phi(t) - P.log_h(t))});
  return limit_extrapolate(s, Direction::to_zero, opt);
}

// RV index at infinity of u -> phi(1/u); equals 2/(rho l1) when l1 > 0.
inline LimitEstimate phi_reciprocal_index(const BlowupProfile& P, const std::vector<double>& t_grid,
                                          const IndexOptions& opt = {}) {
  std::vector<double> u;
  for (auto it = t_grid.begin(); it != t_grid.end(); ++it) u.push_back(1.0 / *it);
  const double A = 1.0 / P.t_max();
  auto Z = make_regvar_log([&P](double x) { return P.log_phi(1.0 / x); }, A);
  return rv_index_estimate(Z, {2.0, 4.0}, u, opt);
}

// Gamma-variation of u -> phi(1/u) with auxiliary g(u) = rho u^2 (K/k)(1/u) / 2.
inline LimitEstimate phi_gamma_variation(const BlowupProfile& P, double lambda, const std::vector<double>& t_grid,
                                         const LimitOptions& opt = {}) {
  std::vector<double> u;
  for (auto it = t_grid.begin(); it != t_grid.end(); ++it) u.push_back(1.0 / *it);
  const double rho = P.f().rho();
  auto g = [&P, rho](double x) { return 0.5 * rho * x * x * weight_ratio(P.k(), 1.0 / x).value; };
  auto logU = [&P](double x) { return P.log_phi(1.0 / x); };
  return gamma_variation_check_log(logU, g, lambda, u, 1.0 / P.t_max(), opt);
}

// Rows t, h, h', h'', phi on the given grid.
struct ProfileRow {
  double t, h, dh, d2h, phi;
};

inline std::vector<ProfileRow> profile_table(const BlowupProfile& P, const std::vector<double>& grid) {
  std::vector<ProfileRow> out;
  for (double t : grid) {
    const auto p = P.point(t);
    double ph;
    try {
      ph = P.phi(t);
    } catch (const DomainError&) {
      ph = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back({t, p.h(), p.dh(), p.d2h(), ph});
  }
  return out;
}

}  // namespace blowup
