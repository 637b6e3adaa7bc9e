#pragma once

// Weight functions k on (0, nu), the integral K(t) = int_0^t k, and the
// classification invariants built from (K/k)'.
//
// Everything is carried in logarithmic form.  A weight supplies ln k, k'/k and
// optionally a stable ln k(s) - ln k(t); flat weights such as exp(-1/t) would
// otherwise lose all precision in K/k.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/limits.hpp"
#include "blowup/quadrature.hpp"
#include "blowup/regvar.hpp"

namespace blowup {

class WeightFunction {
 public:
  struct Handles {
    RealMap log_k;                                  // ln k(t)
    RealMap log_deriv;                              // k'(t)/k(t)
    std::function<double(double, double)> log_ratio;  // ln k(s) - ln k(t); optional
    RealMap log_deriv2;                             // (k'/k)'(t); optional
    std::function<double(double, double)> log_ratio_offset;  // ln k(t - x) - ln k(t); optional
  };

  WeightFunction() = default;
  WeightFunction(Handles h, double nu, std::string label)
      : h_(std::make_shared<const Handles>(std::move(h))), nu_(nu), label_(std::move(label)) {
    if (!(nu_ > 0)) throw InvalidInput("weight: nu must be positive");
    if (!h_->log_k || !h_->log_deriv) throw InvalidInput("weight: ln k and k'/k handles are required");
  }

  double nu() const { return nu_; }
  const std::string& label() const { return label_; }

  double log_eval(double t) const {
    check(t);
    const double v = h_->log_k(t);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw DomainError("weight '" + label_ + "': ln k is not finite at t = " + std::to_string(t));
    return v;
  }
  double eval(double t) const { return std::exp(log_eval(t)); }
  double operator()(double t) const { return eval(t); }
  double log_deriv(double t) const {
    check(t);
    const double v = h_->log_deriv(t);
    if (!std::isfinite(v)) throw DomainError("weight '" + label_ + "': k'/k is not finite at t = " + std::to_string(t));
    return v;
  }
  double deriv(double t) const { return eval(t) * log_deriv(t); }
  double log_ratio(double s, double t) const {
    if (h_->log_ratio) return h_->log_ratio(s, t);
    return log_eval(s) - log_eval(t);
  }
  // ln k(t - x) - ln k(t), accurate for x much smaller than t when supplied.
  double log_ratio_offset(double x, double t) const {
    if (h_->log_ratio_offset) return h_->log_ratio_offset(x, t);
    return log_ratio(t - x, t);
  }
  // (k'/k)'(t); a fourth-order central difference unless supplied.
  double log_deriv2(double t) const {
    check(t);
    if (h_->log_deriv2) return h_->log_deriv2(t);
    const double step = std::min(1e-3, 0.2 * (nu_ - t) / t);
    const double h = step * t;
    auto L = [this](double x) { return h_->log_deriv(x); };
    return (-L(t + 2 * h) + 8 * L(t + h) - 8 * L(t - h) + L(t - 2 * h)) / (12 * h);
  }

 private:
  void check(double t) const {
    if (!(t > 0) || !(t < nu_)) throw DomainError("weight '" + label_ + "' evaluated outside (0, nu) at t = " + std::to_string(t));
  }
  std::shared_ptr<const Handles> h_;
  double nu_ = 1;
  std::string label_;
};

namespace detail {

// Fourth-order central difference of g at t with step proportional to t.
inline double central_diff4(const RealMap& g, double t, double rel_step = 1e-3) {
  const double h = rel_step * t;
  return (-g(t + 2 * h) + 8 * g(t + h) - 8 * g(t - h) + g(t - 2 * h)) / (12 * h);
}

// int_a^b E(exp(s)) ds on cells of width <= w with a fixed 20-point rule.
inline double cell_integral(const RealMap& F, double a, double b, double w) {
  if (a == b) return 0.0;
  const int cells = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / w)));
  double acc = 0;
  for (int c = 0; c < cells; ++c)
    acc += gauss_legendre(F, a + (b - a) * c / cells, a + (b - a) * (c + 1) / cells);
  return acc;
}

}  // namespace detail

// Weight from value handles.  Without dk, k'/k is a fourth-order central
// difference of ln k with step 1e-3 t.
inline WeightFunction weight_from_values(RealMap k, RealMap dk, double nu, std::string label) {
  auto log_k = [k](double t) {
    const double v = k(t);
    if (!(v > 0)) {
      if (v == 0) return -std::numeric_limits<double>::infinity();
      return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log(v);
  };
  WeightFunction::Handles h;
  h.log_k = log_k;
  if (dk) {
    h.log_deriv = [k, dk](double t) { return dk(t) / k(t); };
  } else {
    h.log_deriv = [log_k, nu](double t) {
      const double step = std::min(1e-3, 0.2 * (nu - t) / t);
      return detail::central_diff4(log_k, t, step);
    };
  }
  return WeightFunction(std::move(h), nu, std::move(label));
}

// k(t) = sqrt(C0) t^(gamma/2).
inline WeightFunction power_weight(double C0, double gamma) {
  if (!(C0 > 0) || gamma < 0) throw InvalidInput("power weight needs C0 > 0 and gamma >= 0");
  WeightFunction::Handles h;
  h.log_k = [=](double t) { return 0.5 * std::log(C0) + 0.5 * gamma * std::log(t); };
  h.log_deriv = [=](double t) { return 0.5 * gamma / t; };
  h.log_ratio = [=](double s, double t) { return 0.5 * gamma * std::log(s / t); };
  h.log_deriv2 = [=](double t) { return -0.5 * gamma / (t * t); };
  h.log_ratio_offset = [=](double x, double t) { return 0.5 * gamma * std::log1p(-x / t); };
  return WeightFunction(std::move(h), std::numeric_limits<double>::infinity(),
                        "power(C0=" + std::to_string(C0) + ", gamma=" + std::to_string(gamma) + ")");
}

inline WeightFunction constant_weight(double c) { return power_weight(c * c, 0.0); }

// k(t) = c exp(-t^(-zeta)).
inline WeightFunction exp_flat_weight(double zeta, double c = 1.0) {
  if (!(zeta > 0) || !(c > 0)) throw InvalidInput("exp-flat weight needs zeta > 0 and c > 0");
  WeightFunction::Handles h;
  h.log_k = [=](double t) { return std::log(c) - std::pow(t, -zeta); };
  h.log_deriv = [=](double t) { return zeta * std::pow(t, -zeta - 1); };
  // t^-zeta - s^-zeta written without cancellation.
  h.log_ratio = [=](double s, double t) { return std::pow(s, -zeta) * std::expm1(zeta * std::log(s / t)); };
  h.log_deriv2 = [=](double t) { return -zeta * (zeta + 1) * std::pow(t, -zeta - 2); };
  h.log_ratio_offset = [=](double x, double t) {
    const double l = std::log1p(-x / t);
    return std::exp(-zeta * (std::log(t) + l)) * std::expm1(zeta * l);
  };
  return WeightFunction(std::move(h), std::numeric_limits<double>::infinity(),
                        "exp_flat(zeta=" + std::to_string(zeta) + ")");
}

// k(t) = c0 t^alpha exp( int_t^c1 E(y)/y dy ).
inline WeightFunction weight_from_E(double c0, double alpha, RealMap E, double c1, std::string label = "E-form") {
  if (!(c0 > 0) || !(c1 > 0) || alpha < 0) throw InvalidInput("E-representation needs c0, c1 > 0 and alpha >= 0");
  // E(0) = 0, tested along y = exp(-20 k).
  {
    std::vector<Sample> s;
    for (int k = 1; k <= 12; ++k) {
      const double y = std::exp(-20.0 * k);
      s.push_back({y, E(y)});
    }
    LimitOptions o;
    o.tol = 1e-3;
    const auto e = limit_extrapolate(s, Direction::to_zero, o);
    if (!(std::abs(e.value) < 1e-3) || !std::isfinite(s.back().value))
      throw InvalidInput("E-representation is invalid: E(0) != 0 (extrapolated " + std::to_string(e.value) + ")");
  }
  if (alpha == 0) {
    for (int k = 0; k < 60; ++k) {
      const double y = c1 * std::exp(-0.5 * k);
      if (E(y) > 1e-12) throw InvalidInput("E-representation with alpha = 0 needs E <= 0");
    }
  }
  auto Es = [E](double s) { return E(std::exp(s)); };
  WeightFunction::Handles h;
  h.log_k = [=](double t) { return std::log(c0) + alpha * std::log(t) + detail::cell_integral(Es, std::log(t), std::log(c1), 2.0); };
  h.log_deriv = [=](double t) { return (alpha - E(t)) / t; };
  h.log_ratio = [=](double s, double t) {
    return alpha * std::log(s / t) + detail::cell_integral(Es, std::log(s), std::log(t), 2.0);
  };
  return WeightFunction(std::move(h), std::numeric_limits<double>::infinity(), std::move(label));
}

// k(t) = d0 (d/dt) exp( -int_t^d1 dx/(x W(x)) ) = d0 exp(-Phi(t)) / (t W(t)).
inline WeightFunction weight_from_W(double d0, double d1, RealMap W, RealMap dW = nullptr, std::string label = "W-form") {
  if (!(d0 > 0) || !(d1 > 0)) throw InvalidInput("W-representation needs d0, d1 > 0");
  auto invW = [W](double s) { return 1.0 / W(std::exp(s)); };
  const auto grid = geometric_grid(d1 * 0.5, 0.5, 30);
  for (double t : grid)
    if (!(W(t) > 0)) throw InvalidInput("W-representation needs W > 0");
  {
    LimitOptions o;
    o.tol = 1e-3;
    const auto w0 = limit_extrapolate(sample_on(grid, W), Direction::to_zero, o);
    if (std::abs(w0.value) > 1e-3) throw InvalidInput("W-representation needs W(t) -> 0");
    // Phi must diverge: a converging Phi sequence means an invalid representation.
    std::vector<Sample> phi;
    double acc = 0, prev = d1;
    for (double t : grid) {
      acc += detail::cell_integral(invW, std::log(t), std::log(prev), 0.5);
      prev = t;
      phi.push_back({t, acc});
    }
    const auto p = limit_extrapolate(phi, Direction::to_zero, o);
    if (p.converged && !diverges_to_infinity(phi, Direction::to_zero, 1e3))
      throw InvalidInput("W-representation is invalid: int_t^d1 dx/(x W) does not diverge as t -> 0");
  }
  RealMap dWf = dW ? dW : RealMap([W](double t) {
    const double h = 1e-3 * t;
    return (-W(t + 2 * h) + 8 * W(t + h) - 8 * W(t - h) + W(t - 2 * h)) / (12 * h);
  });
  WeightFunction::Handles h;
  h.log_k = [=](double t) {
    return std::log(d0) - detail::cell_integral(invW, std::log(t), std::log(d1), 0.5) - std::log(t) - std::log(W(t));
  };
  h.log_deriv = [=](double t) { return 1.0 / (t * W(t)) - 1.0 / t - dWf(t) / W(t); };
  h.log_ratio = [=](double s, double t) {
    return -detail::cell_integral(invW, std::log(s), std::log(t), 0.5) - std::log(s / t) - std::log(W(s) / W(t));
  };
  // Same with the cell integral taken over the offset y = ln t - sigma.
  h.log_ratio_offset = [=](double x, double t) {
    const double d = -std::log1p(-x / t), lt = std::log(t);
    const double I = detail::cell_integral([&](double y) { return invW(lt - y); }, 0.0, d, 0.5);
    return -I + d - std::log(W(t - x) / W(t));
  };
  return WeightFunction(std::move(h), d1, std::move(label));
}

struct WeightRatio {
  double value = 0;   // K(t)/k(t)
  double error = 0;   // remainder bound from monotonicity plus quadrature error
  int panels = 0;
};

namespace detail {

// Panels covering (0, t] from the right, integrated in the offset x = t - s
// so that the integrand near s = t carries no cancellation from forming s.
// The first panel has width min(t/2, 1/lambda(t)), the scale on which
// k(s)/k(t) decays; widths double until the panel would pass s = b/2, after
// which panels [b/2, b] halve geometrically.  Summation stops once a panel
// adds less than 1e-17 of the total (the integrands here decay away from t),
// or is marked exhausted when s = t - x would lose its relative precision.
struct PanelSum {
  double value = 0, error = 0, last = 0, prev = 0, left = 0;
  int panels = 0;
  bool exhausted = false;
};

template <class F>
PanelSum panel_sum(F&& f_offset, double t, double lambda, double rel_tol, int max_panels = 240) {
  PanelSum r;
  double x = 0;  // current offset; the uncovered part is s in (0, t - x]
  double w = (lambda * t > 2.0) ? 1.0 / lambda : 0.5 * t;
  bool geometric = false;
  for (int j = 0; j < max_panels; ++j) {
    const double b = t - x;
    if (b < 1e-13 * t) break;  // the offset can no longer resolve s
    double x_next = x + w;
    if (geometric || x_next >= t - 0.5 * b) {
      x_next = t - 0.5 * b;
      geometric = true;
    }
    // Absolute floor: a panel need not be resolved below 1e-18 of the total.
    const auto q = integrate_adaptive(f_offset, x, x_next, rel_tol, 20, 1e-18 * std::abs(r.value));
    r.value += q.value;
    r.error += q.error;
    ++r.panels;
    r.prev = r.last;
    r.last = q.value;
    x = x_next;
    w *= 2;
    if (j >= 2 && std::abs(q.value) <= 1e-17 * std::abs(r.value)) {
      r.left = t - x;
      return r;
    }
  }
  r.left = t - x;
  r.exhausted = true;
  return r;
}

}  // namespace detail

// K(t)/k(t) = int_0^t exp(ln k(s) - ln k(t)) ds, summed on the panels of
// detail::panel_sum.  If the panels run out, the tail is estimated from the
// ratio of the last two panels and bounded by the remaining length (k is
// non-decreasing, so the integrand is at most 1 there).
inline WeightRatio weight_ratio(const WeightFunction& k, double t) {
  if (!(t > 0) || !(t < k.nu())) throw DomainError("weight_ratio: t outside (0, nu)");
  auto g = [&](double x) {
    const double v = std::exp(k.log_ratio_offset(x, t));
    if (!std::isfinite(v)) throw DomainError("weight_ratio: non-finite integrand at s = " + std::to_string(t - x));
    return v;
  };
  const auto p = detail::panel_sum(g, t, k.log_deriv(t), 1e-12);
  WeightRatio r;
  r.value = p.value;
  r.error = p.error;
  r.panels = p.panels;
  if (p.exhausted) {
    const double ratio = (p.prev > 0) ? p.last / p.prev : 0.0;
    if (!(ratio < 1.0))
      throw ConvergenceError("weight_ratio: panels toward 0 do not decrease (last ratio " + std::to_string(ratio) +
                             "); k is not integrable at 0 or not non-decreasing");
    r.value += p.last * ratio / (1.0 - ratio);
    r.error += p.left;
  }
  if (!(r.value > 0) || !std::isfinite(r.value)) throw ConvergenceError("weight_ratio: non-positive K/k");
  return r;
}

inline double weight_log_integral(const WeightFunction& k, double t) {
  return k.log_eval(t) + std::log(weight_ratio(k, t).value);
}

inline double weight_integral(const WeightFunction& k, double t) { return std::exp(weight_log_integral(k, t)); }

// (K/k)'(t) = 1 - (K/k) k'/k.  When t k'/k is large the subtraction cancels,
// so the integrated-by-parts form
//   (K/k)'(t) = -lambda(t) int_0^t (k(s)/k(t)) lambda'(s)/lambda(s)^2 ds,
// lambda = k'/k, is used instead; it needs k(s)/lambda(s) -> 0 as s -> 0.
inline double weight_ratio_derivative(const WeightFunction& k, double t) {
  const double lam = k.log_deriv(t);
  if (!(lam * t > 2.0)) return 1.0 - weight_ratio(k, t).value * lam;
  auto g = [&](double x) {
    const double s = t - x;
    const double ls = k.log_deriv(s);
    const double v = std::exp(k.log_ratio_offset(x, t)) * k.log_deriv2(s) / (ls * ls);
    if (!std::isfinite(v)) throw DomainError("weight_ratio_derivative: non-finite integrand at s = " + std::to_string(s));
    return v;
  };
  const double J = detail::panel_sum(g, t, lam, 1e-13).value;
  return -lam * J;
}

enum class WeightSubclass { K01, K01_tau, K0, K0_zeta, unclassified };

inline const char* to_string(WeightSubclass s) {
  switch (s) {
    case WeightSubclass::K01: return "K01";
    case WeightSubclass::K01_tau: return "K01_tau";
    case WeightSubclass::K0: return "K0";
    case WeightSubclass::K0_zeta: return "K0_zeta";
    case WeightSubclass::unclassified: return "unclassified";
  }
  return "?";
}

struct WeightClassReport {
  LimitEstimate ell0;
  LimitEstimate ell1;
  std::optional<double> alpha;
  WeightSubclass subclass = WeightSubclass::unclassified;
  std::optional<double> zeta;
  std::optional<LimitEstimate> Lstar;
  std::optional<double> tau;
  std::optional<LimitEstimate> Lsharp;
  std::optional<LimitEstimate> index_of_reciprocal;  // RV index of k(1/u); equals -alpha
  std::vector<std::string> notes;

  // k in K0: l1 = 0 (whether or not a zeta was identified).
  bool flat() const { return std::abs(ell1.value) <= 1e-3; }
};

struct ClassifyOptions {
  std::optional<double> zeta_hint;
  std::optional<double> tau_hint;
  std::vector<double> zeta_sweep{2.0, 1.0, 0.5};  // tried in this order
  std::vector<double> tau_sweep{2.0, 1.0, 0.5};
  double tol = 1e-4;
  double t_start = 0.1;
  double ell1_zero_threshold = 1e-3;
};

namespace detail {

// Geometric grid toward 0 stopping where ln k or k'/k stops being finite.
inline std::vector<double> weight_grid(const WeightFunction& k, double t0, double ratio, int n) {
  std::vector<double> g;
  double t = t0;
  for (int i = 0; i < n; ++i, t *= ratio) {
    double lk;
    try {
      lk = k.log_eval(t);
    } catch (const DomainError&) {
      break;
    }
    if (!std::isfinite(lk) || !std::isfinite(k.log_deriv(t))) break;
    g.push_back(t);
  }
  return g;
}

}  // namespace detail

// Computes l0, l1 and the subclass invariants.  tau and zeta are searched
// over the sweep lists (or taken from the hints); the first value whose
// limit converges is reported, which with the default descending order is
// the largest admissible one.
inline WeightClassReport classify_weight(const WeightFunction& k, const ClassifyOptions& opt = {}) {
  WeightClassReport rep;
  const double t0 = std::min(opt.t_start, std::isfinite(k.nu()) ? 0.25 * k.nu() : opt.t_start);
  const auto gridA = detail::weight_grid(k, t0, 0.5, 14);
  if (gridA.size() < 6) throw DomainError("classify_weight: weight is not representable near 0 on enough points");

  LimitOptions lo;
  lo.tol = opt.tol;
  std::vector<Sample> R, G;
  for (double t : gridA) {
    R.push_back({t, weight_ratio(k, t).value});
    G.push_back({t, weight_ratio_derivative(k, t)});
    if (k.log_deriv(t) < -1e-12 * std::abs(1.0 / t))
      throw PreconditionError("classify_weight: k is decreasing near 0 (k'(t) < 0 at t = " + std::to_string(t) + ")");
  }
  rep.ell0 = limit_extrapolate(R, Direction::to_zero, lo);
  rep.ell1 = limit_extrapolate(G, Direction::to_zero, lo);
  if (rep.ell1.value < -opt.tol || rep.ell1.value > 1 + opt.tol)
    throw PreconditionError("classify_weight: inconsistent weight, l1 = " + std::to_string(rep.ell1.value) + " outside [0,1]");

  if (rep.ell1.value > opt.ell1_zero_threshold) {
    // Logarithmic grid: corrections in powers of 1/ln(1/t) need a wide range.
    const auto gridB = detail::weight_grid(k, t0, std::exp(-6.0), 15);
    std::vector<double> h, g;
    for (double t : gridB) {
      h.push_back(1.0 / -std::log(t));
      g.push_back(weight_ratio_derivative(k, t));
    }
    std::vector<double> taus = opt.tau_hint ? std::vector<double>{*opt.tau_hint} : opt.tau_sweep;
    rep.subclass = WeightSubclass::K01;
    for (double tau : taus) {
      const auto fits = fit_known_exponents(h, g, {0.0, tau, tau + 1, tau + 2});
      if (fits.size() < 2) continue;
      const auto& a = fits[fits.size() - 1];
      const auto& b = fits[fits.size() - 2];
      LimitEstimate Ls;
      Ls.value = a[1];
      Ls.error = std::abs(a[1] - b[1]);
      Ls.grid = gridB;
      Ls.model = LimitModel::logarithmic;
      Ls.converged = Ls.error <= opt.tol * std::max(1.0, std::abs(Ls.value)) &&
                     std::abs(a[0] - b[0]) <= opt.tol * std::max(1.0, std::abs(a[0]));
      if (Ls.converged) {
        rep.subclass = WeightSubclass::K01_tau;
        rep.tau = tau;
        rep.Lsharp = Ls;
        rep.ell1.value = a[0];
        rep.ell1.error = std::abs(a[0] - b[0]);
        rep.ell1.grid = gridB;
        rep.ell1.converged = true;
        rep.ell1.model = LimitModel::logarithmic;
        break;
      }
    }
    if (!rep.tau) {
      std::vector<Sample> s;
      for (std::size_t i = 0; i < gridB.size(); ++i) s.push_back({gridB[i], g[i]});
      rep.ell1 = limit_extrapolate(s, Direction::to_zero, lo);
      rep.subclass = WeightSubclass::unclassified;
      rep.notes.push_back("l1 > 0 but no tau in the sweep gives a converged L#; subclass fields left empty");
    }
    if (rep.ell1.value > 0) {
      rep.alpha = 1.0 / rep.ell1.value - 1.0;
      // k(1/u) should be regularly varying at infinity with index -alpha.
      auto Z = make_regvar_log([k](double u) { return k.log_eval(1.0 / u); }, 1.0 / t0);
      std::vector<double> ug;
      for (auto it = gridB.begin(); it != gridB.end(); ++it) ug.push_back(1.0 / *it);
      IndexOptions io;
      io.limit.tol = opt.tol;
      try {
        rep.index_of_reciprocal = rv_index_estimate(Z, {2.0, 4.0}, ug, io);
      } catch (const Error& e) {
        rep.notes.push_back(std::string("index cross-check unavailable: ") + e.what());
      }
    }
  } else {
    rep.subclass = WeightSubclass::K0;
    std::vector<double> zetas = opt.zeta_hint ? std::vector<double>{*opt.zeta_hint} : opt.zeta_sweep;
    for (double zeta : zetas) {
      std::vector<Sample> s;
      for (const auto& p : G) s.push_back({p.x, std::pow(p.x, -zeta) * p.value});
      auto e = limit_extrapolate(s, Direction::to_zero, lo);
      if (e.converged) {
        rep.subclass = WeightSubclass::K0_zeta;
        rep.zeta = zeta;
        rep.Lstar = e;
        break;
      }
    }
    if (!rep.zeta) {
      rep.subclass = WeightSubclass::unclassified;
      rep.notes.push_back("l1 = 0 but no zeta in the sweep gives a converged L*; subclass fields left empty");
    }
  }
  return rep;
}

struct TurResult {
  LimitEstimate estimate;
  bool divergent = false;
};

// k'(t) / (k(t) t^(theta-1)) along t -> 0; passes when the values grow
// monotonically past the threshold.
inline TurResult tur_check(const WeightFunction& k, const WeightClassReport& rep, double theta, double threshold = 1e6) {
  if (!(theta > 0)) throw InvalidInput("tur_check: theta must be positive");
  const bool flat = rep.flat();
  const bool k01 = rep.subclass == WeightSubclass::K01_tau && rep.Lsharp &&
                   (std::pow(1 - rep.ell1.value, 2) + std::pow(rep.Lsharp->value, 2) > 1e-8);
  if (!flat && !k01)
    throw PreconditionError("tur_check: needs k in K0, or in K01_tau with (1 - l1)^2 + L#^2 != 0");
  const double t0 = std::min(0.1, std::isfinite(k.nu()) ? 0.25 * k.nu() : 0.1);
  std::vector<double> grid;
  for (double t : geometric_grid(t0, flat ? 0.5 : std::exp(-3.0), 20)) {
    double v;
    try {
      v = k.log_deriv(t);
    } catch (const DomainError&) {
      break;
    }
    if (!std::isfinite(v)) break;
    grid.push_back(t);
  }
  if (grid.size() < 4) throw DomainError("tur_check: k'/k is not representable near 0");
  std::vector<Sample> s;
  for (double t : grid) s.push_back({t, k.log_deriv(t) * std::pow(t, 1 - theta)});
  TurResult r;
  r.estimate = limit_extrapolate(s, Direction::to_zero);
  r.divergent = diverges_to_infinity(s, Direction::to_zero, threshold);
  return r;
}

}  // namespace blowup
