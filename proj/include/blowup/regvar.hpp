#pragma once

// Regular variation toolkit: index estimation, Karamata representation and
// integral limits, Gamma-variation.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/inverse.hpp"
#include "blowup/limits.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

using RealMap = std::function<double(double)>;

// A positive function on [A, inf).  log_eval, when present, is used instead
// of eval so that indices can be estimated far beyond double range.
struct RegVarFunction {
  RealMap eval;
  double A = 1.0;
  std::optional<double> declared_index;
  RealMap log_eval;

  double log_at(double u) const {
    if (u < A) throw DomainError("RegVarFunction evaluated left of its domain");
    if (log_eval) return log_eval(u);
    const double z = eval(u);
    if (!(z > 0) || !std::isfinite(z)) throw DomainError("RegVarFunction is not positive and finite at u = " + std::to_string(u));
    return std::log(z);
  }
  double operator()(double u) const {
    if (eval) return eval(u);
    return std::exp(log_at(u));
  }
};

inline RegVarFunction make_regvar_log(RealMap log_eval, double A, std::optional<double> q = std::nullopt) {
  RegVarFunction z;
  z.log_eval = std::move(log_eval);
  z.A = A;
  z.declared_index = q;
  return z;
}

// L0(u) = Mbar exp( int_B^u y(t)/t dt ).
struct KaramataRepresentation {
  double B = 1.0;
  double Mbar = 1.0;
  RealMap y;
  bool normalised = true;

  double log_eval(double u) const {
    if (u < B) throw DomainError("Karamata representation evaluated below B");
    if (!(Mbar > 0)) throw InvalidInput("Karamata representation needs Mbar > 0");
    // Unit cells in s = ln t with a fixed rule; y is assumed smooth.
    const double a = std::log(B), b = std::log(u);
    const int cells = std::max(1, static_cast<int>(std::ceil(b - a)));
    double I = 0;
    for (int c = 0; c < cells; ++c)
      I += gauss_legendre([this](double s) { return y(std::exp(s)); }, a + (b - a) * c / cells,
                          a + (b - a) * (c + 1) / cells);
    return std::log(Mbar) + I;
  }
  double operator()(double u) const { return std::exp(log_eval(u)); }

  // u^q L0(u), a normalised regularly varying function of index q.
  RegVarFunction with_index(double q) const {
    auto self = *this;
    return make_regvar_log([self, q](double u) { return q * std::log(u) + self.log_eval(u); }, B, q);
  }
};

struct IndexOptions {
  LimitOptions limit{};
  // Cross-xi agreement tolerance; defaults to limit.tol.
  std::optional<double> agreement_tol;
};

// Estimates q from log(Z(xi u)/Z(u))/log xi for each xi, pooled by mean.
inline LimitEstimate rv_index_estimate(const RegVarFunction& Z, const std::vector<double>& xi_set,
                                       const std::vector<double>& u_grid, const IndexOptions& opt = {}) {
  if (xi_set.empty()) throw InvalidInput("rv_index_estimate: empty xi set");
  for (double xi : xi_set)
    if (!(xi > 0) || xi == 1.0) throw InvalidInput("rv_index_estimate: xi must be positive and different from 1");
  std::vector<LimitEstimate> per;
  for (double xi : xi_set) {
    std::vector<Sample> s;
    for (double u : u_grid) {
      if (xi * u < Z.A) throw DomainError("rv_index_estimate: xi*u leaves the domain of Z");
      s.push_back({u, (Z.log_at(xi * u) - Z.log_at(u)) / std::log(xi)});
    }
    per.push_back(limit_extrapolate(s, Direction::to_infinity, opt.limit));
  }
  LimitEstimate out = per.back();
  double sum = 0, lo = per[0].value, hi = per[0].value, err = 0;
  bool all = true;
  for (const auto& e : per) {
    sum += e.value;
    lo = std::min(lo, e.value);
    hi = std::max(hi, e.value);
    err = std::max(err, e.error);
    all = all && e.converged;
  }
  out.value = sum / static_cast<double>(per.size());
  out.error = std::max(err, hi - lo);
  const double agree = opt.agreement_tol.value_or(opt.limit.tol);
  out.converged = all && (hi - lo) <= agree * std::max(1.0, std::abs(out.value));
  out.oscillating = std::any_of(per.begin(), per.end(), [](const auto& e) { return e.oscillating; });
  return out;
}

enum class KaramataSide { lower, upper };

namespace detail {

// log of int_a^b exp(g(s)) ds in s = ln x, computed on unit-width cells with
// a per-cell shift so that neither overflow nor underflow occurs.
template <class G>
double log_integral_exp(G&& g, double a, double b) {
  double acc = -std::numeric_limits<double>::infinity();
  const int cells = std::max(1, static_cast<int>(std::ceil(b - a)));
  const double h = (b - a) / cells;
  for (int c = 0; c < cells; ++c) {
    const double lo = a + c * h, hi = lo + h;
    const double shift = std::max(g(lo), g(hi));
    const double part = gauss_legendre([&](double s) { return std::exp(g(s) - shift); }, lo, hi);
    if (part <= 0) continue;
    const double lp = shift + std::log(part);
    acc = (acc > lp) ? acc + std::log1p(std::exp(lp - acc)) : lp + std::log1p(std::exp(acc - lp));
  }
  return acc;
}

}  // namespace detail

// Forms u^{j+1} Z(u) / int_A^u x^j Z(x) dx (lower side) or
// u^{j+1} Z(u) / int_u^inf x^j Z(x) dx (upper side) along u_grid and
// extrapolates.  For Z regularly varying with index q the limits are
// j+q+1 and -(j+q+1) respectively.
inline LimitEstimate karamata_direct_check(const RegVarFunction& Z, double q, double j, KaramataSide side,
                                           const std::vector<double>& u_grid, const LimitOptions& opt = {}) {
  if (side == KaramataSide::lower && j < -(q + 1))
    throw PreconditionError("karamata_direct_check: the lower form needs j >= -(q+1)");
  if (side == KaramataSide::upper && !(j < -(q + 1)))
    throw PreconditionError("karamata_direct_check: the upper form needs j < -(q+1)");
  auto g = [&](double s) { return (j + 1) * s + Z.log_at(std::exp(s)); };
  std::vector<Sample> samples;
  for (double u : u_grid) {
    const double su = std::log(u);
    double logI;
    if (side == KaramataSide::lower) {
      logI = detail::log_integral_exp(g, std::log(Z.A), su);
    } else {
      // Sum unit cells of the upper tail until they stop contributing.
      double acc = -std::numeric_limits<double>::infinity();
      double prev_part = std::numeric_limits<double>::infinity();
      bool done = false;
      for (int c = 0; c < 4000; ++c) {
        const double lp = detail::log_integral_exp(g, su + c, su + c + 1);
        acc = (acc > lp) ? acc + std::log1p(std::exp(lp - acc)) : lp + std::log1p(std::exp(acc - lp));
        if (c > 8 && lp > prev_part)
          throw PreconditionError(
              "karamata_direct_check: the upper-tail integral of x^j Z(x) diverges; the upper form requires "
              "j + q + 1 < 0 and x^j Z(x) integrable at infinity");
        prev_part = lp;
        if (lp < acc - 40) {
          done = true;
          break;
        }
      }
      if (!done)
        throw PreconditionError(
            "karamata_direct_check: the upper-tail integral of x^j Z(x) does not converge; the upper form requires "
            "x^j Z(x) integrable at infinity");
      logI = acc;
    }
    samples.push_back({u, std::exp((j + 1) * su + Z.log_at(u) - logI)});
  }
  return limit_extrapolate(samples, Direction::to_infinity, opt);
}

// Extrapolates U(u + lambda g(u)) / U(u), given log U for overflow safety.
// Gamma-variation with auxiliary function g means the limit is e^lambda.
inline LimitEstimate gamma_variation_check_log(const RealMap& log_U, const RealMap& g, double lambda,
                                               const std::vector<double>& u_grid, double domain_min = 0.0,
                                               const LimitOptions& opt = {}) {
  std::vector<Sample> samples;
  for (double u : u_grid) {
    const double gu = g(u);
    if (!(gu > 0)) throw PreconditionError("gamma_variation_check: auxiliary function must be positive");
    const double v = u + lambda * gu;
    if (!(v >= domain_min) || !std::isfinite(v)) throw DomainError("gamma_variation_check: u + lambda g(u) leaves the domain");
    samples.push_back({u, std::exp(log_U(v) - log_U(u))});
  }
  return limit_extrapolate(samples, Direction::to_infinity, opt);
}

inline LimitEstimate gamma_variation_check(const RealMap& U, const RealMap& g, double lambda,
                                           const std::vector<double>& u_grid, double domain_min = 0.0,
                                           const LimitOptions& opt = {}) {
  auto logU = [&U](double u) {
    const double v = U(u);
    if (!(v > 0)) throw DomainError("gamma_variation_check: U must be positive");
    return std::log(v);
  };
  return gamma_variation_check_log(logU, g, lambda, u_grid, domain_min, opt);
}

// max over an n-point linear grid of xi in [xi_lo, xi_hi] of |L(xi u)/L(u) - 1|.
inline double slow_variation_deviation(const RegVarFunction& L, double u, double xi_lo = 0.5, double xi_hi = 2.0,
                                       int n = 11) {
  double worst = 0;
  const double base = L.log_at(u);
  for (int i = 0; i < n; ++i) {
    const double xi = xi_lo + (xi_hi - xi_lo) * i / (n - 1);
    worst = std::max(worst, std::abs(std::expm1(L.log_at(xi * u) - base)));
  }
  return worst;
}

// Left inverse of a non-decreasing RegVarFunction, as another RegVarFunction.
// The inverse is located in s = ln u so that huge arguments stay cheap.
inline RegVarFunction regvar_inverse(const RegVarFunction& Z, double A_inverse) {
  auto z = Z;
  RegVarFunction inv;
  inv.A = A_inverse;
  if (Z.declared_index && *Z.declared_index != 0) inv.declared_index = 1.0 / *Z.declared_index;
  inv.log_eval = [z](double y) {
    const double ly = std::log(y);
    const double lo = std::log(z.A);
    InverseOptions io;
    io.lower_limit = lo;
    io.rel_tol = 1e-15;
    const double s = left_inverse([&](double s) { return z.log_at(std::exp(s)); }, ly, lo, lo + 1.0, io);
    return s;
  };
  return inv;
}

}  // namespace blowup
