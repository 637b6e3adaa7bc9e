#pragma once

// Thin wrappers over Boost.Math quadrature with finite-result checks.

#include <cmath>
#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blowup/errors.hpp"

namespace blowup {

struct QuadResult {
  double value = 0;
  double error = 0;
};

// Fixed 20-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

namespace detail {

// ln(e^a + e^b) without overflow; either argument may be -inf.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}


template <class F>
double gk_recurse(F& f, double a, double b, unsigned depth, double rel_tol, double abs_tol, double* err, double* l1) {
  double e = 0, L = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e, &L);
  e *= 0.5 * std::abs(b - a);  // the reported error is for the rule mapped to [-1, 1]
  // Boost's error estimate has an absolute floor; a relative test with a
  // roundoff allowance keeps small panels from recursing to full depth.
  if (depth == 0 || e <= std::max({rel_tol * std::abs(v), abs_tol, 64 * std::numeric_limits<double>::epsilon() * L})) {
    *err += e;
    *l1 += L;
    return v;
  }
  const double m = 0.5 * (a + b);
  return gk_recurse(f, a, m, depth - 1, rel_tol, abs_tol, err, l1) + gk_recurse(f, m, b, depth - 1, rel_tol, abs_tol, err, l1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (15/31) bisection with a relative tolerance.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 20,
                              double abs_tol = 0.0) {
  QuadResult r;
  if (a == b) return r;
  double l1 = 0;
  r.value = detail::gk_recurse(f, a, b, max_depth, rel_tol, abs_tol, &r.error, &l1);
  if (!std::isfinite(r.value)) throw DomainError("quadrature produced a non-finite value");
  return r;
}

}  // namespace blowup
