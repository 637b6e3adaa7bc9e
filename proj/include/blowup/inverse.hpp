#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

struct InverseOptions {
  double rel_tol = 4e-16;
  double abs_tol = 0.0;
  int max_expansions = 200;
  double lower_limit = -std::numeric_limits<double>::infinity();
  double upper_limit = std::numeric_limits<double>::infinity();
};

// Left-continuous inverse inf{ s : H(s) >= y } of a non-decreasing H.
// [lo, hi] is an initial bracket, widened by doubling (clamped to the
// domain limits) until H(lo) <= y <= H(hi).  If H already reaches y at the
// lower end of the domain, that end is returned.  Throws DomainError when the
// bracket cannot be widened and PreconditionError when sampled values show H
// decreasing.
template <class Fn>
double left_inverse(Fn&& H, double y, double lo, double hi, const InverseOptions& opt = {}) {
  if (!(lo < hi)) throw InvalidInput("left_inverse: need lo < hi");
  lo = std::max(lo, opt.lower_limit);
  hi = std::min(hi, opt.upper_limit);
  double Hlo = H(lo), Hhi = H(hi);
  // Decreases within a few ulps are rounding noise in H, not a violation.
  auto noise = [](double a, double b) { return 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)); };
  auto check = [&noise](double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("left_inverse: H returned NaN");
    if (b < a - noise(a, b)) throw PreconditionError("left_inverse: H is not non-decreasing on the sampled points");
  };
  check(Hlo, Hhi);
  int expansions = 0;
  while (Hhi < y) {
    if (hi >= opt.upper_limit || ++expansions > opt.max_expansions)
      throw DomainError("left_inverse: cannot bracket the level from above");
    const double nhi = std::min(hi + 2 * (hi - lo), opt.upper_limit);
    const double nH = H(nhi);
    check(Hhi, nH);
    lo = hi;
    Hlo = Hhi;
    hi = nhi;
    Hhi = nH;
  }
  while (Hlo > y) {
    if (lo <= opt.lower_limit) return lo;
    if (++expansions > opt.max_expansions) throw DomainError("left_inverse: cannot bracket the level from below");
    const double nlo = std::max(lo - 2 * (hi - lo), opt.lower_limit);
    const double nH = H(nlo);
    check(nH, Hlo);
    hi = lo;
    Hhi = Hlo;
    lo = nlo;
    Hlo = nH;
  }
  if (Hlo >= y) return lo;
  // Invariant: H(lo) < y <= H(hi).
  for (int it = 0; it < 2000; ++it) {
    const double width = hi - lo;
    if (width <= opt.abs_tol + opt.rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = lo + 0.5 * width;
    if (mid <= lo || mid >= hi) break;
    const double Hm = H(mid);
    if (std::isnan(Hm)) throw DomainError("left_inverse: H returned NaN");
    if (Hm < Hlo - noise(Hm, Hlo) || Hm > Hhi + noise(Hm, Hhi)) throw PreconditionError("left_inverse: H is not non-decreasing on the sampled points");
    if (Hm >= y) {
      hi = mid;
      Hhi = Hm;
    } else {
      lo = mid;
      Hlo = Hm;
    }
  }
  return hi;
}

}  // namespace blowup
