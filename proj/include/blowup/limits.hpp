#pragma once

// Numerical limits of sampled sequences.
//
// Samples live on a geometric grid x_k = x_0 r^k approaching 0 or infinity.
// Two accelerators are tried: Wynn's epsilon algorithm, which removes
// geometric error terms c r^k (power corrections in x), and a Levin u-type
// transform in s = |ln x|, which handles logarithmic corrections such as
// 1/ln x or (ln x)^(-1/2).  The estimate with the smallest self-reported
// residual wins.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

// Default convergence tolerance; BLOWUP_TOL overrides it process-wide.
inline double default_tolerance() {
  static const double tol = [] {
    if (const char* env = std::getenv("BLOWUP_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && std::isfinite(v) && v > 0) return v;
    }
    return 1e-6;
  }();
  return tol;
}

struct Sample {
  double x;
  double value;
};

enum class Direction { to_zero, to_infinity };
enum class LimitModel { automatic, raw, geometric, logarithmic };

inline const char* to_string(LimitModel m) {
  switch (m) {
    case LimitModel::automatic: return "automatic";
    case LimitModel::raw: return "raw";
    case LimitModel::geometric: return "geometric";
    case LimitModel::logarithmic: return "logarithmic";
  }
  return "?";
}

struct LimitOptions {
  double tol = default_tolerance();
  LimitModel model = LimitModel::automatic;
};

struct LimitEstimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::infinity();
  std::vector<double> grid;  // abscissae in order of approach
  bool converged = false;
  bool oscillating = false;
  LimitModel model = LimitModel::raw;
};

inline std::vector<double> geometric_grid(double start, double ratio, int count) {
  if (!(start > 0) || !(ratio > 0) || ratio == 1.0 || count < 1)
    throw InvalidInput("geometric_grid: need start > 0, ratio > 0, ratio != 1");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = start * std::pow(ratio, i);
  return g;
}

template <class F>
std::vector<Sample> sample_on(const std::vector<double>& grid, F&& fn) {
  std::vector<Sample> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back({x, fn(x)});
  return out;
}

namespace detail {

// Even column of the epsilon table of highest order <= max_order that still
// has at least two finite entries.
inline std::vector<double> wynn_epsilon(const std::vector<double>& s, int max_order) {
  auto inv = [](double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) return 0.0;
    const double d = b - a;
    if (d == 0.0 || std::abs(d) <= 1e-15 * std::max(std::abs(a), std::abs(b)))
      return std::numeric_limits<double>::infinity();
    return 1.0 / d;
  };
  std::vector<double> prev(s.size() + 1, 0.0);
  std::vector<double> cur = s;
  std::vector<double> best = s;
  for (int k = 0; k < max_order && cur.size() >= 2; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) next[i] = prev[i + 1] + inv(cur[i], cur[i + 1]);
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 1) {
      std::vector<double> fin;
      for (double v : cur)
        if (std::isfinite(v)) fin.push_back(v);
      if (fin.size() >= 2) best = fin;
    }
  }
  return best;
}

// Levin u-transform with the "time" variable beta_m = s_m / ds, which is an
// arithmetic progression on a geometric grid.  Returns one extrapolant per
// window of k + 2 consecutive samples.
inline std::vector<double> levin_u(const std::vector<double>& S, const std::vector<double>& beta, int k) {
  const std::size_t n = S.size();
  std::vector<double> out;
  if (k < 1 || n < static_cast<std::size_t>(k) + 3) return out;
  std::vector<double> omega(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) omega[m] = beta[m] * (S[m] - S[m - 1]);
  for (std::size_t start = 1; start + static_cast<std::size_t>(k) < n; ++start) {
    const std::size_t last = start + static_cast<std::size_t>(k);
    double num = 0, den = 0, binom = 1;
    bool exact = false;
    for (int j = 0; j <= k; ++j) {
      const std::size_t m = start + static_cast<std::size_t>(j);
      if (omega[m] == 0.0) {
        exact = true;
        out.push_back(S[m]);
        break;
      }
      const double w = binom * std::pow(beta[m] / beta[last], k - 1) / omega[m] * ((j % 2) ? -1.0 : 1.0);
      num += w * S[m];
      den += w;
      binom = binom * (k - j) / (j + 1);
    }
    if (exact) continue;
    const double v = num / den;
    if (std::isfinite(v)) out.push_back(v);
  }
  return out;
}

// Sign-alternating, non-shrinking last differences.  Differences at the
// roundoff level (below 1e-10 relative) are noise, not oscillation.
inline bool alternating_growth(const std::vector<double>& v) {
  if (v.size() < 4) return false;
  const double floor = 1e-10 * std::max(1.0, std::abs(v.back()));
  const std::size_t nd = std::min<std::size_t>(4, v.size() - 1);
  std::vector<double> d;
  for (std::size_t i = v.size() - nd; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!(d[i] * d[i - 1] < 0)) return false;
    if (std::abs(d[i]) < std::abs(d[i - 1])) return false;
  }
  if (std::abs(d.back()) <= floor) return false;
  return true;
}

struct Candidate {
  double value;
  double error;
  LimitModel model;
};

}  // namespace detail

// Extrapolates the limit of samples as x tends to 0 or infinity.  The grid
// must be geometric (consecutive ratios equal within 1%); samples may be
// given in either order.  converged is true when the last two extrapolants
// differ by less than tol * max(1, |value|) and no growing oscillation is
// seen; on oscillation the value is the last raw sample.
inline LimitEstimate limit_extrapolate(std::span<const Sample> samples, Direction dir,
                                       const LimitOptions& opt = {}) {
  if (samples.size() < 4) throw InvalidInput("limit_extrapolate: need at least 4 samples");
  std::vector<Sample> s(samples.begin(), samples.end());
  for (const auto& p : s) {
    if (!(p.x > 0) || !std::isfinite(p.x)) throw InvalidInput("limit_extrapolate: abscissae must be positive");
    if (!std::isfinite(p.value)) throw InvalidInput("limit_extrapolate: non-finite sample value");
  }
  const bool increasing = s.back().x > s.front().x;
  if ((dir == Direction::to_infinity) != increasing) std::reverse(s.begin(), s.end());
  const double r0 = s[1].x / s[0].x;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double r = s[i].x / s[i - 1].x;
    if (std::abs(r / r0 - 1.0) > 0.01 || r == 1.0)
      throw InvalidInput("limit_extrapolate: abscissae are not on a geometric grid");
  }
  if ((dir == Direction::to_infinity) != (r0 > 1.0))
    throw InvalidInput("limit_extrapolate: grid does not move in the requested direction");

  LimitEstimate est;
  std::vector<double> v;
  for (const auto& p : s) {
    est.grid.push_back(p.x);
    v.push_back(p.value);
  }
  const std::size_t n = v.size();

  if (detail::alternating_growth(v)) {
    est.value = v.back();
    est.error = std::abs(v[n - 1] - v[n - 2]);
    est.oscillating = true;
    est.converged = false;
    est.model = LimitModel::raw;
    return est;
  }

  // A tail whose differences keep growing is diverging; accelerators can
  // return a finite anti-limit for such sequences, which must not count.
  bool growing = false;
  if (n >= 4) {
    const double d1 = v[n - 3] - v[n - 4], d2 = v[n - 2] - v[n - 3], d3 = v[n - 1] - v[n - 2];
    const double floor = 1e-10 * std::max(1.0, std::abs(v[n - 1]));
    growing = d1 * d2 > 0 && d2 * d3 > 0 && std::abs(d3) > floor && std::abs(d3) > 1.05 * std::abs(d2) &&
              std::abs(d2) > 1.05 * std::abs(d1);
  }

  std::vector<detail::Candidate> cands;
  auto want = [&](LimitModel m) { return opt.model == LimitModel::automatic || opt.model == m; };
  if (want(LimitModel::raw)) cands.push_back({v[n - 1], std::abs(v[n - 1] - v[n - 2]), LimitModel::raw});
  if (want(LimitModel::geometric)) {
    const auto col = detail::wynn_epsilon(v, 4);
    cands.push_back({col.back(), std::abs(col[col.size() - 1] - col[col.size() - 2]), LimitModel::geometric});
  }
  if (want(LimitModel::logarithmic)) {
    const double ds = std::abs(std::log(r0));
    std::vector<double> beta;
    bool ok = true;
    for (double x : est.grid) {
      const double sx = std::abs(std::log(x));
      if (sx < 0.5) ok = false;
      beta.push_back(sx / ds);
    }
    if (ok) {
      const int k = std::min<int>(4, static_cast<int>(n) - 4);
      const auto ex = detail::levin_u(v, beta, std::max(k, 1));
      if (ex.size() >= 2)
        cands.push_back({ex.back(), std::abs(ex[ex.size() - 1] - ex[ex.size() - 2]), LimitModel::logarithmic});
    }
  }
  if (cands.empty()) throw InvalidInput("limit_extrapolate: requested model is unavailable for this grid");
  const auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (!std::isfinite(b.error)) return std::isfinite(a.error);
    return a.error < b.error;
  });
  est.value = best->value;
  est.error = best->error;
  est.model = best->model;
  est.converged = !growing && std::isfinite(est.value) && est.error <= opt.tol * std::max(1.0, std::abs(est.value));
  return est;
}

inline LimitEstimate limit_extrapolate(const std::vector<Sample>& samples, Direction dir,
                                       const LimitOptions& opt = {}) {
  return limit_extrapolate(std::span<const Sample>(samples.data(), samples.size()), dir, opt);
}

// True when the tail of the sequence increases monotonically past threshold.
inline bool diverges_to_infinity(std::span<const Sample> samples, Direction dir, double threshold) {
  std::vector<Sample> s(samples.begin(), samples.end());
  if (s.size() < 3) return false;
  const bool increasing = s.back().x > s.front().x;
  if ((dir == Direction::to_infinity) != increasing) std::reverse(s.begin(), s.end());
  const std::size_t half = s.size() / 2;
  for (std::size_t i = half + 1; i < s.size(); ++i)
    if (!(s[i].value > s[i - 1].value)) return false;
  return s.back().value > threshold;
}

// Least-squares-free generalized Richardson: on every window of
// exponents.size() consecutive points, solves
//   y_i = sum_j c_j h_i^{p_j}
// exactly.  Returns the coefficient vectors window by window.
inline std::vector<std::vector<double>> fit_known_exponents(const std::vector<double>& h,
                                                           const std::vector<double>& y,
                                                           const std::vector<double>& exponents) {
  const std::size_t m = exponents.size();
  std::vector<std::vector<double>> out;
  if (h.size() != y.size() || m == 0 || h.size() < m) return out;
  for (std::size_t start = 0; start + m <= h.size(); ++start) {
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) A[i][j] = std::pow(h[start + i], exponents[j]);
      A[i][m] = y[start + i];
    }
    // Column scaling keeps the Vandermonde-like system well conditioned.
    std::vector<double> scale(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
      double mx = 0;
      for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(A[i][j]));
      if (mx > 0) {
        scale[j] = mx;
        for (std::size_t i = 0; i < m; ++i) A[i][j] /= mx;
      }
    }
    bool singular = false;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      for (std::size_t i = c + 1; i < m; ++i)
        if (std::abs(A[i][c]) > std::abs(A[piv][c])) piv = i;
      if (std::abs(A[piv][c]) < 1e-300) {
        singular = true;
        break;
      }
      std::swap(A[c], A[piv]);
      for (std::size_t i = 0; i < m; ++i) {
        if (i == c) continue;
        const double f = A[i][c] / A[c][c];
        for (std::size_t j = c; j <= m; ++j) A[i][j] -= f * A[c][j];
      }
    }
    if (singular) continue;
    std::vector<double> coef(m);
    for (std::size_t j = 0; j < m; ++j) coef[j] = A[j][m] / A[j][j] / scale[j];
    out.push_back(std::move(coef));
  }
  return out;
}

}  // namespace blowup
