#pragma once

// Large solutions of  u'' + (N-1)/r u' + a u = b f(u)  on an interval, a
// ball or an annulus, truncated at distance eps_b from the boundary.
//
// The unknown is w = ln u.  Dividing the equation by u gives
//   w'' + w'^2 + (N-1)/r w' + a - b j(w) = 0,   j = f(u)/u,
// which stays representable when u itself overflows (flat weights push
// ln u past 1000 near the boundary).
//
// Mesh: distances d_s 2^(-q/(5*2^m)) from d_s = D/4 down to eps_b, uniform
// from d_s to the half-width D.  Level m halves every cell of level m-1, so
// coarse nodes are a subset of fine nodes and eps_b/2 adds nodes without
// moving the others.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "blowup/errors.hpp"
#include "blowup/expansion.hpp"
#include "blowup/limits.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/profiles.hpp"
#include "blowup/weights.hpp"

namespace blowup {

struct Geometry {
  enum class Kind { interval, ball, annulus };
  Kind kind = Kind::interval;
  int N = 1;
  double R0 = 0;  // left end (interval) or inner radius (annulus)
  double R = 1;   // right end (interval) or outer radius

  static Geometry interval(double L) {
    if (!(L > 0)) throw InvalidInput("interval: length must be positive");
    return {Kind::interval, 1, 0.0, L};
  }
  static Geometry ball(int N, double R) {
    if (N < 3) throw InvalidInput("ball: dimension N must be at least 3");
    if (!(R > 0)) throw InvalidInput("ball: radius must be positive");
    return {Kind::ball, N, 0.0, R};
  }
  static Geometry annulus(int N, double R0, double R) {
    if (N < 3) throw InvalidInput("annulus: dimension N must be at least 3");
    if (!(R0 > 0) || !(R > R0)) throw InvalidInput("annulus: needs 0 < R0 < R");
    return {Kind::annulus, N, R0, R};
  }

  // Largest distance to the boundary.
  double half_width() const { return kind == Kind::ball ? R : 0.5 * (R - R0); }
  bool two_sided() const { return kind != Kind::ball; }
  double distance(double x) const { return kind == Kind::ball ? R - x : std::min(x - R0, R - x); }
  // Coefficient of u' in the Laplacian.
  double drift(double x) const { return kind == Kind::interval ? 0.0 : (N - 1) / x; }
  // Laplacian of d near the outer boundary (r = R - d); 0 on an interval.
  double laplacian_of_distance(double d) const { return kind == Kind::interval ? 0.0 : -(N - 1) / (R - d); }

  std::string describe() const {
    switch (kind) {
      case Kind::interval: return "interval(" + std::to_string(R0) + ", " + std::to_string(R) + ")";
      case Kind::ball: return "ball(N=" + std::to_string(N) + ", R=" + std::to_string(R) + ")";
      case Kind::annulus:
        return "annulus(N=" + std::to_string(N) + ", R0=" + std::to_string(R0) + ", R=" + std::to_string(R) + ")";
    }
    return "?";
  }
};

// ---------------------------------------------------------------------------
// First Dirichlet eigenvalue of -Delta.

namespace detail {

// y(1) for y'' + (N-1)/r y' + mu y = 0, y(0) = 1, y'(0) = 0 on the unit ball.
inline double radial_shoot(int N, double mu) {
  using State = std::array<double, 2>;
  const double r0 = 1e-4;
  const double n = N;
  State y{1 - mu * r0 * r0 / (2 * n) + mu * mu * std::pow(r0, 4) / (8 * n * (n + 2)),
          -mu * r0 / n + mu * mu * std::pow(r0, 3) / (2 * n * (n + 2))};
  auto rhs = [N, mu](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = -(N - 1) / r * s[1] - mu * s[0];
  };
  namespace odeint = boost::numeric::odeint;
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, y, r0,
                             1.0, 1e-3);
  return y[0];
}

}  // namespace detail

inline double eigenvalue_first_dirichlet(const Geometry& g) {
  switch (g.kind) {
    case Geometry::Kind::interval: {
      const double L = g.R - g.R0;
      return std::numbers::pi * std::numbers::pi / (L * L);
    }
    case Geometry::Kind::annulus:
      throw InvalidInput("eigenvalue_first_dirichlet: annulus is not supported");
    case Geometry::Kind::ball: break;
  }
  // y(1; mu) > 0 below the first eigenvalue; steps of 0.5 cannot jump past
  // the second one.
  double lo = 0, hi = 0.5;
  while (detail::radial_shoot(g.N, hi) > 0) {
    lo = hi;
    hi += 0.5;
    if (hi > 1e4) throw ConvergenceError("eigenvalue_first_dirichlet: no sign change found");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (detail::radial_shoot(g.N, mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / (g.R * g.R);
}

// ---------------------------------------------------------------------------
// Problems.

struct RadialProblem {
  Geometry geometry;
  double a = 0;
  RealMap log_b;  // ln b as a function of the abscissa / radius
  Nonlinearity f;
  std::optional<WeightFunction> k;  // set when b = k(d)^2 (1 + c~ d^theta)
  BExpansion bexp;
  RealMap exact_log_u;  // set for manufactured problems
  std::string label;

  double b(double x) const { return std::exp(log_b(x)); }
};

// b(x) = k(d)^2 (1 + c~ d^theta), d = dist(x, boundary).
inline RadialProblem weighted_problem(const Geometry& g, double a, const WeightFunction& k, const BExpansion& bexp,
                                      const Nonlinearity& f) {
  const double D = g.half_width();
  if (!(D < k.nu())) throw InvalidInput("weighted_problem: the weight must be defined up to the half-width");
  const bool two = bexp.form == BExpansion::Form::two_term;
  if (two && bexp.c_tilde < 0 && 1 + bexp.c_tilde * std::pow(D, bexp.theta) <= 0)
    throw InvalidInput("weighted_problem: 1 + c~ d^theta must stay positive");
  RadialProblem p{g, a, nullptr, f, k, bexp, nullptr, "k(d)^2 b-expansion, k = " + k.label()};
  p.log_b = [g, k, bexp, two](double x) {
    const double d = g.distance(x);
    return 2 * k.log_eval(d) + (two ? std::log1p(bexp.c_tilde * std::pow(d, bexp.theta)) : 0.0);
  };
  return p;
}

struct ExactSolution {
  RealMap u, du, d2u;  // in the abscissa / radius
};

// b := (Delta u* + a u*) / f(u*), checked to be positive on a dense sample.
inline RadialProblem manufactured_problem(const ExactSolution& us, const Geometry& g, double a, const Nonlinearity& f,
                                          int check_points = 4000) {
  if (!us.u || !us.du || !us.d2u) throw InvalidInput("manufactured_problem: u*, u*' and u*'' are all required");
  auto lap = [g, us](double x) {
    if (g.kind == Geometry::Kind::ball && x == 0) return g.N * us.d2u(0.0);
    return us.d2u(x) + g.drift(x) * us.du(x);
  };
  auto log_b = [lap, us, a, f](double x) {
    const double u = us.u(x);
    return std::log(lap(x) + a * u) - f.log_f(std::log(u));
  };
  const double lo = g.kind == Geometry::Kind::ball ? 0.0 : g.R0;
  for (int i = 0; i <= check_points; ++i) {
    const double x = lo + (g.R - lo) * (i + 0.5) / (check_points + 1);
    const double u = us.u(x);
    if (!(u > 0)) throw InvalidInput("manufactured_problem: u* must be positive");
    if (!(lap(x) + a * u > 0))
      throw InvalidInput("manufactured_problem: b <= 0 at x = " + std::to_string(x) + "; invalid manufactured choice");
  }
  return {g, a, log_b, f, std::nullopt, BExpansion{}, [us](double x) { return std::log(us.u(x)); }, "manufactured"};
}

// ---------------------------------------------------------------------------
// Mesh.

struct Mesh {
  std::vector<double> x, d;
  std::vector<double> h;  // h[i] = x[i+1] - x[i], formed from distances so it keeps full precision near x = R
  double eps_b = 0;  // effective truncation offset
  int level = 0;
};

namespace detail {

inline constexpr double kStepsPerOctave = 5.0;  // cell ratio 2^(1/5) ~ 1.1487 at level 0

// Ascending distances from eps_b (snapped down onto the 2^(-1/5) ladder) to D.
inline std::vector<double> distance_nodes(double eps_b, double D, int level, double& eps_eff) {
  if (!(eps_b > 0) || !(eps_b < 0.25 * D)) throw InvalidInput("mesh: need 0 < eps_b < D/4");
  if (level < 0 || level > 12) throw InvalidInput("mesh: level must lie in [0, 12]");
  const double ds = 0.25 * D;
  const int Q = static_cast<int>(std::ceil(kStepsPerOctave * std::log2(ds / eps_b) - 1e-9));
  const int per = 1 << level;
  const double c = std::numbers::ln2 / kStepsPerOctave;
  const int nu = static_cast<int>(std::ceil((D - ds) / (c * ds)));
  std::vector<double> d;
  for (int q = Q * per; q > 0; --q) d.push_back(ds * std::exp2(-static_cast<double>(q) / (kStepsPerOctave * per)));
  const double H = (D - ds) / (nu * per);
  for (int j = 0; j <= nu * per; ++j) d.push_back(j == nu * per ? D : ds + j * H);
  eps_eff = d.front();
  return d;
}

// Consecutive nodes differ by |d_(i+1) - d_i| on both sides and across the middle.
inline void fill_spacing(Mesh& m) {
  m.h.clear();
  for (std::size_t i = 0; i + 1 < m.d.size(); ++i) m.h.push_back(std::abs(m.d[i + 1] - m.d[i]));
}

}  // namespace detail

inline Mesh make_mesh(const Geometry& g, double eps_b, int level) {
  Mesh m;
  m.level = level;
  const double D = g.half_width();
  const auto d = detail::distance_nodes(eps_b, D, level, m.eps_b);
  if (g.kind == Geometry::Kind::ball) {
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
      m.x.push_back(g.R - *it);
      m.d.push_back(*it);
    }
    m.x.front() = 0.0;
    detail::fill_spacing(m);
    return m;
  }
  for (double v : d) {
    m.x.push_back(g.R0 + v);
    m.d.push_back(v);
  }
  for (auto it = d.rbegin() + 1; it != d.rend(); ++it) {
    m.x.push_back(g.R - *it);
    m.d.push_back(*it);
  }
  detail::fill_spacing(m);
  return m;
}

// ---------------------------------------------------------------------------
// Solutions.

enum class ClosureKind { dirichlet_M, asymptotic, exact };

inline const char* to_string(ClosureKind k) {
  switch (k) {
    case ClosureKind::dirichlet_M: return "dirichlet-M";
    case ClosureKind::asymptotic: return "asymptotic";
    case ClosureKind::exact: return "exact";
  }
  return "?";
}

struct Closure {
  ClosureKind kind = ClosureKind::asymptotic;
  double M0 = 0;       // dirichlet-M start; 0 picks xi0 h(eps_b)/64
  bool fixed = false;  // dirichlet-M at M0 only, without doubling

  static Closure dirichlet_M(double M0 = 0) { return {ClosureKind::dirichlet_M, M0, false}; }
  // u = M at d = eps_b for one given M.
  static Closure fixed_M(double M) {
    if (!(M > 0)) throw InvalidInput("closure: M must be positive");
    return {ClosureKind::dirichlet_M, M, true};
  }
  static Closure asymptotic() { return {ClosureKind::asymptotic, 0, false}; }
  // Boundary values from the problem's exact solution.
  static Closure exact() { return {ClosureKind::exact, 0, false}; }
};

struct SolveDiagnostics {
  std::vector<double> residual_history;  // scaled residual per Newton step, all solves
  double final_residual = 0;
  int newton_iterations = 0;
  int line_search_failures = 0;
  bool fallback_used = false;
  int mesh_level = 0;
  std::vector<double> M_sequence;   // ln M_k for the dirichlet-M closure
  std::vector<double> M_changes;    // interior max |change of ln u| between M_k and M_(k-1)
  std::optional<double> sensitivity;  // interior max |change of ln u| under eps_b -> eps_b/2
  std::string a_check;
  std::vector<std::string> notes;
};

struct LargeSolution {
  Geometry geometry;
  std::vector<double> grid;      // strictly increasing abscissae / radii
  std::vector<double> distance;  // d at each node
  std::vector<double> log_u;     // ln u at each node
  double epsilon_b = 0;
  ClosureKind closure = ClosureKind::asymptotic;
  double boundary_log_value = 0;  // ln u imposed at d = eps_b
  SolveDiagnostics diagnostics;

  double u(std::size_t i) const { return std::exp(log_u[i]); }
  std::vector<double> values() const {
    std::vector<double> v;
    for (double w : log_u) v.push_back(std::exp(w));
    return v;
  }
  std::size_t size() const { return grid.size(); }
};

struct SolveOptions {
  double eps_b = 1e-7;
  double tol = default_tolerance();  // dirichlet-M: interior change that stops the doubling
  double newton_tol = 1e-10;         // scaled residual
  int max_newton = 200;
  int max_doublings = 48;
  double interior_fraction = 0.1;    // interior nodes: d >= fraction * half-width
  bool sensitivity = false;
  std::optional<BlowupProfile> profile;
  std::optional<ExpansionPrediction> prediction;
};

namespace detail {

struct Discrete {
  const RadialProblem* pb;
  const Mesh* mesh;
  std::vector<double> lb;  // ln b at the nodes
  bool center = false;     // first node is r = 0
  double bc_left = 0, bc_right = 0;

  std::size_t n() const { return mesh->x.size(); }

  // Residual F, scale S (sum of term magnitudes) and the Jacobian bands.
  void eval(const std::vector<double>& w, std::vector<double>& F, std::vector<double>* S, std::vector<double>* lo,
            std::vector<double>* di, std::vector<double>* up) const {
    const auto& x = mesh->x;
    const std::size_t m = n();
    F.assign(m, 0.0);
    if (S) S->assign(m, 1.0);
    if (lo) {
      lo->assign(m, 0.0);
      di->assign(m, 0.0);
      up->assign(m, 0.0);
    }
    const double a = pb->a, rho = pb->f.rho();
    const int N = pb->geometry.N;
    auto source = [&](std::size_t i, double& E, double& dE) {
      E = std::exp(lb[i] + pb->f.log_j(w[i]));
      dE = E * (rho + pb->f.eps(w[i]));
    };
    for (std::size_t i = 0; i < m; ++i) {
      const bool left = i == 0, right = i + 1 == m;
      if ((left && !center) || right) {
        F[i] = w[i] - (left ? bc_left : bc_right);
        if (di) (*di)[i] = 1;
        continue;
      }
      double E = 0, dE = 0;
      source(i, E, dE);
      if (left) {  // ball centre: w' = 0 and (N-1) w'/r -> (N-1) w''
        const double h = mesh->h[0];
        const double w2 = 2 * (w[1] - w[0]) / (h * h);
        F[i] = N * w2 + a - E;
        if (S) (*S)[i] = N * std::abs(w2) + std::abs(a) + E;
        if (lo) {
          (*di)[i] = -2.0 * N / (h * h) - dE;
          (*up)[i] = 2.0 * N / (h * h);
        }
        continue;
      }
      const double hm = mesh->h[i - 1], hp = mesh->h[i], hs = hm + hp;
      const double c2m = 2 / (hm * hs), c2p = 2 / (hp * hs), c20 = -c2m - c2p;
      const double c1m = -hp / (hm * hs), c1p = hm / (hp * hs), c10 = (hp - hm) / (hm * hp);
      const double w2 = c2m * w[i - 1] + c20 * w[i] + c2p * w[i + 1];
      const double w1 = c1m * w[i - 1] + c10 * w[i] + c1p * w[i + 1];
      const double p = pb->geometry.drift(x[i]);
      F[i] = w2 + w1 * w1 + p * w1 + a - E;
      if (S) (*S)[i] = std::abs(w2) + w1 * w1 + std::abs(p * w1) + std::abs(a) + E;
      if (lo) {
        const double g = 2 * w1 + p;
        (*lo)[i] = c2m + g * c1m;
        (*di)[i] = c20 + g * c10 - dE;
        (*up)[i] = c2p + g * c1p;
      }
    }
  }

  // True when every residual is within 1e-6 of its term scale or within the
  // rounding level of the difference stencils, whose summands grow like
  // |w|/h^2 and swamp O(1) terms on the finest cells.
  bool at_rounding_floor(const std::vector<double>& w, const std::vector<double>& F,
                         const std::vector<double>& S) const {
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < F.size(); ++i) {
      double R = 0;
      if (i == 0 && center) {
        const double h = mesh->h[0];
        R = 2.0 * pb->geometry.N * (std::abs(w[1]) + std::abs(w[0])) / (h * h);
      } else if (i > 0 && i + 1 < F.size()) {
        const double hm = mesh->h[i - 1], hp = mesh->h[i], hs = hm + hp;
        R = 2 * (std::abs(w[i - 1]) / (hm * hs) + std::abs(w[i]) * (1 / (hm * hs) + 1 / (hp * hs)) +
                 std::abs(w[i + 1]) / (hp * hs));
      }
      if (!(std::abs(F[i]) <= 1e-6 * S[i] + 1e3 * eps * R)) return false;
    }
    return true;
  }

  double merit(const std::vector<double>& F, const std::vector<double>& S) const {
    double r = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      const double v = std::abs(F[i]) / S[i];
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      r = std::max(r, v);
    }
    return r;
  }
};

// Thomas algorithm; overwrites rhs with the solution.
inline void solve_tridiagonal(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                              std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

// Frozen-coefficient sweeps: w'' + (w'_old + p) w' - K w = -a + b j(w_old) - K w_old,
// K = b j'(w_old) >= 0, with the first-order term upwinded.  Each sweep is an
// M-matrix solve, so iterates obey a discrete comparison principle.
inline void monotone_sweeps(const Discrete& D, std::vector<double>& w, int sweeps) {
  const auto& x = D.mesh->x;
  const std::size_t n = D.n();
  const double a = D.pb->a, rho = D.pb->f.rho();
  for (int s = 0; s < sweeps; ++s) {
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = i == 0, right = i + 1 == n;
      if ((left && !D.center) || right) {
        di[i] = 1;
        rhs[i] = left ? D.bc_left : D.bc_right;
        continue;
      }
      const double E = std::exp(D.lb[i] + D.pb->f.log_j(w[i]));
      const double K = E * (rho + D.pb->f.eps(w[i]));
      if (left) {
        const double h = D.mesh->h[0], c = 2.0 * D.pb->geometry.N / (h * h);
        di[i] = -c - K;
        up[i] = c;
        rhs[i] = -a + E - K * w[i];
        continue;
      }
      const double hm = D.mesh->h[i - 1], hp = D.mesh->h[i], hs = hm + hp;
      const double w1 = (w[i + 1] - w[i - 1]) / hs;
      const double beta = w1 + D.pb->geometry.drift(x[i]);
      lo[i] = 2 / (hm * hs) + (beta < 0 ? -beta / hm : 0.0);
      up[i] = 2 / (hp * hs) + (beta > 0 ? beta / hp : 0.0);
      di[i] = -lo[i] - up[i] - K;
      rhs[i] = -a + E - K * w[i];
    }
    solve_tridiagonal(lo, di, up, rhs);
    double change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(rhs[i])) return;
      change = std::max(change, std::abs(rhs[i] - w[i]));
    }
    w = rhs;
    if (change < 1e-10) return;
  }
}

// Damped Newton; after three line-search failures one block of monotone
// sweeps (seeded from the upper envelope when given), then Newton again.
inline void newton(const Discrete& D, std::vector<double>& w, const SolveOptions& opt, SolveDiagnostics& diag,
                   const std::vector<double>* upper_envelope) {
  const std::size_t n = D.n();
  std::vector<double> F, S, lo, di, up, Ft;
  int failures = 0;
  bool swept = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    D.eval(w, F, &S, &lo, &di, &up);
    const double r = D.merit(F, S);
    diag.residual_history.push_back(r);
    diag.final_residual = r;
    ++diag.newton_iterations;
    if (!std::isfinite(r)) throw ConvergenceError("bvp: non-finite residual at the current iterate");
    if (r < opt.newton_tol) return;
    // Residuals at the rounding level of the stencils cannot be lowered further;
    // the Newton step there is rounding noise amplified by the conditioning of J.
    if (D.at_rounding_floor(w, F, S)) {
      const std::string note = "Newton stopped at the rounding floor of the difference stencils at least once";
      if (std::find(diag.notes.begin(), diag.notes.end(), note) == diag.notes.end()) diag.notes.push_back(note);
      return;
    }
    std::vector<double> dw(n);
    for (std::size_t i = 0; i < n; ++i) dw[i] = -F[i];
    solve_tridiagonal(lo, di, up, dw);
    double lam = 1, step = 0;
    bool ok = false;
    std::vector<double> wt(n);
    for (int ls = 0; ls < 40; ++ls, lam *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) wt[i] = w[i] + lam * dw[i];
      D.eval(wt, Ft, nullptr, nullptr, nullptr, nullptr);
      if (D.merit(Ft, S) < (1 - 1e-4 * lam) * r) {
        ok = true;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) step = std::max(step, std::abs(lam * dw[i]));
    if (ok) {
      w = wt;
      if (step < 1e-14 * (1 + std::abs(w.front())) && r < 1e-8) return;
      continue;
    }
    ++diag.line_search_failures;
    if (++failures < 3) {
      bool finite = true;
      for (double v : wt) finite = finite && std::isfinite(v);
      if (finite) w = wt;
      continue;
    }
    if (swept) break;
    swept = true;
    failures = 0;
    diag.fallback_used = true;
    if (upper_envelope)
      for (std::size_t i = 0; i < n; ++i) w[i] = std::max(w[i], (*upper_envelope)[i]);
    monotone_sweeps(D, w, 500);
  }
  std::string hist;
  const std::size_t k0 = diag.residual_history.size() > 8 ? diag.residual_history.size() - 8 : 0;
  for (std::size_t k = k0; k < diag.residual_history.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.3e", diag.residual_history[k]);
    hist += buf;
  }
  throw ConvergenceError("bvp: Newton failed after the monotone fallback; last scaled residuals:" + hist);
}

}  // namespace detail

namespace detail {

struct SolveContext {
  const RadialProblem* pb;
  std::optional<BlowupProfile> profile;
  std::optional<ExpansionPrediction> pred;
};

inline SolveContext make_context(const RadialProblem& pb, const SolveOptions& opt, bool need_pred) {
  SolveContext c{&pb, opt.profile, opt.prediction};
  if (!c.profile && pb.k) c.profile.emplace(pb.f, *pb.k);
  if (need_pred && !c.pred) {
    if (!pb.k) throw InvalidInput("bvp: the asymptotic closure needs a weight or an explicit prediction");
    c.pred = predict(pb.f, classify_weight(*pb.k), pb.bexp);
  }
  return c;
}

// ln of xi0 h(d) (1 + second term).
inline double asymptotic_log_value(const BlowupProfile& P, const ExpansionPrediction& pred, double d) {
  double v = std::log(pred.leading) + P.log_h(d);
  if (pred.order == 2 && pred.supported) {
    const double s = pred.rate_kind == RateKind::algebraic ? pred.second_coeff * std::pow(d, pred.rate)
                                                           : pred.second_coeff * std::pow(-std::log(d), -pred.rate);
    v += std::log1p(s);
  }
  return v;
}

// Initial iterate matching the boundary values.
inline std::vector<double> initial_guess(const SolveContext& c, const Mesh& m, double bc_left, double bc_right) {
  const std::size_t n = m.x.size();
  const double eps = m.eps_b;
  const double D = c.pb->geometry.half_width();
  std::vector<double> w(n);
  if (c.profile) {
    const auto& P = *c.profile;
    const double lx = c.pred ? std::log(c.pred->leading) : 0.0;
    const double tcap = std::min(P.t_max(), D);
    const double at_eps = lx + P.log_h(eps);
    std::map<double, double> cache;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::min(m.d[i], tcap);
      auto it = cache.find(d);
      if (it == cache.end()) it = cache.emplace(d, lx + P.log_h(d)).first;
      const bool left = c.pb->geometry.kind == Geometry::Kind::ball ? false : (i < n / 2 + 1);
      const double bc = left ? bc_left : bc_right;
      w[i] = it->second + (bc - at_eps) * (eps / m.d[i]);
    }
    return w;
  }
  const double p = 2 / c.pb->f.rho();
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = c.pb->geometry.kind == Geometry::Kind::ball ? D * 4 : m.x[i] - m.x.front() + eps;
    const double dr = m.x.back() - m.x[i] + eps;
    const double wl = c.pb->geometry.kind == Geometry::Kind::ball ? -1e300 : bc_left + p * std::log(eps / dl);
    w[i] = std::max(wl, bc_right + p * std::log(eps / dr));
  }
  return w;
}

inline double interior_change(const Mesh& m, const std::vector<double>& a, const std::vector<double>& b, double dmin) {
  double c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (m.d[i] >= dmin) c = std::max(c, std::abs(a[i] - b[i]));
  return c;
}

struct FixedSolve {
  std::vector<double> w;
  double bc = 0;
};

inline LargeSolution solve_on_mesh(const RadialProblem& pb, const Mesh& mesh, const Closure& cl,
                                   const SolveOptions& opt, const SolveContext& ctx) {
  const auto& g = pb.geometry;
  Discrete D{&pb, &mesh, {}, g.kind == Geometry::Kind::ball, 0, 0};
  D.lb.resize(mesh.x.size());
  for (std::size_t i = 0; i < mesh.x.size(); ++i) {
    D.lb[i] = pb.log_b(mesh.x[i]);
    if (!std::isfinite(D.lb[i]))
      throw InvalidInput("bvp: b must be positive and finite on the mesh (x = " + std::to_string(mesh.x[i]) + ")");
  }
  LargeSolution sol;
  sol.geometry = g;
  sol.grid = mesh.x;
  sol.distance = mesh.d;
  sol.epsilon_b = mesh.eps_b;
  sol.closure = cl.kind;
  auto& diag = sol.diagnostics;
  diag.mesh_level = mesh.level;
  diag.a_check = "b > 0 on the whole mesh, so the interior zero set is empty and a < lambda_inf is vacuous";

  std::vector<double> envelope;
  const std::vector<double>* env = nullptr;
  if (ctx.profile && ctx.pred) {
    // Upper barrier xi+ h with eps = 1/4 near the boundary.
    const double lxp = std::log(ctx.pred->leading) - std::log(0.5) / pb.f.rho();
    const double tcap = std::min(ctx.profile->t_max(), g.half_width());
    for (double d : mesh.d) envelope.push_back(lxp + ctx.profile->log_h(std::min(d, tcap)));
    env = &envelope;
  }

  switch (cl.kind) {
    case ClosureKind::exact: {
      if (!pb.exact_log_u) throw InvalidInput("bvp: the exact closure needs a manufactured problem");
      D.bc_left = pb.exact_log_u(mesh.x.front());
      D.bc_right = pb.exact_log_u(mesh.x.back());
      sol.boundary_log_value = D.bc_right;
      sol.log_u = initial_guess(ctx, mesh, D.bc_left, D.bc_right);
      newton(D, sol.log_u, opt, diag, env);
      break;
    }
    case ClosureKind::asymptotic: {
      D.bc_left = D.bc_right = asymptotic_log_value(*ctx.profile, *ctx.pred, mesh.eps_b);
      sol.boundary_log_value = D.bc_right;
      sol.log_u = initial_guess(ctx, mesh, D.bc_left, D.bc_right);
      newton(D, sol.log_u, opt, diag, env);
      break;
    }
    case ClosureKind::dirichlet_M: {
      double lnM = 0;
      if (cl.M0 > 0) {
        lnM = std::log(cl.M0);
      } else {
        if (!ctx.profile) throw InvalidInput("bvp: dirichlet-M without a weight needs an explicit M0");
        lnM = (ctx.pred ? std::log(ctx.pred->leading) : 0.0) + ctx.profile->log_h(mesh.eps_b) - std::log(64.0);
      }
      D.bc_left = D.bc_right = lnM;
      std::vector<double> w = initial_guess(ctx, mesh, lnM, lnM);
      // A single M may sit far below the profile; u <= M is the natural scale then.
      if (cl.fixed)
        for (double& v : w) v = std::min(v, lnM);
      newton(D, w, opt, diag, env);
      diag.M_sequence.push_back(lnM);
      if (cl.fixed) {
        sol.boundary_log_value = lnM;
        sol.log_u = std::move(w);
        break;
      }
      const double dmin = opt.interior_fraction * g.half_width();
      bool done = false;
      for (int k = 1; k <= opt.max_doublings; ++k) {
        std::vector<double> prev = w;
        lnM += std::numbers::ln2;
        D.bc_left = D.bc_right = lnM;
        w.front() = lnM;
        w.back() = lnM;
        newton(D, w, opt, diag, env);
        diag.M_sequence.push_back(lnM);
        diag.M_changes.push_back(interior_change(mesh, w, prev, dmin));
        if (diag.M_changes.back() < opt.tol) {
          done = true;
          break;
        }
      }
      if (!done) throw ConvergenceError("bvp: interior values still change after M doublings");
      sol.boundary_log_value = lnM;
      sol.log_u = std::move(w);
      break;
    }
  }
  return sol;
}

}  // namespace detail

namespace detail {

// Nodes are identified by (side, d): side 0 up to the node farthest from the
// boundary, side 1 after it.  Distances are reproduced bitwise across meshes
// that share nodes, while abscissae near x = R are not distinguishable.
using NodeKey = std::pair<int, double>;

inline std::vector<NodeKey> node_keys(const LargeSolution& s) {
  const auto top = std::max_element(s.distance.begin(), s.distance.end()) - s.distance.begin();
  std::vector<NodeKey> k;
  for (std::size_t i = 0; i < s.size(); ++i)
    k.emplace_back(s.geometry.two_sided() && static_cast<std::ptrdiff_t>(i) > top ? 1 : 0, s.distance[i]);
  return k;
}

inline std::map<NodeKey, double> keyed_values(const LargeSolution& s) {
  std::map<NodeKey, double> m;
  const auto k = node_keys(s);
  for (std::size_t i = 0; i < s.size(); ++i) m.emplace(k[i], s.log_u[i]);
  return m;
}

}  // namespace detail

inline LargeSolution solve_large_solution(const RadialProblem& pb, int mesh_level, const Closure& closure,
                                          const SolveOptions& opt = {}) {
  if (!pb.log_b) throw InvalidInput("bvp: problem has no b");
  if (!keller_osserman_check(pb.f).holds) throw PreconditionError("bvp: f fails the Keller-Osserman condition");
  const auto ctx = detail::make_context(pb, opt, closure.kind != ClosureKind::exact);
  const Mesh mesh = make_mesh(pb.geometry, opt.eps_b, mesh_level);
  LargeSolution sol = detail::solve_on_mesh(pb, mesh, closure, opt, ctx);
  if (opt.sensitivity) {
    const Mesh half = make_mesh(pb.geometry, 0.5 * mesh.eps_b, mesh_level);
    const LargeSolution s2 = detail::solve_on_mesh(pb, half, closure, opt, ctx);
    double c = 0;
    const auto at = detail::keyed_values(s2);
    const auto keys = detail::node_keys(sol);
    for (std::size_t i = 0; i < sol.size(); ++i) {
      if (sol.distance[i] < 4 * sol.epsilon_b) continue;
      const auto it = at.find(keys[i]);
      if (it != at.end()) c = std::max(c, std::abs(it->second - sol.log_u[i]));
    }
    sol.diagnostics.sensitivity = c;
  }
  return sol;
}

// Two levels combined on the coarse nodes: w + (w_fine - w_coarse)/3.
inline LargeSolution richardson_combine(const LargeSolution& coarse, const LargeSolution& fine) {
  // Level m+1 halves every cell, so coarse node i is fine node 2i.
  if (fine.size() != 2 * coarse.size() - 1)
    throw InvalidInput("richardson_combine: the fine mesh does not refine the coarse one");
  LargeSolution r = coarse;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const std::size_t j = 2 * i;
    if (std::abs(fine.distance[j] - coarse.distance[i]) > 1e-12 * coarse.distance[i])
      throw InvalidInput("richardson_combine: the fine mesh does not refine the coarse one");
    r.log_u[i] = fine.log_u[j] + (fine.log_u[j] - coarse.log_u[i]) / 3;
  }
  r.diagnostics.notes.push_back("Richardson combination of levels " + std::to_string(coarse.diagnostics.mesh_level) +
                                " and " + std::to_string(fine.diagnostics.mesh_level));
  return r;
}

inline LargeSolution solve_richardson(const RadialProblem& pb, int mesh_level, const Closure& closure,
                                      const SolveOptions& opt = {}) {
  return richardson_combine(solve_large_solution(pb, mesh_level, closure, opt),
                            solve_large_solution(pb, mesh_level + 1, closure, opt));
}

// max |ln u - ln u*| over the nodes (manufactured problems).
inline double max_log_error(const RadialProblem& pb, const LargeSolution& s) {
  if (!pb.exact_log_u) throw InvalidInput("max_log_error: problem has no exact solution");
  double e = 0;
  for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::abs(s.log_u[i] - pb.exact_log_u(s.grid[i])));
  return e;
}

// Largest interior |ln u1 - ln u2| over shared nodes with d >= dmin.
inline double interior_difference(const LargeSolution& s1, const LargeSolution& s2, double dmin) {
  const auto at = detail::keyed_values(s2);
  const auto keys = detail::node_keys(s1);
  double c = 0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1.distance[i] < dmin) continue;
    const auto it = at.find(keys[i]);
    if (it == at.end()) continue;
    ++shared;
    c = std::max(c, std::abs(it->second - s1.log_u[i]));
  }
  if (shared == 0) throw InvalidInput("interior_difference: no shared interior nodes");
  return c;
}

// Uniqueness echo: the dirichlet-M and asymptotic closures must agree on the
// interior.  The allowance adds the remaining M tail (bounded by twice the
// last doubling change), the eps_b shift of the truncated domain
// (eps_b max|w'| over the interior) and the asymptotic closure's eps_b
// sensitivity.
struct UniquenessEcho {
  double difference = 0;
  double allowance = 0;
  bool pass = false;
};

inline UniquenessEcho uniqueness_echo(const LargeSolution& asym, const LargeSolution& dirM, double interior_fraction,
                                      double tol = default_tolerance()) {
  if (asym.closure != ClosureKind::asymptotic || dirM.closure != ClosureKind::dirichlet_M)
    throw InvalidInput("uniqueness_echo: needs one asymptotic and one dirichlet-M solution");
  if (dirM.diagnostics.M_changes.empty()) throw InvalidInput("uniqueness_echo: dirichlet-M solution has no M history");
  const double dmin = interior_fraction * asym.geometry.half_width();
  UniquenessEcho e;
  e.difference = interior_difference(asym, dirM, dmin);
  double slope = 0;
  for (std::size_t i = 1; i + 1 < asym.size(); ++i) {
    if (asym.distance[i] < dmin) continue;
    slope = std::max(slope, std::abs((asym.log_u[i + 1] - asym.log_u[i - 1]) / (asym.grid[i + 1] - asym.grid[i - 1])));
  }
  e.allowance = 2 * dirM.diagnostics.M_changes.back() + asym.epsilon_b * slope + tol;
  if (asym.diagnostics.sensitivity) e.allowance += *asym.diagnostics.sensitivity;
  e.pass = e.difference <= e.allowance;
  return e;
}

// ---------------------------------------------------------------------------
// Verification.

struct VerifyOptions {
  double first_order_tol = 0.02;
  double second_order_tol = 0.10;
  double sample_octaves = 0.4;  // samples every 2^-0.4 in d
  int max_samples = 10;
  int min_samples = 8;
  double min_offset = 2.0;      // samples only at d >= min_offset * eps_b
  LimitOptions limit{};
};

struct OrderReport {
  LimitEstimate estimate;
  std::vector<Sample> samples;  // raw curve, in order of approach to the boundary
  double target = 0;
  bool pass = false;
  bool inconclusive = false;
  std::string note;
};

namespace detail {

// Nodes on one side at d = d_s 2^(-j*octaves), d >= min_offset eps_b, nearest the boundary last.
inline std::vector<std::size_t> layer_nodes(const LargeSolution& s, const VerifyOptions& o) {
  std::vector<std::size_t> idx;
  const double D = s.geometry.half_width(), ds = 0.25 * D;
  // Right end of the mesh is a boundary for every geometry.
  for (std::size_t i = s.size(); i-- > 0;) {
    if (s.grid[i] < s.grid.back() - D) break;
    const double d = s.distance[i];
    if (d > ds * (1 + 1e-12) || d < o.min_offset * s.epsilon_b) continue;
    const double j = std::log2(ds / d) / o.sample_octaves;
    if (std::abs(j - std::round(j)) < 1e-6) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&s](std::size_t a, std::size_t b) { return s.distance[a] > s.distance[b]; });
  if (static_cast<int>(idx.size()) > o.max_samples) idx.erase(idx.begin(), idx.end() - o.max_samples);
  return idx;
}

inline double log_ratio_to_leading(const LargeSolution& s, const ExpansionPrediction& pred, const BlowupProfile& P,
                                   std::size_t i) {
  return s.log_u[i] - std::log(pred.leading) - P.log_h(s.distance[i]);
}

}  // namespace detail

// u/(xi0 h(d)) extrapolated as d -> 0.
inline OrderReport verify_first_order(const LargeSolution& s, const ExpansionPrediction& pred, const BlowupProfile& P,
                                      const VerifyOptions& o = {}) {
  OrderReport r;
  r.target = 1;
  const auto idx = detail::layer_nodes(s, o);
  for (std::size_t i : idx) r.samples.push_back({s.distance[i], std::exp(detail::log_ratio_to_leading(s, pred, P, i))});
  if (static_cast<int>(idx.size()) < o.min_samples) {
    r.inconclusive = true;
    r.note = "boundary layer under-resolved: " + std::to_string(idx.size()) + " usable nodes";
    return r;
  }
  r.estimate = limit_extrapolate(r.samples, Direction::to_zero, o.limit);
  r.pass = std::isfinite(r.estimate.value) && std::abs(r.estimate.value - 1) <= o.first_order_tol;
  return r;
}

// R(d) = (u/(xi0 h) - 1) d^(-varpi)  or  (u/(xi0 h) - 1) (-ln d)^tau.
inline OrderReport verify_second_order(const LargeSolution& s, const ExpansionPrediction& pred, const BlowupProfile& P,
                                       const VerifyOptions& o = {}) {
  if (pred.order != 2 || pred.rate_kind == RateKind::none)
    throw PreconditionError("verify_second_order: the prediction has no second-order term");
  OrderReport r;
  r.target = pred.second_coeff;
  const auto idx = detail::layer_nodes(s, o);
  for (std::size_t i : idx) {
    const double d = s.distance[i];
    const double q = std::expm1(detail::log_ratio_to_leading(s, pred, P, i));
    const double scale = pred.rate_kind == RateKind::algebraic ? std::pow(d, -pred.rate)
                                                               : std::pow(-std::log(d), pred.rate);
    r.samples.push_back({d, q * scale});
  }
  if (static_cast<int>(idx.size()) < o.min_samples) {
    r.inconclusive = true;
    r.note = "boundary layer under-resolved: " + std::to_string(idx.size()) + " usable nodes";
    return r;
  }
  const double decades = std::log10(r.samples.front().x / r.samples.back().x);
  if (decades < 1.5) r.note = "layer spans only " + std::to_string(decades) + " decades";
  r.estimate = limit_extrapolate(r.samples, Direction::to_zero, o.limit);
  if (!std::isfinite(r.estimate.value)) {
    r.inconclusive = true;
    r.note = "R(d) did not converge";
    return r;
  }
  if (r.target == 0) {
    r.pass = std::abs(r.estimate.value) < 0.05 && std::abs(r.samples.back().value) < 0.05;
  } else {
    r.pass = std::abs(r.estimate.value - r.target) <= o.second_order_tol * std::abs(r.target);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sub/supersolution barriers.

struct SubSuperRow {
  double d = 0;
  double plus = 0;   // B+ or J+
  double minus = 0;  // B- or J-
};

struct SubSuperOptions {
  Geometry geometry = Geometry::interval(1.0);
  std::vector<double> d_grid;  // empty: a default grid for the order
  double rel_tol = 0.02;
};

struct SubSuperReport {
  int order = 1;
  double eps = 0;
  double target_plus = 0, target_minus = 0;
  LimitEstimate lim_plus, lim_minus;
  std::vector<SubSuperRow> rows;
  std::optional<double> delta1;  // signs hold for every grid d <= delta1
  bool pass = false;
  std::vector<std::string> notes;
};

namespace detail {

// B(d) for u = xi h(d) under (1 - s eps) k^2 f, divided by xi h''.
inline double barrier_B(const BlowupProfile& P, const Geometry& g, double a, double lxi, double factor, double d) {
  const auto p = P.point(d);
  const double hh = std::exp(p.log_h - p.log_d2h);
  const double dh = -std::exp(p.log_neg_dh - p.log_d2h);
  const double x = 2 * p.log_k + P.f().log_f(p.log_h + lxi) - lxi - p.log_d2h;
  return 1 + a * hh + g.laplacian_of_distance(d) * dh - factor * std::exp(x);
}

// J(d) for u = xi0 h (1 + chi (-ln d)^-tau) under k^2 (1 + c d^theta) f,
// times (-ln d)^tau / (xi0 h'').
inline double barrier_J(const BlowupProfile& P, const Geometry& g, double a, double lx0, double chi, double tau,
                        double c, double theta, double d) {
  const auto p = P.point(d);
  const double hh = std::exp(p.log_h - p.log_d2h);     // h/h''
  const double dh = -std::exp(p.log_neg_dh - p.log_d2h);  // h'/h''
  const double L = -std::log(d);
  const double Lt = std::pow(L, -tau);
  const double m = 1 + chi * Lt;
  const double m1 = chi * tau * Lt / (L * d);
  const double m2 = chi * tau * Lt * ((tau + 1) / L - 1) / (L * d * d);
  const double lap = m + 2 * dh * m1 + hh * m2 + g.laplacian_of_distance(d) * (dh * m + hh * m1);
  const double src = (1 + c * std::pow(d, theta)) *
                     std::exp(2 * p.log_k + P.f().log_f(lx0 + p.log_h + std::log(m)) - lx0 - p.log_d2h);
  return std::pow(L, tau) * (lap + a * hh * m - src);
}

}  // namespace detail

inline SubSuperReport subsupersolution_check(const BlowupProfile& P, const ExpansionPrediction& pred, double a,
                                             double eps, int order, const BExpansion& bexp = {},
                                             const SubSuperOptions& opt = {}) {
  if (!(eps > 0) || !(eps < 0.5)) throw InvalidInput("subsupersolution_check: eps must lie in (0, 1/2)");
  if (order != 1 && order != 2) throw InvalidInput("subsupersolution_check: order must be 1 or 2");
  const double rho = P.f().rho();
  SubSuperReport r;
  r.order = order;
  r.eps = eps;
  std::vector<double> grid = opt.d_grid;
  if (order == 1) {
    if (grid.empty()) grid = profile_grid(P, 14, 0.1, 0.5);
    r.target_plus = -eps / (1 - 2 * eps);
    r.target_minus = eps / (1 + 2 * eps);
    const double lp = std::log(pred.leading) - std::log1p(-2 * eps) / rho;
    const double lm = std::log(pred.leading) - std::log1p(2 * eps) / rho;
    for (double d : grid)
      r.rows.push_back({d, detail::barrier_B(P, opt.geometry, a, lp, 1 - eps, d),
                        detail::barrier_B(P, opt.geometry, a, lm, 1 + eps, d)});
  } else {
    if (pred.rate_kind != RateKind::logarithmic)
      throw PreconditionError("subsupersolution_check: order 2 needs a logarithmic-rate prediction");
    if (grid.empty()) grid = geometric_grid(1e-2, 1e-12, 10);
    r.target_plus = -rho * eps;
    r.target_minus = rho * eps;
    const double lx0 = std::log(pred.leading);
    const double c = bexp.form == BExpansion::Form::two_term ? bexp.c_tilde : 0.0;
    const double th = bexp.theta;
    for (double d : grid)
      r.rows.push_back(
          {d, detail::barrier_J(P, opt.geometry, a, lx0, pred.second_coeff + eps, pred.rate, c - eps, th, d),
           detail::barrier_J(P, opt.geometry, a, lx0, pred.second_coeff - eps, pred.rate, c + eps, th, d)});
  }
  std::vector<Sample> sp, sm;
  for (const auto& row : r.rows) {
    sp.push_back({row.d, row.plus});
    sm.push_back({row.d, row.minus});
  }
  r.lim_plus = limit_extrapolate(sp, Direction::to_zero);
  r.lim_minus = limit_extrapolate(sm, Direction::to_zero);
  // Rows run toward 0; delta1 is the largest d whose whole tail has the right signs.
  for (std::size_t i = r.rows.size(); i-- > 0;) {
    if (!(r.rows[i].plus < 0 && r.rows[i].minus > 0)) break;
    r.delta1 = r.rows[i].d;
  }
  auto close = [&](const LimitEstimate& e, double t) {
    return std::isfinite(e.value) && std::abs(e.value - t) <= opt.rel_tol * std::abs(t);
  };
  r.pass = r.delta1.has_value() && close(r.lim_plus, r.target_plus) && close(r.lim_minus, r.target_minus);
  if (!r.delta1) r.notes.push_back("no grid point near the boundary has the required signs");
  return r;
}

}  // namespace blowup
