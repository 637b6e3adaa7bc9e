#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "blowup/profiles.hpp"

using namespace blowup;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

Nonlinearity u3() { return pure_power_nonlinearity(1.0, 2.0); }
Nonlinearity u2() { return pure_power_nonlinearity(1.0, 1.0); }

Nonlinearity u3_log() {
  return make_nonlinearity_log(1.0, 2.0, std::numbers::e, [](double s) { return 1.0 / s; },
                               NonlinearityClass::rho0_tau(1.0, 1.0));
}

Nonlinearity u3_hat() {
  return make_nonlinearity_log(1.0, 2.0, std::numbers::e, [](double s) { return -1.0 / (s * (s + 1)); },
                               NonlinearityClass::rho0_tau(2.0, -1.0));
}

}  // namespace

TEST(Psi, ClosedForms) {
  const BlowupProfile a(u3(), constant_weight(1.0));
  EXPECT_NEAR(std::exp(a.log_psi(0.0)), kSqrt2, 1e-14);
  const BlowupProfile b(u2(), constant_weight(1.0));
  EXPECT_NEAR(std::exp(b.log_psi(std::log(4.0))), 1.2247449, 1e-7);
  EXPECT_NEAR(std::exp(b.log_psi(std::log(4.0))), 2 * std::sqrt(1.5) / 2, 1e-14);
}

TEST(Psi, StrictlyDecreasing) {
  const auto f = u3_log();
  for (double s = 0.5; s < 600; s *= 1.7) EXPECT_LT(f.log_psi(s + std::numbers::ln2), f.log_psi(s)) << s;
}

TEST(Psi, RequiresKellerOsserman) {
  // f(u) = u^(1.5) has rho = 0.5 > 0, so the check passes; f = u is refused
  // when the nonlinearity is built.
  EXPECT_NO_THROW(BlowupProfile(pure_power_nonlinearity(1.0, 0.5), constant_weight(1.0)));
  EXPECT_THROW(pure_power_nonlinearity(1.0, 0.0), PreconditionError);
  EXPECT_THROW(pure_power_nonlinearity(1.0, -1.0), InvalidInput);
}

TEST(ProfileH, CubicWithLinearWeight) {
  const BlowupProfile P(u3(), power_weight(1.0, 2.0));
  EXPECT_NEAR(P.h(0.1), 282.842712, 1e-6);
  for (double t = 1e-1; t >= 1e-6; t *= 0.1) {
    const double h = 2 * kSqrt2 / (t * t);
    EXPECT_NEAR(P.h(t) / h, 1.0, 1e-8) << t;
    EXPECT_NEAR(P.dh(t) / (-2 * h / t), 1.0, 1e-8) << t;
    EXPECT_NEAR(P.d2h(t) / (6 * h / (t * t)), 1.0, 1e-8) << t;
    EXPECT_LT(P.identity_residual(t), 1e-8);
  }
}

TEST(ProfileH, CubicWithConstantWeight) {
  const BlowupProfile P(u3(), constant_weight(1.0));
  EXPECT_NEAR(P.h(0.01), 141.42136, 1e-5);
}

TEST(ProfileH, QuadraticWithConstantWeight) {
  const BlowupProfile P(u2(), constant_weight(1.0));
  EXPECT_NEAR(P.h(0.1), 600.0, 1e-9);
  for (double t = 1e-1; t >= 1e-6; t *= 0.1) EXPECT_NEAR(P.h(t) / (6 / (t * t)), 1.0, 1e-8) << t;
}

TEST(ProfileH, DerivativesAgreeWithDifferences) {
  // Analytic h' and h'' against central differences of ln h in t.
  const BlowupProfile P(u3_log(), power_weight(2.0, 1.0));
  for (double t : {0.05, 0.01, 0.002}) {
    const double e = 1e-4 * t;
    const double lp = P.log_h(t + e), lm = P.log_h(t - e), l0 = P.log_h(t);
    const double d1 = (lp - lm) / (2 * e);               // h'/h
    const double d2 = (lp - 2 * l0 + lm) / (e * e);      // (h'/h)'
    const auto p = P.point(t);
    const double r1 = p.dh() / p.h();
    EXPECT_NEAR(d1 / r1, 1.0, 1e-6) << t;
    EXPECT_NEAR((d2 + r1 * r1) / (p.d2h() / p.h()), 1.0, 1e-3) << t;
    EXPECT_LT(P.identity_residual(t), 1e-8);
  }
}

TEST(ProfileH, SignsNearZero) {
  const BlowupProfile P(u3_log(), exp_flat_weight(1.0));
  for (double t : profile_grid(P, 8, 0.1, 0.5)) {
    const auto p = P.point(t);
    EXPECT_LT(p.dh(), 0.0);
    EXPECT_GT(p.log_d2h, -700.0);
    EXPECT_LT(P.identity_residual(t), 1e-8) << t;
  }
}

TEST(ProfileH, RejectsLargeT) {
  const BlowupProfile P(u3(), constant_weight(1.0));
  EXPECT_THROW(P.h(2.0), DomainError);
  EXPECT_GT(P.t_max(), 0.0);
  EXPECT_NO_THROW(P.h(P.t_max()));
  // K(t_max) = psi(B)/4 for the constant weight: t_max = sqrt(2)/4.
  EXPECT_NEAR(P.t_max(), kSqrt2 / 4, 1e-9);
}

TEST(ProfilePhi, ClosedForms) {
  const BlowupProfile P(u3(), power_weight(1.0, 2.0));
  EXPECT_NEAR(P.phi(0.1), 200.0, 1e-9);
  const BlowupProfile Q(u3(), constant_weight(1.0));
  EXPECT_NEAR(Q.phi(0.01), 100.0, 1e-10);
  EXPECT_NEAR(Q.phi(1e-4) / Q.h(1e-4), 0.7071068, 1e-7);
  EXPECT_LT(P.phi_identity_residual(1e-5), 1e-8);
}

TEST(ProfilePhi, IdentityResidualGeneralF) {
  const BlowupProfile P(u3_log(), exp_flat_weight(1.0));
  for (double t : {0.1, 0.01, 0.002}) EXPECT_LT(P.phi_identity_residual(t), 1e-8) << t;
}

TEST(ProfilePhi, RatioToHLimit) {
  for (const auto& f : {u3(), u3_log()}) {
    const BlowupProfile P(f, power_weight(1.0, 2.0));
    const auto e = phi_over_h_estimate(P, geometric_grid(1e-2, 1e-8, 10));
    EXPECT_NEAR(e.value, phi_over_h_limit(2.0), 1e-3);
  }
  EXPECT_NEAR(phi_over_h_limit(2.0), std::sqrt(0.5), 1e-15);
}

TEST(ProfilePhi, AsymptoticEquivalenceStability) {
  // Replacing u^3 ln u by u^3 (1 + 1/ln u) ln u leaves phi asymptotically unchanged.
  const BlowupProfile P(u3_log(), power_weight(1.0, 2.0));
  // C = 2 and int_1^s eps = ln((s + 1)/2) give u^3 (1 + ln u).
  const auto g = make_nonlinearity_log(2.0, 2.0, std::numbers::e,
                                       [](double s) { return 1.0 / s - 1.0 / (s * (s + 1)); },
                                       NonlinearityClass::rho0_tau(1.0, 1.0));
  const BlowupProfile Q(g, power_weight(1.0, 2.0));
  std::vector<Sample> s;
  for (double t : geometric_grid(1e-2, 1e-30, 9)) s.push_back({t, std::exp(Q.log_phi(t) - P.log_phi(t))});
  EXPECT_NEAR(limit_extrapolate(s, Direction::to_zero).value, 1.0, 1e-3);
  EXPECT_LT(s.back().value, 1.0);
}

TEST(ProfilePhi, ReciprocalIndex) {
  // l1 = 1/(alpha+1); for k = t^(gamma/2), alpha = gamma/2.
  for (double gamma : {0.0, 1.0, 2.0}) {
    const BlowupProfile P(u3_hat(), power_weight(1.0, gamma));
    const double l1 = 1.0 / (1.0 + 0.5 * gamma);
    const auto e = phi_reciprocal_index(P, geometric_grid(1e-3, 1e-20, 10));
    EXPECT_NEAR(e.value, 2.0 / (2.0 * l1), 1e-2) << gamma;
  }
}

TEST(ProfilePhi, GammaVariationForFlatWeight) {
  const BlowupProfile P(u3(), exp_flat_weight(1.0));
  for (double lambda : {-1.0, 0.0, 1.0}) {
    const auto e = phi_gamma_variation(P, lambda, geometric_grid(1e-2, 0.5, 10));
    EXPECT_NEAR(e.value, std::exp(lambda), 1e-2) << lambda;
  }
}

TEST(LemmaAux, LinearWeightCubic) {
  const BlowupProfile P(u3(), power_weight(1.0, 2.0));
  const auto rep = classify_weight(power_weight(1.0, 2.0));
  const auto rows = lemma_aux_report(P, rep);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.name << " " << r.estimate.value << " vs " << r.target;
  // h h''/h'^2 -> 3/2 and h/(t h') -> -1/2.
  EXPECT_NEAR(rows[3].estimate.value, 1.5, 1e-8);
  EXPECT_NEAR(rows[7].estimate.value, -0.5, 1e-8);
}

TEST(LemmaAux, ConstantWeightQuadratic) {
  const BlowupProfile P(u2(), constant_weight(1.0));
  for (const auto& r : lemma_aux_report(P, classify_weight(constant_weight(1.0))))
    EXPECT_TRUE(r.pass) << r.name << " " << r.estimate.value << " vs " << r.target;
}

TEST(LemmaAux, FlatWeightCubic) {
  const auto k = exp_flat_weight(1.0);
  ClassifyOptions co;
  co.zeta_hint = 1.0;
  const auto rep = classify_weight(k, co);
  ASSERT_TRUE(rep.zeta);
  const BlowupProfile P(u3(), k);
  const auto rows = lemma_aux_report(P, rep);
  ASSERT_EQ(rows.back().name, "(v) zeta");
  EXPECT_NEAR(rows.back().target, -1.0, 1e-4);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.name << " " << r.estimate.value << " vs " << r.target;
  // t ln h(t) -> 1.
  std::vector<Sample> s;
  for (double t : profile_grid(P, 10, 0.1, 0.5)) s.push_back({t, t * P.log_h(t)});
  EXPECT_NEAR(limit_extrapolate(s, Direction::to_zero).value, 1.0, 1e-3);
}

TEST(ProfileTable, Columns) {
  const BlowupProfile P(u3(), power_weight(1.0, 2.0));
  const auto tab = profile_table(P, {0.1, 0.01});
  ASSERT_EQ(tab.size(), 2u);
  EXPECT_NEAR(tab[0].h, 282.842712, 1e-6);
  EXPECT_NEAR(tab[0].phi, 200.0, 1e-9);
  EXPECT_LT(tab[1].dh, 0.0);
}
