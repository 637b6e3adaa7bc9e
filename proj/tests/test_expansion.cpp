#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "blowup/expansion.hpp"

using namespace blowup;

namespace {

Nonlinearity u3_log() {
  return make_nonlinearity_log(1.0, 2.0, std::numbers::e, [](double s) { return 1.0 / s; },
                               NonlinearityClass::rho0_tau(1.0, 1.0));
}

Nonlinearity u3_exp() {
  return make_nonlinearity(1.0, 2.0, 1.0, [](double u) { return 1.0 / u; }, NonlinearityClass::rho_eta(-1.0));
}

// k = t ln(1/t): l1 = 1/2, tau = 1, L# = 1/4.
WeightFunction t_log_weight() {
  return weight_from_E(1.0, 1.0, [](double y) { return 1.0 / -std::log(y); }, std::exp(-1.0), "t ln(1/t)");
}

std::vector<double> log_t_grid() {
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(1e-2 * std::pow(1e-12, i));
  return g;
}

}  // namespace

TEST(Xi0, Values) {
  EXPECT_DOUBLE_EQ(xi0(2.0, 1.0), 1.0);
  EXPECT_NEAR(xi0(2.0, 0.5), 0.8660254, 1e-7);
  EXPECT_NEAR(xi0(2.0, 0.0), 0.7071068, 1e-7);
  EXPECT_THROW(xi0(2.0, 1.5), InvalidInput);
  EXPECT_THROW(xi0(0.0, 0.5), InvalidInput);
}

TEST(Xi0, ConsistencyIdentityOverSweep) {
  // [2(2+l1 rho)/rho^2]^(1/rho) lim phi/h = xi0, with phi/h measured on
  // pure powers and power weights, where it is constant in t.
  int n = 0;
  for (double rho : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    for (double l1 : {0.25, 0.5, 0.75, 1.0}) {
      const double gamma = 2 * (1 / l1 - 1);
      const BlowupProfile P(pure_power_nonlinearity(1.0, rho), power_weight(1.0, gamma));
      const double t = 1e-3;
      const double ratio = std::exp(P.log_phi(t) - P.log_h(t));
      EXPECT_NEAR(phi_coefficient(rho, l1) * ratio / xi0(rho, l1), 1.0, 1e-10) << rho << " " << l1;
      EXPECT_NEAR(phi_coefficient(rho, l1) * phi_over_h_limit(rho), xi0(rho, l1), 1e-14);
      ++n;
    }
  }
  EXPECT_EQ(n, 20);
}

TEST(PredictFirstOrder, Examples) {
  const auto one = classify_weight(constant_weight(1.0));
  const auto p = predict_first_order(2.0, one);
  EXPECT_NEAR(p.leading, 1.0, 1e-6);
  EXPECT_NEAR(p.phi_leading, std::numbers::sqrt2, 1e-5);
  EXPECT_EQ(p.case_tag, "thm1.1");
  const auto lin = classify_weight(power_weight(1.0, 2.0));
  const auto q = predict_first_order(2.0, lin);
  EXPECT_NEAR(q.leading, std::sqrt(3.0) / 2, 1e-7);
  // phi-form: [2(2+1)/4]^(1/2) = sqrt(3/2).
  EXPECT_NEAR(q.phi_leading, std::sqrt(1.5), 1e-7);
}

TEST(PredictFirstOrder, LoewnerNirenbergCase) {
  // N = 3, g = 1: k = [(N-2)/(4(N-1))]^(1/2), f = u^5; l1 = 1 gives xi0 = 1.
  const double N = 3;
  const auto k = constant_weight(std::sqrt((N - 2) / (4 * (N - 1))));
  const auto p = predict_first_order(4.0, classify_weight(k));
  EXPECT_NEAR(p.leading, 1.0, 1e-6);
}

TEST(PredictFirstOrder, RejectsUnclassified) {
  WeightClassReport rep;
  rep.ell1.value = 0.4;
  rep.ell1.converged = false;
  EXPECT_THROW(predict_first_order(2.0, rep), PreconditionError);
}

TEST(ChiTheorem2, Examples) {
  const auto pure = NonlinearityClass::pure_power();
  auto r = chi_theorem2(2.0, 2.0, 5.0, 1.0, 2.0, pure);
  EXPECT_DOUBLE_EQ(r.varpi, 1.0);
  EXPECT_DOUBLE_EQ(r.chi, 1.0);
  EXPECT_EQ(r.sub_case, "i");
  r = chi_theorem2(2.0, 0.5, 1.0, 1.0, 2.0, pure);
  EXPECT_DOUBLE_EQ(r.varpi, 0.5);
  EXPECT_DOUBLE_EQ(r.chi, -0.5);
  r = chi_theorem2(2.0, 2.0, 0.0, 1.0, 2.0, NonlinearityClass::rho0_tau(1.0, 1.0));
  EXPECT_EQ(r.sub_case, "iii");
  // Independent evaluation: 1 - (1/2)(2*1*2/(2*2))^1 (1/4 + ln(1/sqrt 2)).
  EXPECT_NEAR(r.chi, 1.0 - 0.5 * (0.25 - 0.5 * std::log(2.0)), 1e-15);
  EXPECT_NEAR(r.chi, 1.0482868, 1e-7);
}

TEST(ChiTheorem2, HeavisideTie) {
  const auto r = chi_theorem2(2.0, 1.0, 3.0, 1.0, 2.0, NonlinearityClass::pure_power());
  EXPECT_TRUE(r.heaviside_tie);
  EXPECT_DOUBLE_EQ(r.chi, 1.0 - 1.5);
}

TEST(ChiTheorem2, CaseMismatch) {
  EXPECT_THROW(chi_theorem2(2.0, 2.0, 0.0, 1.0, 2.0, NonlinearityClass::rho0_tau(2.0, 1.0)), PreconditionError);
  EXPECT_THROW(chi_theorem2(2.0, 2.0, 0.0, 1.0, 2.0, NonlinearityClass::rho_eta(0.0)), PreconditionError);
  EXPECT_EQ(chi_theorem2(2.0, 2.0, 0.0, 1.0, 2.0, NonlinearityClass::rho_eta(-1.0)).sub_case, "ii");
}

TEST(ChiTheorem3, Examples) {
  auto r = chi_theorem3(2.0, 0.5, 1.0, 3.0, NonlinearityClass::rho_eta(-1.0));
  EXPECT_DOUBLE_EQ(r.chi_tilde, 1.0);
  r = chi_theorem3(2.0, 0.5, 1.0, 0.0, NonlinearityClass::rho0_tau(1.0, 1.0));
  EXPECT_EQ(r.sub_case, "ii");
  const double x0 = std::sqrt(3.0) / 2;
  EXPECT_NEAR(r.chi_tilde, -0.25 * (1.0 / 12 + std::log(x0)), 1e-15);
  EXPECT_NEAR(r.chi_tilde, 0.0151269, 1e-7);
  for (const auto& fc : {NonlinearityClass::rho_eta(-1.0), NonlinearityClass::rho0_tau(1.0, 0.0)})
    EXPECT_DOUBLE_EQ(chi_theorem3(2.0, 1.0, 1.0, 1.0, fc).chi_tilde, 0.25);
}

TEST(ChiTheorem3, Degeneracy) {
  EXPECT_THROW(chi_theorem3(2.0, 1.0, 1.0, 0.0, NonlinearityClass::rho0_tau(1.0, 1.0)), PreconditionError);
  EXPECT_THROW(chi_theorem3(2.0, 0.5, 1.0, 0.0, NonlinearityClass::rho_eta(-1.0)), PreconditionError);
  const auto r = chi_theorem3(2.0, 0.5, 1.0, 0.0, NonlinearityClass::rho_eta(-1.0), true);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.chi_tilde, 0.0);
  EXPECT_THROW(chi_theorem3(2.0, 0.5, 2.0, 0.0, NonlinearityClass::rho0_tau(1.0, 1.0)), PreconditionError);
}

TEST(ChiTheorem3, BitIdenticalReevaluation) {
  const auto r = chi_theorem3(2.0, 0.5, 1.0, 0.25, NonlinearityClass::rho0_tau(1.0, 1.0));
  const auto s = chi_theorem3(2.0, 0.5, 1.0, 0.25, NonlinearityClass::rho0_tau(1.0, 1.0));
  EXPECT_EQ(r.chi_tilde, s.chi_tilde);
}

TEST(Dispatch, Totality) {
  const auto flat = classify_weight(exp_flat_weight(1.0), [] {
    ClassifyOptions o;
    o.zeta_hint = 1.0;
    return o;
  }());
  const auto lin = classify_weight(power_weight(1.0, 2.0));
  const auto tlog = classify_weight(t_log_weight());
  WeightClassReport k0_;  // l1 = 0 without a zeta
  k0_.ell1.value = 0;
  k0_.ell1.converged = true;
  k0_.subclass = WeightSubclass::K0;
  const auto& k0 = k0_;
  const auto b2 = BExpansion::two_term(2.0, 0.0);
  const std::vector<Nonlinearity> fs{pure_power_nonlinearity(1.0, 2.0), u3_exp(), u3_log()};
  for (const auto* rep : {&flat, &lin, &tlog, &k0}) {
    for (const auto& f : fs) {
      const auto p = predict(f, *rep, b2);
      const bool ok = p.case_tag == "thm1.1-only" || p.case_tag.rfind("thm1.2(", 0) == 0 ||
                      p.case_tag.rfind("thm1.3(", 0) == 0;
      EXPECT_TRUE(ok) << p.case_tag;
      EXPECT_EQ(p.supported, p.case_tag != "thm1.1-only");
      if (!p.supported) EXPECT_FALSE(p.notes.empty());
    }
    EXPECT_EQ(predict(fs[0], *rep, BExpansion::first_order()).case_tag, "thm1.1");
  }
  EXPECT_EQ(predict(fs[0], flat, b2).case_tag, "thm1.2(i)");
  EXPECT_NEAR(predict(fs[0], flat, b2).second_coeff, 1.0, 1e-3);
  EXPECT_EQ(predict(fs[1], flat, b2).case_tag, "thm1.2(ii)");
  EXPECT_EQ(predict(fs[2], flat, BExpansion::two_term(1.0, 0.0)).case_tag, "thm1.2(iii)");
  EXPECT_EQ(predict(fs[1], tlog, b2).case_tag, "thm1.3(i)");
  EXPECT_EQ(predict(fs[2], lin, b2).case_tag, "thm1.3(ii)");
  EXPECT_NEAR(predict(fs[2], lin, b2).second_coeff, 0.0151269, 1e-6);
  // Pure power with k = t: L# = 0 and l* = 0 is degenerate.
  EXPECT_EQ(predict(fs[0], lin, b2).case_tag, "thm1.1-only");
  EXPECT_EQ(predict(fs[0], k0, b2).case_tag, "thm1.1-only");
}

TEST(Dispatch, RecordEchoesInputs) {
  const auto p = predict(u3_log(), classify_weight(power_weight(1.0, 2.0)), BExpansion::two_term(2.0, 0.0));
  const auto rec = p.record();
  auto find = [&](const std::string& k) {
    for (const auto& [a, b] : rec)
      if (a == k) return b;
    return std::string();
  };
  EXPECT_EQ(find("case_tag"), "thm1.3(ii)");
  EXPECT_EQ(find("input.ell_star"), "1");
  EXPECT_FALSE(find("formula").empty());
  EXPECT_EQ(std::stod(find("chi_tilde")), p.second_coeff);
}

TEST(Scaling, PurePowerReparametrization) {
  // C0 -> lambda C0 leaves xi0 alone and scales h by lambda^(-1/rho).
  const double rho = 2.0, lambda = 9.0;
  const BlowupProfile P(pure_power_nonlinearity(1.0, rho), power_weight(1.0, 2.0));
  const BlowupProfile Q(pure_power_nonlinearity(1.0, rho), power_weight(lambda, 2.0));
  for (double t : {1e-1, 1e-3, 1e-5}) EXPECT_NEAR(Q.h(t) / P.h(t), std::pow(lambda, -1.0 / rho), 1e-12);
  EXPECT_EQ(predict_first_order(rho, classify_weight(power_weight(1.0, 2.0))).leading,
            predict_first_order(rho, classify_weight(power_weight(1.0, 2.0))).leading);
}

TEST(ScriptH, CaseTwoLinearWeight) {
  const BlowupProfile P(u3_log(), power_weight(1.0, 2.0));
  const auto chi = chi_theorem3(2.0, 0.5, 1.0, 0.0, NonlinearityClass::rho0_tau(1.0, 1.0)).chi_tilde;
  const auto r = script_H_check(P, xi0(2.0, 0.5), 1.0, 2 * chi, log_t_grid());
  EXPECT_TRUE(r.pass) << r.estimate.value;
  EXPECT_NEAR(r.estimate.value, 0.0302538, 6e-4);
}

TEST(ScriptH, CaseOneLogWeight) {
  const BlowupProfile P(u3_exp(), t_log_weight());
  const auto chi = chi_theorem3(2.0, 0.5, 1.0, 0.25, NonlinearityClass::rho_eta(-1.0)).chi_tilde;
  EXPECT_NEAR(chi, 1.0 / 12, 1e-15);
  const auto r = script_H_check(P, xi0(2.0, 0.5), 1.0, 2 * chi, log_t_grid());
  EXPECT_TRUE(r.pass) << r.estimate.value;
}

TEST(ScriptH, TrivialCases) {
  // Pure power with l1 = 1 and L# = 0: H -> 0.
  const BlowupProfile P(pure_power_nonlinearity(1.0, 2.0), constant_weight(1.0));
  EXPECT_TRUE(script_H_check(P, 1.0, 1.0, 0.0, log_t_grid()).pass);
  // u^3 exp(1 - 1/u) with k = t: chi2 = 0.
  const BlowupProfile Q(u3_exp(), power_weight(1.0, 2.0));
  const auto r = script_H_check(Q, xi0(2.0, 0.5), 1.0, 0.0, log_t_grid());
  EXPECT_TRUE(r.pass) << r.estimate.value;
}
