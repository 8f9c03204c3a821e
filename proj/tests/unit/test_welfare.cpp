#include <gtest/gtest.h>

#include <cmath>

#include "dexp/equilibrium.hpp"
#include "dexp/oracle_suite.hpp"
#include "dexp/presets.hpp"
#include "dexp/team.hpp"
#include "dexp/welfare.hpp"
#include "oracles.hpp"

namespace {

using dexp::Bias;
using dexp::MarketParams;
using dexp::TaxRegime;
using dexp::TaxSpec;

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

TEST(WlGeneral, OnlyNoiseTradingCostWhenBothGapsClose) {
  MarketParams p = dexp::presets::case2();
  const double al = 1.0 / p.gamma;
  EXPECT_NEAR(dexp::wl_general(p, al, 0.0), p.gamma * al * al / (2.0 * p.tau_eps), 1e-16);
}

TEST(WlGeneral, MarketLoadingsMatchDecomposition) {
  const auto p = dexp::presets::case1();
  auto eq = dexp::equilibrium(p, Bias{0.0});
  EXPECT_DOUBLE_EQ(dexp::wl_general(p, eq.alpha, eq.eta), dexp::welfare_loss(p, Bias{0.0}).wl_total);
}

TEST(WlGeneral, MatchesMomentOracle) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto d = dexp::random_draw(31, i, false);
    auto eq = dexp::equilibrium(d.params, d.bias);
    const double oracle = dexp::testing::wl_moments(d.params, d.bias.theta, TaxSpec{}, eq.a);
    EXPECT_LT(rel(dexp::wl_general(d.params, eq.alpha, eq.eta), oracle), 1e-10) << i;
  }
}

TEST(WelfareLoss, DecompositionIdentityOnGrid) {
  for (auto p : {dexp::presets::case1(), dexp::presets::case2(), MarketParams{1.0, 1.0, 1.0, 1.0, 1.0, 0.3}}) {
    for (int j = 0; j <= 40; ++j) {
      const double th = -0.95 + 6.0 * j / 40.0;
      auto w = dexp::welfare_loss(p, Bias{th});
      EXPECT_LT(rel(w.wl_bayes + w.wl_diag, w.wl_total), 1e-10);
      EXPECT_GE(w.wl_bayes, 0.0);
      EXPECT_GE(w.wl_diag, 0.0);
      if (std::abs(th) >= 1e-3) {
        EXPECT_GT(w.wl_diag, 0.0);
      }
    }
  }
}

TEST(WelfareLoss, NoOvershootAtZeroTheta) {
  auto w = dexp::welfare_loss(dexp::presets::case2(), Bias{0.0});
  EXPECT_EQ(w.wl_diag, 0.0);
}

TEST(WelfareLoss, UnitParametersHandValue) {
  MarketParams p{1.0, 1.0, 1.0, 1.0, 1.0, 0.0};
  const double a = 0.45339765151640377;
  const double tau = 1.0 + a * a;
  const double expect = 0.5 * (1.0 - a) * (1.0 - a) / (2.0 * tau) + a * a / 2.0;
  EXPECT_NEAR(dexp::welfare_loss(p, Bias{0.0}).wl_total, expect, 1e-14);
}

TEST(WelfareLoss, CaseOneCurveDipsThenRises) {
  const auto p = dexp::presets::case1();
  auto wl = [&](double th) { return dexp::welfare_loss(p, Bias{th}).wl_total; };
  EXPECT_LT(wl(0.05), wl(0.0));
  EXPECT_LT(wl(0.0), wl(-0.2));
  EXPECT_GT(wl(0.6), wl(0.2));
}

TEST(WelfareLossTax, CollapsesAtZeroTax) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto d = dexp::random_draw(37, i, false);
    const double base = dexp::welfare_loss(d.params, d.bias).wl_total;
    for (auto reg : {TaxRegime::BothSides, TaxRegime::InformedOnly}) {
      EXPECT_LT(rel(dexp::welfare_loss_tax(d.params, d.bias, TaxSpec{0.0, reg}), base), 1e-12);
    }
  }
}

TEST(WelfareLossTax, MatchesMomentOracleUnderTax) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto d = dexp::random_draw(41, i, false);
    for (auto reg : {TaxRegime::BothSides, TaxRegime::InformedOnly}) {
      for (double delta : {-0.2, 0.1, 0.7}) {
        TaxSpec t{delta, reg};
        auto eq = dexp::equilibrium(d.params, d.bias, t);
        const double oracle = dexp::testing::wl_moments(d.params, d.bias.theta, t, eq.a);
        const double got = dexp::welfare_loss_tax(eq);
        EXPECT_LT(rel(got, oracle), 1e-9) << i << " " << delta;
        EXPECT_GE(got, 0.0);
      }
    }
  }
}

TEST(WelfareLossTax, LargeTaxesRaiseTheLoss) {
  const auto p = dexp::presets::case2();
  for (auto reg : {TaxRegime::BothSides, TaxRegime::InformedOnly}) {
    double prev = dexp::welfare_loss_tax(p, Bias{0.0}, TaxSpec{5.0, reg});
    for (double d = 10.0; d <= 80.0; d += 10.0) {
      const double v = dexp::welfare_loss_tax(p, Bias{0.0}, TaxSpec{d, reg});
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(DwlDtheta, ClosedFormMatchesFiniteDifference) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto d = dexp::random_draw(43, i, false);
    for (double th : {-0.9, -0.3, 0.0, 0.8, 4.0}) {
      const double fd = dexp::dwl_dtheta(d.params, th);
      const double cf = dexp::dwl_dtheta_closed(d.params, th);
      EXPECT_NEAR(fd, cf, 1e-5 * std::abs(cf) + 1e-12) << i << " " << th;
    }
  }
}

TEST(DwlDtheta, SignsAtPresetParameters) {
  EXPECT_LT(dexp::dwl_dtheta(dexp::presets::case1(), 0.0), 0.0);
  EXPECT_GT(dexp::dwl_dtheta(dexp::presets::case2(), 0.0), 0.0);
  EXPECT_GT(dexp::dwl_dtheta(dexp::presets::case1(), 10.0), 0.0);
  EXPECT_GT(dexp::dwl_dtheta(dexp::presets::case2(), 10.0), 0.0);
}

TEST(DwlDtheta, SignAtZeroFollowsExternalityBalance) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto d = dexp::random_draw(47, i, false);
    auto r = dexp::externality_balance(d.params);
    if (std::abs(r.a_star - r.a_team) <= 1e-6) continue;
    EXPECT_EQ(dexp::dwl_dtheta(d.params, 0.0) > 0.0, r.a_star > r.a_team) << i;
  }
}

TEST(SmallTax, ClosedFormMatchesFiniteDifference) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto d = dexp::random_draw(53, i, false);
    for (auto reg : {TaxRegime::BothSides, TaxRegime::InformedOnly}) {
      auto cf = dexp::dwl_ddelta_at_zero(d.params, d.bias, reg);
      const double fd = dexp::dwl_ddelta_at_zero_fd(d.params, d.bias, reg);
      EXPECT_NEAR(cf.total, fd, 1e-5 * std::abs(fd) + 1e-11) << i;
    }
  }
}

TEST(SmallTax, BalancedInformedOnlyIsFlat) {
  const auto p = dexp::presets::balanced();
  auto cf = dexp::dwl_ddelta_at_zero(p, Bias{0.0}, TaxRegime::InformedOnly);
  EXPECT_NEAR(cf.total, 0.0, 1e-6);
  EXPECT_EQ(cf.partial_delta, 0.0);
}

TEST(SmallTax, BalancedBothSidesVanishesWithSignTerm) {
  const auto p = dexp::presets::balanced();
  auto cf = dexp::dwl_ddelta_at_zero(p, Bias{0.0}, TaxRegime::BothSides);
  const double al = dexp::equilibrium(p, Bias{0.0}).alpha;
  const double s = al * p.beta * p.tau_s * (al * (p.beta + p.gamma) - 1.0) + p.tau0;
  // the sign term is zero exactly when a* = a^T, and the derivative vanishes with it
  EXPECT_NEAR(s, 0.0, 1e-12);
  EXPECT_NEAR(cf.total, 0.0, 1e-12);
  // off balance the sign term does not pin the sign down
  auto p2 = dexp::random_draw(7, 2, false).params;
  auto c2 = dexp::dwl_ddelta_at_zero(p2, Bias{0.0}, TaxRegime::BothSides);
  const double a2 = dexp::equilibrium(p2, Bias{0.0}).alpha;
  const double s2 = a2 * p2.beta * p2.tau_s * (a2 * (p2.beta + p2.gamma) - 1.0) + p2.tau0;
  EXPECT_GT(s2, 1.0);
  EXPECT_LT(c2.total, -0.1);
}

TEST(SmallTax, LimitSignsOnPresets) {
  for (auto p : {dexp::presets::case1(), dexp::presets::case2(), dexp::presets::balanced()}) {
    for (auto reg : {TaxRegime::BothSides, TaxRegime::InformedOnly}) {
      EXPECT_LT(dexp::dwl_ddelta_at_zero(p, Bias{20.0}, reg).total, 0.0);
      EXPECT_GT(dexp::dwl_ddelta_at_zero(p, Bias{-0.95}, reg).total, 0.0);
    }
  }
}

}  // namespace
