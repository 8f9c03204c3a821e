#include "dexp/welfare.hpp"

#include <algorithm>
#include <cmath>

namespace dexp {

double wl_general(const MarketParams& p, double alpha, double eta) {
  const double k = p.beta + p.gamma;
  const double tau = p.tau0 + alpha * alpha * p.beta * p.beta * p.tau_s;
  const double priv = 1.0 - p.gamma * alpha;
  const double pub = 1.0 - p.gamma * alpha - p.gamma * eta;
  return 0.5 * priv * priv / (k * tau) + 0.5 * pub * pub / k * (1.0 / p.tau0 - 1.0 / tau) +
         p.gamma * alpha * alpha / (2.0 * p.tau_eps);
}

WelfareBreakdown welfare_loss(const Equilibrium& eq) {
  if (eq.tax.delta != 0.0) {
    throw Error(ErrorCode::InvalidInput, "welfare_loss decomposition requires delta = 0");
  }
  const auto& p = eq.params;
  const double k = p.beta + p.gamma;
  const double priv = 1.0 - p.gamma * eq.alpha;
  const double theta = eq.bias.theta;
  // tau >= tau0 by construction; clamp rounding so wl_diag stays >= 0
  const double resid_var = std::max(0.0, 1.0 / p.tau0 - 1.0 / eq.tau);

  WelfareBreakdown w;
  w.wl_bayes = 0.5 * priv * priv / (k * eq.tau) + p.gamma * eq.alpha * eq.alpha / (2.0 * p.tau_eps);
  w.wl_diag = theta * theta / (2.0 * k) * resid_var;
  w.wl_total = wl_general(p, eq.alpha, eq.eta);
  return w;
}

WelfareBreakdown welfare_loss(const MarketParams& params, const Bias& bias, const SolverSettings& settings) {
  return welfare_loss(equilibrium(params, bias, TaxSpec{}, settings));
}

double welfare_loss_tax(const Equilibrium& eq) {
  const auto& p = eq.params;
  const double d = eq.tax.delta;
  const double th = eq.bias.theta;
  const double k = p.beta + p.gamma;
  const double al = eq.alpha;
  const double tau = eq.tau;
  const double own = 1.0 - (p.gamma + d) * al;
  const double noise = p.mu_s * p.mu_s + 1.0 / p.tau_s + 1.0 / p.tau0;
  const double resid_var = 1.0 / p.tau0 - 1.0 / tau;

  // BothSides taxes both legs of every trade, so the wedge enters twice.
  const double legs = eq.tax.regime == TaxRegime::BothSides ? 2.0 : 1.0;
  const double q = k + legs * d;
  const double b = eq.b;

  // at delta = 0 the cross term is multiplied by zero; skip it so b = 0 is harmless
  double cross = 0.0;
  if (d != 0.0) cross = 2.0 * legs * d * th * (1.0 - p.tau0 / (b * al * p.tau_s));

  const double value = own / (q * q * tau) * (own * k + 2.0 * legs * d * (1.0 + b * al)) +
                       legs * legs * d * d * noise / (k * q * q) +
                       (th * th * k - cross) / (q * q) * resid_var + p.gamma * al * al / p.tau_eps;
  return 0.5 * value;
}

double welfare_loss_tax(const MarketParams& params, const Bias& bias, const TaxSpec& tax,
                        const SolverSettings& settings) {
  return welfare_loss_tax(equilibrium(params, bias, tax, settings));
}

double dwl_dtheta(const MarketParams& params, double theta, const SolverSettings& settings) {
  double h = 1e-5 * std::max(1.0, std::abs(theta));
  h = std::min(h, 0.25 * (theta + 1.0));
  auto wl = [&](double t) { return welfare_loss(params, Bias{t}, settings).wl_total; };
  return (wl(theta + h) - wl(theta - h)) / (2.0 * h);
}

double dwl_dtheta_closed(const MarketParams& params, double theta, const SolverSettings& settings) {
  const auto eq = equilibrium(params, Bias{theta}, TaxSpec{}, settings);
  const auto& p = params;
  const double k = p.beta + p.gamma;
  const double al = eq.alpha;
  const double tau = eq.tau;
  const double priv = 1.0 - p.gamma * al;
  const double dtau_dalpha = 2.0 * al * p.beta * p.beta * p.tau_s;

  const double dbayes = -p.gamma * priv / (k * tau) - 0.5 * priv * priv * dtau_dalpha / (k * tau * tau) +
                        p.gamma * al / p.tau_eps;
  const double ddiag_dalpha = theta * theta / (2.0 * k) * dtau_dalpha / (tau * tau);
  const double ddiag_dtheta = theta / k * (1.0 / p.tau0 - 1.0 / tau);
  return (dbayes + ddiag_dalpha) * dalpha_dtheta(eq) + ddiag_dtheta;
}

SmallTaxDerivative dwl_ddelta_at_zero(const MarketParams& params, const Bias& bias, TaxRegime regime,
                                      const SolverSettings& settings) {
  const auto eq = equilibrium(params, bias, TaxSpec{0.0, regime}, settings);
  const double ga = params.gamma;
  const double be = params.beta;
  const double t0 = params.tau0;
  const double ts = params.tau_s;
  const double th = bias.theta;
  const double al = eq.alpha;
  const double k = be + ga;
  const double tau = eq.tau;

  SmallTaxDerivative out;
  out.partial_alpha = -(1.0 - al * ga) * (ga * t0 + al * be * be * ts) / (k * tau * tau) +
                      th * th * al * be * be * ts / (k * tau * tau) + al * ga / params.tau_eps;

  if (regime == TaxRegime::BothSides) {
    const double num = al * be * ts * th * th * (2.0 * al * al * be * be * be * ts + (be - ga) * t0) +
                       2.0 * be * th * (al * be * ts - t0) * (al * al * be * be * ts + t0) +
                       t0 * k * (al * ga - 1.0) * (al * be * ts * (al * k - 1.0) + t0);
    out.partial_delta = -al * num / (t0 * k * k * tau * tau);
  } else {
    out.partial_delta = -al * be * th * (al * be * (th + 1.0) * ts - t0) / (t0 * k * k * tau);
  }
  out.dalpha_ddelta = dalpha_ddelta(eq);
  out.total = out.partial_delta + out.partial_alpha * out.dalpha_ddelta;
  return out;
}

double dwl_ddelta_at_zero_fd(const MarketParams& params, const Bias& bias, TaxRegime regime,
                             const SolverSettings& settings) {
  const double h = 1e-5 * std::min({1.0, params.beta, params.gamma});
  auto wl = [&](double d) { return welfare_loss_tax(params, bias, TaxSpec{d, regime}, settings); };
  return (wl(h) - wl(-h)) / (2.0 * h);
}

}  // namespace dexp
