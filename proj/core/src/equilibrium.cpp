#include "dexp/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dexp {

namespace {

constexpr double kThetaFloor = -1.0 + 1e-9;

struct Residual {
  double g, b2ts, tau0, tau_eps, th1sq;

  double tau(double a) const { return tau0 + a * a * th1sq * b2ts; }
  double value(double a) const { return g * a - tau_eps / (tau_eps + tau(a)); }
  double slope(double a) const {
    double d = tau_eps + tau(a);
    return g + tau_eps * 2.0 * a * th1sq * b2ts / (d * d);
  }
};

}  // namespace

LoadingSolution solve_loading(const MarketParams& params, const Bias& bias, const TaxSpec& tax,
                              const SolverSettings& settings) {
  const double g = effective_cost(params, tax);
  const double b = effective_supply_slope(params, tax);
  if (!(g > 0.0)) throw Error(ErrorCode::InvalidInput, "effective cost gamma+delta must be positive");
  const double th1 = 1.0 + bias.theta;
  const Residual r{g, b * b * params.tau_s, params.tau0, params.tau_eps, th1 * th1};

  // r(0) < 0 and r(hi) >= 0 because g*a <= tau_eps/(tau_eps+tau0) at the root.
  double lo = 0.0;
  double hi = std::min(1.0 / g, params.tau_eps / (g * params.tau0));
  double x = 0.5 * (lo + hi);

  LoadingSolution out;
  for (int it = 1; it <= settings.max_iter; ++it) {
    out.iterations = it;
    double fx = r.value(x);
    if (fx == 0.0) break;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - fx / r.slope(x);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    double step = std::abs(next - x);
    x = next;
    if (std::abs(fx) <= settings.abs_tol && step <= settings.rel_tol * x) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  out.a = x;
  out.residual = r.value(x);
  if (!(std::abs(out.residual) < settings.abs_tol)) {
    throw Error(ErrorCode::NoConvergence, "loading fixed point did not reach abs_tol within max_iter");
  }
  return out;
}

Equilibrium equilibrium(const MarketParams& params, const Bias& bias, const TaxSpec& tax,
                        const SolverSettings& settings) {
  if (!(bias.theta > kThetaFloor)) {
    throw Error(ErrorCode::DegeneratePricing, "theta too close to -1: price carries no value loading");
  }
  auto sol = solve_loading(params, bias, tax, settings);

  Equilibrium eq;
  eq.params = params;
  eq.bias = bias;
  eq.tax = tax;
  eq.g = effective_cost(params, tax);
  eq.b = effective_supply_slope(params, tax);
  eq.a = sol.a;
  eq.residual = sol.residual;

  const double th1 = 1.0 + bias.theta;
  const double gb = eq.g + eq.b;
  eq.alpha = eq.a * th1;
  eq.eta_p = 1.0 / eq.g;
  eq.eta = th1 / eq.g - eq.alpha;
  eq.tau = params.tau0 + eq.alpha * eq.alpha * eq.b * eq.b * params.tau_s;
  eq.A = -eq.g * params.mu_s / gb;
  eq.kappa = (eq.tau - params.tau0) / eq.tau;
  // clearing with E(V|p) = kappa (p - A) / B feeds the public loading back into B:
  // B = g b (alpha + eta kappa) / (g + b) = b (theta+1)/(g+b) * (tau_eps + tau - tau0)/(tau_eps + tau)
  eq.B = eq.b * th1 / gb * (params.tau_eps + eq.tau - params.tau0) / (params.tau_eps + eq.tau);
  eq.C = eq.B / (eq.alpha * eq.b);
  return eq;
}

double public_mean(const Equilibrium& eq, double p) {
  if (eq.B == 0.0) throw Error(ErrorCode::DegeneratePricing, "B = 0, price does not load on value");
  return eq.kappa * (p - eq.A) / eq.B;
}

DemandCoefficients demand_coefficients(const Equilibrium& eq) {
  if (eq.B == 0.0) throw Error(ErrorCode::DegeneratePricing, "B = 0, price does not load on value");
  const double k = eq.eta * eq.kappa / eq.B;
  return {eq.alpha, k - eq.eta_p, -k * eq.A};
}

double demand(const Equilibrium& eq, double s_i, double p) {
  auto c = demand_coefficients(eq);
  return c.alpha * s_i + c.slope * p + c.intercept;
}

PriceStats price_stats(const Equilibrium& eq) {
  return {eq.B * eq.B / eq.params.tau0 + eq.C * eq.C / eq.params.tau_s,
          eq.alpha * eq.alpha * eq.b * eq.b * eq.params.tau_s};
}

double dalpha_dtheta(const Equilibrium& eq) {
  // G(a, theta) = g a (tau_eps + tau) - tau_eps, tau - tau0 = a^2 (theta+1)^2 b^2 tau_s
  const double th1 = 1.0 + eq.bias.theta;
  const double pub = eq.tau - eq.params.tau0;
  const double dG_dtheta = 2.0 * eq.g * eq.a * pub / th1;
  const double dG_da = eq.g * (eq.params.tau_eps + eq.tau) + 2.0 * eq.g * pub;
  const double da = -dG_dtheta / dG_da;
  return th1 * da + eq.a;
}

double dalpha_ddelta(const Equilibrium& eq) {
  const auto& p = eq.params;
  const double al2 = eq.alpha * eq.alpha;
  const double g = eq.g;
  const double b = eq.b;
  if (eq.tax.regime == TaxRegime::BothSides) {
    // b = beta + delta here, so b + 2g = beta + 2(gamma+delta) + delta
    return -eq.alpha * (al2 * b * p.tau_s * (b + 2.0 * g) + p.tau0 + p.tau_eps) /
           (g * (3.0 * al2 * b * b * p.tau_s + p.tau0 + p.tau_eps));
  }
  const double pub = al2 * b * b * p.tau_s;
  return -eq.alpha / (g * (2.0 * pub / (pub + p.tau0 + p.tau_eps) + 1.0));
}

}  // namespace dexp
