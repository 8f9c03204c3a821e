#pragma once

#include "dexp/model.hpp"

namespace dexp {

struct LoadingSolution {
  double a = 0.0;
  double residual = 0.0;  // g*a - tau_eps/(tau_eps + tau(a))
  int iterations = 0;
};

/// Base loading a: the root of g*a = tau_eps/(tau_eps + tau0 + a^2 (theta+1)^2 b^2 tau_s)
/// with g, b the effective cost and supply slope under the tax.
LoadingSolution solve_loading(const MarketParams& params, const Bias& bias, const TaxSpec& tax = {},
                              const SolverSettings& settings = {});

/// Linear equilibrium. Price p = A + B V - C S; trader demand
/// D_i = alpha s_i + eta E(V|p) - eta_p p with E(V|p) = kappa (p - A) / B.
struct Equilibrium {
  MarketParams params;
  Bias bias;
  TaxSpec tax;
  double g = 0.0;  // effective cost curvature
  double b = 0.0;  // effective supply slope

  double a = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double eta_p = 0.0;
  double tau = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double kappa = 0.0;
  double residual = 0.0;
};

Equilibrium equilibrium(const MarketParams& params, const Bias& bias, const TaxSpec& tax = {},
                        const SolverSettings& settings = {});

/// E(V|p) under the equilibrium pricing rule.
double public_mean(const Equilibrium& eq, double p);

/// Coefficients of demand written as alpha*s + slope*p + intercept.
struct DemandCoefficients {
  double alpha;
  double slope;
  double intercept;
};

DemandCoefficients demand_coefficients(const Equilibrium& eq);
double demand(const Equilibrium& eq, double s_i, double p);

struct PriceStats {
  double var_p;
  double price_precision;
};

PriceStats price_stats(const Equilibrium& eq);

/// Implicit-function derivative of alpha in theta at fixed (g, b).
double dalpha_dtheta(const Equilibrium& eq);

/// Derivative of alpha in delta for the equilibrium's own regime.
double dalpha_ddelta(const Equilibrium& eq);

}  // namespace dexp
