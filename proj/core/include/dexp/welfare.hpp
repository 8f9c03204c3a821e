#pragma once

#include "dexp/equilibrium.hpp"
#include "dexp/model.hpp"

namespace dexp {

/// Expected surplus shortfall against the first best, split into the part a
/// Bayesian market with the same alpha would incur and the overshoot part.
struct WelfareBreakdown {
  double wl_total = 0.0;
  double wl_bayes = 0.0;
  double wl_diag = 0.0;
};

/// Welfare loss of arbitrary linear strategies (alpha, eta) with eta_p = 1/gamma
/// and no tax.
double wl_general(const MarketParams& params, double alpha, double eta);

WelfareBreakdown welfare_loss(const MarketParams& params, const Bias& bias,
                              const SolverSettings& settings = {});
WelfareBreakdown welfare_loss(const Equilibrium& eq);

/// Welfare loss under a quadratic tax with lump-sum rebate. Collapses to
/// welfare_loss(...).wl_total at delta = 0 in either regime.
double welfare_loss_tax(const MarketParams& params, const Bias& bias, const TaxSpec& tax,
                        const SolverSettings& settings = {});
double welfare_loss_tax(const Equilibrium& eq);

/// dWL/dtheta without tax. The _fd variant is a central difference of
/// welfare_loss with step 1e-5*max(1,|theta|), shrunk near theta = -1.
double dwl_dtheta(const MarketParams& params, double theta, const SolverSettings& settings = {});
double dwl_dtheta_closed(const MarketParams& params, double theta, const SolverSettings& settings = {});

struct SmallTaxDerivative {
  double partial_alpha = 0.0;   // dWL/dalpha at fixed delta = 0
  double partial_delta = 0.0;   // dWL/ddelta at fixed alpha
  double dalpha_ddelta = 0.0;
  double total = 0.0;
};

/// Closed-form derivative of the taxed welfare loss in delta at delta = 0.
SmallTaxDerivative dwl_ddelta_at_zero(const MarketParams& params, const Bias& bias, TaxRegime regime,
                                      const SolverSettings& settings = {});

/// Central difference of welfare_loss_tax in delta at 0.
double dwl_ddelta_at_zero_fd(const MarketParams& params, const Bias& bias, TaxRegime regime,
                             const SolverSettings& settings = {});

}  // namespace dexp
