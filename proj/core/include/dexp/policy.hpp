#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dexp/equilibrium.hpp"
#include "dexp/model.hpp"
#include "dexp/welfare.hpp"

namespace dexp {

/// theta' : the bias at which alpha(theta') equals the team loading.
double threshold_theta_private(const MarketParams& params, const SolverSettings& settings = {});

/// theta'' : the bias at which eta(theta'') equals 1/gamma - a^T.
double threshold_theta_public(const MarketParams& params, const SolverSettings& settings = {});

/// delta* : the tax at which alpha(delta*) equals the team loading. Throws
/// Error(Infeasible) when the required rate lies below the admissible range.
double threshold_delta_star(const MarketParams& params, const Bias& bias, TaxRegime regime,
                            const SolverSettings& settings = {});

struct ThetaOptimum {
  double theta = 0.0;        // global minimizer of WL(theta) on the search range
  double wl = 0.0;
  double theta_lower = 0.0;  // first sign change of dWL/dtheta (theta_*)
  double theta_upper = 0.0;  // last sign change of dWL/dtheta
  bool at_boundary = false;
  int local_minima = 0;
};

ThetaOptimum optimal_theta(const MarketParams& params, const SolverSettings& settings = {},
                           double theta_lo = -0.999, double theta_hi = 10.0);

struct TaxOptimum {
  double delta = 0.0;
  double wl = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool at_lower = false;
  bool at_upper = false;
  int local_minima = 0;
};

/// Feasible search range for the tax: (max(-gamma,-beta)*0.999, 10 gamma] when
/// suppliers are taxed, (-gamma*0.999, 10 gamma] otherwise.
std::pair<double, double> tax_search_range(const MarketParams& params, TaxRegime regime);

TaxOptimum optimal_tax(const MarketParams& params, const Bias& bias, TaxRegime regime,
                       const SolverSettings& settings = {});

struct PolicyReport {
  double theta_prime = 0.0;
  double theta_dprime = 0.0;
  double delta_star = 0.0;
  bool delta_star_feasible = true;
  ThetaOptimum theta_opt;
  TaxOptimum tax_opt;
};

PolicyReport policy_report(const MarketParams& params, const Bias& bias, TaxRegime regime,
                           const SolverSettings& settings = {});

enum class SweepAxis { Theta, Delta };

struct SweepRow {
  double axis_value = 0.0;
  double a = 0.0, alpha = 0.0, eta = 0.0, eta_p = 0.0, tau = 0.0;
  double A = 0.0, B = 0.0, C = 0.0, var_p = 0.0;
  double wl_total = 0.0, wl_bayes = 0.0, wl_diag = 0.0, dwl_daxis = 0.0;
  std::string flag;  // empty when the row solved cleanly, else the error code
};

struct SweepTable {
  SweepAxis axis = SweepAxis::Theta;
  std::vector<SweepRow> rows;

  static const std::vector<std::string>& columns();
  std::string to_csv() const;
};

/// One row per grid point. Along the theta axis the tax (if any) is held at
/// `tax`; along the delta axis theta is held at `bias`. Errors are recorded in
/// the row's flag and the sweep continues.
SweepTable sweep(const MarketParams& params, SweepAxis axis, const std::vector<double>& grid,
                 const Bias& bias, const TaxSpec& tax, const SolverSettings& settings = {});

}  // namespace dexp
