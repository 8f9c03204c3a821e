#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dexp/error.hpp"

namespace dexp {

/// The exogenous economy. Informed traders pay quadratic costs
/// gamma/2 * D^2, liquidity suppliers quote p = -mu_s - S + beta * Dbar with
/// S ~ N(0, 1/tau_s), V ~ N(0, 1/tau0) and private signals s_i = V + eps_i
/// with eps_i ~ N(0, 1/tau_eps).
struct MarketParams {
  double gamma = 1.0;
  double beta = 1.0;
  double tau0 = 1.0;
  double tau_eps = 1.0;
  double tau_s = 1.0;
  double mu_s = 0.0;

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/// Diagnosticity of beliefs: posterior means are stretched away from the
/// prior mean by a factor (1 + theta). theta = 0 is Bayesian.
struct Bias {
  double theta = 0.0;

  friend bool operator==(const Bias&, const Bias&) = default;
};

enum class TaxRegime {
  BothSides,     ///< informed traders and liquidity suppliers pay delta/2 * q^2
  InformedOnly,  ///< only informed traders pay
};

std::string_view to_string(TaxRegime regime);
TaxRegime parse_regime(std::string_view text);

/// Quadratic transaction tax (delta < 0 is a subsidy), rebated lump sum.
struct TaxSpec {
  double delta = 0.0;
  TaxRegime regime = TaxRegime::BothSides;

  friend bool operator==(const TaxSpec&, const TaxSpec&) = default;
};

struct SolverSettings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;
  std::size_t scan_points = 2048;

  friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string message() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate(const MarketParams& params, const Bias& bias, const TaxSpec& tax);
ValidationReport validate(const SolverSettings& settings);

/// Throws Error(InvalidInput) carrying the report message when validation fails.
void require_valid(const MarketParams& params, const Bias& bias, const TaxSpec& tax);

/// Cost curvature seen by informed traders: gamma + delta.
inline double effective_cost(const MarketParams& params, const TaxSpec& tax) {
  return params.gamma + tax.delta;
}

/// Supply slope seen in market clearing: beta + delta when suppliers are taxed.
inline double effective_supply_slope(const MarketParams& params, const TaxSpec& tax) {
  return tax.regime == TaxRegime::BothSides ? params.beta + tax.delta : params.beta;
}

}  // namespace dexp
