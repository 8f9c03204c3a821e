#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dexp/equilibrium.hpp"
#include "dexp/model.hpp"

namespace dexp {

enum class Sampling {
  PerAgent,               // draw every eps_i
  SufficientStatistics,   // draw eps_bar and sum (eps_i - eps_bar)^2 exactly
};

struct SimConfig {
  std::uint64_t n_agents = 10000;
  std::uint64_t n_reps = 100000;
  std::uint64_t seed = 42;
  bool antithetic = false;
  Sampling sampling = Sampling::SufficientStatistics;
  unsigned threads = 1;
};

ValidationReport validate(const SimConfig& config);

struct SimRecord {
  double V = 0.0;
  double S = 0.0;
  double s_bar = 0.0;
  double p = 0.0;
  double D_bar = 0.0;
  double D_o = 0.0;
  double dispersion = 0.0;   // sum (D_i - D_bar)^2 / (n - 1)
  double mean_sq = 0.0;      // sum D_i^2 / n
  double welfare = 0.0;      // realized surplus under the original costs
  double welfare_fb = 0.0;   // first-best surplus
  double loss = 0.0;         // quantity-form loss with the (n-1) dispersion
  double tax_paid = 0.0;
  double rebate = 0.0;
};

struct Estimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

struct SimSummary {
  Estimate loss;
  Estimate var_p;
  double max_budget_gap = 0.0;
};

struct SimResult {
  MarketParams params;
  Bias bias;
  TaxSpec tax;
  SimConfig config;
  std::vector<SimRecord> records;
  SimSummary summary;
};

/// Finite-agent market: draws (V, S, eps), clears p = -mu_s - S + b*Dbar with
/// the equilibrium demand schedules, and records surplus terms per replication.
/// Records are identical for any thread count.
SimResult simulate_market(const Equilibrium& eq, const SimConfig& config);

Estimate mc_welfare_loss(const SimResult& result);
Estimate mc_price_variance(const SimResult& result);

/// Slope of V on (p - A)/B through the origin.
Estimate mc_posterior_check(const SimResult& result, const Equilibrium& eq);

struct PriceRegression {
  Estimate A;
  Estimate B;
  Estimate C;  // minus the coefficient on S
};

/// OLS of p on (1, V, S).
PriceRegression mc_price_regression(const SimResult& result);

/// Largest |tax_paid - rebate| / max(1, |rebate|) over replications.
double budget_gap(const SimResult& result);

/// Budget counts as balanced when the gap is pure rounding.
inline constexpr double kBudgetTol = 1e-12;

std::string records_csv(const SimResult& result);

}  // namespace dexp
