#pragma once

#include <string_view>

#include "dexp/model.hpp"

namespace dexp {

/// Full-information allocation (V + mu_s + S) / (beta + gamma).
double first_best_demand(const MarketParams& params, double V, double S);

/// Learning-externality correction Delta(a) in the team fixed point.
double team_delta(const MarketParams& params, double a);

/// Team fixed point in cleared form, a*den(a) - tau_eps, where
/// den(a) = gamma (tau(a) + tau_eps) + beta tau(a) - Delta(a).
double team_residual(const MarketParams& params, double a);
double team_denominator(const MarketParams& params, double a);

/// Second-best loading a^T. Scans (0, 10/gamma] and refuses to pick between
/// several roots.
double team_loading(const MarketParams& params, const SolverSettings& settings = {});

enum class Balance { LearningDominates, PecuniaryDominates, Balanced };

std::string_view to_string(Balance balance);

struct BenchmarkReport {
  double a_star = 0.0;
  double a_team = 0.0;
  double delta_fn_at_team = 0.0;
  Balance balance = Balance::Balanced;
};

BenchmarkReport externality_balance(const MarketParams& params, const SolverSettings& settings = {});

/// Bisects beta on [beta_lo, beta_hi] (other fields taken from params) until
/// a* and a^T agree. The two endpoints must classify differently.
MarketParams find_balanced_beta(MarketParams params, double beta_lo, double beta_hi,
                                const SolverSettings& settings = {});

}  // namespace dexp
