#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dexp/model.hpp"
#include "dexp/montecarlo.hpp"

namespace dexp {

/// One admissible economy drawn for property and oracle checks: gamma, beta
/// and the precisions log-uniform on [0.3, 5], mu_s uniform on [-1, 1],
/// theta uniform on [-0.9, 5], delta in {0, 0.2, -0.2} with a random regime.
struct RandomDraw {
  MarketParams params;
  Bias bias;
  TaxSpec tax;
};

RandomDraw random_draw(std::uint64_t seed, std::uint64_t index, bool with_tax = true);

/// Closed-form targets compared against the simulation.
struct OracleTargets {
  double wl = 0.0;
  double var_p = 0.0;
  double kappa = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

OracleTargets oracle_targets(const RandomDraw& draw, const SolverSettings& settings = {});

struct OracleCheck {
  std::string name;
  double analytic = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct OracleDrawResult {
  RandomDraw draw;
  std::uint64_t sim_seed = 0;
  std::vector<OracleCheck> checks;
  double budget_gap = 0.0;
  bool budget_ok = true;
  bool rerun = false;

  int failures() const;
};

struct OracleOptions {
  std::uint64_t draws = 20;
  std::uint64_t seed = 42;
  SimConfig sim{};
  double z_max = 3.0;
  // test hook: perturb the closed-form targets before comparison
  std::function<void(OracleTargets&)> mutate;

  static OracleOptions quick();
};

struct OracleReport {
  std::vector<OracleDrawResult> draws;
  int failures = 0;          // failing checks in the first pass
  bool rerun_used = false;
  bool pass = false;
};

OracleDrawResult run_oracle_draw(const RandomDraw& draw, std::uint64_t sim_seed, const OracleOptions& options);

/// At most one marginal failure is tolerated; that draw is rerun on a fresh
/// seed and must then pass every check.
OracleReport run_oracle_suite(const OracleOptions& options);

}  // namespace dexp
