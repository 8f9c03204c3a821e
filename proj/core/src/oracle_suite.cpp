#include "dexp/oracle_suite.hpp"

#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <limits>

#include "dexp/equilibrium.hpp"
#include "dexp/rng.hpp"
#include "dexp/welfare.hpp"

namespace dexp {

RandomDraw random_draw(std::uint64_t seed, std::uint64_t index, bool with_tax) {
  Xoshiro256ss gen(seed ^ 0x6a09e667f3bcc909ULL, index);
  boost::random::uniform_01<double> u;
  auto log_uniform = [&](double lo, double hi) { return lo * std::exp(u(gen) * std::log(hi / lo)); };

  RandomDraw d;
  d.params.gamma = log_uniform(0.3, 5.0);
  d.params.beta = log_uniform(0.3, 5.0);
  d.params.tau0 = log_uniform(0.3, 5.0);
  d.params.tau_eps = log_uniform(0.3, 5.0);
  d.params.tau_s = log_uniform(0.3, 5.0);
  d.params.mu_s = -1.0 + 2.0 * u(gen);
  d.bias.theta = -0.9 + 5.9 * u(gen);
  const double pick = u(gen);
  const double reg = u(gen);
  if (with_tax) {
    d.tax.delta = pick < 1.0 / 3.0 ? 0.0 : (pick < 2.0 / 3.0 ? 0.2 : -0.2);
    d.tax.regime = reg < 0.5 ? TaxRegime::BothSides : TaxRegime::InformedOnly;
  }
  return d;
}

OracleTargets oracle_targets(const RandomDraw& draw, const SolverSettings& settings) {
  const auto eq = equilibrium(draw.params, draw.bias, draw.tax, settings);
  OracleTargets t;
  t.wl = draw.tax.delta == 0.0 ? welfare_loss(eq).wl_total : welfare_loss_tax(eq);
  t.var_p = price_stats(eq).var_p;
  t.kappa = eq.kappa;
  t.A = eq.A;
  t.B = eq.B;
  t.C = eq.C;
  return t;
}

int OracleDrawResult::failures() const {
  int n = budget_ok ? 0 : 1;
  for (const auto& c : checks) n += c.pass ? 0 : 1;
  return n;
}

OracleOptions OracleOptions::quick() {
  OracleOptions o;
  o.sim.n_reps = 10000;
  return o;
}

OracleDrawResult run_oracle_draw(const RandomDraw& draw, std::uint64_t sim_seed, const OracleOptions& options) {
  const auto eq = equilibrium(draw.params, draw.bias, draw.tax);
  auto targets = oracle_targets(draw);
  if (options.mutate) options.mutate(targets);

  SimConfig cfg = options.sim;
  cfg.seed = sim_seed;
  const auto sim = simulate_market(eq, cfg);
  const auto reg = mc_price_regression(sim);

  OracleDrawResult out;
  out.draw = draw;
  out.sim_seed = sim_seed;
  auto add = [&](const char* name, double analytic, const Estimate& est) {
    OracleCheck c;
    c.name = name;
    c.analytic = analytic;
    c.estimate = est.estimate;
    c.standard_error = est.standard_error;
    const double diff = est.estimate - analytic;
    c.z = est.standard_error > 0.0 ? diff / est.standard_error : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    c.pass = std::abs(c.z) <= options.z_max;
    out.checks.push_back(c);
  };
  add("welfare_loss", targets.wl, mc_welfare_loss(sim));
  add("var_p", targets.var_p, mc_price_variance(sim));
  add("kappa", targets.kappa, mc_posterior_check(sim, eq));
  add("A", targets.A, reg.A);
  add("B", targets.B, reg.B);
  add("C", targets.C, reg.C);

  out.budget_gap = budget_gap(sim);
  out.budget_ok = out.budget_gap <= kBudgetTol;
  return out;
}

OracleReport run_oracle_suite(const OracleOptions& options) {
  OracleReport rep;
  std::vector<std::size_t> failing;
  for (std::uint64_t i = 0; i < options.draws; ++i) {
    const auto draw = random_draw(options.seed, i);
    rep.draws.push_back(run_oracle_draw(draw, options.seed + 7919 * i, options));
    const int f = rep.draws.back().failures();
    rep.failures += f;
    if (f) failing.push_back(rep.draws.size() - 1);
  }

  if (rep.failures == 0) {
    rep.pass = true;
  } else if (rep.failures == 1 && rep.draws[failing[0]].budget_ok) {
    auto& slot = rep.draws[failing[0]];
    const std::uint64_t fresh = splitmix64(slot.sim_seed += 0x5bd1e995ULL);
    slot = run_oracle_draw(slot.draw, fresh, options);
    slot.rerun = true;
    rep.rerun_used = true;
    rep.pass = slot.failures() == 0;
  }
  return rep;
}

}  // namespace dexp
