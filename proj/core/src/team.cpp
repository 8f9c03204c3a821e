#include "dexp/team.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dexp/equilibrium.hpp"
#include "dexp/numeric.hpp"

namespace dexp {

double first_best_demand(const MarketParams& params, double V, double S) {
  return (V + params.mu_s + S) / (params.beta + params.gamma);
}

namespace {

double team_tau(const MarketParams& p, double a) {
  return p.tau0 + a * a * p.beta * p.beta * p.tau_s;
}

}  // namespace

double team_delta(const MarketParams& p, double a) {
  const double one_minus = 1.0 - p.gamma * a;
  return one_minus * one_minus * p.beta * p.beta * p.tau_s * p.tau_eps / (p.gamma * team_tau(p, a));
}

double team_denominator(const MarketParams& p, double a) {
  const double tau = team_tau(p, a);
  return p.gamma * (tau + p.tau_eps) + p.beta * tau - team_delta(p, a);
}

double team_residual(const MarketParams& p, double a) {
  // Multiplied through by the denominator: the divided form has a pole where
  // den(a) = 0 that a sign scan would report as a root.
  return a * team_denominator(p, a) - p.tau_eps;
}

double team_loading(const MarketParams& params, const SolverSettings& settings) {
  auto f = [&](double a) { return team_residual(params, a); };
  const double a_max = 10.0 / params.gamma;
  auto brackets = numeric::sign_changes(f, 0.0, a_max, settings.scan_points);
  if (brackets.empty()) {
    throw Error(ErrorCode::NoRoot, "team fixed point has no sign change on (0, 10/gamma]");
  }
  if (brackets.size() > 1) {
    std::ostringstream msg;
    msg << "team fixed point has " << brackets.size() << " sign changes on (0, 10/gamma]";
    throw Error(ErrorCode::MultipleRoots, msg.str());
  }
  auto root = numeric::toms748(f, brackets[0].lo, brackets[0].hi, 0.0, settings.max_iter);
  const double a = root.x;

  const double den = team_denominator(params, a);
  const double tau = team_tau(params, a);
  const double scale = params.gamma * (tau + params.tau_eps) + params.beta * tau;
  if (!(den > 1e-10 * scale)) {
    throw Error(ErrorCode::DegenerateDenominator, "team fixed point denominator vanishes at the root");
  }
  const double divided = a - params.tau_eps / den;
  if (!(std::abs(divided) < settings.abs_tol * std::max(1.0, a))) {
    throw Error(ErrorCode::NoConvergence, "team fixed point residual above tolerance");
  }
  return a;
}

std::string_view to_string(Balance balance) {
  switch (balance) {
    case Balance::LearningDominates: return "LearningDominates";
    case Balance::PecuniaryDominates: return "PecuniaryDominates";
    case Balance::Balanced: return "Balanced";
  }
  return "Unknown";
}

BenchmarkReport externality_balance(const MarketParams& params, const SolverSettings& settings) {
  BenchmarkReport rep;
  rep.a_star = solve_loading(params, Bias{0.0}, TaxSpec{}, settings).a;
  rep.a_team = team_loading(params, settings);
  rep.delta_fn_at_team = team_delta(params, rep.a_team);
  const double tol = 1e-9 * std::max(1.0, rep.a_team);
  if (std::abs(rep.a_star - rep.a_team) < tol) {
    rep.balance = Balance::Balanced;
  } else if (rep.a_star < rep.a_team) {
    rep.balance = Balance::LearningDominates;
  } else {
    rep.balance = Balance::PecuniaryDominates;
  }
  return rep;
}

MarketParams find_balanced_beta(MarketParams params, double beta_lo, double beta_hi,
                                const SolverSettings& settings) {
  auto gap = [&](double beta) {
    MarketParams p = params;
    p.beta = beta;
    return solve_loading(p, Bias{0.0}, TaxSpec{}, settings).a - team_loading(p, settings);
  };
  auto root = numeric::toms748(gap, beta_lo, beta_hi, 1e-15, settings.max_iter);
  params.beta = root.x;
  return params;
}

}  // namespace dexp
