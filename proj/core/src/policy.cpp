#include "dexp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dexp/csv.hpp"
#include "dexp/numeric.hpp"
#include "dexp/team.hpp"

namespace dexp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kThetaLow = -1.0 + 1e-8;

// Grows hi geometrically until f(hi) has the wanted sign.
double expand_upper(const numeric::Fn& f, double hi, bool want_positive) {
  for (int i = 0; i < 60; ++i) {
    double v = f(hi);
    if ((v > 0.0) == want_positive && v != 0.0) return hi;
    hi *= 2.0;
  }
  throw Error(ErrorCode::NoRoot, "could not bracket the threshold");
}

double solve_threshold(const numeric::Fn& f, double lo, double hi, const SolverSettings& settings) {
  auto root = numeric::toms748(f, lo, hi, 0.0, settings.max_iter);
  return root.x;
}

}  // namespace

double threshold_theta_private(const MarketParams& params, const SolverSettings& settings) {
  const double a_team = team_loading(params, settings);
  auto f = [&](double theta) { return equilibrium(params, Bias{theta}, TaxSpec{}, settings).alpha - a_team; };
  const double hi = expand_upper(f, 1.0, true);
  return solve_threshold(f, kThetaLow, hi, settings);
}

double threshold_theta_public(const MarketParams& params, const SolverSettings& settings) {
  const double a_team = team_loading(params, settings);
  const double target = 1.0 / params.gamma - a_team;
  if (!(target > 0.0)) throw Error(ErrorCode::NoRoot, "team loading leaves no room for a public loading");
  auto f = [&](double theta) { return equilibrium(params, Bias{theta}, TaxSpec{}, settings).eta - target; };
  const double hi = expand_upper(f, 1.0, true);
  return solve_threshold(f, kThetaLow, hi, settings);
}

double threshold_delta_star(const MarketParams& params, const Bias& bias, TaxRegime regime,
                            const SolverSettings& settings) {
  const double a_team = team_loading(params, settings);
  auto f = [&](double delta) {
    return equilibrium(params, bias, TaxSpec{delta, regime}, settings).alpha - a_team;
  };
  const double bound = regime == TaxRegime::BothSides ? std::max(-params.gamma, -params.beta) : -params.gamma;
  const double lo = bound * (1.0 - 1e-9);
  if (f(lo) < 0.0) {
    throw Error(ErrorCode::Infeasible, "matching the team loading needs a subsidy beyond the feasible range");
  }
  const double hi = expand_upper(f, params.gamma, false);
  return solve_threshold(f, lo, hi, settings);
}

ThetaOptimum optimal_theta(const MarketParams& params, const SolverSettings& settings, double theta_lo,
                           double theta_hi) {
  auto wl = [&](double theta) { return welfare_loss(params, Bias{theta}, settings).wl_total; };
  auto min = numeric::grid_golden_minimize(wl, theta_lo, theta_hi, settings.scan_points, 1e-10);

  ThetaOptimum out;
  out.theta = min.x;
  out.wl = min.fx;
  out.at_boundary = min.at_lower || min.at_upper;
  out.local_minima = min.local_minima;

  auto slope = [&](double theta) { return dwl_dtheta_closed(params, theta, settings); };
  auto changes = numeric::sign_changes(slope, theta_lo, theta_hi, settings.scan_points);
  if (changes.empty()) {
    out.theta_lower = out.theta_upper = out.theta;
  } else {
    out.theta_lower = numeric::toms748(slope, changes.front().lo, changes.front().hi, 0.0, settings.max_iter).x;
    out.theta_upper = numeric::toms748(slope, changes.back().lo, changes.back().hi, 0.0, settings.max_iter).x;
  }
  return out;
}

std::pair<double, double> tax_search_range(const MarketParams& params, TaxRegime regime) {
  const double lo = regime == TaxRegime::BothSides ? std::max(-params.gamma, -params.beta) * 0.999
                                                   : -params.gamma * 0.999;
  return {lo, 10.0 * params.gamma};
}

TaxOptimum optimal_tax(const MarketParams& params, const Bias& bias, TaxRegime regime,
                       const SolverSettings& settings) {
  auto [lo, hi] = tax_search_range(params, regime);
  auto wl = [&](double delta) {
    try {
      return welfare_loss_tax(params, bias, TaxSpec{delta, regime}, settings);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto min = numeric::grid_golden_minimize(wl, lo, hi, settings.scan_points, 1e-10);
  TaxOptimum out;
  out.delta = min.x;
  out.wl = min.fx;
  out.lower_bound = lo;
  out.upper_bound = hi;
  out.at_lower = min.at_lower;
  out.at_upper = min.at_upper;
  out.local_minima = min.local_minima;
  return out;
}

PolicyReport policy_report(const MarketParams& params, const Bias& bias, TaxRegime regime,
                           const SolverSettings& settings) {
  PolicyReport rep;
  rep.theta_prime = threshold_theta_private(params, settings);
  rep.theta_dprime = threshold_theta_public(params, settings);
  try {
    rep.delta_star = threshold_delta_star(params, bias, regime, settings);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
    rep.delta_star = kNaN;
    rep.delta_star_feasible = false;
  }
  rep.theta_opt = optimal_theta(params, settings);
  rep.tax_opt = optimal_tax(params, bias, regime, settings);
  return rep;
}

const std::vector<std::string>& SweepTable::columns() {
  static const std::vector<std::string> cols{"axis_value", "a",   "alpha",    "eta",      "eta_p",
                                             "tau",        "A",   "B",        "C",        "var_p",
                                             "wl_total",   "wl_bayes", "wl_diag", "dwl_daxis", "flag"};
  return cols;
}

std::string SweepTable::to_csv() const {
  std::string out = csv::header(columns());
  for (const auto& r : rows) {
    std::string line = csv::row({r.axis_value, r.a, r.alpha, r.eta, r.eta_p, r.tau, r.A, r.B, r.C, r.var_p,
                                 r.wl_total, r.wl_bayes, r.wl_diag, r.dwl_daxis});
    line.pop_back();
    out += line;
    out += ',';
    out += r.flag;
    out += '\n';
  }
  return out;
}

namespace {

SweepRow sweep_point(const MarketParams& params, SweepAxis axis, double x, const Bias& bias, const TaxSpec& tax,
                     const SolverSettings& settings) {
  SweepRow row;
  row.axis_value = x;
  Bias b = bias;
  TaxSpec t = tax;
  if (axis == SweepAxis::Theta) {
    b.theta = x;
  } else {
    t.delta = x;
  }

  auto report = validate(params, b, t);
  if (!report.ok()) throw Error(ErrorCode::InvalidInput, report.message());

  const auto eq = equilibrium(params, b, t, settings);
  const auto ps = price_stats(eq);
  row.a = eq.a;
  row.alpha = eq.alpha;
  row.eta = eq.eta;
  row.eta_p = eq.eta_p;
  row.tau = eq.tau;
  row.A = eq.A;
  row.B = eq.B;
  row.C = eq.C;
  row.var_p = ps.var_p;

  if (t.delta == 0.0) {
    const auto w = welfare_loss(eq);
    row.wl_total = w.wl_total;
    row.wl_bayes = w.wl_bayes;
    row.wl_diag = w.wl_diag;
  } else {
    row.wl_total = welfare_loss_tax(eq);
    row.wl_bayes = kNaN;
    row.wl_diag = kNaN;
  }

  if (axis == SweepAxis::Theta && t.delta == 0.0) {
    row.dwl_daxis = dwl_dtheta(params, x, settings);
  } else {
    double h = 1e-6 * std::max(1.0, std::abs(x));
    auto wl = [&](double v) {
      Bias bb = b;
      TaxSpec tt = t;
      (axis == SweepAxis::Theta ? bb.theta : tt.delta) = v;
      return welfare_loss_tax(params, bb, tt, settings);
    };
    row.dwl_daxis = (wl(x + h) - wl(x - h)) / (2.0 * h);
  }
  return row;
}

}  // namespace

SweepTable sweep(const MarketParams& params, SweepAxis axis, const std::vector<double>& grid, const Bias& bias,
                 const TaxSpec& tax, const SolverSettings& settings) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidInput, "sweep grid must be strictly increasing");
  }
  SweepTable table;
  table.axis = axis;
  table.rows.reserve(grid.size());
  for (double x : grid) {
    try {
      table.rows.push_back(sweep_point(params, axis, x, bias, tax, settings));
    } catch (const Error& e) {
      SweepRow row;
      row.axis_value = x;
      for (double* f : {&row.a, &row.alpha, &row.eta, &row.eta_p, &row.tau, &row.A, &row.B, &row.C, &row.var_p,
                        &row.wl_total, &row.wl_bayes, &row.wl_diag, &row.dwl_daxis}) {
        *f = kNaN;
      }
      row.flag = std::string(to_string(e.code()));
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace dexp
