#include "dexp/presets.hpp"

#include "dexp/csv.hpp"
#include "dexp/numeric.hpp"
#include "dexp/policy.hpp"
#include "dexp/team.hpp"
#include "dexp/welfare.hpp"

namespace dexp::presets {

MarketParams case1() { return {3.0, 0.1, 0.01, 0.01, 50.0, 0.0}; }

MarketParams case2() { return {3.0, 2.0, 1.0, 5.0, 1.0, 0.0}; }

MarketParams balanced(const SolverSettings& settings) {
  // learning dominates at beta = 0.5 and pecuniary at beta = 1
  return find_balanced_beta({1.0, 0.75, 1.0, 1.0, 10.0, 0.0}, 0.5, 1.0, settings);
}

const std::vector<FigureSpec>& figures() {
  static const std::vector<FigureSpec> specs{
      {"fig1a", -0.2, 0.6, 200},
      {"fig1b", -0.4, 0.4, 200},
      {"fig3", -0.5, 1.0, 151},
  };
  return specs;
}

const FigureSpec& figure(std::string_view name) {
  for (const auto& f : figures()) {
    if (f.name == name) return f;
  }
  throw Error(ErrorCode::InvalidInput, "unknown figure '" + std::string(name) + "'");
}

namespace {

std::string fig1_csv(const MarketParams& params, const std::vector<double>& grid, const SolverSettings& settings) {
  const auto table = sweep(params, SweepAxis::Theta, grid, Bias{}, TaxSpec{}, settings);
  const double wl_market = welfare_loss(params, Bias{0.0}, settings).wl_total;
  const double a_team = team_loading(params, settings);
  const double wl_team = wl_general(params, a_team, 1.0 / params.gamma - a_team);

  auto cols = SweepTable::columns();
  cols.push_back("wl_market_theta0");
  cols.push_back("wl_team");
  std::string out = csv::header(cols);

  // reuse the sweep rows and append the two reference levels
  const std::string body = table.to_csv();
  std::size_t pos = body.find('\n') + 1;
  const std::string tail = "," + csv::format(wl_market) + "," + csv::format(wl_team) + "\n";
  while (pos < body.size()) {
    const std::size_t eol = body.find('\n', pos);
    out.append(body, pos, eol - pos);
    out += tail;
    pos = eol + 1;
  }
  return out;
}

std::string flag_of(const TaxOptimum& t) {
  if (t.at_lower) return "lower_bound";
  if (t.at_upper) return "upper_bound";
  return "";
}

std::string fig3_csv(const std::vector<double>& grid, const SolverSettings& settings) {
  std::string out = csv::header(
      {"theta", "delta_opt_case1", "wl_case1", "flag_case1", "delta_opt_case2", "wl_case2", "flag_case2"});
  const auto p1 = case1();
  const auto p2 = case2();
  for (double theta : grid) {
    const auto t1 = optimal_tax(p1, Bias{theta}, TaxRegime::BothSides, settings);
    const auto t2 = optimal_tax(p2, Bias{theta}, TaxRegime::BothSides, settings);
    out += csv::format(theta) + "," + csv::format(t1.delta) + "," + csv::format(t1.wl) + "," + flag_of(t1) + "," +
           csv::format(t2.delta) + "," + csv::format(t2.wl) + "," + flag_of(t2) + "\n";
  }
  return out;
}

}  // namespace

std::string figure_csv(std::string_view name, std::size_t points, const SolverSettings& settings) {
  const auto& spec = figure(name);
  if (points < 2) throw Error(ErrorCode::InvalidInput, "a figure needs at least 2 points");
  const auto grid = numeric::linspace(spec.theta_lo, spec.theta_hi, points);
  if (spec.name == "fig1a") return fig1_csv(case1(), grid, settings);
  if (spec.name == "fig1b") return fig1_csv(case2(), grid, settings);
  return fig3_csv(grid, settings);
}

}  // namespace dexp::presets
