#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dexp/model.hpp"

namespace dexp::presets {

/// Learning externality dominates: gamma=3, beta=0.1, tau0=tau_eps=0.01, tau_s=50.
MarketParams case1();
/// Pecuniary externality dominates: gamma=3, beta=2, tau0=tau_s=1, tau_eps=5.
MarketParams case2();
/// gamma=1, tau0=tau_eps=1, tau_s=10 with beta tuned so that a* = a^T.
MarketParams balanced(const SolverSettings& settings = {});

struct FigureSpec {
  std::string name;
  double theta_lo;
  double theta_hi;
  std::size_t default_points;
};

const std::vector<FigureSpec>& figures();
const FigureSpec& figure(std::string_view name);  // throws Error(InvalidInput) on unknown names

/// CSV for one figure. fig1a/fig1b: the sweep columns plus wl_market_theta0 and
/// wl_team; fig3: optimal both-sides tax per theta for both cases.
std::string figure_csv(std::string_view name, std::size_t points, const SolverSettings& settings = {});

}  // namespace dexp::presets
