#pragma once

// Independent reference computations used only by the tests. None of these
// call into the solver code paths they are meant to check.

#include <cmath>
#include <cstddef>
#include <limits>

#include "dexp/model.hpp"

namespace dexp::testing {

// Loading root by brute force: the cleared residual g a (tau_eps + tau) - tau_eps
// is scanned on n points of [0, 1/g] and the crossing cell bisected to the end.
inline double grid_scan_loading(const MarketParams& p, double theta, const TaxSpec& tax = {},
                                std::size_t n = 1000000) {
  const double g = p.gamma + tax.delta;
  const double b = tax.regime == TaxRegime::BothSides ? p.beta + tax.delta : p.beta;
  const double th1 = 1.0 + theta;
  auto r = [&](double a) {
    const double tau = p.tau0 + a * a * th1 * th1 * b * b * p.tau_s;
    return g * a * (p.tau_eps + tau) - p.tau_eps;
  };
  const double hi = 1.0 / g;
  double lo_x = 0.0;
  double hi_x = hi;
  double prev = r(0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = hi * static_cast<double>(i) / static_cast<double>(n);
    const double v = r(x);
    if ((prev < 0.0) != (v < 0.0)) {
      lo_x = hi * static_cast<double>(i - 1) / static_cast<double>(n);
      hi_x = x;
      break;
    }
    prev = v;
  }
  for (int it = 0; it < 200 && hi_x - lo_x > 0.0; ++it) {
    const double mid = 0.5 * (lo_x + hi_x);
    if (mid == lo_x || mid == hi_x) break;
    if (r(mid) < 0.0) {
      lo_x = mid;
    } else {
      hi_x = mid;
    }
  }
  return 0.5 * (lo_x + hi_x);
}

// Welfare loss from second moments of D^o - Dbar = cV V + cE E + cZ (mu_s + S),
// where E = E(V|p) is the price-implied mean. Takes the loading a as input.
inline double wl_moments(const MarketParams& p, double theta, const TaxSpec& tax, double a) {
  const double g = p.gamma + tax.delta;
  const double b = tax.regime == TaxRegime::BothSides ? p.beta + tax.delta : p.beta;
  const double al = a * (1.0 + theta);
  const double eta = (1.0 + theta) / g - al;
  const double tau = p.tau0 + al * al * b * b * p.tau_s;
  const double k = p.beta + p.gamma;
  const double m = g + b;
  const double kappa = (tau - p.tau0) / tau;

  // Dbar = (mu_s + S + g alpha V + g eta E) / (g + b)
  const double cV = 1.0 / k - g * al / m;
  const double cE = -g * eta / m;
  const double cZ = 1.0 / k - 1.0 / m;
  const double vE = 1.0 / p.tau0 - 1.0 / tau;       // Var(E) = Cov(V, E)
  const double cSE = -kappa / (al * b * p.tau_s);   // Cov(S, E)
  const double eZ2 = p.mu_s * p.mu_s + 1.0 / p.tau_s;

  const double e2 = cV * cV / p.tau0 + cE * cE * vE + cZ * cZ * eZ2 + 2.0 * cV * cE * vE + 2.0 * cE * cZ * cSE;
  return 0.5 * k * e2 + 0.5 * p.gamma * al * al / p.tau_eps;
}

// Posterior mean straight from the updating rule: Bayesian mean given s_i and
// the price signal, stretched by (1 + theta) away from the zero prior mean.
inline double diagnostic_mean(double tau0, double tau_eps, double tau_pub_extra, double theta, double s,
                              double price_signal) {
  const double post = tau0 + tau_eps + tau_pub_extra;
  const double bayes = (tau_eps * s + tau_pub_extra * price_signal) / post;
  return (1.0 + theta) * bayes;
}

// argmin over alpha of the general-loading welfare loss along eta = 1/gamma - alpha.
template <class Wl>
double grid_argmin(Wl&& wl, double lo, double hi, std::size_t n) {
  double best_x = lo;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    const double v = wl(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace dexp::testing
