#include "dexp/numeric.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dexp/error.hpp"

namespace dexp::numeric {

std::vector<Bracket> sign_changes(const Fn& f, double lo, double hi, std::size_t n) {
  std::vector<Bracket> out;
  auto xs = linspace(lo, hi, n + 1);
  double prev = f(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double cur = f(xs[i]);
    // a zero at a grid point belongs to the interval on its left only
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) out.push_back({xs[i - 1], xs[i]});
    prev = cur;
  }
  return out;
}

double bisect(const Fn& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo);
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RootResult toms748(const Fn& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw Error(ErrorCode::NoRoot, "bracket does not change sign");
  }
  auto tol = [x_tol](double a, double b) {
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    return std::abs(b - a) <= std::max(x_tol, floor);
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iter) && !tol(a, b)) {
    throw Error(ErrorCode::NoConvergence, "toms748 exceeded max_iter");
  }
  double fa = f(a);
  double fb = f(b);
  if (std::abs(fa) <= std::abs(fb)) return {a, fa, static_cast<int>(iters)};
  return {b, fb, static_cast<int>(iters)};
}

double golden_section(const Fn& f, double lo, double hi, double width, int max_iter) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && hi - lo > width; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

MinResult grid_golden_minimize(const Fn& f, double lo, double hi, std::size_t n, double width) {
  auto xs = linspace(lo, hi, n + 1);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fs[i] = f(xs[i]);
    if (!std::isfinite(fs[i])) fs[i] = std::numeric_limits<double>::infinity();
  }

  MinResult res;
  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  for (std::size_t i = 1; i + 1 < fs.size(); ++i) {
    if (fs[i] <= fs[i - 1] && fs[i] < fs[i + 1]) ++res.local_minima;
  }

  if (best == 0) {
    res.at_lower = true;
    res.x = xs.front();
    res.fx = fs.front();
    return res;
  }
  if (best + 1 == xs.size()) {
    res.at_upper = true;
    res.x = xs.back();
    res.fx = fs.back();
    return res;
  }
  res.x = golden_section(f, xs[best - 1], xs[best + 1], width);
  res.fx = f(res.x);
  if (fs[best] < res.fx) {
    res.x = xs[best];
    res.fx = fs[best];
  }
  return res;
}

}  // namespace dexp::numeric
