#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace dexp::numeric {

using Fn = std::function<double(double)>;

struct Bracket {
  double lo;
  double hi;
};

// Evaluates f on n+1 equispaced points of [lo, hi] and returns every
// subinterval whose endpoint values have opposite signs (or hit zero).
std::vector<Bracket> sign_changes(const Fn& f, double lo, double hi, std::size_t n);

// Plain bisection; needs f(lo) and f(hi) of opposite sign.
double bisect(const Fn& f, double lo, double hi, double x_tol, int max_iter);

struct RootResult {
  double x;
  double fx;
  int iterations;
};

// TOMS 748 on a sign-changing bracket. Throws Error(NoRoot) when the bracket
// does not change sign and Error(NoConvergence) when max_iter runs out.
RootResult toms748(const Fn& f, double lo, double hi, double x_tol, int max_iter);

struct MinResult {
  double x;
  double fx;
  bool at_lower = false;
  bool at_upper = false;
  int local_minima = 0;  // interior grid minima seen during the scan
};

// Grid scan over [lo, hi] with n intervals, then golden-section inside the
// best grid cell until the bracket is narrower than width.
MinResult grid_golden_minimize(const Fn& f, double lo, double hi, std::size_t n, double width);

double golden_section(const Fn& f, double lo, double hi, double width, int max_iter = 400);

inline double central_difference(const Fn& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace dexp::numeric
