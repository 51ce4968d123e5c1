#pragma once

#include <cmath>
#include <concepts>

namespace illposed {

struct BisectionResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Bisection in log10(x) on [10^lo_exp, 10^hi_exp] for value(x) = target, where value is
/// monotone (increasing when `increasing`, else decreasing) and the bracket straddles
/// the target. Stops when |value - target| <= rel_tol * |target|, when the bracket can no
/// longer shrink, or after max_iter halvings.
template <class F>
  requires std::invocable<F, double>
BisectionResult bisect_log10(F&& value, double target, double lo_exp, double hi_exp, bool increasing,
                             double rel_tol, int max_iter = 200) {
  BisectionResult out;
  double lo = lo_exp;
  double hi = hi_exp;
  for (int it = 1; it <= max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double x = std::pow(10.0, mid);
    const double v = value(x);
    out = {x, v, it};
    if (std::abs(v - target) <= rel_tol * std::abs(target)) break;
    if (mid == lo || mid == hi) break;
    if ((v < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return out;
}

}  // namespace illposed
