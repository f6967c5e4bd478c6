#pragma once

#include <cmath>
#include <concepts>

namespace gapesd {

struct GoldenResult {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops once the bracket is narrower than `tol`.
template <std::invocable<double> F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double tol, int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

template <std::invocable<double> F>
GoldenResult golden_section_minimize(F&& f, double lo, double hi, double tol, int max_iter = 500) {
  auto r = golden_section_maximize([&](double x) { return -f(x); }, lo, hi, tol, max_iter);
  return {r.x, -r.value};
}

/// Bisection on a sign change of g over [lo, hi]; g(lo) and g(hi) must differ in sign
/// (or one of them is zero). Returns the left-biased end of the final bracket.
template <std::invocable<double> G>
double bisect_root(G&& g, double lo, double hi, double tol, int max_iter = 200) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace gapesd
