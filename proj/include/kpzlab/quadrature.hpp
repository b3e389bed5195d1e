#pragma once

// Composite quadrature for time-integrated kernel quantities. Integrands
// here are smooth away from t = 0 and decay like a power of t, so a fine
// adaptive rule near the origin plus geometrically widening panels is both
// cheap and accurate.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace kpzlab {

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double fa, double m, double fm, double b, double fb,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 24) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, fa, m, fm, b, fb, whole, tol, max_depth);
}

// Integral over [0, T] graded for integrands that vary on an O(1) scale
// near zero and decay at large t: adaptive on [0, min(1,T)], then panels
// growing geometrically, each integrated adaptively with a shared budget.
template <class F>
double integrate_time_graded(F&& f, double T, double tol, double growth = 1.7) {
  if (!(T > 0.0)) return 0.0;
  const double head_end = std::min(1.0, T);
  double total = adaptive_simpson(f, 0.0, head_end, 0.25 * tol);
  double lo = head_end;
  int panels = 0;
  double width = std::max(0.5, head_end);
  while (lo < T && panels < 400) {
    const double hi = std::min(T, lo + width);
    total += adaptive_simpson(f, lo, hi, 0.25 * tol / (1 + panels));
    lo = hi;
    width *= growth;
    ++panels;
  }
  if (lo < T) throw std::runtime_error("integrate_time_graded: panel budget exhausted");
  return total;
}

}  // namespace kpzlab
