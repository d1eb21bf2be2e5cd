#pragma once

#include <cmath>
#include <functional>

namespace otmax {

// Adaptive Simpson integration on [a, b] to the given relative tolerance.
namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(const F& f, double a, double fa, double b, double fb, double fm,
             double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, flm, left, 0.5 * eps, depth - 1) +
         adapt(f, m, fm, b, fb, frm, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 int max_depth = 50) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(a, fa, b, fb, fm);
  const double scale = std::max(std::abs(whole), 1e-300);
  return detail::adapt(f, a, fa, b, fb, fm, whole, rel_tol * scale, max_depth);
}

}  // namespace otmax
