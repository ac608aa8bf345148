#pragma once

#include <cmath>
#include <concepts>

namespace rdcov {

namespace detail {

template <typename F>
double simpson_step(F&& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth,
                    int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth >= max_depth) {
    return left + right + err / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1,
                      max_depth) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1,
                      max_depth);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.
template <typename F>
  requires std::invocable<F, double>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 0,
                              max_depth);
}

// Integral over [-1, 1] split at zero; one-sided kernel moments and the
// population integrands have a kink there.
template <typename F>
  requires std::invocable<F, double>
double integrate_split_at_zero(F&& f, double tol = 1e-10, int max_depth = 40) {
  return adaptive_simpson(f, -1.0, 0.0, tol, max_depth) +
         adaptive_simpson(f, 0.0, 1.0, tol, max_depth);
}

}  // namespace rdcov
