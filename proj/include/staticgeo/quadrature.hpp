#pragma once

// 1D adaptive Simpson quadrature with panel bisection, plus an inversion
// transform for integrals with an infinite upper limit.

#include <cmath>
#include <functional>

#include "staticgeo/errors.hpp"

namespace staticgeo {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

namespace detail {

struct SimpsonWorker {
  const std::function<double(double)>& f;
  double rel_tol;
  double abs_floor;
  int max_panels;
  int panels_used = 0;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, int depth,
                 double& err_acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    const double diff = both - whole;
    ++panels_used;
    if (panels_used > max_panels)
      throw NumericsError("quadrature did not converge within the panel budget");
    const double tol = std::max(abs_floor, rel_tol * std::abs(both));
    if (std::abs(diff) <= 15.0 * tol || depth > 60) {
      err_acc += std::abs(diff) / 15.0;
      return both + diff / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, depth + 1, err_acc) +
           recurse(m, b, fm, frm, fb, right, depth + 1, err_acc);
  }
};

}  // namespace detail

inline QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-9, double abs_floor = 1e-14,
                                  int max_panels = 1 << 20) {
  if (a == b) return {0.0, 0.0, 0};
  detail::SimpsonWorker w{f, rel_tol, abs_floor, max_panels};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double err = 0.0;
  const double value = w.recurse(a, b, fa, fm, fb, whole, 0, err);
  if (!std::isfinite(value)) throw NumericsError("quadrature produced a non-finite value");
  return {value, err, w.panels_used};
}

// Integral over [a, infinity) via the substitution x = 1/r; the integrand must
// decay at least quadratically for the transformed integrand to stay bounded.
inline QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                              double rel_tol = 1e-9, double abs_floor = 1e-14,
                                              int max_panels = 1 << 20) {
  if (!(a > 0.0)) throw InvalidArgument("infinite-range quadrature needs a positive lower limit");
  auto transformed = [&f](double x) {
    if (x == 0.0) return 0.0;
    const double r = 1.0 / x;
    return f(r) * r * r;
  };
  return integrate(transformed, 0.0, 1.0 / a, rel_tol, abs_floor, max_panels);
}

}  // namespace staticgeo
