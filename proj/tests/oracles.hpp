#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// adaptive Simpson quadrature for arc-length/phase integrals and a plain
// golden-section minimizer for the C2 threshold.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double whole, double tol,
                                   int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, a, c);
  const double right = simpson(f, c, b);
  if (depth > 60) return left + right;
  if (std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, c, left, 0.5 * tol, depth + 1) +
         adaptive_simpson_rec(f, c, b, right, 0.5 * tol, depth + 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 0);
}

// minimizes a unimodal-enough f over (lo, hi) by grid bracketing plus
// golden-section; returns the argmin
inline double golden_argmin(const std::function<double(double)>& f, double lo,
                            double hi, int grid = 4001) {
  double best = lo, best_val = 0.0;
  for (int i = 1; i < grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double v = f(x);
    if (i == 1 || v < best_val) {
      best_val = v;
      best = x;
    }
  }
  double a = std::max(best - (hi - lo) / grid, lo);
  double b = std::min(best + (hi - lo) / grid, hi);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracles
