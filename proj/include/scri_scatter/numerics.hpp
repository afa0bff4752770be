#ifndef SCRI_SCATTER_NUMERICS_HPP
#define SCRI_SCATTER_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "scri_scatter/errors.hpp"

namespace scri {

inline bool all_finite(const std::vector<double> &v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Trapezoid rule on a uniform lattice.
inline double trapz(const std::vector<double> &y, double dx) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dx;
}

// Cumulative trapezoid from index 0; out[0] = 0.
inline void cumtrapz(const std::vector<double> &y, double dx,
                     std::vector<double> &out) {
  out.resize(y.size());
  if (y.empty()) return;
  out[0] = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i)
    out[i] = out[i - 1] + 0.5 * dx * (y[i - 1] + y[i]);
}

// Centered first derivative on a uniform lattice, one-sided at the ends.
inline void diff_centered(const std::vector<double> &y, double dx,
                          std::vector<double> &out) {
  const std::size_t n = y.size();
  out.resize(n);
  if (n < 2) {
    if (n == 1) out[0] = 0.0;
    return;
  }
  out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2 < n ? 2 : 1]) / (2.0 * dx);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (y[i + 1] - y[i - 1]) / (2.0 * dx);
  out[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n >= 3 ? n - 3 : n - 2]) / (2.0 * dx);
}

// 4th-order first derivative on a uniform lattice (2nd-order one-sided at
// the two nodes nearest each end).
inline void diff_centered4(const std::vector<double> &y, double dx,
                           std::vector<double> &out) {
  const std::size_t n = y.size();
  if (n < 5) {
    diff_centered(y, dx, out);
    return;
  }
  out.resize(n);
  out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
  out[1] = (y[2] - y[0]) / (2.0 * dx);
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * dx);
  out[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * dx);
  out[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
}

// 4th-order midpoint value between nodes i and i+1 of a uniform lattice.
inline double midpoint4(const std::vector<double> &y, std::size_t i) {
  const std::size_t n = y.size();
  if (i == 0 || i + 2 >= n) return 0.5 * (y[i] + y[i + 1]);
  return (9.0 * (y[i] + y[i + 1]) - (y[i - 1] + y[i + 2])) / 16.0;
}

// 4th-order midpoint derivative between nodes i and i+1.
inline double midpoint_deriv4(const std::vector<double> &y, std::size_t i,
                              double dx) {
  const std::size_t n = y.size();
  if (i == 0 || i + 2 >= n) return (y[i + 1] - y[i]) / dx;
  return (27.0 * (y[i + 1] - y[i]) - (y[i + 2] - y[i - 1])) / (24.0 * dx);
}

// Cubic Lagrange interpolation on a uniform lattice {x0 + k dx}.
// Clamps the stencil at the ends; values outside the lattice are clamped to
// the boundary stencil (callers guard the range when that matters).
inline double interp_cubic(double x0, double dx, const std::vector<double> &y,
                           double x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
  if (n == 0) return 0.0;
  if (n == 1) return y[0];
  double t = (x - x0) / dx;
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
  i = std::max<std::ptrdiff_t>(0, std::min(i, n - 4));
  if (n < 4) i = 0;
  const std::ptrdiff_t m = std::min<std::ptrdiff_t>(4, n);
  double r = 0.0;
  for (std::ptrdiff_t a = 0; a < m; ++a) {
    double w = 1.0;
    for (std::ptrdiff_t c = 0; c < m; ++c) {
      if (c == a) continue;
      w *= (t - double(i + c)) / double(a - c);
    }
    r += w * y[i + a];
  }
  return r;
}

// Derivative of the cubic Lagrange interpolant.
inline double interp_cubic_deriv(double x0, double dx,
                                 const std::vector<double> &y, double x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
  if (n < 2) return 0.0;
  double t = (x - x0) / dx;
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(t)) - 1;
  i = std::max<std::ptrdiff_t>(0, std::min(i, n - 4));
  if (n < 4) i = 0;
  const std::ptrdiff_t m = std::min<std::ptrdiff_t>(4, n);
  double r = 0.0;
  for (std::ptrdiff_t a = 0; a < m; ++a) {
    double dw = 0.0;
    for (std::ptrdiff_t k = 0; k < m; ++k) {
      if (k == a) continue;
      double p = 1.0;
      for (std::ptrdiff_t c = 0; c < m; ++c) {
        if (c == a || c == k) continue;
        p *= (t - double(i + c)) / double(a - c);
      }
      dw += p / double(a - k);
    }
    r += dw * y[i + a];
  }
  return r / dx;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // rms of fit residuals
};

inline LineFit fit_line(const std::vector<double> &x,
                        const std::vector<double> &y) {
  LineFit f;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / d;
  f.intercept = (sy - f.slope * sx) / n;
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    r2 += e * e;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

// Bracketed bisection followed by Newton polish. f must be monotone on
// [lo, hi] with a sign change.
inline double solve_bracketed(const std::function<double(double)> &f,
                              const std::function<double(double)> &fprime,
                              double lo, double hi, double rel_tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw DomainError("solve_bracketed: no sign change in bracket");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) { lo = hi = mid; break; }
    if ((fm > 0) == (fhi > 0)) { hi = mid; fhi = fm; }
    else { lo = mid; flo = fm; }
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) break;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double fx = f(x);
    const double dfx = fprime(x);
    if (dfx == 0.0) break;
    const double xn = x - fx / dfx;
    if (xn < lo || xn > hi) break;
    if (std::abs(xn - x) <= rel_tol * std::max(1.0, std::abs(x))) { x = xn; break; }
    x = xn;
  }
  return x;
}

// C^infinity step: 0 for s<=0, 1 for s>=1, strictly increasing between.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

// Plateau window on [-1,1]: 1 on |z|<=core, smooth drop to 0 at |z|=1.
inline double plateau_window(double z, double core = 0.7) {
  const double a = std::abs(z);
  if (a >= 1.0) return 0.0;
  if (a <= core) return 1.0;
  return smooth_step((1.0 - a) / (1.0 - core));
}

inline double sqr(double x) { return x * x; }

} // namespace scri

#endif
