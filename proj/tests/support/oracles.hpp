#ifndef SCRI_SCATTER_TEST_ORACLES_HPP
#define SCRI_SCATTER_TEST_ORACLES_HPP

// Test-only reference implementations, independent of the library paths they
// check: bisection root finding, generic cubic solving, reference
// quadratures, and Richardson order fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Bisection on a monotone function; used to invert r* independently of the
// library's Newton-polished solver.
inline double bisect(const std::function<double(double)> &f, double lo,
                     double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All real roots of x^3 + p x + q by monotone-interval bisection (independent
// of the Cardano formulas under test).
inline std::vector<double> cubic_roots(double p, double q) {
  auto f = [&](double x) { return x * x * x + p * x + q; };
  std::vector<double> roots;
  const double span = 2.0 + 2.0 * std::sqrt(std::abs(p)) + std::cbrt(std::abs(q));
  if (p >= 0.0) {
    roots.push_back(bisect(f, -span, span));
    return roots;
  }
  const double xc = std::sqrt(-p / 3.0);
  const double fl = f(-xc), fr = f(xc);
  if (fl > 0 && fr < 0) {
    roots.push_back(bisect(f, -span, -xc));
    roots.push_back(bisect(f, -xc, xc));
    roots.push_back(bisect(f, xc, span));
  } else {
    roots.push_back(fl <= 0 ? bisect(f, -xc, span) : bisect(f, -span, xc));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)> &f, double a,
                      double b, int n = 2048) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Observed convergence order from three errors at h, h/2, h/4.
inline double order_from_errors(double e1, double e2) {
  return std::log2(e1 / e2);
}

// Richardson self-convergence order from three nested solutions sampled on
// the coarsest lattice: log2(|f_h - f_{h/2}| / |f_{h/2} - f_{h/4}|).
inline double self_convergence_order(const std::vector<double> &coarse,
                                     const std::vector<double> &medium,
                                     const std::vector<double> &fine) {
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    d1 += (coarse[i] - medium[i]) * (coarse[i] - medium[i]);
    d2 += (medium[i] - fine[i]) * (medium[i] - fine[i]);
  }
  return 0.5 * std::log2(d1 / d2);
}

} // namespace oracle

#endif
