#ifndef SCRI_SCATTER_FIELDS_HPP
#define SCRI_SCATTER_FIELDS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/lattice.hpp"
#include "scri_scatter/numerics.hpp"

namespace scri {

enum class ChartTag {
  u_chart, // retarded chart: lattice coordinate is u, R=0 is scri-plus
  v_chart  // advanced chart: lattice coordinate is v, R=0 is scri-minus
};

// One multipole's rescaled field psi on a rectangular (x, R) lattice where
// x is u or v depending on the chart tag. Row-major in the x index.
struct ModeField {
  int l = 0;
  ChartTag tag = ChartTag::u_chart;
  Lattice1D x;
  Lattice1D R;
  std::vector<double> values;

  ModeField() = default;
  ModeField(int l_, ChartTag tag_, const Lattice1D &x_, const Lattice1D &R_)
      : l(l_), tag(tag_), x(x_), R(R_),
        values(x_.n_points() * R_.n_points(), 0.0) {}

  double &at(std::size_t i, std::size_t j) { return values[i * R.n_points() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return values[i * R.n_points() + j];
  }

  void check_finite() const {
    for (std::size_t i = 0; i < x.n_points(); ++i)
      for (std::size_t j = 0; j < R.n_points(); ++j)
        if (!std::isfinite(at(i, j)))
          throw NonlinearDivergence("ModeField: non-finite value at x=" +
                                    std::to_string(x.x(i)) +
                                    " R=" + std::to_string(R.x(j)));
  }

  std::vector<double> row_R(std::size_t j) const {
    std::vector<double> v(x.n_points());
    for (std::size_t i = 0; i < x.n_points(); ++i) v[i] = at(i, j);
    return v;
  }
  std::vector<double> column_x(std::size_t i) const {
    std::vector<double> v(R.n_points());
    for (std::size_t j = 0; j < R.n_points(); ++j) v[j] = values[i * R.n_points() + j];
    return v;
  }
};

// Field value and first derivatives at an off-lattice point, from 4x4
// Lagrange interpolation (one-sided near edges, including R=0).
struct Jet2 {
  double psi = 0.0;
  double d_x = 0.0;
  double d_R = 0.0;
};

namespace detail {
// Weights of cubic Lagrange interpolation and its derivative at local
// coordinate t relative to nodes {i0, i0+1, i0+2, i0+3}.
inline void lagrange4_weights(double t, double i0, double w[4], double dw[4]) {
  for (int a = 0; a < 4; ++a) {
    double wa = 1.0, da = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (k == a) continue;
      double p = 1.0;
      for (int c = 0; c < 4; ++c) {
        if (c == a || c == k) continue;
        p *= (t - (i0 + c)) / double(a - c);
      }
      da += p / double(a - k);
      wa *= (t - (i0 + k)) / double(a - k);
    }
    w[a] = wa;
    dw[a] = da;
  }
}
} // namespace detail

inline Jet2 sample_jet(const ModeField &f, double xv, double Rv) {
  const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(f.x.n_points());
  const std::ptrdiff_t nR = static_cast<std::ptrdiff_t>(f.R.n_points());
  if (nx < 4 || nR < 4) throw DomainError("sample_jet: lattice too small");
  const double tx = (xv - f.x.x0) / f.x.dx;
  const double tR = (Rv - f.R.x0) / f.R.dx;
  std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(std::floor(tx)) - 1;
  std::ptrdiff_t iR = static_cast<std::ptrdiff_t>(std::floor(tR)) - 1;
  ix = std::max<std::ptrdiff_t>(0, std::min(ix, nx - 4));
  iR = std::max<std::ptrdiff_t>(0, std::min(iR, nR - 4));
  double wx[4], dwx[4], wR[4], dwR[4];
  detail::lagrange4_weights(tx, double(ix), wx, dwx);
  detail::lagrange4_weights(tR, double(iR), wR, dwR);
  Jet2 jet;
  for (int a = 0; a < 4; ++a) {
    double v = 0.0, vR = 0.0;
    for (int b = 0; b < 4; ++b) {
      const double y = f.at(std::size_t(ix + a), std::size_t(iR + b));
      v += wR[b] * y;
      vR += dwR[b] * y;
    }
    jet.psi += wx[a] * v;
    jet.d_x += dwx[a] * v;
    jet.d_R += wx[a] * vR;
  }
  jet.d_x /= f.x.dx;
  jet.d_R /= f.R.dx;
  return jet;
}

// Characteristic data theta(x) for one mode on scri; x is u on scri-plus,
// v on scri-minus. Compact support strictly inside the lattice window.
struct ScriProfile {
  int l = 0;
  ChartTag tag = ChartTag::u_chart;
  Lattice1D x;
  std::vector<double> values;
  double support_lo = 0.0;
  double support_hi = 0.0;
  // cached weighted-H1 norm, filled by energy::h1_scri_norm
  mutable double h1_cache = std::numeric_limits<double>::quiet_NaN();

  ScriProfile() = default;
  ScriProfile(int l_, ChartTag tag_, const Lattice1D &x_)
      : l(l_), tag(tag_), x(x_), values(x_.n_points(), 0.0) {}

  void declare_support(double lo, double hi) {
    support_lo = lo;
    support_hi = hi;
    const double margin = 2.0 * x.dx;
    if (!(lo > x.lo() + margin && hi < x.hi() - margin && lo < hi))
      throw DomainError("ScriProfile: support must lie strictly inside the window");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double xi = x.x(i);
      if (xi < lo || xi > hi) {
        if (std::abs(values[i]) > 1e-13)
          throw DomainError("ScriProfile: nonzero sample outside declared support");
        values[i] = 0.0;
      }
    }
    h1_cache = std::numeric_limits<double>::quiet_NaN();
  }

  double value(double xv) const { return interp_cubic(x.x0, x.dx, values, xv); }
};

// Reverse x -> -x. Requires a symmetric window so the result lives on the
// same lattice.
inline ScriProfile reversed(const ScriProfile &p, ChartTag new_tag) {
  if (!p.x.symmetric())
    throw DomainError("reversed: profile window must be symmetric about 0");
  ScriProfile q(p.l, new_tag, p.x);
  const std::size_t n = p.values.size();
  for (std::size_t i = 0; i < n; ++i) q.values[i] = p.values[n - 1 - i];
  q.support_lo = -p.support_hi;
  q.support_hi = -p.support_lo;
  return q;
}

// Gaussian bump with exact compact support [center-width, center+width].
inline ScriProfile gaussian_profile(int l, ChartTag tag, const Lattice1D &x,
                                    double amplitude, double center,
                                    double sigma, double width) {
  ScriProfile p(l, tag, x);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double z = (x.x(i) - center) / width;
    p.values[i] =
        amplitude * std::exp(-sqr(x.x(i) - center) / (2.0 * sigma * sigma)) *
        plateau_window(z);
  }
  p.declare_support(center - width, center + width);
  return p;
}

// Per-mode (theta, xi) = (psi, That psi) samples on the Sigma_0 curve,
// parametrized by r*.
struct SigmaData {
  int l = 0;
  Lattice1D rstar;
  std::vector<double> theta;
  std::vector<double> xi;
  // tangential derivative d theta / d r* along Sigma_0; kept alongside theta
  // so the reflection identities hold to round-off rather than stencil order
  std::vector<double> dtheta;
  double support_lo = 0.0;
  double support_hi = 0.0;

  SigmaData() = default;
  SigmaData(int l_, const Lattice1D &rs)
      : l(l_), rstar(rs), theta(rs.n_points(), 0.0), xi(rs.n_points(), 0.0) {}

  std::vector<double> tangential() const {
    if (dtheta.size() == theta.size()) return dtheta;
    std::vector<double> d;
    diff_centered(theta, rstar.dx, d);
    return d;
  }
};

// Coefficient c(r*) = 2(1+uR)/(R^2 F) with u = -r* on Sigma_0; relates the
// That-derivative to (psi_t, psi_rstar).
inline double sigma0_that_coefficient(double rstar_v, double m) {
  const double R = chart::R_of_rstar(rstar_v, m);
  const double F = 1.0 - 2.0 * m * R;
  const double K = R * R * F;
  const double one_uR = 1.0 - rstar_v * R;
  return 2.0 * one_uR / K;
}

struct CauchyPair {
  std::vector<double> psi;
  std::vector<double> pi; // d psi / d t at t = 0
};

inline CauchyPair sigma_to_cauchy(const SigmaData &d, double m) {
  CauchyPair out;
  const std::size_t n = d.rstar.n_points();
  out.psi = d.theta;
  out.pi.resize(n);
  const std::vector<double> dtheta = d.tangential();
  for (std::size_t i = 0; i < n; ++i) {
    const double rs = d.rstar.x(i);
    const double c = sigma0_that_coefficient(rs, m);
    const double denom = rs * rs + c;
    if (!(denom > 0.0))
      throw DomainError("sigma_to_cauchy: That fails to be timelike at r*=" +
                        std::to_string(rs));
    out.pi[i] = (d.xi[i] - c * dtheta[i]) / denom;
  }
  return out;
}

inline SigmaData cauchy_to_sigma(int l, const Lattice1D &rs,
                                 const std::vector<double> &psi,
                                 const std::vector<double> &pi, double m) {
  SigmaData d(l, rs);
  d.theta = psi;
  diff_centered(psi, rs.dx, d.dtheta);
  for (std::size_t i = 0; i < rs.n_points(); ++i) {
    const double r = rs.x(i);
    const double c = sigma0_that_coefficient(r, m);
    d.xi[i] = (r * r + c) * pi[i] + c * d.dtheta[i];
  }
  return d;
}

// t -> -t isometry on Sigma_0 data: flips the part of the That-derivative
// that is odd under time reversal. Involution.
inline SigmaData mirror(const SigmaData &d, double m) {
  SigmaData out = d;
  const std::vector<double> dtheta = d.tangential();
  out.dtheta = dtheta;
  for (std::size_t i = 0; i < d.rstar.n_points(); ++i) {
    const double c = sigma0_that_coefficient(d.rstar.x(i), m);
    out.xi[i] = 2.0 * c * dtheta[i] - d.xi[i];
  }
  return out;
}

} // namespace scri

#endif
