#ifndef SCRI_SCATTER_ENERGY_HPP
#define SCRI_SCATTER_ENERGY_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/fields.hpp"

namespace scri::energy {

using chart::ChartParams;
using chart::ChartPoint;
using coeff::CoeffB;

// Per-mode convention: phi = psi(u,R) Y_l with int Y_l^2 dOmega = 4 pi, so
// |grad_S2 phi|^2 integrates to 4 pi l(l+1) psi^2 and every energy carries an
// overall 4 pi. Quartic terms are exact for l = 0; nonlinear runs are l = 0
// by construction.
inline constexpr double four_pi = 4.0 * M_PI;

struct Jet {
  double psi = 0.0;
  double d_u = 0.0;
  double d_R = 0.0;
};

// (1/2)|grad phi|^2 + phi^2/2 + b phi^4/4, mode-reduced.
inline double angular_group(double psi, int l, double bval) {
  return 0.5 * double(l) * double(l + 1) * psi * psi + 0.5 * psi * psi +
         0.25 * bval * psi * psi * psi * psi;
}

// Restriction of the energy 3-form to the H_s leaves (du wedge dOmega
// coefficient), as printed.
inline double integrand_Hs(const Jet &j, const ChartPoint &p, double s,
                           const ChartParams &params, int l, double bval) {
  if (!(s > 0.0 && s <= 1.0))
    throw DomainError("integrand_Hs: s must lie in (0,1]");
  const double m = params.m;
  const double uR = p.u * p.R;
  const double K = p.R * p.R * (1.0 - 2.0 * m * p.R);
  const double u2 = p.u * p.u;
  return u2 * j.d_u * j.d_u + K * u2 * j.d_R * j.d_u +
         K * (sqr(2.0 + uR) / (2.0 * s) - m * u2 * p.R * p.R * p.R / s -
              (1.0 + uR)) *
             j.d_R * j.d_R +
         (u2 * K / s + 2.0 * (1.0 + uR)) * angular_group(j.psi, l, bval);
}

// Restriction to the null hypersurfaces S_u (dR wedge dOmega coefficient).
inline double integrand_Su(const Jet &j, const ChartPoint &p,
                           const ChartParams &params, int l, double bval) {
  const double m = params.m;
  const double uR = p.u * p.R;
  const double u2 = p.u * p.u;
  return 0.5 * (sqr(2.0 + uR) - 2.0 * m * p.R * p.R * p.R * u2) * j.d_R * j.d_R +
         u2 * angular_group(j.psi, l, bval);
}

// Restriction to scri (R = 0 limit).
inline double integrand_scri(double u, double psi, double du_psi, int l,
                             double bval) {
  return u * u * du_psi * du_psi + double(l) * double(l + 1) * psi * psi +
         psi * psi + 0.5 * bval * psi * psi * psi * psi;
}

// Generic spacelike-slice restriction in an orthonormal frame adapted to the
// foliation: f is the normalized That direction, delta_i its projections on
// the slice tangents, beta^2 = 1 + sum delta_i^2.
inline double integrand_slice(double f_phi, const double e_phi[3], double phi,
                              double bval, double T_norm_sq, double T_dot_e0,
                              const double delta[3]) {
  double beta2 = 1.0;
  for (int i = 0; i < 3; ++i) beta2 += delta[i] * delta[i];
  double sum = f_phi * f_phi / (2.0 * beta2);
  for (int i = 0; i < 3; ++i)
    sum += 0.5 * (1.0 - delta[i] * delta[i] / beta2) * e_phi[i] * e_phi[i];
  sum += 0.5 * phi * phi + 0.25 * bval * phi * phi * phi * phi;
  return sum * T_norm_sq / T_dot_e0;
}

// Killing-form coefficient 4 m R^2 (3 + uR); the Killing form of That is
// 4 m R^2 (3+uR) d_R d_R and is trace-free.
inline double killing_coefficient(const ChartPoint &p, const ChartParams &params) {
  return 4.0 * params.m * p.R * p.R * (3.0 + p.u * p.R);
}

// Error term (divergence of the energy 3-form):
// 4mR^2(3+uR) psi_R^2 + (1-12mR) psi (That psi) + (That b) psi^4 / 4.
inline double error_integrand(const Jet &j, const ChartPoint &p,
                              const ChartParams &params, double that_b) {
  const double kc = killing_coefficient(p, params);
  const double that_psi =
      p.u * p.u * j.d_u - 2.0 * (1.0 + p.u * p.R) * j.d_R;
  return kc * j.d_R * j.d_R +
         (1.0 - 12.0 * params.m * p.R) * j.psi * that_psi +
         that_b * 0.25 * j.psi * j.psi * j.psi * j.psi;
}

// Positive reference energy density equivalent to the H_s restriction.
inline double reference_integrand(const Jet &j, const ChartPoint &p,
                                  const ChartParams &params, int l, double bval) {
  (void)params;
  return p.u * p.u * j.d_u * j.d_u +
         (p.R / std::abs(p.u)) * j.d_R * j.d_R +
         double(l) * double(l + 1) * j.psi * j.psi + 0.5 * j.psi * j.psi +
         0.25 * bval * sqr(j.psi * j.psi);
}

// That applied to a static-in-time b by centered differences in R.
inline double that_b(const CoeffB &b, const ChartPoint &p, double hR) {
  if (b.is_zero()) return 0.0;
  double bR;
  if (p.R - hR > 0.0)
    bR = (b({p.u, p.R + hR}) - b({p.u, p.R - hR})) / (2.0 * hR);
  else
    bR = (b({p.u, p.R + hR}) - b({p.u, p.R})) / hR;
  const double bu = 0.0; // shipped families are u-independent
  return p.u * p.u * bu - 2.0 * (1.0 + p.u * p.R) * bR;
}

// Weighted H1(scri) norm of a characteristic profile:
// ||theta||^2 = 2 int ( u^2 (d_u theta)^2 / 4 + |grad theta|^2 + theta^2 ) du dOmega.
inline double h1_scri_norm(const ScriProfile &theta) {
  if (std::isfinite(theta.h1_cache)) return theta.h1_cache;
  std::vector<double> d;
  diff_centered(theta.values, theta.x.dx, d);
  std::vector<double> integ(theta.values.size());
  for (std::size_t i = 0; i < integ.size(); ++i) {
    const double u = theta.x.x(i);
    const double t = theta.values[i];
    integ[i] = 0.25 * u * u * d[i] * d[i] +
               (double(theta.l) * double(theta.l + 1) + 1.0) * t * t;
  }
  const double n2 = 2.0 * four_pi * trapz(integ, theta.x.dx);
  theta.h1_cache = std::sqrt(n2);
  return theta.h1_cache;
}

inline double h1_scri_dist(const ScriProfile &a, const ScriProfile &b) {
  if (a.values.size() != b.values.size())
    throw DomainError("h1_scri_dist: lattice mismatch");
  ScriProfile d = a;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  d.h1_cache = std::numeric_limits<double>::quiet_NaN();
  return h1_scri_norm(d);
}

struct EquivalenceConstants {
  double C_eps = 0.0;
  double c_eps_known_parts = 0.0;
  bool p_branch_assumed_zero = true; // the eps P(eps) correction was not supplied
};

// Appendix constants of the H_s equivalence:
//   C_eps = max(1, (1+e)^3/3, (1+e)((3+e^2)^2/2 + (1+e)), (1-e)(1+e)+2)
//   c_eps = min(1/4, 1/6 - e P(e), 1 - 2e - e^2)
// P(e) is not written out in closed form; callers may supply a bound on it.
inline EquivalenceConstants equivalence_constants(double eps,
                                                  double P_of_eps = 0.0,
                                                  bool have_P = false) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("equivalence_constants: eps in (0,1)");
  EquivalenceConstants ec;
  const double e = eps;
  ec.C_eps = std::max(
      {1.0, (1.0 + e) * (1.0 + e) * (1.0 + e) / 3.0,
       (1.0 + e) * (sqr(3.0 + e * e) / 2.0 + (1.0 + e)),
       (1.0 - e) * (1.0 + e) + 2.0});
  ec.c_eps_known_parts =
      std::min({0.25, 1.0 / 6.0 - e * P_of_eps, 1.0 - 2.0 * e - e * e});
  ec.p_branch_assumed_zero = !have_P;
  return ec;
}

// --- tau-foliation geometry -------------------------------------------------

// Leaves H_{s(tau)} of the region between Sigma_0 and scri. Works in either
// chart: x < 0 with s = |x|/r* (retarded) or x > 0 with s = x/r* (advanced).
struct LeafPoint {
  ChartPoint p;
  bool valid = false;
};

inline LeafPoint leaf_point(double x, double tau, ChartTag tag,
                            const ChartParams &params, double R_cap) {
  LeafPoint lp;
  const double ax = tag == ChartTag::u_chart ? -x : x;
  if (!(ax > 0.0)) return lp;
  const double s = chart::s_of_tau(tau);
  if (s <= 0.0) {
    lp.p = {tag == ChartTag::u_chart ? x : -x, 0.0};
    lp.valid = true;
    return lp;
  }
  const double rs = ax / s;
  const double R = chart::R_of_rstar(rs, params.m);
  if (R > R_cap) return lp;
  // chart formulas are retarded-chart expressions; map v -> u = -v
  lp.p = {tag == ChartTag::u_chart ? x : -x, R};
  lp.valid = true;
  return lp;
}

struct LeafRow {
  double tau = 0.0;
  double s = 0.0;
  double E_hs = 0.0;       // integral of the printed H_s restriction
  double E_ref = 0.0;      // integral of the positive reference density
  double E_S_partial = 0.0;
  double bulk_so_far = 0.0;
  double residual = 0.0;   // |E_hs + E_S - E_sigma0 - bulk|
};

struct EnergyReport {
  int l = 0;
  double u0 = 0.0;
  double E_sigma0_far = 0.0;
  double E_Su0 = 0.0;
  double E_scri_u0 = 0.0;
  std::vector<LeafRow> leaves;
  double stokes_residual = 0.0;     // absolute, at tau = 2
  double stokes_residual_rel = 0.0; // relative to E_sigma0_far
  double error_integral = 0.0;      // bulk integral at tau = 2
  double c_lower = 0.0;             // measured min of E_hs / E_ref
  double C_upper = 0.0;             // measured max of E_hs / E_ref
  double gronwall_constant = 0.0;
};

struct AuditOptions {
  double u0 = 0.0;       // must be a lattice node of the field
  std::size_t n_leaves = 32;
};

namespace detail {

inline Jet jet_at(const ModeField &f, double x, double R) {
  const Jet2 j2 = sample_jet(f, x, R);
  Jet j;
  j.psi = j2.psi;
  j.d_u = f.tag == ChartTag::u_chart ? j2.d_x : -j2.d_x; // d/du = -d/dv
  j.d_R = j2.d_R;
  return j;
}

} // namespace detail

// Quadrature of the S_u restriction over R in [R_lo, R_hi] at fixed u.
inline double integrate_Su_segment(const ModeField &f, const CoeffB &b,
                                   const ChartParams &params, double u0,
                                   double R_lo, double R_hi) {
  if (!(R_hi > R_lo)) return 0.0;
  const std::size_t rows =
      std::max<std::size_t>(17, std::size_t((R_hi - R_lo) / f.R.dx) + 2);
  std::vector<double> vals(rows);
  const double x0 = f.tag == ChartTag::u_chart ? u0 : -u0;
  for (std::size_t k = 0; k < rows; ++k) {
    const double R = R_lo + (R_hi - R_lo) * double(k) / double(rows - 1);
    const Jet j = detail::jet_at(f, x0, R);
    const double bval = b.is_zero() ? 0.0 : b({u0, R});
    vals[k] = integrand_Su(j, {u0, R}, params, f.l, bval);
  }
  return four_pi * trapz(vals, (R_hi - R_lo) / double(rows - 1));
}

// Leaf energy E(Sigma_tau) against the printed H_s restriction and the
// positive reference density; also the bulk error density on the leaf.
struct LeafIntegrals {
  double E_hs = 0.0;
  double E_ref = 0.0;
  double bulk_density = 0.0; // d(bulk)/d tau
};

inline LeafIntegrals leaf_integrals(const ModeField &f, const CoeffB &b,
                                    const ChartParams &params, double tau,
                                    double u0) {
  LeafIntegrals out;
  const Lattice1D &xl = f.x;
  const double s = chart::s_of_tau(tau);
  // retarded-chart label of the cut: integrate u in [x_lo, u0] (u-chart) or
  // v in [-u0 ... x_hi] reflected (v-chart).
  std::vector<double> hs, ref, bulk;
  const bool uchart = f.tag == ChartTag::u_chart;
  for (std::size_t i = 0; i < xl.n_points(); ++i) {
    const double x = xl.x(i);
    const double ucoord = uchart ? x : -x;
    if (ucoord > u0 + 1e-12) continue;
    Jet j;
    ChartPoint p;
    if (s <= 0.0) {
      // scri row, imposed data
      p = {ucoord, 0.0};
      std::vector<double> row = f.row_R(0);
      Jet2 j2;
      j2.psi = row[i];
      // centered derivative along the row
      if (i == 0 || i + 1 == xl.n_points())
        j2.d_x = 0.0;
      else
        j2.d_x = (row[i + 1] - row[i - 1]) / (2.0 * xl.dx);
      j.psi = j2.psi;
      j.d_u = uchart ? j2.d_x : -j2.d_x;
      j.d_R = 0.0;
    } else {
      const LeafPoint lp = leaf_point(x, tau, f.tag, params, f.R.hi());
      if (!lp.valid)
        throw FoliationOutsideDomain("leaf tau=" + std::to_string(tau) +
                                     " leaves the lattice at x=" + std::to_string(x));
      p = lp.p;
      j = detail::jet_at(f, x, p.R);
    }
    const double bval = b.is_zero() ? 0.0 : b(p);
    double e_hs, e_ref;
    if (s <= 0.0) {
      e_hs = integrand_scri(p.u, j.psi, j.d_u, f.l, bval);
      e_ref = reference_integrand(j, {p.u, 1e-300}, params, f.l, bval);
    } else {
      e_hs = integrand_Hs(j, p, s, params, f.l, bval);
      e_ref = reference_integrand(j, p, params, f.l, bval);
    }
    // bulk density: error integrand times the identifying-field volume factor
    double vol = 0.0;
    if (s > 0.0) vol = chart::identifying_field(p, params);
    const double tb = that_b(b, p, 0.5 * f.R.dx);
    const double err = s > 0.0 ? error_integrand(j, p, params, tb) : 0.0;
    hs.push_back(e_hs);
    ref.push_back(e_ref);
    bulk.push_back(err * vol);
  }
  if (hs.size() < 2)
    throw FoliationOutsideDomain("leaf quadrature has no support in the window");
  out.E_hs = four_pi * trapz(hs, xl.dx);
  out.E_ref = four_pi * trapz(ref, xl.dx);
  out.bulk_density = four_pi * trapz(bulk, xl.dx);
  return out;
}

// Full Stokes-balance audit along the tau-foliation.
inline EnergyReport stokes_audit(const ModeField &f, const CoeffB &b,
                                 const ChartParams &params,
                                 const AuditOptions &opt) {
  EnergyReport rep;
  rep.l = f.l;
  rep.u0 = opt.u0;
  const bool uchart = f.tag == ChartTag::u_chart;
  const double x_of_u0 = uchart ? opt.u0 : -opt.u0;
  // u0 must be a lattice node so leaf quadratures nest under refinement
  const double ti = (x_of_u0 - f.x.x0) / f.x.dx;
  if (std::abs(ti - std::round(ti)) > 1e-6)
    throw ConfigError("stokes_audit: u0 must be a lattice node");
  if (!(opt.u0 < 0.0))
    throw DomainError("stokes_audit: u0 must be negative");
  const double R_sigma_u0 = chart::R_on_sigma0(opt.u0, params.m);
  if (R_sigma_u0 > f.R.hi() + 1e-14)
    throw FoliationOutsideDomain("stokes_audit: Sigma_0 leaves the lattice before u0");

  // boundary pieces
  const LeafIntegrals sigma0 = leaf_integrals(f, b, params, 0.0, opt.u0);
  rep.E_sigma0_far = sigma0.E_hs;
  const LeafIntegrals scri = leaf_integrals(f, b, params, 2.0, opt.u0);
  rep.E_scri_u0 = scri.E_hs;
  rep.E_Su0 = integrate_Su_segment(f, b, params, opt.u0, 0.0, R_sigma_u0);

  // leaf table and cumulative bulk integral (trapezoid in tau)
  rep.leaves.resize(opt.n_leaves + 1);
  double bulk_acc = 0.0;
  double prev_density = sigma0.bulk_density;
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  double gronwall = 0.0;
  for (std::size_t k = 0; k <= opt.n_leaves; ++k) {
    const double tau = 2.0 * double(k) / double(opt.n_leaves);
    LeafRow row;
    row.tau = tau;
    row.s = chart::s_of_tau(tau);
    const LeafIntegrals li =
        k == 0 ? sigma0 : (k == opt.n_leaves ? scri : leaf_integrals(f, b, params, tau, opt.u0));
    row.E_hs = li.E_hs;
    row.E_ref = li.E_ref;
    if (k > 0) {
      const double dtau = 2.0 / double(opt.n_leaves);
      bulk_acc += 0.5 * dtau * (prev_density + li.bulk_density);
    }
    prev_density = li.bulk_density;
    row.bulk_so_far = bulk_acc;
    const double R_leaf_u0 =
        row.s > 0.0 ? chart::R_of_rstar(std::abs(opt.u0) / row.s, params.m) : 0.0;
    row.E_S_partial =
        integrate_Su_segment(f, b, params, opt.u0, R_leaf_u0, R_sigma_u0);
    row.residual =
        std::abs(row.E_hs + row.E_S_partial - rep.E_sigma0_far - row.bulk_so_far);
    if (li.E_ref > 0.0) {
      const double ratio = li.E_hs / li.E_ref;
      cmin = std::min(cmin, ratio);
      cmax = std::max(cmax, ratio);
    }
    if (tau > 0.0 && rep.E_sigma0_far > 0.0 && li.E_hs > 0.0)
      gronwall = std::max(gronwall, std::log(li.E_hs / rep.E_sigma0_far) / tau);
    rep.leaves[k] = row;
  }
  rep.error_integral = bulk_acc;
  rep.stokes_residual = rep.leaves.back().residual;
  rep.stokes_residual_rel =
      rep.E_sigma0_far > 0.0 ? rep.stokes_residual / rep.E_sigma0_far : 0.0;
  rep.c_lower = cmin;
  rep.C_upper = cmax;
  rep.gronwall_constant = std::max(0.0, gronwall);
  return rep;
}

// sup over tau-leaves of the reference slice energy; the Picard iteration
// norm. Falls back to a column norm when no leaf fits the lattice.
inline std::function<double(const ModeField &)>
make_sup_leaf_norm(const ChartParams &params, std::size_t n_leaves = 9) {
  return [params, n_leaves](const ModeField &f) -> double {
    double best = 0.0;
    bool any = false;
    for (std::size_t k = 1; k + 1 <= n_leaves; ++k) {
      const double tau = 2.0 * double(k) / double(n_leaves);
      const double s = chart::s_of_tau(tau);
      std::vector<double> vals;
      for (std::size_t i = 0; i < f.x.n_points(); ++i) {
        const double x = f.x.x(i);
        const LeafPoint lp = leaf_point(x, tau, f.tag, params, f.R.hi());
        if (!lp.valid) continue;
        const Jet j = detail::jet_at(f, x, lp.p.R);
        vals.push_back(reference_integrand(j, lp.p, params, f.l, 0.0));
      }
      if (vals.size() < 8) continue;
      any = true;
      best = std::max(best, four_pi * trapz(vals, f.x.dx));
      (void)s;
    }
    if (!any) {
      double c = 0.0;
      const std::size_t nR = f.R.n_points();
      std::vector<double> col(nR), d;
      for (std::size_t i = 0; i < f.x.n_points(); ++i) {
        for (std::size_t j = 0; j < nR; ++j) col[j] = f.at(i, j);
        diff_centered(col, f.R.dx, d);
        double s2 = 0.0;
        for (std::size_t j = 0; j < nR; ++j) s2 += col[j] * col[j] + d[j] * d[j];
        c = std::max(c, s2 * f.R.dx);
      }
      return std::sqrt(c);
    }
    return std::sqrt(best);
  };
}

} // namespace scri::energy

#endif
