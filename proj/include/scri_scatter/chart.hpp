#ifndef SCRI_SCATTER_CHART_HPP
#define SCRI_SCATTER_CHART_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "scri_scatter/errors.hpp"
#include "scri_scatter/numerics.hpp"

namespace scri::chart {

// Exterior Schwarzschild geometry in the compactified characteristic chart
// (u, R) with conformal factor Omega = R, and the standard (t, r*) chart.
// Conformal metric: ghat = R^2(1-2mR) du^2 - 2 du dR - dOmega^2.

struct ChartParams {
  double m = 1.0;      // mass
  double u_min = -200; // retarded-time window
  double u_max = -100;
  double R_max = 0.012; // inner worldtube coordinate
  double eps = 0.1;     // epsilon of the coordinate-decay bounds
  double u0 = -100;     // negative cutoff retarded time, |u0| large

  void validate() const {
    if (m < 0) throw ConfigError("ChartParams: m must be >= 0");
    if (!(R_max > 0)) throw ConfigError("ChartParams: R_max must be > 0");
    if (m > 0 && !(R_max * 2.0 * m < 1.0))
      throw ConfigError("ChartParams: worldtube must stay outside r = 2m (R_max*2m < 1)");
    if (!(eps > 0 && eps < 1)) throw ConfigError("ChartParams: eps in (0,1)");
    if (!(u_min < u_max)) throw ConfigError("ChartParams: u_min < u_max required");
    if (!(u0 < 0)) throw ConfigError("ChartParams: u0 must be negative");
  }
};

struct ChartPoint {
  double u = 0.0;
  double R = 0.0;
};

// Tortoise coordinate r* = r + 2m log(r - 2m).
inline double rstar_of_r(double r, double m) {
  if (m == 0.0) return r;
  if (!(r > 2.0 * m)) throw DomainError("rstar_of_r: requires r > 2m");
  return r + 2.0 * m * std::log(r - 2.0 * m);
}

// Inverse of rstar_of_r by bracketed bisection with Newton polish.
inline double r_of_rstar(double rstar, double m, double rel_tol = 1e-13) {
  if (m == 0.0) return rstar;
  auto f = [&](double r) { return rstar_of_r(r, m) - rstar; };
  auto fp = [&](double r) { return r / (r - 2.0 * m); }; // dr*/dr = 1/F
  double lo = 2.0 * m * (1.0 + 1e-14);
  double hi = std::max(rstar, 4.0 * m);
  while (f(hi) < 0.0) hi *= 2.0;
  // bring lo to a finite negative value of f
  while (f(lo) > 0.0) lo = 2.0 * m + 0.5 * (lo - 2.0 * m);
  return solve_bracketed(f, fp, lo, hi, rel_tol);
}

inline double rstar_of_R(double R, double m) {
  if (!(R > 0)) throw DomainError("rstar_of_R: requires R > 0");
  return rstar_of_r(1.0 / R, m);
}

inline double R_of_rstar(double rstar, double m) {
  return 1.0 / r_of_rstar(rstar, m);
}

// R on the Cauchy slice Sigma_0 = {t=0} at retarded time u < 0: r*(R) = -u.
inline double R_on_sigma0(double u, double m) {
  if (!(u < 0)) throw DomainError("R_on_sigma0: requires u < 0");
  return R_of_rstar(-u, m);
}

struct MetricComponents {
  double guu; // R^2 (1 - 2mR)
  double guR; // -1
  double angular_scale; // unit sphere block
};

struct InverseMetricComponents {
  // Coefficients of the inverse in operator form: -2 d_u d_R - R^2(1-2mR) d_R^2.
  double uR_op; // -2
  double RR;    // -R^2 (1 - 2mR)
};

inline MetricComponents metric_components(const ChartPoint &p,
                                          const ChartParams &params) {
  const double K = p.R * p.R * (1.0 - 2.0 * params.m * p.R);
  return {K, -1.0, 1.0};
}

inline InverseMetricComponents inverse_metric_components(const ChartPoint &p,
                                                         const ChartParams &params) {
  const double K = p.R * p.R * (1.0 - 2.0 * params.m * p.R);
  return {-2.0, -K};
}

// Morawetz vector That = u^2 d_u - 2(1+uR) d_R.
struct MorawetzVector {
  double comp_u;
  double comp_R;
};

inline MorawetzVector morawetz_vector(const ChartPoint &p) {
  return {p.u * p.u, -2.0 * (1.0 + p.u * p.R)};
}

// ghat(That, That) = u^2 ( 4(1+uR) + u^2 R^2 (1-2mR) ).
inline double morawetz_norm_sq(const ChartPoint &p, const ChartParams &params) {
  const double uR = p.u * p.R;
  const double K = p.R * p.R * (1.0 - 2.0 * params.m * p.R);
  return p.u * p.u * (4.0 * (1.0 + uR) + p.u * p.u * K);
}

// (1/6) Scal_ghat = 2 m R.
inline double curvature_term(const ChartPoint &p, const ChartParams &params) {
  return 2.0 * params.m * p.R;
}

// Foliation reparametrization tau(s) = -2(sqrt(s) - 1), s in [0,1].
inline double tau_of_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("tau_of_s: s outside [0,1]");
  return -2.0 * (std::sqrt(s) - 1.0);
}

inline double s_of_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 2.0)) throw DomainError("s_of_tau: tau outside [0,2]");
  const double q = 1.0 - 0.5 * tau;
  return q * q;
}

// Magnitude of the identifying field's d_R coefficient,
// (r* R)^{3/2} (1-2mR) sqrt(R/|u|).  The tau-increasing flow (Sigma_0 toward
// scri) moves along -d_R, so d tau/d lambda = +1 when dR/d lambda = -speed.
inline double identifying_field(const ChartPoint &p, const ChartParams &params) {
  if (p.R == 0.0) return 0.0;
  if (!(p.u < 0.0) || !(p.R > 0.0))
    throw DomainError("identifying_field: requires u < 0 and R >= 0");
  const double rs = rstar_of_R(p.R, params.m);
  const double F = 1.0 - 2.0 * params.m * p.R;
  return std::pow(rs * p.R, 1.5) * F * std::sqrt(p.R / std::abs(p.u));
}

// s = |u| / r*(R), defined on {u < 0, R > 0, t >= 0 side gives s < 1}.
inline double s_of_point(const ChartPoint &p, const ChartParams &params) {
  return std::abs(p.u) / rstar_of_R(p.R, params.m);
}

struct AuditRow {
  std::string name;
  double min_value;
  double max_value;
  double bound_lo; // admissible range
  double bound_hi;
  bool pass;
  ChartPoint witness; // worst offender
};

struct ChartAuditReport {
  bool pass = false;
  std::vector<AuditRow> rows;
  double morawetz_min = 0.0;
  double morawetz_floor = 0.0; // 4 u0^2 eps
  bool morawetz_pass = false;
  bool eps_root_criterion = false; // 2/(1+sqrt(eps)) >= 1+eps
  bool c_eps_positive = false;     // 1 - 2 eps - eps^2 > 0
};

struct SamplingSpec {
  std::size_t n_u = 64;
  std::size_t n_R = 64;
};

// Scans the coordinate-decay bounds and the Morawetz floor on
// {u <= u0} x {0 < R <= R_max} intersected with {t >= 0}.
inline ChartAuditReport chart_audit(const ChartParams &params,
                                    const SamplingSpec &grid = {}) {
  params.validate();
  ChartAuditReport rep;
  const double eps = params.eps;

  struct Acc {
    double mn = 1e300, mx = -1e300;
    ChartPoint wit{};
    void add(double v, const ChartPoint &p, double lo, double hi) {
      if (v < mn) mn = v;
      if (v > mx) {
        mx = v;
        wit = p; // the upper bound is the binding one for every row here
      }
      (void)lo; (void)hi;
    }
  };
  Acc ratio_rstar_r, ratio_Rrstar, ratio_Ru, ratio_F, ratio_s;
  double mor_min = 1e300;
  ChartPoint mor_wit{};

  const double u_lo = params.u_min;
  const double u_hi = params.u0;
  if (!(u_lo < u_hi))
    throw DomainError("chart_audit: need u_min < u0");
  for (std::size_t i = 0; i <= grid.n_u; ++i) {
    const double u = u_lo + (u_hi - u_lo) * double(i) / double(grid.n_u);
    // t >= 0 bounds R by the Sigma_0 curve; stay strictly inside so the
    // boundary equalities (s = 1 on Sigma_0) do not trip the strict bounds
    double R_cap = params.R_max;
    {
      const double R_sigma = R_on_sigma0(u, params.m);
      R_cap = std::min(R_cap, R_sigma * (1.0 - 1e-9));
    }
    for (std::size_t j = 1; j <= grid.n_R; ++j) {
      const double R = R_cap * double(j) / double(grid.n_R);
      const ChartPoint p{u, R};
      const double rs = rstar_of_R(R, params.m);
      const double r = 1.0 / R;
      ratio_rstar_r.add(rs / r, p, 1.0, 1.0 + eps);
      ratio_Rrstar.add(R * rs, p, 1.0, 1.0 + eps);
      ratio_Ru.add(R * std::abs(u), p, 0.0, 1.0 + eps);
      ratio_F.add(1.0 - 2.0 * params.m * R, p, 1.0 - eps, 1.0);
      ratio_s.add(std::abs(u) / rs, p, 0.0, 1.0);
      const double q = morawetz_norm_sq(p, params);
      if (q < mor_min) { mor_min = q; mor_wit = p; }
    }
  }

  auto push = [&](const char *name, Acc &a, double lo, double hi,
                  bool lo_strict_only_positive = false) {
    AuditRow row;
    row.name = name;
    row.min_value = a.mn;
    row.max_value = a.mx;
    row.bound_lo = lo;
    row.bound_hi = hi;
    row.witness = a.wit;
    const double slack = 1e-12 * std::max(1.0, std::abs(lo));
    const bool lo_ok = lo_strict_only_positive ? (a.mn > lo) : (a.mn >= lo - slack);
    row.pass = lo_ok && a.mx <= hi + 1e-12 * std::max(1.0, std::abs(hi));
    rep.rows.push_back(row);
  };
  // m = 0 degenerates r*/r and Rr* to exactly 1; treat the lower bound as
  // inclusive there (the lemma's strict "1 <" is the massive case).
  const double lo1 = 1.0;
  push("rstar_over_r", ratio_rstar_r, lo1, 1.0 + eps);
  push("R_rstar", ratio_Rrstar, lo1, 1.0 + eps);
  push("R_abs_u", ratio_Ru, 0.0, 1.0 + eps, true);
  push("one_minus_2mR", ratio_F, 1.0 - eps, 1.0);
  push("s", ratio_s, 0.0, 1.0, true);

  rep.morawetz_min = mor_min;
  rep.morawetz_floor = 4.0 * params.u0 * params.u0 * eps;
  rep.morawetz_pass = mor_min >= rep.morawetz_floor;
  rep.eps_root_criterion = 2.0 / (1.0 + std::sqrt(eps)) >= 1.0 + eps;
  rep.c_eps_positive = 1.0 - 2.0 * eps - eps * eps > 0.0;

  rep.pass = rep.morawetz_pass && rep.eps_root_criterion && rep.c_eps_positive;
  for (const auto &r : rep.rows) rep.pass = rep.pass && r.pass;
  return rep;
}

} // namespace scri::chart

#endif
