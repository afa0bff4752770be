#ifndef SCRI_SCATTER_SCATTER_HPP
#define SCRI_SCATTER_SCATTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "scri_scatter/cauchy.hpp"
#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/energy.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/fields.hpp"
#include "scri_scatter/nullgrid.hpp"

namespace scri::scatter {

using chart::ChartParams;
using coeff::CoeffB;

// Trace operators between Sigma_0 and the conformal boundaries, and the
// scattering operator S = T_0^+ o T_-^0.
//
// Scri-minus profiles are stored in the reflected parametrization (as
// functions of -v), so the time-reflection isometry realizes the past
// operators with no extra relabeling: T_-^0 = mirror o T_+^0 and
// T_0^- = T_0^+ o mirror.

struct PipelineConfig {
  Lattice1D x;       // profile window, symmetric about 0
  Lattice1D R_null;  // Goursat rectangle radial lattice, [0, R_max]
  Lattice1D rstar;   // Cauchy lattice [r*_w, r*_hi], r*_w = r*(R_max)
  double rstar_E = 0.0; // extraction radius, a Cauchy lattice node
  Lattice1D strip_R;    // transport strip [0, R(r*_E)]
  double u_c = 0.0;     // extraction cone, >= -r*_E, an x lattice node
  double u_c_shift_cells = 8.0; // second cone for the consistency check
  double extraction_tol = 5e-2;
  bool check_extraction = true;
  nullgrid::GoursatOptions gopt;
  cauchy::CauchyConfig ccfg;
  double support_floor = 1e-12; // relative floor for support detection
  double route_margin = 2.0;    // margin around u = -r*_w for route choice
  // small-data gate for nonlinear runs
  bool apply_picard_gate = true;
  double picard_gate = 0.9;
  std::size_t picard_max_iter = 30;
  double picard_tol = 1e-9;

  void validate(const ChartParams &params) const {
    params.validate();
    if (!x.symmetric())
      throw ConfigError("pipeline: profile window must be symmetric about 0");
    const double rw = chart::rstar_of_R(R_null.hi(), params.m);
    if (std::abs(rstar.lo() - rw) > 1e-8 * (1.0 + std::abs(rw)))
      throw ConfigError("pipeline: rstar.lo must equal r*(R_max)");
    const double tE = (rstar_E - rstar.x0) / rstar.dx;
    if (std::abs(tE - std::round(tE)) > 1e-8)
      throw ConfigError("pipeline: rstar_E must be a Cauchy lattice node");
    const double RE = chart::R_of_rstar(rstar_E, params.m);
    if (std::abs(strip_R.hi() - RE) > 1e-8 * (1.0 + RE))
      throw ConfigError("pipeline: strip_R.hi must equal R(rstar_E)");
    if (strip_R.x0 != 0.0) throw ConfigError("pipeline: strip starts at R = 0");
    if (u_c < -rstar_E)
      throw ConfigError("pipeline: extraction cone dips below t = 0");
    const double tc = (u_c - x.x0) / x.dx;
    if (std::abs(tc - std::round(tc)) > 1e-8)
      throw ConfigError("pipeline: u_c must be an x lattice node");
  }
};

namespace detail {

inline void detect_support(ScriProfile &p, double floor_rel) {
  double mx = 0.0;
  for (double v : p.values) mx = std::max(mx, std::abs(v));
  const double floor = std::max(mx * floor_rel, 1e-300);
  std::size_t lo = p.values.size(), hi = 0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (std::abs(p.values[i]) > floor) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  if (mx == 0.0 || lo > hi) {
    p.support_lo = p.x.x(1);
    p.support_hi = p.x.x(2);
    return;
  }
  lo = lo > 3 ? lo - 3 : 1;
  hi = hi + 3 < p.x.n_cells ? hi + 3 : p.x.n_cells - 1;
  for (std::size_t i = 0; i < p.values.size(); ++i)
    if (i < lo || i > hi) p.values[i] = 0.0;
  p.support_lo = p.x.x(lo);
  p.support_hi = p.x.x(hi);
}

} // namespace detail

inline ModeField reflect_field(const ModeField &f) {
  if (!f.x.symmetric())
    throw DomainError("reflect_field: lattice must be symmetric");
  ModeField g(f.l,
              f.tag == ChartTag::u_chart ? ChartTag::v_chart : ChartTag::u_chart,
              f.x, f.R);
  const std::size_t nx = f.x.n_points();
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < f.R.n_points(); ++j)
      g.at(i, j) = f.at(nx - 1 - i, j);
  return g;
}

// Sigma_0 read from a retarded-chart field: point (u = -r*, R(r*)).
inline SigmaData sigma_from_field(const ModeField &f, const ChartParams &params,
                                  const Lattice1D &rs_out) {
  if (f.tag != ChartTag::u_chart)
    throw DomainError("sigma_from_field: expects a retarded-chart field");
  SigmaData d(f.l, rs_out);
  d.dtheta.assign(rs_out.n_points(), 0.0);
  const double pad = 2.0 * f.x.dx;
  for (std::size_t k = 0; k < rs_out.n_points(); ++k) {
    const double rs = rs_out.x(k);
    const double u = -rs;
    const double R = chart::R_of_rstar(rs, params.m);
    if (u < f.x.lo() + pad || u > f.x.hi() - pad || R > f.R.hi() * (1.0 + 1e-12))
      continue;
    const Jet2 j = sample_jet(f, u, std::min(R, f.R.hi()));
    const double K = R * R * (1.0 - 2.0 * params.m * R);
    const double one_uR = 1.0 + u * R;
    d.theta[k] = j.psi;
    d.dtheta[k] = -j.d_x - K * j.d_R;
    d.xi[k] = u * u * j.d_x - 2.0 * one_uR * j.d_R;
  }
  return d;
}

// Direct Sigma_0 read from an advanced-chart field with the That formula
// expressed in (v, R) derivatives; used as the second path of the mirror
// identity check.
inline SigmaData sigma_from_field_vchart(const ModeField &f,
                                         const ChartParams &params,
                                         const Lattice1D &rs_out) {
  if (f.tag != ChartTag::v_chart)
    throw DomainError("sigma_from_field_vchart: expects an advanced-chart field");
  SigmaData d(f.l, rs_out);
  d.dtheta.assign(rs_out.n_points(), 0.0);
  const double pad = 2.0 * f.x.dx;
  for (std::size_t k = 0; k < rs_out.n_points(); ++k) {
    const double rs = rs_out.x(k);
    const double v = rs; // Sigma_0 is {v = r*}
    const double R = chart::R_of_rstar(rs, params.m);
    if (v < f.x.lo() + pad || v > f.x.hi() - pad || R > f.R.hi() * (1.0 + 1e-12))
      continue;
    const Jet2 j = sample_jet(f, v, std::min(R, f.R.hi()));
    const double K = R * R * (1.0 - 2.0 * params.m * R);
    const double u = -rs;
    const double one_uR = 1.0 + u * R;
    d.theta[k] = j.psi;
    d.dtheta[k] = j.d_x - K * j.d_R;
    d.xi[k] = (u * u + 4.0 * one_uR / K) * j.d_x - 2.0 * one_uR * j.d_R;
  }
  return d;
}

// T_+^0: scri-plus profile to Sigma_0 data, by backward Goursat development.
// Early profiles (supported before the worldtube's retarded window) use the
// free characteristic solve; late profiles route through the strip
// transport and a driven backward evolution of the wall region.
inline SigmaData trace_T_plus_0(const ScriProfile &theta, const CoeffB &b,
                                const ChartParams &params,
                                const PipelineConfig &cfg) {
  cfg.validate(params);
  if (theta.tag != ChartTag::u_chart)
    throw DomainError("trace_T_plus_0: expects a scri-plus profile");
  const double rw = cfg.rstar.lo();
  const double u_sigma_max = -rw;

  if (theta.support_hi < u_sigma_max - cfg.route_margin) {
    nullgrid::GoursatOptions gopt = cfg.gopt;
    ModeField f = nullgrid::solve_goursat(theta, nullgrid::Direction::past, b,
                                          params, cfg.R_null, gopt);
    SigmaData d = sigma_from_field(f, params, cfg.rstar);
    d.l = theta.l;
    return d;
  }

  // late route: free transport in the strip, then un-develop the wall region
  nullgrid::GoursatOptions gopt = cfg.gopt;
  gopt.worldtube_tol = -1.0; // strip top row is interior, not the worldtube
  ModeField strip = nullgrid::solve_goursat(theta, nullgrid::Direction::past, b,
                                            params, cfg.strip_R, gopt);
  nullgrid::WorldtubeSeries series =
      nullgrid::series_from_field(strip, theta, b, params);

  const std::size_t iE =
      std::size_t(std::round((cfg.rstar_E - cfg.rstar.x0) / cfg.rstar.dx));
  Lattice1D back_lat(cfg.rstar.lo(), cfg.rstar_E, iE);
  const double t_max = series.x.hi() + cfg.rstar_E;
  cauchy::CauchyConfig ccfg = cfg.ccfg;
  cauchy::CauchyState back = cauchy::solve_backward_driven(
      theta.l, b, params, back_lat, series.x, series.psi, t_max, ccfg);

  SigmaData d(theta.l, cfg.rstar);
  SigmaData inner = cauchy_to_sigma(theta.l, back_lat, back.psi, back.pi, params.m);
  SigmaData outer = sigma_from_field(strip, params, cfg.rstar);
  d.dtheta.assign(cfg.rstar.n_points(), 0.0);
  for (std::size_t k = 0; k < cfg.rstar.n_points(); ++k) {
    if (k <= iE) {
      d.theta[k] = inner.theta[k];
      d.xi[k] = inner.xi[k];
      d.dtheta[k] = inner.dtheta[k];
    } else {
      d.theta[k] = outer.theta[k];
      d.xi[k] = outer.xi[k];
      d.dtheta[k] = outer.dtheta[k];
    }
  }
  return d;
}

// T_-^0 via the static isometry.
inline SigmaData trace_T_minus_0(const ScriProfile &theta_minus, const CoeffB &b,
                                 const ChartParams &params,
                                 const PipelineConfig &cfg) {
  return mirror(trace_T_plus_0(theta_minus, b, params, cfg), params.m);
}

namespace detail {

struct TransportResult {
  ScriProfile trace;
  ModeField strip;
};

inline TransportResult run_transport(const nullgrid::WorldtubeSeries &series,
                                     const cauchy::ConeData &cone, int l,
                                     const CoeffB &b, const ChartParams &params,
                                     const PipelineConfig &cfg) {
  TransportResult out;
  out.strip = nullgrid::transport_to_scri(series, cone.psi, l, b, params,
                                          cfg.strip_R, cfg.gopt);
  ScriProfile tr(l, ChartTag::u_chart, cfg.x);
  for (std::size_t i = 0; i < cfg.x.n_points(); ++i) {
    const double u = cfg.x.x(i);
    if (u < series.x.lo() || u > series.x.hi()) continue;
    tr.values[i] = interp_cubic(series.x.x0, series.x.dx,
                                out.strip.row_R(0), u);
  }
  detect_support(tr, cfg.support_floor);
  out.trace = tr;
  return out;
}

} // namespace detail

// T_0^+: Sigma_0 data to the scri-plus trace, by Cauchy evolution, cone +
// worldtube-series extraction, and characteristic transport to R = 0.
inline ScriProfile trace_T0_plus(const SigmaData &data, const CoeffB &b,
                                 const ChartParams &params,
                                 const PipelineConfig &cfg) {
  cfg.validate(params);
  if (data.rstar.n_points() != cfg.rstar.n_points() ||
      std::abs(data.rstar.x0 - cfg.rstar.x0) > 1e-10)
    throw DomainError("trace_T0_plus: data must live on the pipeline lattice");

  CauchyPair pair = sigma_to_cauchy(data, params.m);
  cauchy::CauchyState init(data.l, cfg.rstar);
  init.psi = pair.psi;
  init.pi = pair.pi;

  // transport window [u_c, x.hi]
  const std::size_t nc =
      std::size_t(std::round((cfg.x.hi() - cfg.u_c) / cfg.x.dx));
  Lattice1D trace_lat(cfg.u_c, cfg.x.hi(), nc);
  cauchy::ExtractionPlan planA{cfg.u_c, cfg.rstar_E, trace_lat, cfg.strip_R};

  const double u_c_alt = cfg.u_c - cfg.u_c_shift_cells * cfg.x.dx;
  const std::size_t nc2 =
      std::size_t(std::round((cfg.x.hi() - u_c_alt) / cfg.x.dx));
  Lattice1D trace_lat2(u_c_alt, cfg.x.hi(), nc2);
  cauchy::ExtractionPlan planB{u_c_alt, cfg.rstar_E, trace_lat2, cfg.strip_R};

  std::vector<cauchy::ProbeTarget> targets =
      cauchy::make_extraction_targets(planA, params, cfg.rstar);
  const std::size_t nA = targets.size();
  std::vector<cauchy::ProbeTarget> tB;
  if (cfg.check_extraction) {
    tB = cauchy::make_extraction_targets(planB, params, cfg.rstar);
    targets.insert(targets.end(), tB.begin(), tB.end());
  }

  double t_end = 0.0;
  for (const auto &t : targets) t_end = std::max(t_end, t.t);
  t_end += 8.0 * cfg.ccfg.cfl * cfg.rstar.dx;

  cauchy::CauchyHistory hist(targets);
  cauchy::evolve_cauchy(init, b, params, t_end, cfg.ccfg, &hist);

  // split the probe results back into the two plans
  cauchy::ExtractionRecord recA =
      cauchy::collect_extraction_indexed(hist, planA, params, cfg.rstar, 0);
  detail::TransportResult resA =
      detail::run_transport(recA.series, recA.cone, data.l, b, params, cfg);

  if (cfg.check_extraction) {
    cauchy::ExtractionRecord recB =
        cauchy::collect_extraction_indexed(hist, planB, params, cfg.rstar, nA);
    detail::TransportResult resB =
        detail::run_transport(recB.series, recB.cone, data.l, b, params, cfg);
    const double na = energy::h1_scri_norm(resA.trace);
    const double diff = energy::h1_scri_dist(resA.trace, resB.trace);
    if (na > 0.0 && diff > cfg.extraction_tol * na)
      throw ExtractionInconsistency(
          "trace_T0_plus: traces from cones u_c = " + std::to_string(cfg.u_c) +
          " and " + std::to_string(u_c_alt) + " disagree by " +
          std::to_string(diff / na) + " (relative H1)");
  }
  return resA.trace;
}

// T_0^-: Sigma_0 data to the (reflected-parametrization) scri-minus trace.
inline ScriProfile trace_T0_minus(const SigmaData &data, const CoeffB &b,
                                  const ChartParams &params,
                                  const PipelineConfig &cfg) {
  ScriProfile p = trace_T0_plus(mirror(data, params.m), b, params, cfg);
  p.tag = ChartTag::v_chart;
  return p;
}

struct ScatterDiagnostics {
  nullgrid::PicardReport gate;
  bool gate_ran = false;
};

// Small-data gate: the Picard recursion on the input data must contract.
inline void apply_picard_gate(const ScriProfile &theta, const CoeffB &b,
                              const ChartParams &params,
                              const PipelineConfig &cfg,
                              ScatterDiagnostics *diag) {
  if (b.is_zero() || !cfg.apply_picard_gate) return;
  ScriProfile th = theta;
  th.tag = ChartTag::u_chart;
  auto [field, rep] =
      nullgrid::picard_solve(th, nullgrid::Direction::past, b, params,
                             cfg.strip_R, cfg.picard_max_iter, cfg.picard_tol,
                             cfg.gopt, energy::make_sup_leaf_norm(params));
  (void)field;
  if (diag) {
    diag->gate = rep;
    diag->gate_ran = true;
  }
  if (!rep.converged || rep.final_ratio >= cfg.picard_gate)
    throw NoContraction(
        "scattering operator refused: Picard contraction ratio " +
        std::to_string(rep.final_ratio) + " >= gate " +
        std::to_string(cfg.picard_gate));
}

// S = T_0^+ o T_-^0.
inline ScriProfile scattering_operator(const ScriProfile &theta_minus,
                                       const CoeffB &b, const ChartParams &params,
                                       const PipelineConfig &cfg,
                                       ScatterDiagnostics *diag = nullptr) {
  if (theta_minus.tag != ChartTag::v_chart)
    throw DomainError("scattering_operator: input must be a scri-minus profile");
  ScriProfile th = theta_minus;
  th.tag = ChartTag::u_chart; // reflected parametrization shares the lattice
  apply_picard_gate(th, b, params, cfg, diag);
  SigmaData d = trace_T_minus_0(th, b, params, cfg);
  return trace_T0_plus(d, b, params, cfg);
}

// S^{-1} = T_0^- o T_+^0.
inline ScriProfile scattering_inverse(const ScriProfile &theta_plus,
                                      const CoeffB &b, const ChartParams &params,
                                      const PipelineConfig &cfg,
                                      ScatterDiagnostics *diag = nullptr) {
  if (theta_plus.tag != ChartTag::u_chart)
    throw DomainError("scattering_inverse: input must be a scri-plus profile");
  if (diag) diag->gate_ran = false;
  SigmaData d = trace_T_plus_0(theta_plus, b, params, cfg);
  ScriProfile out = trace_T0_minus(d, b, params, cfg);
  return out;
}

} // namespace scri::scatter

#endif
