#ifndef SCRI_SCATTER_CAUCHY_HPP
#define SCRI_SCATTER_CAUCHY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/fields.hpp"
#include "scri_scatter/nullgrid.hpp"

namespace scri::cauchy {

using chart::ChartParams;
using coeff::CoeffB;

// Leapfrog solver for the mode equation in the (t, r*) chart:
//   psi_tt - psi_xx + F ( l(l+1)/r^2 + 2m/r^3 ) psi + F b R^2 psi^3 = 0,
// with psi = r phi and F = 1 - 2m/r. Dirichlet zero at both ends; the inner
// end is the worldtube wall when reflect mode is on, otherwise an artificial
// edge protected by the support monitor.

struct CauchyState {
  int l = 0;
  Lattice1D rstar;
  std::vector<double> psi;
  std::vector<double> pi;
  double t = 0.0;

  CauchyState() = default;
  CauchyState(int l_, const Lattice1D &rs)
      : l(l_), rstar(rs), psi(rs.n_points(), 0.0), pi(rs.n_points(), 0.0) {}
};

enum class InnerBoundary { vacuum, reflect };

struct CauchyConfig {
  double cfl = 0.5; // dt = cfl * dr*, per the lattice invariant dt <= 0.5 dr*
  InnerBoundary inner = InnerBoundary::vacuum;
  double support_tol = 1e-13;
  std::size_t guard_cells = 5;
  bool monitor = true;
  double cap = 1e6;
};

inline void flip_pi(CauchyState &s) {
  for (double &p : s.pi) p = -p;
}

namespace detail {

struct Potentials {
  std::vector<double> V;  // F (l(l+1) R^2 + 2 m R^3)
  std::vector<double> Cb; // F b R^2
};

inline Potentials make_potentials(int l, const CoeffB &b, const ChartParams &params,
                                  const Lattice1D &rs) {
  Potentials pot;
  if (!b.is_zero() && !b.static_in_time)
    throw ConfigError("cauchy solver: b must be static in time");
  const std::size_t n = rs.n_points();
  pot.V.resize(n);
  pot.Cb.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double R = chart::R_of_rstar(rs.x(j), params.m);
    const double F = 1.0 - 2.0 * params.m * R;
    pot.V[j] = F * (double(l) * double(l + 1) * R * R + 2.0 * params.m * R * R * R);
    if (!b.is_zero()) pot.Cb[j] = F * b({0.0, R}) * R * R;
  }
  return pot;
}

inline void check_support(const CauchyState &s, const CauchyConfig &cfg,
                          bool check_inner, double t) {
  if (!cfg.monitor) return;
  const std::size_t n = s.psi.size();
  const std::size_t g = std::min(cfg.guard_cells, n / 4);
  auto scan = [&](std::size_t lo, std::size_t hi, const char *which) {
    for (std::size_t j = lo; j < hi; ++j)
      if (std::abs(s.psi[j]) > cfg.support_tol || std::abs(s.pi[j]) > cfg.support_tol)
        throw BoundaryContamination(std::string("cauchy support monitor: field at ") +
                                    which + " boundary, t = " + std::to_string(t));
  };
  if (check_inner) scan(1, 1 + g, "inner");
  scan(n - 1 - g, n - 1, "outer");
}

} // namespace detail

// One probe: field value and first derivatives at an off-lattice (t, r*)
// point, captured from a 4x4 space-time patch during evolution.
struct ProbeTarget {
  double t = 0.0;
  double x = 0.0;
};

struct ProbeResult {
  double psi = 0.0;
  double psi_t = 0.0;
  double psi_x = 0.0;
  bool captured = false;
};

// Compressed history of a Cauchy evolution: 4x4 Lagrange patches around a
// preregistered list of space-time targets.
class CauchyHistory {
public:
  CauchyHistory() = default;
  explicit CauchyHistory(std::vector<ProbeTarget> targets)
      : targets_(std::move(targets)), patches_(targets_.size()) {
    order_.resize(targets_.size());
    std::iota(order_.begin(), order_.end(), std::size_t(0));
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return targets_[a].t < targets_[b].t;
    });
  }

  std::size_t size() const { return targets_.size(); }
  const ProbeTarget &target(std::size_t i) const { return targets_[i]; }

  ProbeResult eval(std::size_t i) const {
    const Patch &p = patches_[i];
    ProbeResult r;
    if (!p.captured) return r;
    double wt[4], dwt[4], wx[4], dwx[4];
    scri::detail::lagrange4_weights((targets_[i].t - p.t0) / p.dt, 0.0, wt, dwt);
    scri::detail::lagrange4_weights((targets_[i].x - p.x0) / p.dx, 0.0, wx, dwx);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double y = p.vals[a][b];
        r.psi += wt[a] * wx[b] * y;
        r.psi_t += dwt[a] * wx[b] * y;
        r.psi_x += wt[a] * dwx[b] * y;
      }
    r.psi_t /= p.dt;
    r.psi_x /= p.dx;
    r.captured = true;
    return r;
  }

  // Called by the evolution loop after each accepted level.
  void on_level(double t_new, double dt, const Lattice1D &rs,
                const std::vector<double> *ring[4], int levels_filled) {
    if (levels_filled < 4) return;
    while (cursor_ < order_.size()) {
      const std::size_t id = order_[cursor_];
      const double tt = targets_[id].t;
      // capture once t_{n-1} >= tt, window [n-3, n]
      if (t_new - dt < tt - 1e-12 * std::max(1.0, std::abs(tt))) break;
      capture(id, t_new, dt, rs, ring);
      ++cursor_;
    }
  }

  void finalize(double t_end, double dt, const Lattice1D &rs,
                const std::vector<double> *ring[4], int levels_filled) {
    while (cursor_ < order_.size()) {
      const std::size_t id = order_[cursor_];
      if (targets_[id].t > t_end + 1e-9 * std::max(1.0, std::abs(t_end)) ||
          levels_filled < 4)
        throw ConeOutsideDomain("probe target at t = " +
                                std::to_string(targets_[id].t) +
                                " outside the computed history");
      capture(id, t_end, dt, rs, ring);
      ++cursor_;
    }
  }

private:
  struct Patch {
    double t0 = 0, dt = 1, x0 = 0, dx = 1;
    double vals[4][4] = {};
    bool captured = false;
  };

  void capture(std::size_t id, double t_new, double dt, const Lattice1D &rs,
               const std::vector<double> *ring[4]) {
    Patch &p = patches_[id];
    const double x = targets_[id].x;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rs.n_points());
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor((x - rs.x0) / rs.dx)) - 1;
    k = std::max<std::ptrdiff_t>(0, std::min(k, n - 4));
    p.t0 = t_new - 3.0 * dt;
    p.dt = dt;
    p.x0 = rs.x(std::size_t(k));
    p.dx = rs.dx;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) p.vals[a][b] = (*ring[a])[std::size_t(k + b)];
    p.captured = true;
  }

  std::vector<ProbeTarget> targets_;
  std::vector<Patch> patches_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

// Advances the state to t_end (dt adjusted to divide the interval exactly).
// Probes, when supplied, are captured along the way.
inline CauchyState evolve_cauchy(const CauchyState &initial, const CoeffB &b,
                                 const ChartParams &params, double t_end,
                                 const CauchyConfig &cfg = {},
                                 CauchyHistory *history = nullptr) {
  const Lattice1D &rs = initial.rstar;
  const std::size_t n = rs.n_points();
  if (n < 8) throw ConfigError("evolve_cauchy: lattice too small");
  const double span = t_end - initial.t;
  if (!(span > 0)) throw ConfigError("evolve_cauchy: t_end must exceed state time");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5))
    throw CFLViolation("evolve_cauchy: requires dt <= 0.5 dr*");
  const std::size_t nsteps = std::size_t(std::ceil(span / (cfg.cfl * rs.dx)));
  const double dt = span / double(nsteps);

  auto pot = detail::make_potentials(initial.l, b, params, rs);
  const double idx2 = 1.0 / (rs.dx * rs.dx);

  std::vector<double> prev = initial.psi, cur(n), next(n);
  // second-order Taylor start
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double lap = (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]) * idx2;
    const double a = lap - pot.V[j] * prev[j] -
                     pot.Cb[j] * prev[j] * prev[j] * prev[j];
    cur[j] = prev[j] + dt * initial.pi[j] + 0.5 * dt * dt * a;
  }
  cur[0] = 0.0;
  cur[n - 1] = 0.0;

  // rolling window of the last 4 levels for the probes, oldest..newest
  std::vector<double> ring0 = cur, ring1 = prev, ring2(n, 0.0), ring3(n, 0.0);
  const std::vector<double> *ring[4] = {&ring3, &ring2, &ring1, &ring0};
  int levels = 2;

  CauchyState out = initial;
  const bool check_inner = cfg.inner == InnerBoundary::vacuum;

  double t = initial.t + dt;
  for (std::size_t step = 1; step < nsteps; ++step) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double lap = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * idx2;
      const double a = lap - pot.V[j] * cur[j] -
                       pot.Cb[j] * cur[j] * cur[j] * cur[j];
      next[j] = 2.0 * cur[j] - prev[j] + dt * dt * a;
      if (!std::isfinite(next[j]) || std::abs(next[j]) > cfg.cap)
        throw NonlinearDivergence("evolve_cauchy: blow-up at t=" + std::to_string(t));
    }
    next[0] = 0.0;
    next[n - 1] = 0.0;

    prev.swap(cur);
    cur.swap(next); // next now holds the level below prev
    t = initial.t + double(step + 1) * dt;

    ring3.swap(ring2);
    ring2.swap(ring1);
    ring1.swap(ring0);
    ring0 = cur;
    levels = std::min(levels + 1, 4);
    if (history) history->on_level(t, dt, rs, ring, levels);

    if (cfg.monitor && (step % 16 == 0)) {
      CauchyState probe;
      probe.psi = cur;
      probe.pi.assign(n, 0.0);
      detail::check_support(probe, cfg, check_inner, t);
    }
  }
  if (history) history->finalize(t, dt, rs, ring, levels);

  out.t = t;
  out.psi = cur;
  out.pi.resize(n);
  if (nsteps >= 2) {
    for (std::size_t j = 0; j < n; ++j)
      out.pi[j] = (3.0 * cur[j] - 4.0 * prev[j] + next[j]) / (2.0 * dt);
  } else {
    for (std::size_t j = 0; j < n; ++j) out.pi[j] = (cur[j] - prev[j]) / dt;
  }
  detail::check_support(out, cfg, check_inner, t);
  return out;
}

// Conserved energy of the discrete system (b = 0 exactly at the PDE level;
// the quartic term makes it non-increasing in the defocusing case).
inline double discrete_energy(const CauchyState &s, const CoeffB &b,
                              const ChartParams &params) {
  auto pot = detail::make_potentials(s.l, b, params, s.rstar);
  std::vector<double> dpsi;
  diff_centered(s.psi, s.rstar.dx, dpsi);
  double e = 0.0;
  const std::size_t n = s.psi.size();
  for (std::size_t j = 0; j < n; ++j) {
    double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    e += w * (0.5 * s.pi[j] * s.pi[j] + 0.5 * dpsi[j] * dpsi[j] +
              0.5 * pot.V[j] * s.psi[j] * s.psi[j] +
              0.25 * pot.Cb[j] * s.psi[j] * s.psi[j] * s.psi[j] * s.psi[j]);
  }
  return e * s.rstar.dx;
}

// Backward evolution of the wall region [r*_w, r*_E], driven by a Dirichlet
// series at the outer edge (a function of retarded time u = t - r*_E) and
// zero final data at t = t_max. Returns the state at t = 0.
inline CauchyState solve_backward_driven(int l, const CoeffB &b,
                                         const ChartParams &params,
                                         const Lattice1D &rs,
                                         const Lattice1D &series_x,
                                         const std::vector<double> &series_psi,
                                         double t_max,
                                         const CauchyConfig &cfg = {}) {
  const std::size_t n = rs.n_points();
  if (n < 8) throw ConfigError("solve_backward_driven: lattice too small");
  if (!(t_max > 0)) throw ConfigError("solve_backward_driven: t_max must be positive");
  const std::size_t nsteps = std::size_t(std::ceil(t_max / (cfg.cfl * rs.dx)));
  const double dtau = t_max / double(nsteps);
  const double rsE = rs.hi();

  auto pot = detail::make_potentials(l, b, params, rs);
  const double idx2 = 1.0 / (rs.dx * rs.dx);

  auto drive = [&](double t) {
    const double u = t - rsE;
    if (u <= series_x.lo() || u >= series_x.hi()) return 0.0;
    return interp_cubic(series_x.x0, series_x.dx, series_psi, u);
  };

  // tau = t_max - t; the equation is invariant under the flip.
  std::vector<double> prev(n, 0.0), cur(n, 0.0), next(n), below(n, 0.0);
  prev[n - 1] = drive(t_max);
  cur[n - 1] = drive(t_max - dtau);

  for (std::size_t step = 1; step < nsteps; ++step) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double lap = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * idx2;
      const double a = lap - pot.V[j] * cur[j] -
                       pot.Cb[j] * cur[j] * cur[j] * cur[j];
      next[j] = 2.0 * cur[j] - prev[j] + dtau * dtau * a;
      if (!std::isfinite(next[j]) || std::abs(next[j]) > cfg.cap)
        throw NonlinearDivergence("solve_backward_driven: blow-up");
    }
    next[0] = 0.0; // worldtube wall
    next[n - 1] = drive(t_max - double(step + 1) * dtau);
    below.swap(prev);
    prev.swap(cur);
    cur.swap(next);
  }

  CauchyState out(l, rs);
  out.t = 0.0;
  out.psi = cur;
  for (std::size_t j = 0; j < n; ++j)
    out.pi[j] = (3.0 * cur[j] - 4.0 * prev[j] + below[j]) / (2.0 * dtau);
  // pi = d psi / dt = -d psi / d tau
  // (the one-sided stencil above is the tau derivative)
  for (double &p : out.pi) p = -p;
  return out;
}

// --- extraction bridge -----------------------------------------------------

// Probe targets for the null cone {t - r* = u_c} resampled onto the strip's
// radial lattice, plus the inner-boundary series of the transport problem.
struct ExtractionPlan {
  double u_c = 0.0;
  double rstar_E = 0.0;
  Lattice1D trace_x; // u-window of the transport
  Lattice1D strip_R; // [0, R_E]
};

struct ConeData {
  std::vector<double> psi;      // on strip_R nodes
  std::vector<double> dpsi_dR;  // transverse derivative along the cone
  std::vector<bool> in_domain;
};

inline std::vector<ProbeTarget> make_extraction_targets(const ExtractionPlan &plan,
                                                        const ChartParams &params,
                                                        const Lattice1D &cauchy_rs) {
  std::vector<ProbeTarget> t;
  // series targets, one per trace node
  for (std::size_t i = 0; i < plan.trace_x.n_points(); ++i)
    t.push_back({plan.trace_x.x(i) + plan.rstar_E, plan.rstar_E});
  // cone targets (skip radii outside the Cauchy domain; they read as zero)
  const double pad = 3.0 * cauchy_rs.dx;
  for (std::size_t j = 1; j < plan.strip_R.n_points(); ++j) {
    const double rstar_j = chart::rstar_of_R(plan.strip_R.x(j), params.m);
    if (rstar_j < cauchy_rs.lo() + pad || rstar_j > cauchy_rs.hi() - pad) continue;
    const double tj = plan.u_c + rstar_j;
    if (tj < 0.0) throw ConeOutsideDomain("extraction cone dips below t = 0");
    t.push_back({tj, rstar_j});
  }
  return t;
}

// Splits the probe results back into the series and the cone column.
struct ExtractionRecord {
  nullgrid::WorldtubeSeries series;
  ConeData cone;
};

inline ExtractionRecord collect_extraction_indexed(const CauchyHistory &hist,
                                                   const ExtractionPlan &plan,
                                                   const ChartParams &params,
                                                   const Lattice1D &cauchy_rs,
                                                   std::size_t base) {
  ExtractionRecord rec;
  const std::size_t n_trace = plan.trace_x.n_points();
  rec.series.x = plan.trace_x;
  rec.series.R_E = plan.strip_R.hi();
  rec.series.psi.resize(n_trace);
  rec.series.g.resize(n_trace);
  for (std::size_t i = 0; i < n_trace; ++i) {
    const ProbeResult r = hist.eval(base + i);
    rec.series.psi[i] = r.psi;
    rec.series.g[i] = r.psi_t - r.psi_x; // ingoing null derivative
  }
  const std::size_t nR = plan.strip_R.n_points();
  rec.cone.psi.assign(nR, 0.0);
  rec.cone.dpsi_dR.assign(nR, 0.0);
  rec.cone.in_domain.assign(nR, false);
  std::size_t k = base + n_trace;
  const double pad = 3.0 * cauchy_rs.dx;
  for (std::size_t j = 1; j < nR; ++j) {
    const double rstar_j = chart::rstar_of_R(plan.strip_R.x(j), params.m);
    if (rstar_j < cauchy_rs.lo() + pad || rstar_j > cauchy_rs.hi() - pad) continue;
    const ProbeResult r = hist.eval(k++);
    const double R = plan.strip_R.x(j);
    const double K = R * R * (1.0 - 2.0 * params.m * R);
    rec.cone.psi[j] = r.psi;
    rec.cone.dpsi_dR[j] = K > 0.0 ? -(r.psi_t + r.psi_x) / K : 0.0;
    rec.cone.in_domain[j] = true;
  }
  // scri end of the cone: outside the Cauchy domain, zero by support design
  return rec;
}

inline ExtractionRecord collect_extraction(const CauchyHistory &hist,
                                           const ExtractionPlan &plan,
                                           const ChartParams &params,
                                           const Lattice1D &cauchy_rs) {
  return collect_extraction_indexed(hist, plan, params, cauchy_rs, 0);
}

} // namespace scri::cauchy

#endif
