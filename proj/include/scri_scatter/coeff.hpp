#ifndef SCRI_SCATTER_COEFF_HPP
#define SCRI_SCATTER_COEFF_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/numerics.hpp"

namespace scri::coeff {

using chart::ChartParams;
using chart::ChartPoint;

// Nonlinearity coefficient of the defocusing cubic term.
struct CoeffB {
  std::function<double(const ChartPoint &)> sampler;
  std::string description;
  double decay_exponent_hint = std::numeric_limits<double>::quiet_NaN();
  bool static_in_time = true; // sampler depends on R only

  double operator()(const ChartPoint &p) const { return sampler ? sampler(p) : 0.0; }
  bool is_zero() const { return !sampler; }
};

inline CoeffB b_zero() {
  CoeffB b;
  b.sampler = nullptr;
  b.description = "zero";
  return b;
}

// Constant b: positive but does not vanish at scri (fails A2); used for
// negative tests.
inline CoeffB b_constant(double c) {
  CoeffB b;
  b.sampler = [c](const ChartPoint &) { return c; };
  b.description = "constant";
  return b;
}

// c * step((R-R1)/(R2-R1)): zero for R <= R1, plateau c for R >= R2.
// Supported away from scri, so every validation constant is finite on a
// desk grid.
inline CoeffB b_cutoff(double c, double R1, double R2) {
  if (!(R2 > R1 && R1 >= 0.0)) throw ConfigError("b_cutoff: need 0 <= R1 < R2");
  CoeffB b;
  b.sampler = [c, R1, R2](const ChartPoint &p) {
    return c * smooth_step((p.R - R1) / (R2 - R1));
  };
  b.description = "cutoff";
  return b;
}

// b = R; satisfies A1/A2 but its Morawetz log-derivative grows like 1/R.
inline CoeffB b_linear_R() {
  CoeffB b;
  b.sampler = [](const ChartPoint &p) { return p.R; };
  b.description = "linear_R";
  b.decay_exponent_hint = 1.0;
  return b;
}

struct BValidationReport {
  double b_max = 0.0;
  double sup_positivity_violation = 0.0; // max(0, -min b)
  double scri_limit_residual = 0.0;      // max |b| on the innermost R row
  double a3_best_constant = 0.0;         // sup |That^a grad_a b| / b
  double a4_best_constant = 0.0;         // sup over leaves of sup|b| / r^3
  bool a1_pass = false;
  bool a2_pass = false;
  bool a3_unbounded = false;
  bool a4_unbounded = false;
};

// Uniformly spacelike leaf family used for the A4 decay check; label r
// shrinks toward the conformal boundary.
struct LeafFamily {
  std::vector<double> r;
  std::vector<std::vector<ChartPoint>> points;
};

// Default family: the H_s leaves of the tau-foliation restricted to the
// chart window, labeled by r = s(tau).
inline LeafFamily default_leaf_family(const ChartParams &params,
                                      std::size_t n_leaves = 16,
                                      std::size_t n_pts = 64) {
  LeafFamily fam;
  for (std::size_t k = 1; k <= n_leaves; ++k) {
    const double tau = 2.0 * double(k) / double(n_leaves + 1);
    const double s = chart::s_of_tau(tau);
    std::vector<ChartPoint> leaf;
    for (std::size_t i = 0; i <= n_pts; ++i) {
      const double u =
          params.u_min + (params.u0 - params.u_min) * double(i) / double(n_pts);
      const double rs = std::abs(u) / s;
      const double R = chart::R_of_rstar(rs, params.m);
      if (R <= params.R_max) leaf.push_back({u, R});
    }
    if (!leaf.empty()) {
      fam.r.push_back(s);
      fam.points.push_back(std::move(leaf));
    }
  }
  return fam;
}

// Empirical check of assumptions A1-A4 on a grid. The reported constants are
// grid-suprema; the A3 ratio is restricted to points with b above a relative
// floor so that smooth cutoffs report their plateau behavior rather than the
// 0/0 edge.
inline BValidationReport validate_b(const CoeffB &b, const ChartParams &params,
                                    const chart::SamplingSpec &grid,
                                    const LeafFamily &foliation,
                                    double unbounded_threshold = 1e6,
                                    double b_floor_frac = 1e-8) {
  BValidationReport rep;
  if (b.is_zero()) {
    rep.a1_pass = true;
    rep.a2_pass = true;
    return rep;
  }
  std::size_t near_scri = 0;
  double b_min = 1e300;
  // first pass: extrema
  std::vector<double> us(grid.n_u + 1), Rs(grid.n_R);
  for (std::size_t i = 0; i <= grid.n_u; ++i)
    us[i] = params.u_min + (params.u_max - params.u_min) * double(i) / double(grid.n_u);
  for (std::size_t j = 1; j <= grid.n_R; ++j)
    Rs[j - 1] = params.R_max * double(j) / double(grid.n_R);
  for (double R : Rs)
    if (R < 0.1 * params.R_max) ++near_scri;
  if (near_scri < 10)
    throw DomainError("validate_b: grid must resolve the near-scri region "
                      "(>= 10 rows with R < 0.1 R_max)");
  for (double u : us)
    for (double R : Rs) {
      const double v = b({u, R});
      rep.b_max = std::max(rep.b_max, v);
      b_min = std::min(b_min, v);
    }
  rep.sup_positivity_violation = std::max(0.0, -b_min);
  rep.a1_pass = rep.sup_positivity_violation == 0.0;

  // A2: the innermost sampled row must sit clearly below the row a few
  // cells out (decay trend toward scri), and both below the global max.
  const double R_in = Rs.front();
  double scri_res = 0.0, ref_row = 0.0;
  const std::size_t jref = std::min<std::size_t>(7, Rs.size() - 1);
  for (double u : us) {
    scri_res = std::max(scri_res, std::abs(b({u, R_in})));
    ref_row = std::max(ref_row, std::abs(b({u, Rs[jref]})));
  }
  rep.scri_limit_residual = scri_res;
  rep.a2_pass = rep.b_max == 0.0 || scri_res <= 0.5 * ref_row + 1e-14 * rep.b_max;

  // A3: sup |That b| / b over points with b above the floor. The stencil
  // width is fixed (not tied to the grid) so the sup is monotone under
  // refinement.
  const double floor = b_floor_frac * rep.b_max;
  const double hu = 1e-5 * (params.u_max - params.u_min);
  const double hR = 1e-6 * params.R_max;
  double a3 = 0.0;
  for (double u : us)
    for (double R : Rs) {
      const double v = b({u, R});
      if (!(v > floor)) continue;
      const double bu = (b({u + hu, R}) - b({u - hu, R})) / (2.0 * hu);
      double bR;
      if (R - hR > 0.0)
        bR = (b({u, R + hR}) - b({u, R - hR})) / (2.0 * hR);
      else
        bR = (b({u, R + hR}) - b({u, R})) / hR;
      const auto T = chart::morawetz_vector({u, R});
      a3 = std::max(a3, std::abs(T.comp_u * bu + T.comp_R * bR) / v);
    }
  rep.a3_best_constant = a3;
  rep.a3_unbounded = a3 > unbounded_threshold;

  // A4: sup over leaves of ||b||_inf(leaf) / r^3.
  double a4 = 0.0;
  for (std::size_t k = 0; k < foliation.points.size(); ++k) {
    double sup = 0.0;
    for (const auto &p : foliation.points[k]) sup = std::max(sup, std::abs(b(p)));
    const double r = foliation.r[k];
    if (r > 0.0) a4 = std::max(a4, sup / (r * r * r));
  }
  rep.a4_best_constant = a4;
  rep.a4_unbounded = a4 > unbounded_threshold;
  return rep;
}

// Conformal rescaling of Cauchy data between the physical and unphysical
// problems: psi = Omega^{-1} phi and the transformed velocity
// Omega^{-1}(xi - (That Omega) theta / Omega).  Values are forced to zero
// where Omega vanishes (outside the support by assumption).
struct DataPair {
  std::vector<double> value;
  std::vector<double> velocity;
};

inline DataPair physical_to_conformal_data(const std::vector<double> &theta,
                                           const std::vector<double> &xi,
                                           const std::vector<double> &Omega,
                                           const std::vector<double> &dOmega_T) {
  DataPair out;
  const std::size_t n = theta.size();
  out.value.resize(n);
  out.velocity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (Omega[i] == 0.0) {
      out.value[i] = 0.0;
      out.velocity[i] = 0.0;
      continue;
    }
    out.value[i] = theta[i] / Omega[i];
    out.velocity[i] = (xi[i] - dOmega_T[i] * theta[i] / Omega[i]) / Omega[i];
  }
  return out;
}

inline DataPair conformal_to_physical_data(const std::vector<double> &psi0,
                                           const std::vector<double> &psi1,
                                           const std::vector<double> &Omega,
                                           const std::vector<double> &dOmega_T) {
  DataPair out;
  const std::size_t n = psi0.size();
  out.value.resize(n);
  out.velocity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.value[i] = Omega[i] * psi0[i];
    out.velocity[i] = Omega[i] * psi1[i] + dOmega_T[i] * psi0[i];
  }
  return out;
}

} // namespace scri::coeff

#endif
