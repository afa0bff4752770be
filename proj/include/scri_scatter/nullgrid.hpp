#ifndef SCRI_SCATTER_NULLGRID_HPP
#define SCRI_SCATTER_NULLGRID_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/fields.hpp"

namespace scri::nullgrid {

using chart::ChartParams;
using chart::ChartPoint;
using coeff::CoeffB;

// Mode equation in the retarded chart:
//   2 psi_{uR} = -d_R( R^2(1-2mR) psi_R ) + ( l(l+1) + 2mR ) psi + b psi^3.
// In the advanced chart the right-hand side flips sign. The characteristic
// marching below integrates the radial constraint from scri and advances
// columns with SSPRK3.

enum class Direction { past, future };

inline double reduced_equation_rhs(double psi, double psi_R, double psi_RR,
                                   const ChartPoint &p, const ChartParams &params,
                                   int l, const CoeffB &b) {
  const double m = params.m;
  const double F = 1.0 - 2.0 * m * p.R;
  const double K = p.R * p.R * F;
  const double Kp = 2.0 * p.R * F - 2.0 * m * p.R * p.R; // dK/dR
  const double W = double(l) * double(l + 1) + 2.0 * m * p.R;
  const double bv = b.is_zero() ? 0.0 : b(p);
  return -(Kp * psi_R + K * psi_RR) + W * psi + bv * psi * psi * psi;
}

struct GoursatOptions {
  double cfl = 0.5;            // bound on dx * K_max / (2 dR)
  double cap = 1e6;            // divergence guard on |psi|
  double worldtube_tol = -1.0; // <=0 disables the contamination monitor
};

namespace detail {

struct MarchWork {
  std::vector<double> K, W, barr;
  std::vector<double> psiR, integrand, cum, rhs;
  std::vector<double> s1, s2;
};

inline void precompute_coeffs(const ChartParams &params, int l, const CoeffB &b,
                              const Lattice1D &Rlat, MarchWork &w) {
  const std::size_t nR = Rlat.n_points();
  w.K.resize(nR);
  w.W.resize(nR);
  w.barr.assign(nR, 0.0);
  for (std::size_t j = 0; j < nR; ++j) {
    const double R = Rlat.x(j);
    const double F = 1.0 - 2.0 * params.m * R;
    w.K[j] = R * R * F;
    w.W[j] = double(l) * double(l + 1) + 2.0 * params.m * R;
    if (!b.is_zero() && b.static_in_time) w.barr[j] = b({0.0, R});
  }
  w.psiR.resize(nR);
  w.integrand.resize(nR);
  w.cum.resize(nR);
  w.rhs.resize(nR);
  w.s1.resize(nR);
  w.s2.resize(nR);
}

inline void radial_derivative(const std::vector<double> &psi, double dR,
                              std::vector<double> &out) {
  const std::size_t n = psi.size();
  out[0] = (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * dR);
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (psi[j + 1] - psi[j - 1]) / (2.0 * dR);
  out[n - 1] = (3.0 * psi[n - 1] - 4.0 * psi[n - 2] + psi[n - 3]) / (2.0 * dR);
}

inline void check_cfl(const Lattice1D &xlat, const Lattice1D &Rlat,
                      const MarchWork &w, double cfl) {
  double Kmax = 0.0;
  for (double k : w.K) Kmax = std::max(Kmax, std::abs(k));
  if (Kmax > 0.0 && xlat.dx * Kmax / (2.0 * Rlat.dx) > cfl)
    throw CFLViolation("goursat marching: dx * Kmax / (2 dR) = " +
                       std::to_string(xlat.dx * Kmax / (2.0 * Rlat.dx)) +
                       " exceeds cfl = " + std::to_string(cfl));
}

} // namespace detail

// Goursat solve from characteristic data theta on scri (row R = 0 imposed)
// and zero data on the initial null edge (first lattice column). Fills the
// whole rectangle. direction past: theta lives on scri-plus, the field is
// its development toward the past. direction future: theta lives on
// scri-minus, development toward the future; the lattice coordinate is v.
//
// frozen_cubic, when non-null, replaces the cubic self-interaction with the
// frozen source b * frozen^3 (the linear problems of the Picard recursion).
inline ModeField solve_goursat(const ScriProfile &theta, Direction dir,
                               const CoeffB &b, const ChartParams &params,
                               const Lattice1D &Rlat,
                               const GoursatOptions &opt = {},
                               const ModeField *frozen_cubic = nullptr) {
  const ChartTag expect =
      dir == Direction::past ? ChartTag::u_chart : ChartTag::v_chart;
  if (theta.tag != expect)
    throw DomainError("solve_goursat: profile chart tag does not match direction");
  const double sign = dir == Direction::past ? 1.0 : -1.0;
  const Lattice1D &xlat = theta.x;
  if (Rlat.x0 != 0.0)
    throw DomainError("solve_goursat: radial lattice must start at R = 0");

  detail::MarchWork w;
  detail::precompute_coeffs(params, theta.l, b, Rlat, w);
  detail::check_cfl(xlat, Rlat, w, opt.cfl);

  const std::size_t nx = xlat.n_points();
  const std::size_t nR = Rlat.n_points();
  ModeField f(theta.l, expect, xlat, Rlat);

  std::vector<double> dtheta;
  diff_centered4(theta.values, xlat.dx, dtheta);

  const bool nonlinear = !b.is_zero() && frozen_cubic == nullptr;
  const bool frozen = frozen_cubic != nullptr && !b.is_zero();

  // rhs of the column ODE system d psi / dx
  auto eval_rhs = [&](const std::vector<double> &psi, double dth,
                      const std::vector<double> *src3,
                      std::vector<double> &out) {
    detail::radial_derivative(psi, Rlat.dx, w.psiR);
    for (std::size_t j = 0; j < nR; ++j) {
      double cubic3 = 0.0;
      if (nonlinear) cubic3 = w.barr[j] * psi[j] * psi[j] * psi[j];
      else if (frozen) {
        const double q = (*src3)[j];
        cubic3 = w.barr[j] * q * q * q;
      }
      w.integrand[j] = w.W[j] * psi[j] + cubic3;
    }
    cumtrapz(w.integrand, Rlat.dx, w.cum);
    for (std::size_t j = 0; j < nR; ++j)
      out[j] = dth + 0.5 * sign * (w.cum[j] - w.K[j] * w.psiR[j]);
  };

  std::vector<double> psi(nR, 0.0), frozen_mid;
  std::vector<double> fr0, fr1;
  // initial column: zero edge data; scri corner takes the imposed value
  psi[0] = theta.values[0];
  for (std::size_t j = 0; j < nR; ++j) f.at(0, j) = psi[j];

  for (std::size_t i = 0; i + 1 < nx; ++i) {
    const double dth_n = dtheta[i];
    const double dth_np1 = dtheta[i + 1];
    const double dth_mid = midpoint_deriv4(theta.values, i, xlat.dx);

    const std::vector<double> *s0 = nullptr, *s1 = nullptr, *smid = nullptr;
    if (frozen) {
      fr0 = frozen_cubic->column_x(i);
      fr1 = frozen_cubic->column_x(i + 1);
      frozen_mid.resize(nR);
      for (std::size_t j = 0; j < nR; ++j) frozen_mid[j] = 0.5 * (fr0[j] + fr1[j]);
      s0 = &fr0;
      s1 = &fr1;
      smid = &frozen_mid;
    }

    // SSPRK3 (Shu-Osher) stages at x_i, x_{i+1}, x_{i+1/2}
    eval_rhs(psi, dth_n, s0, w.rhs);
    for (std::size_t j = 0; j < nR; ++j) w.s1[j] = psi[j] + xlat.dx * w.rhs[j];
    w.s1[0] = theta.values[i + 1];

    eval_rhs(w.s1, dth_np1, s1, w.rhs);
    for (std::size_t j = 0; j < nR; ++j)
      w.s2[j] = 0.75 * psi[j] + 0.25 * (w.s1[j] + xlat.dx * w.rhs[j]);
    w.s2[0] = midpoint4(theta.values, i);

    eval_rhs(w.s2, dth_mid, smid, w.rhs);
    for (std::size_t j = 0; j < nR; ++j)
      psi[j] = psi[j] / 3.0 + (2.0 / 3.0) * (w.s2[j] + xlat.dx * w.rhs[j]);
    psi[0] = theta.values[i + 1];

    for (std::size_t j = 0; j < nR; ++j) {
      if (!std::isfinite(psi[j]) || std::abs(psi[j]) > opt.cap)
        throw NonlinearDivergence(
            "solve_goursat: blow-up at x=" + std::to_string(xlat.x(i + 1)) +
            " R=" + std::to_string(Rlat.x(j)));
      f.at(i + 1, j) = psi[j];
    }
  }

  if (opt.worldtube_tol > 0.0) {
    // contamination check on the worldtube row, restricted to t >= 0
    // (x >= r*(R_top) in either chart); threshold relative to the data scale
    double scale = 0.0;
    for (double v : theta.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    const double rs_top = chart::rstar_of_R(Rlat.hi(), params.m);
    const double x_thresh = rs_top * (dir == Direction::past ? -1.0 : 1.0);
    for (std::size_t i = 0; i < nx; ++i) {
      const double xv = xlat.x(i);
      if (xv < x_thresh) continue;
      const double v = f.at(i, nR - 1);
      if (std::abs(v) > opt.worldtube_tol * scale)
        throw WorldtubeContamination(
            "solve_goursat: |psi|/scale = " + std::to_string(std::abs(v) / scale) +
            " on the worldtube row at x = " + std::to_string(xv));
    }
  }
  return f;
}

// Inner-boundary time series for the transport problems: the field value
// and the ingoing null derivative D_in psi = 2 psi_x + sgn K psi_R at the
// extraction radius, both as functions of the lattice coordinate.
struct WorldtubeSeries {
  Lattice1D x;
  double R_E = 0.0;
  std::vector<double> psi;  // psi(x, R_E)
  std::vector<double> g;    // D_in psi (x, R_E)
};

// Reconstructs the series at the top row of a solved strip/rectangle using
// the same radial constraint as the marching (no finite differencing in x).
inline WorldtubeSeries series_from_field(const ModeField &f, const ScriProfile &theta,
                                         const CoeffB &b, const ChartParams &params) {
  WorldtubeSeries s;
  s.x = f.x;
  s.R_E = f.R.hi();
  const std::size_t nx = f.x.n_points();
  const std::size_t nR = f.R.n_points();
  s.psi.resize(nx);
  s.g.resize(nx);
  std::vector<double> dtheta;
  diff_centered4(theta.values, f.x.dx, dtheta);
  detail::MarchWork w;
  detail::precompute_coeffs(params, f.l, b, f.R, w);
  std::vector<double> col(nR), cum(nR);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nR; ++j) {
      const double p = f.at(i, j);
      col[j] = w.W[j] * p + w.barr[j] * p * p * p;
    }
    cumtrapz(col, f.R.dx, cum);
    s.psi[i] = f.at(i, nR - 1);
    s.g[i] = 2.0 * dtheta[i] + cum[nR - 1];
  }
  return s;
}

// Transport on the strip {0 <= R <= R_E} anchored at the inner-boundary
// series: the scri row evolves freely (it is the output). The initial
// column is characteristic data on the outgoing cone x = x0.
inline ModeField transport_to_scri(const WorldtubeSeries &series,
                                   const std::vector<double> &cone_column,
                                   int l, const CoeffB &b,
                                   const ChartParams &params,
                                   const Lattice1D &Rlat,
                                   const GoursatOptions &opt = {}) {
  const Lattice1D &xlat = series.x;
  if (Rlat.x0 != 0.0)
    throw DomainError("transport_to_scri: radial lattice must start at R = 0");
  if (std::abs(Rlat.hi() - series.R_E) > 1e-10 * (1.0 + std::abs(series.R_E)))
    throw DomainError("transport_to_scri: series radius does not match lattice");

  detail::MarchWork w;
  detail::precompute_coeffs(params, l, b, Rlat, w);
  detail::check_cfl(xlat, Rlat, w, opt.cfl);

  const std::size_t nx = xlat.n_points();
  const std::size_t nR = Rlat.n_points();
  if (cone_column.size() != nR)
    throw DomainError("transport_to_scri: cone column size mismatch");
  ModeField f(l, ChartTag::u_chart, xlat, Rlat);

  const bool nonlinear = !b.is_zero();

  auto eval_rhs = [&](const std::vector<double> &psi, double gval,
                      std::vector<double> &out) {
    detail::radial_derivative(psi, Rlat.dx, w.psiR);
    for (std::size_t j = 0; j < nR; ++j) {
      double c = 0.0;
      if (nonlinear) c = w.barr[j] * psi[j] * psi[j] * psi[j];
      w.integrand[j] = w.W[j] * psi[j] + c;
    }
    cumtrapz(w.integrand, Rlat.dx, w.cum);
    const double full = w.cum[nR - 1];
    // D_in(x, R_j) = g(x) - int_{R_j}^{R_E} = g(x) - (full - cum_j)
    for (std::size_t j = 0; j < nR; ++j)
      out[j] = 0.5 * ((gval - (full - w.cum[j])) - w.K[j] * w.psiR[j]);
  };

  std::vector<double> psi = cone_column;
  psi[nR - 1] = series.psi[0];
  for (std::size_t j = 0; j < nR; ++j) f.at(0, j) = psi[j];

  for (std::size_t i = 0; i + 1 < nx; ++i) {
    const double g_n = series.g[i];
    const double g_np1 = series.g[i + 1];
    const double g_mid = midpoint4(series.g, i);

    eval_rhs(psi, g_n, w.rhs);
    for (std::size_t j = 0; j < nR; ++j) w.s1[j] = psi[j] + xlat.dx * w.rhs[j];
    w.s1[nR - 1] = series.psi[i + 1];

    eval_rhs(w.s1, g_np1, w.rhs);
    for (std::size_t j = 0; j < nR; ++j)
      w.s2[j] = 0.75 * psi[j] + 0.25 * (w.s1[j] + xlat.dx * w.rhs[j]);
    w.s2[nR - 1] = midpoint4(series.psi, i);

    eval_rhs(w.s2, g_mid, w.rhs);
    for (std::size_t j = 0; j < nR; ++j)
      psi[j] = psi[j] / 3.0 + (2.0 / 3.0) * (w.s2[j] + xlat.dx * w.rhs[j]);
    psi[nR - 1] = series.psi[i + 1];

    for (std::size_t j = 0; j < nR; ++j) {
      if (!std::isfinite(psi[j]) || std::abs(psi[j]) > opt.cap)
        throw NonlinearDivergence("transport_to_scri: blow-up at x=" +
                                  std::to_string(xlat.x(i + 1)));
      f.at(i + 1, j) = psi[j];
    }
  }
  return f;
}

struct PicardReport {
  std::vector<double> delta_norms;
  std::vector<double> ratios;
  bool converged = false;
  std::size_t iterations = 0;
  double final_ratio = 0.0;
};

using FieldNorm = std::function<double(const ModeField &)>;

// sup over x-columns of the discrete radial H1 norm; fallback when no
// foliation-aware norm is supplied.
inline double column_h1_norm(const ModeField &f) {
  double best = 0.0;
  const std::size_t nR = f.R.n_points();
  std::vector<double> col(nR), dcol;
  for (std::size_t i = 0; i < f.x.n_points(); ++i) {
    for (std::size_t j = 0; j < nR; ++j) col[j] = f.at(i, j);
    diff_centered(col, f.R.dx, dcol);
    double s = 0.0;
    for (std::size_t j = 0; j < nR; ++j) s += col[j] * col[j] + dcol[j] * dcol[j];
    best = std::max(best, std::sqrt(s * f.R.dx));
  }
  return best;
}

// Iterates u_0 = linear solution, u_{n+1} = linear solve with frozen cubic
// source b u_n^3; reports the contraction ratios of consecutive differences.
inline std::pair<ModeField, PicardReport>
picard_solve(const ScriProfile &theta, Direction dir, const CoeffB &b,
             const ChartParams &params, const Lattice1D &Rlat,
             std::size_t max_iter, double tol, const GoursatOptions &opt = {},
             FieldNorm norm = nullptr) {
  if (!norm) norm = column_h1_norm;
  PicardReport rep;
  ModeField prev = solve_goursat(theta, dir, coeff::b_zero(), params, Rlat, opt);
  if (b.is_zero()) {
    rep.converged = true;
    rep.delta_norms.push_back(0.0);
    return {prev, rep};
  }
  int above_one = 0;
  for (std::size_t n = 0; n < max_iter; ++n) {
    ModeField next = solve_goursat(theta, dir, b, params, Rlat, opt, &prev);
    ModeField delta = next;
    for (std::size_t k = 0; k < delta.values.size(); ++k)
      delta.values[k] -= prev.values[k];
    const double dn = norm(delta);
    rep.delta_norms.push_back(dn);
    if (rep.delta_norms.size() >= 2) {
      const double prev_dn = rep.delta_norms[rep.delta_norms.size() - 2];
      const double ratio = prev_dn > 0.0 ? dn / prev_dn : 0.0;
      rep.ratios.push_back(ratio);
      rep.final_ratio = ratio;
      above_one = ratio > 1.0 ? above_one + 1 : 0;
      if (above_one >= 5)
        throw NoContraction("picard_solve: contraction ratios exceeded 1 for 5 "
                            "consecutive steps (small-data condition violated)");
    }
    prev = std::move(next);
    rep.iterations = n + 1;
    if (dn <= tol) {
      rep.converged = true;
      break;
    }
  }
  return {prev, rep};
}

struct FixedPointAnalysis {
  bool small_data = false;
  bool real_roots = false;
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
};

// Fixed points of x -> alpha (x^3 + beta): roots of X^3 - X/alpha + beta,
// by the trigonometric solution. small_data is the discriminant condition
// beta^2 < 4/(27 alpha^3) under which lambda1 < 0 <= lambda2 <= lambda0 and
// the iteration from c0 = alpha beta converges to lambda2.
inline FixedPointAnalysis fixed_point_analysis(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= 0.0))
    throw DomainError("fixed_point_analysis: need alpha > 0, beta >= 0");
  FixedPointAnalysis out;
  const double disc = beta * beta - 4.0 / (27.0 * alpha * alpha * alpha);
  out.small_data = disc < 0.0;
  out.real_roots = disc < 0.0;
  if (!out.real_roots) return out;
  const double arg = -std::sqrt(27.0 * beta * beta * alpha * alpha * alpha / 4.0);
  const double a3 = std::acos(std::max(-1.0, std::min(1.0, arg))) / 3.0;
  const double amp = std::sqrt(4.0 / (3.0 * alpha));
  out.lambda0 = amp * std::cos(a3);
  out.lambda1 = amp * std::cos(a3 + 2.0 * M_PI / 3.0);
  out.lambda2 = amp * std::cos(a3 + 4.0 * M_PI / 3.0);
  return out;
}

// c_{n+1} = alpha (c_n^3 + beta) from c_0 = alpha beta.
inline std::vector<double> fixed_point_sequence(double alpha, double beta,
                                                std::size_t n) {
  std::vector<double> c(n + 1);
  c[0] = alpha * beta;
  for (std::size_t k = 0; k < n; ++k)
    c[k + 1] = alpha * (c[k] * c[k] * c[k] + beta);
  return c;
}

} // namespace scri::nullgrid

#endif
