#ifndef SCRI_SCATTER_LABS_HPP
#define SCRI_SCATTER_LABS_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/energy.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/nullgrid.hpp"
#include "scri_scatter/scatter.hpp"

namespace scri::labs {

using chart::ChartParams;
using coeff::CoeffB;

struct LabResult {
  std::string name;
  std::vector<double> sweep;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> measured; // measured[c][k], per column c
  double fitted = 0.0;
  double fit_residual = 0.0;
  bool pass = false;
  std::string note;
};

namespace detail {

inline void require_sweep(const std::vector<double> &v, const char *who) {
  if (v.size() < 5)
    throw ConfigError(std::string(who) + ": sweep needs at least 5 points");
}

// radial quadrature over the ball of radius t: int f(r) 4 pi r^2 dr
inline double ball_integral(double t, std::size_t n,
                            const std::function<double(double)> &f) {
  std::vector<double> vals(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = t * double(k) / double(n);
    vals[k] = f(r) * r * r;
  }
  return 4.0 * M_PI * trapz(vals, t / double(n));
}

inline double bump_profile(double rho) {
  if (rho >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

inline double bump_profile_deriv(double rho) {
  if (rho >= 1.0) return 0.0;
  const double d = 1.0 - rho * rho;
  return bump_profile(rho) * (-2.0 * rho / (d * d));
}

} // namespace detail

// H1 -> L6 embedding on shrinking balls: the unweighted ratio for the
// constant family scales like 1/t; with the 1/t^2 weight on the L2 term the
// ratio is t-uniform for a rescaled bump family.
inline LabResult sobolev_cone_lab(const std::vector<double> &t_values,
                                  std::size_t quad_n = 4096) {
  detail::require_sweep(t_values, "sobolev_cone_lab");
  const double span = *std::max_element(t_values.begin(), t_values.end()) /
                      *std::min_element(t_values.begin(), t_values.end());
  if (span < 10.0)
    throw ConfigError("sobolev_cone_lab: t sweep must span at least a decade");

  LabResult lab;
  lab.name = "sobolev_cone";
  lab.sweep = t_values;
  lab.columns = {"ratio_unweighted_const", "ratio_weighted_const",
                 "ratio_weighted_bump"};
  lab.measured.assign(3, {});

  std::vector<double> logt, logr;
  for (double t : t_values) {
    // constant family u = 1
    const double l6c = std::pow(detail::ball_integral(t, quad_n, [](double) {
                                  return 1.0;
                                }),
                                1.0 / 6.0);
    const double l2c = detail::ball_integral(t, quad_n, [](double) { return 1.0; });
    const double h1c = std::sqrt(l2c); // gradient vanishes
    lab.measured[0].push_back(l6c / h1c);
    lab.measured[1].push_back(l6c * l6c / (l2c / (t * t)));

    // fixed smooth bump rescaled to the ball
    const double i6 = detail::ball_integral(t, quad_n, [&](double r) {
      const double b = detail::bump_profile(r / t);
      return std::pow(b, 6.0);
    });
    const double i2 = detail::ball_integral(t, quad_n, [&](double r) {
      const double b = detail::bump_profile(r / t);
      return b * b;
    });
    const double ig = detail::ball_integral(t, quad_n, [&](double r) {
      const double db = detail::bump_profile_deriv(r / t) / t;
      return db * db;
    });
    lab.measured[2].push_back(std::pow(i6, 1.0 / 3.0) / (ig + i2 / (t * t)));
    logt.push_back(std::log(t));
    logr.push_back(std::log(lab.measured[0].back()));
  }

  const LineFit fit = fit_line(logt, logr);
  lab.fitted = fit.slope;
  lab.fit_residual = fit.residual;
  double wmin = 1e300, wmax = 0.0;
  for (double w : lab.measured[2]) {
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  lab.pass = std::abs(fit.slope + 1.0) <= 0.1 && wmax <= 2.0 * wmin;
  lab.note = "weighted band max/min = " + std::to_string(wmax / wmin);
  return lab;
}

// Cutoff sequence psi_n(x) = f(n|x|) with f = 0 on [0,1/3], 1 on [1/2,inf):
// ||1 - psi_n||_{H1(B(0,1))} decays like n^{-1/2} and obeys the printed bound
// (4 pi / 3)(int (1-f(nr))^2 dr + sup(f')^2 / n).
inline LabResult density_cutoff_lab(const std::vector<double> &n_values,
                                    std::size_t quad_n = 16384) {
  detail::require_sweep(n_values, "density_cutoff_lab");
  LabResult lab;
  lab.name = "density_cutoff";
  lab.sweep = n_values;
  lab.columns = {"h1_norm", "printed_bound"};
  lab.measured.assign(2, {});

  auto f = [](double x) { return smooth_step((x - 1.0 / 3.0) * 6.0); };
  // sup |f'| on a fine grid
  double supfp = 0.0;
  const double hh = 1e-6;
  for (std::size_t k = 0; k <= 200000; ++k) {
    const double x = 0.3 + 0.25 * double(k) / 200000.0;
    supfp = std::max(supfp, std::abs((f(x + hh) - f(x - hh)) / (2.0 * hh)));
  }

  std::vector<double> logn, lognorm;
  bool monotone = true, bounded = true;
  double prev = 1e300;
  for (double nv : n_values) {
    std::vector<double> rad(quad_n + 1), flat(quad_n + 1);
    for (std::size_t k = 0; k <= quad_n; ++k) {
      const double r = double(k) / double(quad_n);
      const double fr = f(nv * r);
      const double dfr = (f(nv * r + hh) - f(nv * r - hh)) / (2.0 * hh);
      rad[k] = (sqr(1.0 - fr) + sqr(nv * dfr)) * r * r;
      flat[k] = sqr(1.0 - fr);
    }
    const double norm2 = 4.0 * M_PI * trapz(rad, 1.0 / double(quad_n));
    const double bound = (4.0 * M_PI / 3.0) *
                         (trapz(flat, 1.0 / double(quad_n)) + supfp * supfp / nv);
    const double norm = std::sqrt(norm2);
    lab.measured[0].push_back(norm);
    lab.measured[1].push_back(std::sqrt(bound));
    monotone = monotone && norm < prev;
    bounded = bounded && norm2 <= bound * (1.0 + 1e-12);
    prev = norm;
    logn.push_back(std::log(nv));
    lognorm.push_back(std::log(norm));
  }
  const LineFit fit = fit_line(logn, lognorm);
  lab.fitted = fit.slope;
  lab.fit_residual = fit.residual;
  lab.pass = monotone && bounded && std::abs(fit.slope + 0.5) <= 0.1;
  lab.note = std::string(monotone ? "monotone" : "NOT monotone") +
             (bounded ? ", bound holds" : ", bound VIOLATED");
  return lab;
}

enum class LipschitzMap { T0_plus, T_plus_0, S };

struct LipschitzOptions {
  std::size_t n_pairs = 8;
  std::uint64_t seed = 12345;
  double amplitude = 0.05; // input ball radius scale
  int l = 0;
};

// Sigma_0 energy of the continuity theorem, desk form.
inline double sigma_energy(const SigmaData &d) {
  std::vector<double> vals(d.rstar.n_points());
  const std::vector<double> dth = d.tangential();
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = d.xi[i] * d.xi[i] + dth[i] * dth[i] +
              (double(d.l) * double(d.l + 1) + 1.0) * d.theta[i] * d.theta[i];
  return energy::four_pi * trapz(vals, d.rstar.dx);
}

inline SigmaData sigma_minus(const SigmaData &a, const SigmaData &b) {
  SigmaData d = a;
  for (std::size_t i = 0; i < d.theta.size(); ++i) {
    d.theta[i] -= b.theta[i];
    d.xi[i] -= b.xi[i];
  }
  if (d.dtheta.size() == d.theta.size() && b.dtheta.size() == d.theta.size())
    for (std::size_t i = 0; i < d.theta.size(); ++i) d.dtheta[i] -= b.dtheta[i];
  return d;
}

// Ratios of the continuity estimates over random pairs in a fixed small ball.
inline LabResult lipschitz_lab(LipschitzMap map, const CoeffB &b,
                               const ChartParams &params,
                               const scatter::PipelineConfig &cfg,
                               const LipschitzOptions &opt = {}) {
  LabResult lab;
  lab.name = map == LipschitzMap::T0_plus
                 ? "lipschitz_T0_plus"
                 : (map == LipschitzMap::T_plus_0 ? "lipschitz_T_plus_0"
                                                  : "lipschitz_S");
  lab.columns = {"ratio"};
  lab.measured.assign(1, {});

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> amp(0.4, 1.0);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  std::uniform_real_distribution<double> width(1.6, 2.4);

  const double rw = cfg.rstar.lo();
  // profile supports: early window for scri inputs
  const double pc = 0.5 * (cfg.x.lo() + (-rw - cfg.route_margin)) - 4.0;

  auto random_profile = [&](ChartTag tag) {
    const double a = opt.amplitude * amp(rng);
    const double c = pc + shift(rng);
    const double s = width(rng);
    return gaussian_profile(opt.l, tag, cfg.x, a, c, s, 6.0 * s);
  };
  auto random_sigma = [&]() {
    const double a = opt.amplitude * amp(rng);
    const double c = -pc + shift(rng); // far field in r*
    const double s = width(rng);
    SigmaData d(opt.l, cfg.rstar);
    std::vector<double> th(cfg.rstar.n_points());
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double x = cfg.rstar.x(i);
      th[i] = a * std::exp(-sqr(x - c) / (2.0 * s * s)) *
              plateau_window((x - c) / (6.0 * s));
    }
    std::vector<double> dth;
    diff_centered(th, cfg.rstar.dx, dth);
    std::vector<double> pi(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) pi[i] = -dth[i]; // outgoing
    return cauchy_to_sigma(opt.l, cfg.rstar, th, pi, params.m);
  };

  double best = 0.0;
  for (std::size_t k = 0; k < opt.n_pairs; ++k) {
    double ratio = 0.0;
    if (map == LipschitzMap::T0_plus) {
      SigmaData d1 = random_sigma(), d2 = random_sigma();
      const double den = sigma_energy(sigma_minus(d1, d2));
      if (den <= 0.0) continue;
      ScriProfile o1 = scatter::trace_T0_plus(d1, b, params, cfg);
      ScriProfile o2 = scatter::trace_T0_plus(d2, b, params, cfg);
      ratio = sqr(energy::h1_scri_dist(o1, o2)) / den;
    } else if (map == LipschitzMap::T_plus_0) {
      ScriProfile t1 = random_profile(ChartTag::u_chart);
      ScriProfile t2 = random_profile(ChartTag::u_chart);
      const double den = sqr(energy::h1_scri_dist(t1, t2));
      if (den <= 0.0) continue;
      SigmaData o1 = scatter::trace_T_plus_0(t1, b, params, cfg);
      SigmaData o2 = scatter::trace_T_plus_0(t2, b, params, cfg);
      ratio = sigma_energy(sigma_minus(o1, o2)) / den;
    } else {
      ScriProfile t1 = random_profile(ChartTag::v_chart);
      ScriProfile t2 = random_profile(ChartTag::v_chart);
      const double den = sqr(energy::h1_scri_dist(t1, t2));
      if (den <= 0.0) continue;
      ScriProfile o1 = scatter::scattering_operator(t1, b, params, cfg);
      ScriProfile o2 = scatter::scattering_operator(t2, b, params, cfg);
      ratio = sqr(energy::h1_scri_dist(o1, o2)) / den;
    }
    lab.sweep.push_back(double(k));
    lab.measured[0].push_back(ratio);
    best = std::max(best, ratio);
  }
  lab.fitted = best;
  lab.pass = std::isfinite(best) && best > 0.0;
  lab.note = "max ratio over pairs";
  return lab;
}

struct SlowdownOptions {
  std::size_t n_T = 512;     // patch lattice in T
  double X_max = 0.08;       // strip depth (inside every lambda's domain)
  double T_lo = 0.0, T_hi = 0.0; // patch window; defaults to profile window
  double cfl = 0.4;
  int l = 0;
};

struct SlowdownRun {
  double lambda = 0.0;
  double l2_diff = 0.0;
  double c_lambda = 0.0; // E(S) / ||theta||_H1^2
};

namespace detail {

// One slowed Cauchy evolution in the (T = u - R, X = R) chart, marched in X
// from scri with data (theta, That psi = 0).
struct SlowdownPatch {
  Lattice1D T;
  Lattice1D X;
  std::vector<std::vector<double>> psi; // psi[jX][iT]
};

inline SlowdownPatch slowdown_solve(const ScriProfile &theta, double lambda,
                                    const CoeffB &b, const ChartParams &params,
                                    const SlowdownOptions &opt) {
  SlowdownPatch patch;
  const double Tlo = opt.T_lo, Thi = opt.T_hi;
  patch.T = Lattice1D(Tlo, Thi, opt.n_T);
  const std::size_t nT = patch.T.n_points();
  const double dT = patch.T.dx;

  // coefficient tables on a provisional X lattice; speeds set the X step
  auto coeffs = [&](double X, double &P, double &bP, double &Q, double &W,
                    double &bv) {
    const double F = 1.0 - 2.0 * params.m * X;
    const double K = X * X * F;
    const double h = 2.0 - K;
    P = h / (lambda * lambda);
    bP = (1.0 - K) / (lambda * lambda);
    Q = (sqr(1.0 - K) - lambda * lambda) / (lambda * lambda * h);
    W = double(opt.l) * double(opt.l + 1) + 2.0 * params.m * X;
    bv = b.is_zero() ? 0.0 : b({0.0, X});
  };
  double max_speed = 1.0;
  for (int k = 0; k <= 64; ++k) {
    const double X = opt.X_max * double(k) / 64.0;
    double P, bP, Q, W, bv;
    coeffs(X, P, bP, Q, W, bv);
    if (!(Q > 0.0))
      throw CFLViolation("slowdown_solve: strip not X-hyperbolic at lambda=" +
                         std::to_string(lambda));
    const double beta = bP / P;
    const double rad = std::sqrt(std::max(0.0, beta * beta + Q / P));
    max_speed = std::max(max_speed, std::abs(-beta - rad));
    max_speed = std::max(max_speed, std::abs(-beta + rad));
  }
  const std::size_t nX =
      std::max<std::size_t>(64, std::size_t(std::ceil(opt.X_max * max_speed /
                                                      (opt.cfl * dT))));
  patch.X = Lattice1D(0.0, opt.X_max, nX);
  const double dX = patch.X.dx;

  // state on a T row: psi and the X-flux Pi = -beta P psi_T + Q psi_X
  std::vector<double> psi(nT), Pi(nT), psiT(nT), fluxT(nT), dpsi(nT), dPi(nT);
  std::vector<double> s_psi(nT), s_Pi(nT);
  for (std::size_t i = 0; i < nT; ++i) {
    const double T = patch.T.x(i);
    psi[i] = theta.value(T);
  }
  {
    double P, bP, Q, W, bv;
    coeffs(0.0, P, bP, Q, W, bv);
    std::vector<double> dth;
    diff_centered(psi, dT, dth);
    for (std::size_t i = 0; i < nT; ++i) {
      const double T = patch.T.x(i);
      const double psiX = 0.5 * (T * T + 2.0) * dth[i]; // That psi = 0 gauge
      Pi[i] = -bP * dth[i] + Q * psiX;
    }
  }

  patch.psi.assign(patch.X.n_points(), std::vector<double>(nT, 0.0));
  patch.psi[0] = psi;

  auto rhs = [&](const std::vector<double> &ps, const std::vector<double> &pp,
                 double X, std::vector<double> &dps, std::vector<double> &dpp) {
    double P, bP, Q, W, bv;
    coeffs(X, P, bP, Q, W, bv);
    diff_centered(ps, dT, psiT);
    // psi_X = (Pi + beta P psi_T)/Q
    for (std::size_t i = 0; i < nT; ++i) dps[i] = (pp[i] + bP * psiT[i]) / Q;
    // Pi_X = -P psi_TT + beta P d_T(psi_X) - W psi - b psi^3
    diff_centered(psiT, dT, fluxT); // psi_TT
    std::vector<double> &dpsT = s_psi;
    diff_centered(dps, dT, dpsT);
    for (std::size_t i = 0; i < nT; ++i)
      dpp[i] = -P * fluxT[i] + bP * dpsT[i] - W * ps[i] -
               bv * ps[i] * ps[i] * ps[i];
    dps[0] = dps[nT - 1] = 0.0;
    dpp[0] = dpp[nT - 1] = 0.0;
  };

  std::vector<double> k1p(nT), k1q(nT), k2p(nT), k2q(nT), mp(nT), mq(nT);
  for (std::size_t j = 0; j + 1 < patch.X.n_points(); ++j) {
    const double X = patch.X.x(j);
    rhs(psi, Pi, X, k1p, k1q);
    for (std::size_t i = 0; i < nT; ++i) {
      mp[i] = psi[i] + 0.5 * dX * k1p[i];
      mq[i] = Pi[i] + 0.5 * dX * k1q[i];
    }
    rhs(mp, mq, X + 0.5 * dX, k2p, k2q);
    for (std::size_t i = 0; i < nT; ++i) {
      psi[i] += dX * k2p[i];
      Pi[i] += dX * k2q[i];
      if (!std::isfinite(psi[i]))
        throw NonlinearDivergence("slowdown_solve: blow-up");
    }
    psi[0] = psi[nT - 1] = 0.0;
    patch.psi[j + 1] = psi;
  }
  return patch;
}

} // namespace detail

// lambda-slowdown Goursat study: the slowed strictly hyperbolic evolutions
// approach the direct characteristic solution as lambda -> 1.
inline LabResult slowdown_lab(const ScriProfile &theta,
                              const std::vector<double> &lambdas,
                              const CoeffB &b, const ChartParams &params,
                              SlowdownOptions opt = {}) {
  detail::require_sweep(lambdas, "slowdown_lab");
  if (theta.tag != ChartTag::u_chart)
    throw DomainError("slowdown_lab: profile must live on scri-plus");
  if (opt.T_hi <= opt.T_lo) {
    opt.T_lo = theta.x.lo();
    opt.T_hi = theta.x.hi();
  }

  // direct characteristic solution on a covering rectangle
  const double u_hi = opt.T_hi + opt.X_max + 1.0;
  const std::size_t nu =
      std::size_t(std::ceil((u_hi - theta.x.lo()) / theta.x.dx));
  Lattice1D ulat(theta.x.lo(), theta.x.lo() + double(nu) * theta.x.dx, nu);
  ScriProfile th2(theta.l, ChartTag::u_chart, ulat);
  for (std::size_t i = 0; i < ulat.n_points(); ++i)
    th2.values[i] = theta.value(ulat.x(i));
  th2.support_lo = theta.support_lo;
  th2.support_hi = theta.support_hi;
  Lattice1D Rlat(0.0, opt.X_max, std::max<std::size_t>(128, opt.n_T / 2));
  nullgrid::GoursatOptions gopt;
  ModeField direct =
      nullgrid::solve_goursat(th2, nullgrid::Direction::past, b, params, Rlat, gopt);

  LabResult lab;
  lab.name = "slowdown";
  lab.sweep = lambdas;
  lab.columns = {"l2_diff", "c_lambda"};
  lab.measured.assign(2, {});
  const double h1 = energy::h1_scri_norm(theta);

  bool decreasing = true;
  double prev = 1e300;
  for (double lam : lambdas) {
    if (!(lam > 0.5 && lam < 1.0))
      throw ConfigError("slowdown_lab: lambda must lie in (1/2, 1)");
    detail::SlowdownPatch p = detail::slowdown_solve(theta, lam, b, params, opt);
    // L2 difference against the direct solution on the patch
    double acc = 0.0;
    const std::size_t mid = p.T.n_points() / 2;
    double eS = 0.0;
    std::vector<double> rowT(p.T.n_points());
    for (std::size_t j = 0; j < p.X.n_points(); ++j) {
      for (std::size_t i = 0; i < p.T.n_points(); ++i) {
        const double T = p.T.x(i);
        const double X = p.X.x(j);
        const Jet2 d = sample_jet(direct, T + X, X);
        const double diff = p.psi[j][i] - d.psi;
        const double w = (i == 0 || i + 1 == p.T.n_points() ? 0.5 : 1.0) *
                         (j == 0 || j + 1 == p.X.n_points() ? 0.5 : 1.0);
        acc += w * diff * diff;
      }
      // energy on the T = T_mid slice
      for (std::size_t i = 0; i < p.T.n_points(); ++i) rowT[i] = p.psi[j][i];
      std::vector<double> dT;
      diff_centered(rowT, p.T.dx, dT);
      const double psiT = dT[mid];
      const double psiX =
          j + 1 < p.X.n_points()
              ? (p.psi[j + 1][mid] - p.psi[j][mid]) / p.X.dx
              : (p.psi[j][mid] - p.psi[j - 1][mid]) / p.X.dx;
      const double wj = (j == 0 || j + 1 == p.X.n_points()) ? 0.5 : 1.0;
      eS += wj * (psiT * psiT + psiX * psiX +
                  (double(opt.l) * double(opt.l + 1) + 1.0) *
                      p.psi[j][mid] * p.psi[j][mid]) *
            p.X.dx;
    }
    const double l2 = std::sqrt(acc * p.T.dx * p.X.dx);
    lab.measured[0].push_back(l2);
    lab.measured[1].push_back(energy::four_pi * eS / (h1 * h1));
    decreasing = decreasing && l2 < prev;
    prev = l2;
  }
  double cmin = 1e300, cmax = 0.0;
  for (double c : lab.measured[1]) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  lab.fitted = lab.measured[0].back();
  lab.pass = decreasing && cmax < 1e6;
  lab.note = std::string(decreasing ? "strictly decreasing" : "NOT decreasing") +
             "; c_lambda band max/min = " +
             std::to_string(cmax / std::max(cmin, 1e-300));
  return lab;
}

// Cardano roots, the scalar fixed-point iteration, and a contraction demo.
inline LabResult picard_lab(double alpha, double beta, std::size_t n_seq = 40) {
  LabResult lab;
  lab.name = "picard";
  lab.columns = {"c_n"};
  lab.measured.assign(1, {});
  const auto fp = nullgrid::fixed_point_analysis(alpha, beta);
  const auto seq = nullgrid::fixed_point_sequence(alpha, beta, n_seq);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    lab.sweep.push_back(double(k));
    lab.measured[0].push_back(seq[k]);
  }
  lab.fitted = fp.real_roots ? fp.lambda2 : std::numeric_limits<double>::quiet_NaN();
  lab.pass = fp.small_data &&
             std::abs(seq.back() - fp.lambda2) <=
                 1e-10 * std::max(1.0, std::abs(fp.lambda2));
  lab.note = fp.small_data ? "small-data regime" : "discriminant >= 0";
  return lab;
}

} // namespace scri::labs

#endif
