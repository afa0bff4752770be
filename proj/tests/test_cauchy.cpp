#include <catch2/catch_amalgamated.hpp>

#include "scri_scatter/cauchy.hpp"
#include "support/oracles.hpp"

using namespace scri;
using namespace scri::cauchy;
using Catch::Approx;

namespace {

chart::ChartParams flat_params() {
  chart::ChartParams p;
  p.m = 0.0;
  p.u_min = -60.0;
  p.u_max = -5.0;
  p.R_max = 50.0;
  p.eps = 0.1;
  p.u0 = -5.0;
  return p;
}

chart::ChartParams schw_params() {
  chart::ChartParams p;
  p.m = 1.0;
  p.u_min = -60.0;
  p.u_max = -20.0;
  p.R_max = 0.1;
  p.eps = 0.1;
  p.u0 = -20.0;
  return p;
}

// compactly supported gaussian on the r* lattice
std::vector<double> pulse(const Lattice1D &rs, double amp, double c, double s) {
  std::vector<double> v(rs.n_points());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = rs.x(i);
    v[i] = amp * std::exp(-sqr(x - c) / (2.0 * s * s)) *
           plateau_window((x - c) / (8.0 * s));
  }
  return v;
}

} // namespace

TEST_CASE("cauchy: zero data stays zero") {
  const auto p = flat_params();
  Lattice1D rs(5.0, 65.0, 512);
  CauchyState s(0, rs);
  const CauchyState out = evolve_cauchy(s, coeff::b_zero(), p, 10.0);
  for (double v : out.psi) CHECK(v == 0.0);
}

TEST_CASE("cauchy: outgoing pulse follows the d'Alembert oracle") {
  const auto p = flat_params();
  Lattice1D rs(5.0, 85.0, 4096);
  CauchyState s(0, rs);
  const double c = 25.0, sg = 2.0;
  s.psi = pulse(rs, 1.0, c, sg);
  std::vector<double> d;
  diff_centered4(s.psi, rs.dx, d);
  for (std::size_t i = 0; i < s.pi.size(); ++i) s.pi[i] = -d[i];
  const double T = 30.0;
  const CauchyState out = evolve_cauchy(s, coeff::b_zero(), p, T);
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < rs.n_points(); ++i) {
    const double x = rs.x(i);
    const double exact = std::exp(-sqr(x - T - c) / (2.0 * sg * sg)) *
                         plateau_window((x - T - c) / (8.0 * sg));
    err += sqr(out.psi[i] - exact);
    norm += sqr(exact);
  }
  const double rel = std::sqrt(err / norm);
  INFO("relative L2 error " << rel);
  CHECK(rel < 2e-3);
}

TEST_CASE("cauchy: discrete energy is conserved to O(dt^2) for b = 0") {
  const auto p = schw_params();
  Lattice1D rs(chart::rstar_of_R(p.R_max, p.m), 80.0, 2048);
  CauchyState s(1, rs);
  s.psi = pulse(rs, 1.0, 45.0, 2.0);
  const double E0 = discrete_energy(s, coeff::b_zero(), p);
  const CauchyState out = evolve_cauchy(s, coeff::b_zero(), p, 12.0);
  const double E1 = discrete_energy(out, coeff::b_zero(), p);
  INFO("E0 " << E0 << " E1 " << E1);
  CHECK(std::abs(E1 - E0) / E0 < 5e-4);
}

TEST_CASE("cauchy: defocusing term keeps the augmented energy from growing") {
  const auto p = schw_params();
  Lattice1D rs(chart::rstar_of_R(p.R_max, p.m), 80.0, 2048);
  const auto b = coeff::b_cutoff(5.0, 0.02, 0.05);
  CauchyState s(0, rs);
  s.psi = pulse(rs, 1.0, 45.0, 2.0);
  const double E0 = discrete_energy(s, b, p);
  const CauchyState out = evolve_cauchy(s, b, p, 12.0);
  const double E1 = discrete_energy(out, b, p);
  INFO("E0 " << E0 << " E1 " << E1);
  CHECK(E1 <= E0 * (1.0 + 5e-4));
}

TEST_CASE("cauchy: time symmetry under pi flip") {
  const auto p = schw_params();
  Lattice1D rs(chart::rstar_of_R(p.R_max, p.m), 70.0, 2048);
  CauchyState s(0, rs);
  s.psi = pulse(rs, 1.0, 40.0, 2.0);
  std::vector<double> d;
  diff_centered4(s.psi, rs.dx, d);
  for (std::size_t i = 0; i < s.pi.size(); ++i) s.pi[i] = 0.3 * d[i];
  const double T = 8.0;
  CauchyState fwd = evolve_cauchy(s, coeff::b_zero(), p, T);
  flip_pi(fwd);
  fwd.t = 0.0;
  CauchyState back = evolve_cauchy(fwd, coeff::b_zero(), p, T);
  double worst_psi = 0.0, worst_pi = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < rs.n_points(); ++i) {
    worst_psi = std::max(worst_psi, std::abs(back.psi[i] - s.psi[i]));
    worst_pi = std::max(worst_pi, std::abs(-back.pi[i] - s.pi[i]));
    scale = std::max(scale, std::abs(s.psi[i]));
  }
  INFO("psi " << worst_psi << " pi " << worst_pi);
  CHECK(worst_psi <= 2e-4 * scale);
  CHECK(worst_pi <= 2e-3 * scale);
}

TEST_CASE("cauchy: boundary contamination monitor") {
  const auto p = flat_params();
  Lattice1D rs(5.0, 45.0, 512);
  CauchyState s(0, rs);
  s.psi = pulse(rs, 1.0, 25.0, 2.0); // both-ways pulse reaches the edges
  CauchyConfig cfg;
  CHECK_THROWS_AS(evolve_cauchy(s, coeff::b_zero(), p, 25.0, cfg),
                  BoundaryContamination);
  // reflect mode tolerates the inner-wall bounce
  cfg.inner = InnerBoundary::reflect;
  Lattice1D rs2(5.0, 90.0, 1024);
  CauchyState s2(0, rs2);
  s2.psi = pulse(rs2, 1.0, 30.0, 2.0);
  std::vector<double> d;
  diff_centered4(s2.psi, rs2.dx, d);
  for (std::size_t i = 0; i < s2.pi.size(); ++i) s2.pi[i] = d[i]; // ingoing
  CHECK_NOTHROW(evolve_cauchy(s2, coeff::b_zero(), p, 40.0, cfg));
}

TEST_CASE("cauchy: cfl guard") {
  const auto p = flat_params();
  Lattice1D rs(5.0, 45.0, 256);
  CauchyState s(0, rs);
  CauchyConfig cfg;
  cfg.cfl = 0.9;
  CHECK_THROWS_AS(evolve_cauchy(s, coeff::b_zero(), p, 1.0, cfg), CFLViolation);
}

TEST_CASE("probe history: interpolation order >= 3 on a smooth field") {
  // synthetic evolution: psi(t, x) = sin(0.4 x - 0.4 t) transported exactly
  // through the probe machinery at three resolutions
  const auto p = flat_params();
  auto run = [&](std::size_t N) {
    Lattice1D rs(5.0, 45.0, N);
    std::vector<ProbeTarget> targets;
    targets.push_back({7.3, 21.37});
    targets.push_back({11.1, 33.3});
    CauchyHistory hist(targets);
    // drive the ring buffer manually with the exact field
    const double dt = 0.5 * rs.dx;
    std::vector<double> r0(rs.n_points()), r1(rs.n_points()), r2(rs.n_points()),
        r3(rs.n_points());
    const std::vector<double> *ring[4] = {&r3, &r2, &r1, &r0};
    auto fill = [&](std::vector<double> &row, double t) {
      for (std::size_t i = 0; i < rs.n_points(); ++i)
        row[i] = std::sin(0.4 * rs.x(i) - 0.4 * t);
    };
    int levels = 0;
    double t = 0.0;
    for (std::size_t n = 0; n < std::size_t(14.0 / dt); ++n) {
      t = double(n) * dt;
      r3 = r2; r2 = r1; r1 = r0;
      fill(r0, t);
      levels = std::min(levels + 1, 4);
      hist.on_level(t, dt, rs, ring, levels);
    }
    double err = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const auto r = hist.eval(k);
      const double exact = std::sin(0.4 * targets[k].x - 0.4 * targets[k].t);
      const double exact_t = -0.4 * std::cos(0.4 * targets[k].x - 0.4 * targets[k].t);
      const double exact_x = 0.4 * std::cos(0.4 * targets[k].x - 0.4 * targets[k].t);
      err = std::max(err, std::abs(r.psi - exact));
      err = std::max(err, 0.1 * std::abs(r.psi_t - exact_t));
      err = std::max(err, 0.1 * std::abs(r.psi_x - exact_x));
    }
    return err;
  };
  const double e1 = run(128), e2 = run(256), e3 = run(512);
  const double o1 = oracle::order_from_errors(e1, e2);
  const double o2 = oracle::order_from_errors(e2, e3);
  INFO("errors " << e1 << " " << e2 << " " << e3 << " orders " << o1 << " " << o2);
  CHECK(std::min(o1, o2) >= 3.0);
}

TEST_CASE("backward driven solve undoes a forward evolution") {
  // forward: outgoing pulse leaves through the outer edge of a small domain;
  // record its trace at the edge, then reconstruct the initial state by the
  // driven backward solve
  const auto p = schw_params();
  const double rw = chart::rstar_of_R(p.R_max, p.m);
  const std::size_t N = 2048;
  Lattice1D rs(rw, rw + 40.0, N);
  CauchyState s(0, rs);
  s.psi = pulse(rs, 1.0, rw + 20.0, 1.5);
  std::vector<double> d;
  diff_centered4(s.psi, rs.dx, d);
  for (std::size_t i = 0; i < s.pi.size(); ++i) s.pi[i] = -d[i]; // outgoing

  // record the series at the outer edge radius rE by probes
  const double rE = rs.x(N - 256);
  const double t_max = 36.0;
  Lattice1D ulat(-rE, t_max - rE, 512);
  std::vector<ProbeTarget> targets;
  for (std::size_t i = 0; i < ulat.n_points(); ++i)
    targets.push_back({ulat.x(i) + rE, rE});
  CauchyHistory hist(targets);
  CauchyConfig cfg;
  cfg.monitor = false;
  evolve_cauchy(s, coeff::b_zero(), p, t_max + 1.0, cfg, &hist);
  std::vector<double> series(ulat.n_points());
  for (std::size_t i = 0; i < ulat.n_points(); ++i) series[i] = hist.eval(i).psi;

  // backward reconstruction on [rw, rE]
  Lattice1D rs_in(rw, rE, N - 256);
  const CauchyState back = solve_backward_driven(0, coeff::b_zero(), p, rs_in,
                                                 ulat, series, t_max, cfg);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < rs_in.n_points(); ++i) {
    worst = std::max(worst, std::abs(back.psi[i] - s.psi[i]));
    scale = std::max(scale, std::abs(s.psi[i]));
  }
  INFO("relative reconstruction error " << worst / scale);
  CHECK(worst <= 5e-3 * scale);
}
