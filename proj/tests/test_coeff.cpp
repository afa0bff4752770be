#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scri_scatter/coeff.hpp"
#include "support/oracles.hpp"

using namespace scri;
using namespace scri::coeff;
using Catch::Approx;

static chart::ChartParams desk_params() {
  chart::ChartParams p;
  p.m = 1.0;
  p.u_min = -60.0;
  p.u_max = -20.0;
  p.R_max = 0.04;
  p.eps = 0.1;
  p.u0 = -20.0;
  return p;
}

TEST_CASE("validate_b on the zero coefficient") {
  const auto params = desk_params();
  const auto rep = validate_b(b_zero(), params, {32, 128},
                              default_leaf_family(params));
  CHECK(rep.a1_pass);
  CHECK(rep.a2_pass);
  CHECK(rep.a3_best_constant == 0.0);
  CHECK(rep.a4_best_constant == 0.0);
}

TEST_CASE("validate_b flags b = R as A3-unbounded near scri") {
  const auto params = desk_params();
  const auto rep = validate_b(b_linear_R(), params, {24, 512},
                              default_leaf_family(params), 1e4);
  CHECK(rep.a1_pass);
  CHECK(rep.a2_pass); // vanishes at scri
  // analytic cross check of the Morawetz derivative: That R = -2(1+uR),
  // so the ratio is 2|1+uR|/R, which blows up on the innermost rows
  const double R_in = params.R_max / 512.0;
  double expect = 0.0;
  for (double u : {params.u_min, params.u_max})
    expect = std::max(expect, 2.0 * std::abs(1.0 + u * R_in) / R_in);
  CHECK(rep.a3_best_constant > 1e4);
  CHECK(rep.a3_best_constant <= expect * 1.05);
  CHECK(rep.a3_unbounded); // grows like 1/R under refinement; over the threshold
}

TEST_CASE("validate_b cutoff family has finite constants") {
  const auto params = desk_params();
  const auto b = b_cutoff(0.5, 0.015, 0.03);
  const auto rep =
      validate_b(b, params, {24, 256}, default_leaf_family(params));
  CHECK(rep.a1_pass);
  CHECK(rep.a2_pass);
  CHECK_FALSE(rep.a3_unbounded);
  CHECK_FALSE(rep.a4_unbounded);
  CHECK(rep.a3_best_constant > 0.0);
}

TEST_CASE("validate_b constant family violates A2") {
  const auto params = desk_params();
  const auto rep = validate_b(b_constant(1.0), params, {16, 128},
                              default_leaf_family(params));
  CHECK(rep.a1_pass);
  CHECK_FALSE(rep.a2_pass);
  CHECK(rep.a4_unbounded); // no decay toward the boundary label r -> 0
}

TEST_CASE("conformal data maps: trivial cases and round trip") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const std::size_t n = 257;
  std::vector<double> theta(n, 0.0), xi(n, 0.0), Omega(n), dOm(n);
  for (std::size_t i = 0; i < n; ++i) {
    Omega[i] = 0.3 + 0.2 * std::sin(0.1 * double(i));
    dOm[i] = dist(rng);
  }

  SECTION("zero data maps to zero") {
    auto out = physical_to_conformal_data(theta, xi, Omega, dOm);
    for (double v : out.value) CHECK(v == 0.0);
    for (double v : out.velocity) CHECK(v == 0.0);
  }

  SECTION("identity for Omega = 1, dOmega = 0") {
    std::fill(Omega.begin(), Omega.end(), 1.0);
    std::fill(dOm.begin(), dOm.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      theta[i] = dist(rng);
      xi[i] = dist(rng);
    }
    auto out = physical_to_conformal_data(theta, xi, Omega, dOm);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(out.value[i] == theta[i]);
      CHECK(out.velocity[i] == xi[i]);
    }
  }

  SECTION("round trip on random compactly supported data") {
    for (std::size_t i = 64; i < 192; ++i) {
      theta[i] = dist(rng);
      xi[i] = dist(rng);
    }
    auto fwd = physical_to_conformal_data(theta, xi, Omega, dOm);
    auto back = conformal_to_physical_data(fwd.value, fwd.velocity, Omega, dOm);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(back.value[i] == Approx(theta[i]).margin(1e-12));
      CHECK(back.velocity[i] == Approx(xi[i]).margin(1e-12));
    }
  }

  SECTION("zero-guard where Omega vanishes outside the support") {
    std::fill(Omega.begin(), Omega.end(), 0.0);
    auto out = physical_to_conformal_data(theta, xi, Omega, dOm);
    for (double v : out.value) CHECK(v == 0.0);
  }
}

TEST_CASE("validate_b is monotone under grid refinement") {
  const auto params = desk_params();
  const auto b = b_cutoff(0.5, 0.015, 0.03);
  const auto fam = default_leaf_family(params);
  double prev_a3 = 0.0;
  for (std::size_t nR : {128u, 256u, 512u}) {
    const auto rep = validate_b(b, params, {16, nR}, fam);
    CHECK(rep.a3_best_constant >= prev_a3 * (1.0 - 1e-9));
    prev_a3 = rep.a3_best_constant;
  }
}
