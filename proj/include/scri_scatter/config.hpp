#ifndef SCRI_SCATTER_CONFIG_HPP
#define SCRI_SCATTER_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/scatter.hpp"

namespace scri::config {

// Flat INI-style key/value configuration, one section per module.
struct Ini {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string source_text;

  bool has(const std::string &sec, const std::string &key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string &sec, const std::string &key,
                  const std::string &def) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return def;
    auto k = s->second.find(key);
    return k == s->second.end() ? def : k->second;
  }
  double num(const std::string &sec, const std::string &key, double def) const {
    const std::string v = get(sec, key, "");
    if (v.empty()) return def;
    try {
      return std::stod(v);
    } catch (...) {
      throw ConfigError("config: bad number for " + sec + "." + key + ": " + v);
    }
  }
  long integer(const std::string &sec, const std::string &key, long def) const {
    return static_cast<long>(num(sec, key, double(def)));
  }
  bool flag(const std::string &sec, const std::string &key, bool def) const {
    std::string v = get(sec, key, def ? "true" : "false");
    return v == "1" || v == "true" || v == "yes" || v == "on";
  }
  std::vector<double> list(const std::string &sec, const std::string &key,
                           const std::vector<double> &def) const {
    const std::string v = get(sec, key, "");
    if (v.empty()) return def;
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
  }
};

inline std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline Ini parse_ini_text(const std::string &text) {
  Ini ini;
  ini.source_text = text;
  std::stringstream ss(text);
  std::string line, section = "global";
  while (std::getline(ss, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value, got: " + line);
    ini.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return ini;
}

inline Ini parse_ini_file(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ini_text(ss.str());
}

// Everything a run needs, validated before any solve starts.
struct RunConfig {
  chart::ChartParams chart;
  // grid
  std::size_t Nu = 512, NR = 512, Nrstar = 2048, n_leaves = 32;
  int l = 0;
  double cfl_null = 0.5, cfl_cauchy = 0.5;
  // nonlinearity
  std::string b_family = "zero";
  double b_amplitude = 1.0, b_R1 = 0.0, b_R2 = 0.0;
  // data family
  double amplitude = 1.0, center = 0.0, sigma = 2.0, width = 0.0;
  // cauchy / extraction
  double rstar_lo = 0.0, rstar_hi = 0.0, rstar_E = 0.0, u_c = 0.0;
  bool reflect_inner = false;
  // scatter
  double extraction_tol = 5e-2;
  bool check_extraction = true;
  bool picard_gate = true;
  double picard_gate_ratio = 0.9;
  // audits
  double worldtube_tol = 1e-6;
  // labs
  std::vector<double> lab_t_values = {0.02, 0.04, 0.08, 0.16, 0.32, 0.64};
  std::vector<double> lab_n_values = {4, 8, 16, 32, 64, 128, 256};
  std::vector<double> lab_lambdas = {0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  std::size_t lab_pairs = 6;
  double lab_alpha = 1.0, lab_beta = 0.3;
  // run
  std::string out = "out";
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string config_text;

  void validate() const {
    chart.validate();
    if (Nu < 16 || NR < 16) throw ConfigError("grid: Nu, NR must be >= 16");
    if (l < 0) throw ConfigError("grid: l must be >= 0");
    if (width <= 0.0) throw ConfigError("data: support width must be positive");
  }
};

inline RunConfig run_config_from_ini(const Ini &ini) {
  RunConfig c;
  c.chart.m = ini.num("chart", "m", 1.0);
  c.chart.u_min = ini.num("chart", "u_min", -200.0);
  c.chart.u_max = ini.num("chart", "u_max", -100.0);
  c.chart.R_max = ini.num("chart", "R_max", 0.012);
  c.chart.eps = ini.num("chart", "eps", 0.1);
  c.chart.u0 = ini.num("chart", "u0", -100.0);

  c.Nu = std::size_t(ini.integer("grid", "Nu", 512));
  c.NR = std::size_t(ini.integer("grid", "NR", 512));
  c.Nrstar = std::size_t(ini.integer("grid", "Nrstar", 2048));
  c.n_leaves = std::size_t(ini.integer("grid", "n_leaves", 32));
  c.l = int(ini.integer("grid", "l_max", 0));
  c.cfl_null = ini.num("grid", "cfl_null", 0.5);
  c.cfl_cauchy = ini.num("grid", "cfl_cauchy", 0.5);

  c.b_family = ini.get("b", "family", "zero");
  c.b_amplitude = ini.num("b", "amplitude", 1.0);
  c.b_R1 = ini.num("b", "R1", 0.0);
  c.b_R2 = ini.num("b", "R2", 0.0);

  c.amplitude = ini.num("data", "amplitude", 1.0);
  c.center = ini.num("data", "center", 0.0);
  c.sigma = ini.num("data", "sigma", 2.0);
  c.width = ini.num("data", "width", 8.0 * c.sigma);

  c.rstar_lo = ini.num("cauchy", "rstar_lo", 0.0);
  c.rstar_hi = ini.num("cauchy", "rstar_hi", 0.0);
  c.rstar_E = ini.num("cauchy", "rstar_extract", 0.0);
  c.u_c = ini.num("cauchy", "u_cone", 0.0);
  c.reflect_inner = ini.flag("cauchy", "reflect_inner", false);

  c.extraction_tol = ini.num("scatter", "extraction_tol", 5e-2);
  c.check_extraction = ini.flag("scatter", "check_extraction", true);
  c.picard_gate = ini.flag("scatter", "picard_gate", true);
  c.picard_gate_ratio = ini.num("scatter", "picard_gate_ratio", 0.9);

  c.worldtube_tol = ini.num("run", "worldtube_tol", 1e-6);
  c.lab_t_values = ini.list("labs", "sobolev_t", c.lab_t_values);
  c.lab_n_values = ini.list("labs", "density_n", c.lab_n_values);
  c.lab_lambdas = ini.list("labs", "lambdas", c.lab_lambdas);
  c.lab_pairs = std::size_t(ini.integer("labs", "pairs", 6));
  c.lab_alpha = ini.num("labs", "alpha", 1.0);
  c.lab_beta = ini.num("labs", "beta", 0.3);

  c.out = ini.get("run", "out", "out");
  c.seed = std::uint64_t(ini.integer("run", "seed", 12345));
  c.threads = int(ini.integer("run", "threads", 1));
  c.config_text = ini.source_text;
  c.validate();
  return c;
}

inline coeff::CoeffB make_b(const RunConfig &c) {
  if (c.b_family == "zero") return coeff::b_zero();
  if (c.b_family == "constant") return coeff::b_constant(c.b_amplitude);
  if (c.b_family == "cutoff") {
    if (!(c.b_R2 > c.b_R1))
      throw ConfigError("b: cutoff family needs R1 < R2");
    return coeff::b_cutoff(c.b_amplitude, c.b_R1, c.b_R2);
  }
  if (c.b_family == "linear_R") return coeff::b_linear_R();
  throw ConfigError("b: unknown family " + c.b_family);
}

// Assembles the scatter pipeline lattices with node alignment.
inline scatter::PipelineConfig make_pipeline(const RunConfig &c) {
  scatter::PipelineConfig p;
  const double U = std::max(std::abs(c.chart.u_min), std::abs(c.chart.u_max));
  p.x = Lattice1D(-U, U, c.Nu);
  p.R_null = Lattice1D(0.0, c.chart.R_max, c.NR);
  if (!(c.rstar_hi > c.rstar_lo))
    throw ConfigError("cauchy: rstar_lo < rstar_hi required");
  const double rw = chart::rstar_of_R(c.chart.R_max, c.chart.m);
  if (std::abs(c.rstar_lo - rw) > 1e-6 * (1.0 + std::abs(rw)))
    throw ConfigError("cauchy: rstar_lo must equal r*(R_max) = " +
                      std::to_string(rw));
  p.rstar = Lattice1D(rw, rw + (c.rstar_hi - rw), c.Nrstar);
  // snap the extraction radius and cone to lattice nodes
  const std::size_t iE =
      std::size_t(std::round((c.rstar_E - p.rstar.x0) / p.rstar.dx));
  p.rstar_E = p.rstar.x(iE);
  const double RE = chart::R_of_rstar(p.rstar_E, c.chart.m);
  p.strip_R = Lattice1D(0.0, RE, c.NR);
  const std::size_t ic = std::size_t(std::round((c.u_c - p.x.x0) / p.x.dx));
  p.u_c = p.x.x(ic);
  p.extraction_tol = c.extraction_tol;
  p.check_extraction = c.check_extraction;
  p.gopt.cfl = c.cfl_null;
  p.gopt.worldtube_tol = c.worldtube_tol;
  p.ccfg.cfl = c.cfl_cauchy;
  p.ccfg.inner = c.reflect_inner ? cauchy::InnerBoundary::reflect
                                 : cauchy::InnerBoundary::vacuum;
  p.apply_picard_gate = c.picard_gate;
  p.picard_gate = c.picard_gate_ratio;
  p.validate(c.chart);
  return p;
}

} // namespace scri::config

#endif
