#ifndef SCRI_SCATTER_IO_HPP
#define SCRI_SCATTER_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scri_scatter/chart.hpp"
#include "scri_scatter/coeff.hpp"
#include "scri_scatter/energy.hpp"
#include "scri_scatter/errors.hpp"
#include "scri_scatter/fields.hpp"
#include "scri_scatter/labs.hpp"
#include "scri_scatter/nullgrid.hpp"

namespace scri::io {

using nlohmann::json;

// Numeric payloads are formatted with 17 significant digits so reruns with
// identical configs produce byte-identical files.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void ensure_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
}

// FNV-1a, used as the manifest's config hash.
inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Field snapshot: header row carries the R lattice, first column the x
// lattice.
inline std::string field_csv(const ModeField &f) {
  std::string s = "x\\R";
  for (std::size_t j = 0; j < f.R.n_points(); ++j) s += "," + fmt17(f.R.x(j));
  s += "\n";
  for (std::size_t i = 0; i < f.x.n_points(); ++i) {
    s += fmt17(f.x.x(i));
    for (std::size_t j = 0; j < f.R.n_points(); ++j) s += "," + fmt17(f.at(i, j));
    s += "\n";
  }
  return s;
}

inline json field_sidecar(const ModeField &f) {
  return json{{"l", f.l},
              {"chart", f.tag == ChartTag::u_chart ? "retarded" : "advanced"},
              {"x0", f.x.x0},
              {"dx", f.x.dx},
              {"n_x", f.x.n_points()},
              {"R0", f.R.x0},
              {"dR", f.R.dx},
              {"n_R", f.R.n_points()}};
}

inline std::string profile_csv(const ScriProfile &p) {
  std::string s = "x,theta\n";
  for (std::size_t i = 0; i < p.values.size(); ++i)
    s += fmt17(p.x.x(i)) + "," + fmt17(p.values[i]) + "\n";
  return s;
}

inline json profile_sidecar(const ScriProfile &p) {
  return json{{"l", p.l},
              {"chart", p.tag == ChartTag::u_chart ? "scri_plus" : "scri_minus"},
              {"x0", p.x.x0},
              {"dx", p.x.dx},
              {"n", p.x.n_points()},
              {"support_lo", p.support_lo},
              {"support_hi", p.support_hi}};
}

inline std::string sigma_csv(const SigmaData &d) {
  std::string s = "rstar,theta,xi\n";
  for (std::size_t i = 0; i < d.theta.size(); ++i)
    s += fmt17(d.rstar.x(i)) + "," + fmt17(d.theta[i]) + "," + fmt17(d.xi[i]) + "\n";
  return s;
}

inline std::string leaf_csv(const energy::EnergyReport &r) {
  std::string s = "s,tau,E_Hs,error_so_far\n";
  for (const auto &row : r.leaves)
    s += fmt17(row.s) + "," + fmt17(row.tau) + "," + fmt17(row.E_hs) + "," +
         fmt17(row.bulk_so_far) + "\n";
  return s;
}

inline json energy_report_json(const energy::EnergyReport &r) {
  json leaves = json::array();
  for (const auto &row : r.leaves)
    leaves.push_back(json{{"tau", row.tau},
                          {"s", row.s},
                          {"E_Hs", row.E_hs},
                          {"E_ref", row.E_ref},
                          {"E_S_partial", row.E_S_partial},
                          {"bulk_so_far", row.bulk_so_far},
                          {"residual", row.residual}});
  return json{{"l", r.l},
              {"u0", r.u0},
              {"E_sigma0_far", r.E_sigma0_far},
              {"E_Su0", r.E_Su0},
              {"E_scri_u0", r.E_scri_u0},
              {"stokes_residual", r.stokes_residual},
              {"stokes_residual_rel", r.stokes_residual_rel},
              {"error_integral", r.error_integral},
              {"c_lower", r.c_lower},
              {"C_upper", r.C_upper},
              {"gronwall_constant", r.gronwall_constant},
              {"leaves", leaves}};
}

inline json chart_audit_json(const chart::ChartAuditReport &r) {
  json rows = json::array();
  for (const auto &row : r.rows)
    rows.push_back(json{{"name", row.name},
                        {"min", row.min_value},
                        {"max", row.max_value},
                        {"bound_lo", row.bound_lo},
                        {"bound_hi", row.bound_hi},
                        {"pass", row.pass},
                        {"witness_u", row.witness.u},
                        {"witness_R", row.witness.R}});
  return json{{"pass", r.pass},
              {"rows", rows},
              {"morawetz_min", r.morawetz_min},
              {"morawetz_floor", r.morawetz_floor},
              {"morawetz_pass", r.morawetz_pass},
              {"eps_root_criterion", r.eps_root_criterion},
              {"c_eps_positive", r.c_eps_positive}};
}

inline json b_report_json(const coeff::BValidationReport &r) {
  return json{{"b_max", r.b_max},
              {"sup_positivity_violation", r.sup_positivity_violation},
              {"scri_limit_residual", r.scri_limit_residual},
              {"a3_best_constant", r.a3_best_constant},
              {"a4_best_constant", r.a4_best_constant},
              {"a1_pass", r.a1_pass},
              {"a2_pass", r.a2_pass},
              {"a3_unbounded", r.a3_unbounded},
              {"a4_unbounded", r.a4_unbounded}};
}

inline json picard_json(const nullgrid::PicardReport &r) {
  return json{{"delta_norms", r.delta_norms},
              {"ratios", r.ratios},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"final_ratio", r.final_ratio}};
}

inline json lab_json(const labs::LabResult &r) {
  json cols = json::object();
  for (std::size_t c = 0; c < r.columns.size(); ++c) cols[r.columns[c]] = r.measured[c];
  return json{{"name", r.name},        {"sweep", r.sweep},
              {"measured", cols},      {"fitted", r.fitted},
              {"fit_residual", r.fit_residual}, {"pass", r.pass},
              {"note", r.note}};
}

inline std::string lab_csv(const labs::LabResult &r) {
  std::string s = "sweep";
  for (const auto &c : r.columns) s += "," + c;
  s += "\n";
  for (std::size_t k = 0; k < r.sweep.size(); ++k) {
    s += fmt17(r.sweep[k]);
    for (std::size_t c = 0; c < r.columns.size(); ++c)
      s += "," + fmt17(r.measured[c][k]);
    s += "\n";
  }
  return s;
}

} // namespace scri::io

#endif
