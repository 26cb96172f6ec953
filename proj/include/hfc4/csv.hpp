#pragma once

// Diagnostics rows. One row per (sample time, component); energy and the other
// system-wide columns repeat on every component row; absent values are empty cells.

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hfc4/config.hpp"
#include "hfc4/diagnostics.hpp"

namespace hfc4 {

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  std::vector<double> mass;
  EnergyBreakdown energy;
  std::vector<std::vector<double>> norms;  // [request][component]
  std::vector<double> action;              // M_j, empty when no weight
  std::optional<double> tensor_total;
  std::vector<double> residual_morawetz;   // per component, empty when not evaluated
  std::optional<double> q_localized;
  std::optional<double> scattering_residual;
};

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> csv_header(const std::vector<NormRequest>& norms) {
  std::vector<std::string> h{"t", "j", "mass_j", "E_total", "E_kin4", "E_kin2", "E_pot", "E_choquard", "E_hf"};
  for (const auto& n : norms) h.push_back("Lr_" + n.label + "_j");
  for (const char* c : {"M_j", "tensor_total", "residual_morawetz", "Q_localized", "scattering_residual"})
    h.emplace_back(c);
  return h;
}

inline void write_csv(std::ostream& out, const std::vector<NormRequest>& norms,
                      const std::vector<DiagnosticsRecord>& records) {
  const auto header = csv_header(norms);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
  for (const auto& r : records)
    for (std::size_t j = 0; j < r.mass.size(); ++j) {
      out << csv_number(r.t) << ',' << j + 1 << ',' << csv_number(r.mass[j]) << ',' << csv_number(r.energy.total())
          << ',' << csv_number(r.energy.kin4) << ',' << csv_number(r.energy.kin2) << ',' << csv_number(r.energy.pot)
          << ',' << csv_number(r.energy.choquard) << ',' << csv_number(r.energy.hf());
      for (const auto& n : r.norms) out << ',' << csv_number(n[j]);
      out << ',' << (r.action.empty() ? std::string() : csv_number(r.action[j]));
      out << ',' << opt(r.tensor_total);
      out << ',' << (r.residual_morawetz.empty() ? std::string() : csv_number(r.residual_morawetz[j]));
      out << ',' << opt(r.q_localized) << ',' << opt(r.scattering_residual) << '\n';
    }
}

inline void write_csv(const std::string& path, const std::vector<NormRequest>& norms,
                      const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_csv(out, norms, records);
}

}  // namespace hfc4
