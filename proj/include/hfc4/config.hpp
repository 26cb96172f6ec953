#pragma once

// Run configuration: INI text with bracketed sections, every key validated and
// unknown keys rejected before any compute.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hfc4/errors.hpp"
#include "hfc4/dynamics.hpp"
#include "hfc4/fft.hpp"
#include "hfc4/model.hpp"
#include "hfc4/potential.hpp"

namespace hfc4 {

/// One requested Lebesgue exponent; `label` keeps the config spelling for CSV headers.
struct NormRequest {
  std::string label;
  double r;
};

struct InitialData {
  std::vector<double> amplitude;  // one per component
  std::vector<double> width;
  std::vector<Point> center;
  std::vector<Point> velocity;
};

struct DiagnosticsConfig {
  std::vector<NormRequest> norms;
  std::string morawetz_weight = "abs_x";  // abs_x | abs_xy | half_square | none
  double epsilon_cells = 2.0;             // ε in grid spacings
  std::vector<double> residual_times;     // Morawetz identity residual evaluated here
  int tensor_stride = 0;                  // 0 disables the tensor action
  std::string localized = "off";          // off | case1 | case2
  double ball_radius = 2.0;
  int ball_stride = 4;
  std::vector<double> snapshot_times;
  std::vector<double> scattering_times;   // pullbacks stored here; residual(t/2, t) reported at t
};

struct RunConfig {
  ModelParams model;
  int n = 64;
  double L = 40.0;
  std::size_t max_points = kDefaultPointBudget;
  double dt = 5e-3;
  double T = 1.0;
  IntegratorConfig integrator;
  PotentialSpec potential;
  DiagnosticsConfig diagnostics;
  InitialData initial;
  std::string experiment = "run";
  std::uint64_t seed = 1;
  fft::Planner planner = fft::Planner::estimate;
  boost::property_tree::ptree resolved;  // every key after defaults, for metadata
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ';') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

/// Parses "inf", integers, decimals and fractions a/b.
inline double parse_number(const std::string& s, const std::string& key) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const double a = std::stod(s.substr(0, slash), &pos);
      if (pos != slash) throw std::invalid_argument("");
      const std::string rest = s.substr(slash + 1);
      const double b = std::stod(rest, &pos);
      if (pos != rest.size() || b == 0.0) throw std::invalid_argument("");
      return a / b;
    }
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("key '" + key + "': cannot parse '" + s + "' as a number");
  }
}

inline std::vector<double> parse_numbers(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& t : split_list(s))
    if (!t.empty()) out.push_back(parse_number(t, key));
  return out;
}

inline int parse_int(const std::string& s, const std::string& key) {
  const double v = parse_number(s, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

/// Broadcasts a single value or checks a list has `count` entries.
inline std::vector<double> per_component(std::vector<double> v, int count, const std::string& key) {
  if (v.size() == 1) v.assign(count, v.front());
  if (static_cast<int>(v.size()) != count)
    throw ValidationError("key '" + key + "' needs 1 or " + std::to_string(count) + " values");
  return v;
}

inline std::vector<Point> per_component_points(const std::vector<double>& v, int N, int d, const std::string& key) {
  std::vector<Point> out(N, Point{0, 0, 0});
  if (v.empty()) return out;
  if (static_cast<int>(v.size()) == d) {
    for (auto& p : out)
      for (int a = 0; a < d; ++a) p[a] = v[a];
    return out;
  }
  if (static_cast<int>(v.size()) != N * d)
    throw ValidationError("key '" + key + "' needs d or N*d values");
  for (int j = 0; j < N; ++j)
    for (int a = 0; a < d; ++a) out[j][a] = v[j * d + a];
  return out;
}

}  // namespace detail

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"model", {"d", "N", "sigma1", "sigma2", "p", "gamma1", "gamma2", "rho1", "rho2", "b", "b_jk"}},
      {"grid", {"d", "n", "L", "max_points"}},
      {"integrator", {"dt", "T", "diagnostics_stride", "drift_guard"}},
      {"potential", {"family", "V0", "s"}},
      {"diagnostics",
       {"norms", "morawetz_weight", "epsilon_cells", "residual_times", "tensor_stride", "localized", "ball_radius",
        "ball_stride", "snapshot_times", "scattering_times"}},
      {"initial", {"amplitude", "width", "center", "velocity"}},
      {"run", {"experiment", "seed", "planner"}},
  };
  return schema;
}

inline RunConfig parse_config(const boost::property_tree::ptree& pt) {
  const auto& schema = config_schema();
  for (const auto& [section, body] : pt) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      if (body.empty()) throw ValidationError("key '" + section + "' appears outside any section");
      throw ValidationError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ValidationError("unknown key '" + key + "' in [" + section + "]");
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = pt.get_optional<std::string>(path)) return *v;
    return std::nullopt;
  };
  auto num = [&](const std::string& path, double def) {
    const auto v = get(path);
    return v ? detail::parse_number(*v, path) : def;
  };
  auto integer = [&](const std::string& path, int def) {
    const auto v = get(path);
    return v ? detail::parse_int(*v, path) : def;
  };
  auto list = [&](const std::string& path) {
    const auto v = get(path);
    return v ? detail::parse_numbers(*v, path) : std::vector<double>{};
  };

  RunConfig c;
  ModelParams& m = c.model;
  m.d = integer("model.d", 3);
  m.N = integer("model.N", 1);
  m.sigma1 = integer("model.sigma1", 0);
  m.sigma2 = integer("model.sigma2", 0);
  m.p = num("model.p", 2.0);
  m.gamma1 = num("model.gamma1", 1.0);
  m.gamma2 = num("model.gamma2", 1.0);
  m.rho1 = num("model.rho1", 0.0);
  m.rho2 = num("model.rho2", 0.0);
  m.b = num("model.b", 0.0);
  if (m.N < 1) throw ValidationError("model.N must be >= 1");
  {
    auto bjk = list("model.b_jk");
    if (bjk.empty()) bjk = {0.0};
    if (bjk.size() == 1) bjk.assign(static_cast<std::size_t>(m.N) * m.N, bjk.front());
    m.bjk = bjk;
  }
  m.check_structure();

  if (const auto gd = get("grid.d"); gd && detail::parse_int(*gd, "grid.d") != m.d)
    throw ValidationError("grid.d must equal model.d");
  c.n = integer("grid.n", 64);
  c.L = num("grid.L", 40.0);
  c.max_points = static_cast<std::size_t>(num("grid.max_points", static_cast<double>(kDefaultPointBudget)));
  if (!(c.L > 0.0) || !std::isfinite(c.L)) throw ValidationError("grid.L must be positive");

  c.dt = num("integrator.dt", 5e-3);
  c.T = num("integrator.T", 1.0);
  c.integrator.dt = c.dt;
  c.integrator.diagnostics_stride = integer("integrator.diagnostics_stride", 1);
  c.integrator.drift_guard = num("integrator.drift_guard", 1e-4);
  if (!(c.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
  if (!(c.T >= 0.0)) throw ValidationError("integrator.T must be >= 0");
  if (c.integrator.diagnostics_stride < 1) throw ValidationError("integrator.diagnostics_stride must be >= 1");
  if (!(c.integrator.drift_guard > 0.0)) throw ValidationError("integrator.drift_guard must be positive");
  try {
    step_count(c.T, c.dt);
  } catch (const DomainError& e) {
    throw ValidationError(std::string("integrator: ") + e.what());
  }

  const std::string family = get("potential.family").value_or("zero");
  if (family == "zero")
    c.potential.family = PotentialSpec::Family::zero;
  else if (family == "gaussian_bump")
    c.potential.family = PotentialSpec::Family::gaussian_bump;
  else
    throw ValidationError("potential.family must be zero or gaussian_bump");
  c.potential.amplitude = num("potential.V0", 0.0);
  c.potential.width = num("potential.s", 1.0);
  if (c.potential.amplitude < 0.0) throw ValidationError("potential.V0 must be >= 0");
  if (!(c.potential.width > 0.0)) throw ValidationError("potential.s must be positive");

  DiagnosticsConfig& dg = c.diagnostics;
  if (const auto v = get("diagnostics.norms"))
    for (const auto& tok : detail::split_list(*v)) {
      if (tok.empty()) continue;
      const double r = detail::parse_number(tok, "diagnostics.norms");
      if (!(r >= 1.0)) throw ValidationError("diagnostics.norms entries must be >= 1");
      dg.norms.push_back({tok, r});
    }
  dg.morawetz_weight = get("diagnostics.morawetz_weight").value_or("abs_x");
  if (!std::set<std::string>{"abs_x", "abs_xy", "half_square", "none"}.count(dg.morawetz_weight))
    throw ValidationError("diagnostics.morawetz_weight must be abs_x, abs_xy, half_square or none");
  dg.epsilon_cells = num("diagnostics.epsilon_cells", 2.0);
  if (!(dg.epsilon_cells > 0.0)) throw ValidationError("diagnostics.epsilon_cells must be positive");
  dg.residual_times = list("diagnostics.residual_times");
  dg.tensor_stride = integer("diagnostics.tensor_stride", 0);
  if (dg.tensor_stride < 0) throw ValidationError("diagnostics.tensor_stride must be >= 0");
  dg.localized = get("diagnostics.localized").value_or("off");
  if (!std::set<std::string>{"off", "case1", "case2"}.count(dg.localized))
    throw ValidationError("diagnostics.localized must be off, case1 or case2");
  dg.ball_radius = num("diagnostics.ball_radius", 2.0);
  dg.ball_stride = integer("diagnostics.ball_stride", 4);
  if (!(dg.ball_radius > 0.0) || dg.ball_stride < 1) throw ValidationError("ball radius and stride must be positive");
  dg.snapshot_times = list("diagnostics.snapshot_times");
  dg.scattering_times = list("diagnostics.scattering_times");
  for (const auto* times : {&dg.residual_times, &dg.snapshot_times, &dg.scattering_times})
    for (double t : *times)
      if (!(t >= 0.0 && t <= c.T)) throw ValidationError("diagnostics times must lie in [0, T]");

  const int N = m.N, d = m.d;
  c.initial.amplitude = detail::per_component(list("initial.amplitude").empty() ? std::vector<double>{1.0}
                                                                                : list("initial.amplitude"),
                                              N, "initial.amplitude");
  c.initial.width = detail::per_component(
      list("initial.width").empty() ? std::vector<double>{1.0} : list("initial.width"), N, "initial.width");
  for (double w : c.initial.width)
    if (!(w > 0.0)) throw ValidationError("initial.width must be positive");
  if (d <= 3) {
    c.initial.center = detail::per_component_points(list("initial.center"), N, d, "initial.center");
    c.initial.velocity = detail::per_component_points(list("initial.velocity"), N, d, "initial.velocity");
  }

  c.experiment = get("run.experiment").value_or("run");
  c.seed = static_cast<std::uint64_t>(num("run.seed", 1.0));
  const std::string planner = get("run.planner").value_or("estimate");
  if (planner == "estimate")
    c.planner = fft::Planner::estimate;
  else if (planner == "measure")
    c.planner = fft::Planner::measure;
  else
    throw ValidationError("run.planner must be estimate or measure");

  // resolved view: the input plus every defaulted key
  auto& r = c.resolved;
  r = pt;
  auto def = [&](const std::string& path, const std::string& value) {
    if (!r.get_optional<std::string>(path)) r.put(path, value);
  };
  auto str = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  def("model.d", std::to_string(m.d));
  def("model.N", std::to_string(m.N));
  def("model.sigma1", std::to_string(m.sigma1));
  def("model.sigma2", std::to_string(m.sigma2));
  def("model.p", str(m.p));
  def("model.gamma1", str(m.gamma1));
  def("model.gamma2", str(m.gamma2));
  def("model.rho1", str(m.rho1));
  def("model.rho2", str(m.rho2));
  def("model.b", str(m.b));
  def("model.b_jk", "0");
  def("grid.n", std::to_string(c.n));
  def("grid.L", str(c.L));
  def("grid.max_points", std::to_string(c.max_points));
  def("integrator.dt", str(c.dt));
  def("integrator.T", str(c.T));
  def("integrator.diagnostics_stride", std::to_string(c.integrator.diagnostics_stride));
  def("integrator.drift_guard", str(c.integrator.drift_guard));
  def("potential.family", family);
  def("potential.V0", str(c.potential.amplitude));
  def("potential.s", str(c.potential.width));
  def("diagnostics.morawetz_weight", dg.morawetz_weight);
  def("diagnostics.epsilon_cells", str(dg.epsilon_cells));
  def("diagnostics.tensor_stride", std::to_string(dg.tensor_stride));
  def("diagnostics.localized", dg.localized);
  def("diagnostics.ball_radius", str(dg.ball_radius));
  def("diagnostics.ball_stride", std::to_string(dg.ball_stride));
  def("initial.amplitude", "1");
  def("initial.width", "1");
  def("run.experiment", c.experiment);
  def("run.seed", std::to_string(c.seed));
  def("run.planner", planner);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return parse_config(pt);
}

inline RunConfig config_from_string(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return parse_config(pt);
}

}  // namespace hfc4
