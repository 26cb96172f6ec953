// hfc4: run harness. Exit status 0 ok, 1 identity-check failure or runtime error,
// 2 validation rejection, 3 drift-guard abort, 4 budget refusal.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hfc4/checks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hfc4;

namespace {

json to_json(const boost::property_tree::ptree& pt) {
  json out = json::object();
  for (const auto& [section, body] : pt) {
    json s = json::object();
    for (const auto& [k, v] : body) s[k] = v.data();
    out[section] = s;
  }
  return out;
}

json to_json(const AdmissibilityReport& r) {
  json c = json::array();
  for (const auto& x : r.conditions)
    c.push_back({{"key", x.key}, {"holds", x.holds}, {"applicable", x.applicable}, {"bound", x.bound}});
  return {{"p_star", r.critical.p_star.str()},
          {"p1_star", r.critical.p1_star.str()},
          {"p2_star", r.critical.p2_star.str()},
          {"conditions", c},
          {"intercritical", r.intercritical},
          {"decay_case", to_string(r.decay_case)},
          {"scattering_case", to_string(r.scattering_case)},
          {"messages", r.messages}};
}

json to_json(const PotentialReport& r) {
  return {{"accepted", r.accepted},
          {"nonnegative", r.nonnegative},
          {"radially_nonincreasing", r.radially_nonincreasing},
          {"min_value", r.min_value},
          {"max_radial_derivative", r.max_radial_derivative},
          {"ld4_norm", r.ld4_norm},
          {"hardy_term", r.hardy_applicable ? json(r.hardy_sup) : json("not applicable (d<5)")},
          {"messages", r.messages}};
}

struct Context {
  std::string command;
  RunConfig config;
  fs::path out;
  json meta;
};

void write_metadata(Context& ctx) {
  std::ofstream f(ctx.out / "metadata.json");
  f << ctx.meta.dump(2) << '\n';
}

void ensure_norm(RunConfig& c, const std::string& label, double r) {
  for (const auto& n : c.diagnostics.norms)
    if (n.r == r) return;
  c.diagnostics.norms.push_back({label, r});
}

int run_simulation(Context& ctx) {
  RunConfig& c = ctx.config;
  const bool decay = ctx.command == "decay-experiment";
  const bool scattering = ctx.command == "scattering-experiment";
  const int d = c.model.d;
  const double target = (2.0 * d + 4.0) / d;
  const std::string target_label = std::to_string(2 * d + 4) + "/" + std::to_string(d);
  if (decay) {
    ensure_norm(c, target_label, target);
    ensure_norm(c, "inf", infinity);
  }
  if (scattering && c.diagnostics.scattering_times.empty())
    throw ValidationError("scattering-experiment needs diagnostics.scattering_times");
  if (scattering && c.model.sigma2 != 0)
    throw ValidationError("scattering residual refused for sigma2 = 1: the potential pullback is not exact here");

  c.model.check_simulable();
  if (c.model.sigma2) {
    const Grid g(d, c.n, c.L, c.max_points);
    const auto pr = potential_admissibility(c.potential, g);
    ctx.meta["potential_report"] = to_json(pr);
    if (!pr.accepted) throw ValidationError("potential rejected:\n" + pr.text());
  }
  Simulation sim(c);
  fs::create_directories(ctx.out);
  RunResult res;
  try {
    res = sim.run(ctx.out);
  } catch (const DriftGuardError&) {
    ctx.meta["status"] = "drift_guard_abort";
    write_metadata(ctx);
    throw;
  }
  write_csv((ctx.out / "diagnostics.csv").string(), c.diagnostics.norms, res.records);
  ctx.meta["boundary_shell_max_fraction"] = res.max_boundary_fraction;
  ctx.meta["boundary_warning"] = res.boundary_warning;
  ctx.meta["snapshots"] = res.snapshots;

  const auto& r0 = res.records.front();
  const auto& r1 = res.records.back();
  json cons = json::object();
  std::vector<double> drift;
  for (std::size_t j = 0; j < r0.mass.size(); ++j) drift.push_back(std::abs(r1.mass[j] - r0.mass[j]) / r0.mass[j]);
  cons["mass_relative_drift"] = drift;
  cons["energy_relative_drift"] = std::abs(r1.energy.total() - r0.energy.total()) / std::abs(r0.energy.total());
  ctx.meta["conservation"] = cons;

  if (decay) {
    std::size_t it = 0, ii = 0;
    for (std::size_t i = 0; i < c.diagnostics.norms.size(); ++i) {
      if (c.diagnostics.norms[i].r == target) it = i;
      if (std::isinf(c.diagnostics.norms[i].r)) ii = i;
    }
    json comps = json::array();
    for (int j = 0; j < c.model.N; ++j) {
      std::vector<double> t, lt, linf;
      for (const auto& r : res.records) {
        t.push_back(r.t);
        lt.push_back(r.norms[it][j]);
        linf.push_back(r.norms[ii][j]);
      }
      const double mx = *std::max_element(lt.begin(), lt.end());
      comps.push_back({{"j", j + 1},
                       {"target_norm_final", lt.back()},
                       {"target_norm_max", mx},
                       {"final_over_max", lt.back() / mx},
                       {"linf_loglog_slope_1_10", loglog_slope(t, linf, 1.0, 10.0)},
                       {"reference_slope", -d / 4.0}});
    }
    ctx.meta["decay"] = {{"target_exponent", target_label}, {"components", comps}};
    std::cout << "decay summary (target L^" << target_label << "):\n" << ctx.meta["decay"].dump(2) << "\n";
  }
  if (scattering) {
    json s = json::array();
    for (const auto& [t, v] : res.scattering) s.push_back({{"t", t}, {"residual_t_2t", v}});
    ctx.meta["scattering"] = s;
    std::cout << "scattering residual series:\n" << s.dump(2) << "\n";
  }
  ctx.meta["status"] = "completed";
  write_metadata(ctx);
  std::cout << "wrote " << (ctx.out / "diagnostics.csv").string() << "\n";
  return 0;
}

int run_replay(Context& ctx) {
  RunConfig& c = ctx.config;
  c.model.check_simulable();
  std::vector<fs::path> snaps;
  for (const auto& e : fs::directory_iterator(ctx.out))
    if (e.path().filename().string().rfind("snapshot_", 0) == 0) snaps.push_back(e.path());
  std::sort(snaps.begin(), snaps.end());
  if (snaps.empty()) throw Error("no snapshots in " + ctx.out.string());
  RunConfig rc = c;
  rc.diagnostics.residual_times.clear();
  rc.diagnostics.snapshot_times.clear();
  rc.diagnostics.scattering_times.clear();
  Simulation sim(rc);
  std::optional<LocalizedMonitor> loc;
  if (c.diagnostics.localized != "off")
    loc.emplace(c.model, LocalizedWindow{c.diagnostics.ball_radius, c.diagnostics.ball_stride},
                c.diagnostics.localized == "case1" ? LocalizedVariant::case1 : LocalizedVariant::case2);
  std::vector<DiagnosticsRecord> records;
  std::map<double, SystemState> pulled;
  for (const auto& p : snaps) {
    const SystemState s = read_snapshot(p.string(), c.max_points);
    if (!(s.grid() == sim.grid()) || s.components() != c.model.N)
      throw ValidationError("snapshot " + p.string() + " does not match the config grid");
    DiagnosticsRecord r = sim.evaluate(s, std::lround(s.t / c.dt));
    if (loc) r.q_localized = loc->add(s);
    if (c.model.sigma2 == 0) {
      pulled.emplace(s.t, pullback(s, c.model.sigma1));
      for (const auto& [t, st] : pulled)
        if (std::abs(2 * t - s.t) <= 1e-9 * std::max(1.0, s.t) && t < s.t)
          r.scattering_residual = pulled_back_residual(st, pulled.at(s.t));
    }
    records.push_back(std::move(r));
  }
  write_csv((ctx.out / "replay.csv").string(), c.diagnostics.norms, records);
  std::cout << "wrote " << (ctx.out / "replay.csv").string() << " from " << snaps.size() << " snapshots\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HFC4 pseudospectral simulator and diagnostics"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  const char* names[] = {"validate", "simulate", "decay-experiment", "scattering-experiment", "check-identities",
                         "replay"};
  const char* help[] = {"model admissibility report only",
                        "evolve and write CSV, snapshots and metadata",
                        "simulate plus the decay summary of the target norm",
                        "simulate plus the scattering residual series",
                        "identity, equivalence, inequality and exponent checks",
                        "recompute diagnostics from stored snapshots"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("config", config_path, "run configuration (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (default runs/<experiment>)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  Context ctx;
  ctx.command = command;
  try {
    fft::configure_threads_from_environment();
    ctx.config = load_config(config_path);
    fft::set_planner(ctx.config.planner);
    ctx.out = out_dir.empty() ? fs::path("runs") / ctx.config.experiment : fs::path(out_dir);
    const AdmissibilityReport report = validate_params(ctx.config.model);
    ctx.meta = {{"command", command},
                {"config_path", config_path},
                {"config", to_json(ctx.config.resolved)},
                {"admissibility", to_json(report)},
                {"threads", fft::threads()}};

    if (command == "validate") {
      std::cout << report.text();
      const auto pairs = scattering_pairs(ctx.config.model);
      std::cout << "exponent pairs:\n";
      for (int i = 0; i < 8; ++i)
        std::cout << "  (q" << i + 1 << ", r" << i + 1 << ") = (" << pairs.pairs[i].q << ", " << pairs.pairs[i].r
                  << ")" << (pairs.pairs[i].admissible ? "" : "  not admissible") << "\n";
      for (const auto& v : pairs.violations) std::cout << "  note: " << v << "\n";
      if (ctx.config.model.sigma2) {
        if (ctx.config.model.d > 3) {
          std::cout << "potential: grid checks need d <= 3\n";
        } else {
          const Grid g(ctx.config.model.d, ctx.config.n, ctx.config.L, ctx.config.max_points);
          const auto pr = potential_admissibility(ctx.config.potential, g);
          std::cout << "potential:\n" << pr.text();
          if (!pr.accepted) return 2;
        }
      }
      return 0;
    }
    if (command == "check-identities") {
      ctx.config.model.check_simulable();
      const CheckSuite suite = check_identities(ctx.config);
      std::cout << suite.text();
      fs::create_directories(ctx.out);
      json lines = json::array();
      for (const auto& l : suite.lines)
        lines.push_back({{"name", l.name}, {"value", l.value}, {"tolerance", l.tolerance}, {"pass", l.pass},
                         {"gating", l.gating}, {"detail", l.detail}});
      ctx.meta["checks"] = lines;
      ctx.meta["status"] = suite.ok() ? "completed" : "identity_check_failed";
      write_metadata(ctx);
      return suite.ok() ? 0 : 1;
    }
    if (command == "replay") return run_replay(ctx);
    return run_simulation(ctx);
  } catch (const ValidationError& e) {
    std::cerr << "validation: " << e.what() << "\n";
    return 2;
  } catch (const DriftGuardError& e) {
    std::cerr << "drift guard: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
