#pragma once

// Drives one configured run: steps the integrator, samples diagnostics on the
// schedule, fills the Morawetz residual once the following step exists, stores
// pullbacks for the scattering residual and writes snapshots.

#include <filesystem>
#include <functional>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hfc4/csv.hpp"
#include "hfc4/identities.hpp"
#include "hfc4/initial.hpp"
#include "hfc4/monitors.hpp"
#include "hfc4/snapshot.hpp"

namespace hfc4 {

inline std::optional<MorawetzWeight> configured_weight(const RunConfig& c, const Grid& g) {
  const auto& name = c.diagnostics.morawetz_weight;
  const double eps = c.diagnostics.epsilon_cells * g.spacing();
  if (name == "abs_x") return MorawetzWeight::abs_x_regularized(g.dim(), eps);
  if (name == "abs_xy") return MorawetzWeight::abs_xy_regularized(g.dim(), eps);
  if (name == "half_square") return MorawetzWeight::custom_radial(RadialWeight::half_square(g.dim()));
  return std::nullopt;
}

/// Step index of a scheduled time; the time must sit on the dt lattice.
inline long schedule_step(double t, double dt) {
  try {
    return step_count(t, dt);
  } catch (const DomainError&) {
    throw ValidationError("scheduled time " + csv_number(t) + " is not a multiple of dt");
  }
}

/// Least-squares slope of log y against log t over samples with t in [t0, t1].
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0 - 1e-12 && t[i] <= t1 + 1e-12 && y[i] > 0) {
      const double x = std::log(t[i]), v = std::log(y[i]);
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
      ++n;
    }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<double, double>> scattering;  // (t, residual(t/2, t))
  std::vector<MorawetzResidual> residuals;
  std::vector<std::string> snapshots;
  double max_boundary_fraction = 0.0;
  bool boundary_warning = false;
  SystemState final_state;
  std::optional<LocalizedMonitor> localized;
};

class Simulation {
 public:
  explicit Simulation(RunConfig c)
      : cfg_(checked(std::move(c))),
        grid_(cfg_.model.d, cfg_.n, cfg_.L, cfg_.max_points),
        potential_(cfg_.model.sigma2 ? std::optional<Field>(sample_potential(cfg_.potential, grid_)) : std::nullopt),
        integ_(cfg_.model, grid_, potential_, cfg_.integrator),
        weight_(configured_weight(cfg_, grid_)) {
    const auto& dg = cfg_.diagnostics;
    for (double t : dg.residual_times) {
      const long k = schedule_step(t, cfg_.dt);
      if (k < 1 || k >= step_count(cfg_.T, cfg_.dt))
        throw ValidationError("residual times need one step on either side inside [0, T]");
      if (!weight_) throw ValidationError("residual_times need a morawetz_weight");
      residual_steps_.insert(k);
    }
    for (double t : dg.snapshot_times) snapshot_steps_.insert(schedule_step(t, cfg_.dt));
    for (double t : dg.scattering_times) scattering_steps_.insert(schedule_step(t, cfg_.dt));
    if (dg.localized != "off")
      result_.localized.emplace(cfg_.model, LocalizedWindow{dg.ball_radius, dg.ball_stride},
                                dg.localized == "case1" ? LocalizedVariant::case1 : LocalizedVariant::case2);
  }

  const Grid& grid() const { return grid_; }
  const RunConfig& config() const { return cfg_; }
  const SplitStepIntegrator& integrator() const { return integ_; }
  const Field* potential() const { return potential_ ? &*potential_ : nullptr; }
  const std::optional<MorawetzWeight>& weight() const { return weight_; }

  /// Snapshots go to `dir` when set. `progress` sees every sampled record.
  RunResult run(const std::optional<std::filesystem::path>& dir = std::nullopt,
                const std::function<void(const DiagnosticsRecord&)>& progress = {}) {
    dir_ = dir;
    SystemState cur = initial_state(grid_, cfg_);
    integ_.set_reference_mass(total_mass(cur));
    const long steps = step_count(cfg_.T, cfg_.dt);
    last_step_ = steps;
    std::optional<SystemState> prev;
    sample(cur, 0, progress);
    try {
      for (long k = 1; k <= steps; ++k) {
        SystemState next = cur;
        integ_.step(next);
        next.t = k * cfg_.dt;
        if (residual_steps_.count(k - 1)) attach_residual(*prev, cur, next, k - 1);
        prev = std::move(cur);
        cur = std::move(next);
        if (is_sample(k)) sample(cur, k, progress);
      }
    } catch (const DriftGuardError&) {
      result_.final_state = cur;
      throw;
    }
    result_.final_state = std::move(cur);
    return std::move(result_);
  }

  /// Diagnostics of one state; `k` only labels the record.
  DiagnosticsRecord evaluate(const SystemState& s, long k) const {
    DiagnosticsRecord r;
    r.step = k;
    r.t = s.t;
    r.mass = mass(s);
    r.energy = energy(s, integ_.nonlinearity(), potential());
    for (const auto& n : cfg_.diagnostics.norms) {
      std::vector<double> v;
      for (const auto& f : s.u) v.push_back(lebesgue_norm(f, n.r));
      r.norms.push_back(std::move(v));
    }
    if (weight_) {
      r.action = morawetz_action(s, *weight_);
      if (cfg_.diagnostics.tensor_stride > 0)
        r.tensor_total = tensor_action(s, weight_->radial, cfg_.diagnostics.tensor_stride).total;
    }
    return r;
  }

 private:
  static RunConfig checked(RunConfig c) {
    c.model.check_simulable();
    return c;
  }

  bool is_sample(long k) const {
    return k % cfg_.integrator.diagnostics_stride == 0 || k == last_step_ || residual_steps_.count(k) || snapshot_steps_.count(k) ||
           scattering_steps_.count(k);
  }

  void sample(const SystemState& s, long k, const std::function<void(const DiagnosticsRecord&)>& progress) {
    DiagnosticsRecord r = evaluate(s, k);
    if (result_.localized) r.q_localized = result_.localized->add(s);
    if (scattering_steps_.count(k)) {
      pullbacks_.emplace(k, pullback(s, cfg_.model.sigma1));
      if (k % 2 == 0 && pullbacks_.count(k / 2) && cfg_.model.sigma2 == 0) {
        const double res = pulled_back_residual(pullbacks_.at(k / 2), pullbacks_.at(k));
        r.scattering_residual = res;
        result_.scattering.emplace_back(s.t / 2.0, res);
      }
    }
    if (snapshot_steps_.count(k) && dir_) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%08ld.bin", k);
      const auto path = (*dir_ / name).string();
      write_snapshot(path, s);
      result_.snapshots.push_back(path);
    }
    const double frac = boundary_shell_fraction(s);
    result_.max_boundary_fraction = std::max(result_.max_boundary_fraction, frac);
    if (frac > kBoundaryShellThreshold && !result_.boundary_warning) {
      result_.boundary_warning = true;
      std::cerr << "warning: boundary-shell mass fraction " << frac << " at t = " << s.t << " exceeds "
                << kBoundaryShellThreshold << "; the periodic box no longer mimics free space\n";
    }
    result_.records.push_back(std::move(r));
    if (progress) progress(result_.records.back());
  }

  void attach_residual(const SystemState& before, const SystemState& at, const SystemState& after, long k) {
    MorawetzResidual res = morawetz_identity_residual(before, at, after, integ_.nonlinearity(), potential(), *weight_);
    res.t = at.t;
    for (auto& r : result_.records)
      if (r.step == k) r.residual_morawetz = res.component_residual;
    result_.residuals.push_back(std::move(res));
  }

  RunConfig cfg_;
  Grid grid_;
  std::optional<Field> potential_;
  SplitStepIntegrator integ_;
  std::optional<MorawetzWeight> weight_;
  std::set<long> residual_steps_, snapshot_steps_, scattering_steps_;
  std::map<long, SystemState> pullbacks_;
  std::optional<std::filesystem::path> dir_;
  long last_step_ = 0;
  RunResult result_;
};

}  // namespace hfc4
