#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "hfc4/model.hpp"
#include "hfc4/riesz.hpp"
#include "hfc4/spectral.hpp"
#include "hfc4/state.hpp"

namespace hfc4 {

/// Convolution fields shared by the nonlinearity, the energy and the identity checks.
/// choquard[k] = K1 * (w1 |u_k|^p), direct[k] = K2 * (w2 |u_k|^2),
/// exchange(j, k) = K2 * (w2 conj(u_k) u_j); exchange(k, j) = conj(exchange(j, k)).
struct Interactions {
  int N = 0;
  std::vector<Field> choquard;
  std::vector<Field> direct;
  std::vector<Field> exchange_upper;  // j < k, row-major over the strict upper triangle

  const Field& exchange(int j, int k) const { return exchange_upper[upper_index(j, k)]; }
  std::size_t upper_index(int j, int k) const {
    // position of (j,k), j < k, in the strict upper triangle
    return static_cast<std::size_t>(j) * N - static_cast<std::size_t>(j) * (j + 1) / 2 + (k - j - 1);
  }
};

/// |u|^{p-2} u, with |u|^0 = 1.
inline complex power_times(const complex& u, double p) {
  if (p == 2.0) return u;
  const double a = std::abs(u);
  if (a == 0.0) return 0.0;
  return std::pow(a, p - 2.0) * u;
}

inline double abs_power(const complex& u, double p) {
  if (p == 2.0) return std::norm(u);
  return std::pow(std::abs(u), p);
}

/// The nonlinearity F of the system with its kernels and weights precomputed.
class Nonlinearity {
 public:
  Nonlinearity(const ModelParams& m, const Grid& g) : params_(m), grid_(g) {
    m.check_simulable();
    if (g.dim() != m.d) throw DomainError("grid dimension differs from model dimension");
    if (m.has_choquard()) {
      kernel1_ = std::make_shared<RieszConvolver>(g, m.gamma1);
      weight1_ = singular_weight(g, m.rho1);
    }
    if (m.has_hartree()) {
      if (kernel1_ && m.gamma2 == m.gamma1)
        kernel2_ = kernel1_;
      else
        kernel2_ = std::make_shared<RieszConvolver>(g, m.gamma2);
      weight2_ = singular_weight(g, m.rho2);
    }
  }

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  const RieszConvolver* kernel1() const { return kernel1_.get(); }
  const RieszConvolver* kernel2() const { return kernel2_.get(); }
  const Field& weight1() const { return weight1_; }
  const Field& weight2() const { return weight2_; }

  /// Convolves a list of real fields two at a time.
  static std::vector<Field> convolve_reals(const RieszConvolver& k, const std::vector<Field>& in) {
    std::vector<Field> out;
    for (std::size_t i = 0; i < in.size(); i += 2) {
      if (i + 1 < in.size()) {
        auto [a, b] = k.convolve_pair(in[i], in[i + 1]);
        out.push_back(std::move(a));
        out.push_back(std::move(b));
      } else {
        Field c = k.convolve_complex(in[i]);
        for (auto& v : c.values()) v = v.real();
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  Interactions interactions(std::span<const Field> u) const {
    check(u);
    const int N = params_.N;
    Interactions out;
    out.N = N;
    if (kernel1_) {
      std::vector<Field> g;
      for (int k = 0; k < N; ++k) {
        Field f(grid_);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = weight1_[i].real() * abs_power(u[k][i], params_.p);
        g.push_back(std::move(f));
      }
      out.choquard = convolve_reals(*kernel1_, g);
    }
    if (kernel2_) {
      std::vector<Field> g;
      for (int k = 0; k < N; ++k) {
        Field f(grid_);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = weight2_[i].real() * std::norm(u[k][i]);
        g.push_back(std::move(f));
      }
      out.direct = convolve_reals(*kernel2_, g);
      for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
          Field f(grid_);
          for (std::size_t i = 0; i < f.size(); ++i) f[i] = weight2_[i].real() * std::conj(u[k][i]) * u[j][i];
          out.exchange_upper.push_back(kernel2_->convolve_complex(f));
        }
    }
    return out;
  }

  /// F_j for every component. The j = k Hartree terms cancel exactly and are skipped.
  std::vector<Field> evaluate(std::span<const Field> u) const { return evaluate(u, interactions(u)); }

  std::vector<Field> evaluate(std::span<const Field> u, const Interactions& I) const {
    const int N = params_.N;
    std::vector<Field> F(N, Field(grid_));
    for (int j = 0; j < N; ++j) {
      Field& Fj = F[j];
      if (kernel1_) {
        for (std::size_t i = 0; i < grid_.size(); ++i) {
          double s = 0.0;
          for (int k = 0; k < N; ++k) s += params_.coupling(j, k) * I.choquard[k][i].real();
          if (s != 0.0) Fj[i] += s * weight1_[i].real() * power_times(u[j][i], params_.p);
        }
      }
      if (kernel2_) {
        for (int k = 0; k < N; ++k) {
          if (k == j) continue;
          const Field& D = I.direct[k];
          const Field& X = j < k ? I.exchange(j, k) : I.exchange(k, j);
          const bool conj = j > k;
          for (std::size_t i = 0; i < grid_.size(); ++i) {
            const complex x = conj ? std::conj(X[i]) : X[i];
            Fj[i] += params_.b * weight2_[i].real() * (D[i].real() * u[j][i] - x * u[k][i]);
          }
        }
      }
    }
    return F;
  }

 private:
  void check(std::span<const Field> u) const {
    if (static_cast<int>(u.size()) != params_.N) throw DomainError("state has the wrong number of components");
    for (const auto& f : u)
      if (!(f.grid() == grid_)) throw DomainError("state grid differs from the nonlinearity grid");
  }

  ModelParams params_;
  Grid grid_;
  std::shared_ptr<RieszConvolver> kernel1_;
  std::shared_ptr<RieszConvolver> kernel2_;
  Field weight1_;
  Field weight2_;
};

inline std::vector<Field> nonlinearity(const SystemState& s, const ModelParams& m) {
  return Nonlinearity(m, s.grid()).evaluate(s.u);
}

/// ∂t u_j = i(Δ²u_j − σ1 Δu_j + σ2 V u_j + F_j). `potential` may be null.
inline std::vector<Field> rhs(const SystemState& s, const Nonlinearity& nl, const Field* potential,
                              bool include_nonlinear = true) {
  s.validate();
  const ModelParams& m = nl.params();
  std::vector<Field> F;
  if (include_nonlinear) F = nl.evaluate(s.u);
  std::vector<Field> out;
  for (int j = 0; j < s.components(); ++j) {
    Field g = multiply_symbol(s.u[j], [&](const Wavevector& w) { return w.norm2 * w.norm2 + m.sigma1 * w.norm2; });
    if (m.sigma2 != 0 && potential != nullptr)
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += (*potential)[i].real() * s.u[j][i];
    if (include_nonlinear) g += F[j];
    g *= complex(0.0, 1.0);
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<Field> rhs(const SystemState& s, const ModelParams& m, const Field* potential) {
  return rhs(s, Nonlinearity(m, s.grid()), potential);
}

struct IntegratorConfig {
  double dt = 5e-3;
  int diagnostics_stride = 1;
  double drift_guard = 1e-4;
};

inline double total_mass(const SystemState& s) {
  double m = 0.0;
  for (const auto& f : s.u) m += l2_squared(f);
  return m;
}

/// Strang splitting: exact half linear phase, one RK4 step of ∂t u = i(σ2 V u + F(u)),
/// exact half linear phase.
class SplitStepIntegrator {
 public:
  SplitStepIntegrator(const ModelParams& m, const Grid& g, std::optional<Field> potential, IntegratorConfig cfg,
                      bool include_nonlinear = true)
      : nl_(m, g), potential_(std::move(potential)), cfg_(cfg), include_nonlinear_(include_nonlinear) {
    if (!(cfg.dt > 0.0)) throw DomainError("dt must be positive");
    if (cfg.diagnostics_stride < 1) throw DomainError("diagnostics stride must be >= 1");
    if (potential_ && !(potential_->grid() == g)) throw DomainError("potential grid differs");
    half_phase_ = Field(g);
    const double tau = 0.5 * cfg.dt;
    const double inv = 1.0 / static_cast<double>(g.size());
    for_each_wavevector(g, [&](std::size_t i, const Wavevector& w) {
      half_phase_[i] = std::polar(inv, tau * (w.norm2 * w.norm2 + m.sigma1 * w.norm2));
    });
    nonlinear_active_ = include_nonlinear_ && (m.has_choquard() || m.has_hartree());
    potential_active_ = m.sigma2 != 0 && potential_.has_value();
  }

  const Nonlinearity& nonlinearity() const { return nl_; }
  const IntegratorConfig& config() const { return cfg_; }
  const Field* potential() const { return potential_ ? &*potential_ : nullptr; }
  bool include_nonlinear() const { return include_nonlinear_; }

  /// Reference for the drift guard; taken from the first stepped state if unset.
  void set_reference_mass(double m) { reference_mass_ = m; }

  void step(SystemState& s) {
    s.validate();
    if (!reference_mass_) reference_mass_ = total_mass(s);
    for (auto& f : s.u) linear_half(f);
    if (nonlinear_active_ || potential_active_) rk4(s.u);
    for (auto& f : s.u) linear_half(f);
    s.t += cfg_.dt;
    check_drift(s);
  }

 private:
  void linear_half(Field& f) const {
    fft::forward(f);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= half_phase_[i];
    fft::backward(f);
  }

  std::vector<Field> stiffness_free(const std::vector<Field>& u) const {
    std::vector<Field> out;
    if (nonlinear_active_)
      out = nl_.evaluate(u);
    else
      out.assign(u.size(), Field(u.front().grid()));
    const complex I(0.0, 1.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (potential_active_)
        for (std::size_t i = 0; i < u[j].size(); ++i) out[j][i] += (*potential_)[i].real() * u[j][i];
      out[j] *= I;
    }
    return out;
  }

  void rk4(std::vector<Field>& u) const {
    const double dt = cfg_.dt;
    auto shifted = [&](const std::vector<Field>& k, double c) {
      std::vector<Field> v = u;
      for (std::size_t j = 0; j < v.size(); ++j) v[j].add_scaled(c, k[j]);
      return v;
    };
    const auto k1 = stiffness_free(u);
    const auto k2 = stiffness_free(shifted(k1, 0.5 * dt));
    const auto k3 = stiffness_free(shifted(k2, 0.5 * dt));
    const auto k4 = stiffness_free(shifted(k3, dt));
    for (std::size_t j = 0; j < u.size(); ++j)
      for (std::size_t i = 0; i < u[j].size(); ++i)
        u[j][i] += dt / 6.0 * (k1[j][i] + 2.0 * k2[j][i] + 2.0 * k3[j][i] + k4[j][i]);
  }

  void check_drift(const SystemState& s) const {
    const double m0 = *reference_mass_;
    if (m0 == 0.0) return;
    const double drift = std::abs(total_mass(s) - m0) / m0;
    if (drift > cfg_.drift_guard || !std::isfinite(drift)) {
      std::ostringstream os;
      os << "relative mass drift " << drift << " at t = " << s.t << " exceeds the guard " << cfg_.drift_guard
         << "; reduce dt or the data amplitude";
      throw DriftGuardError(os.str());
    }
  }

  Nonlinearity nl_;
  std::optional<Field> potential_;
  IntegratorConfig cfg_;
  bool include_nonlinear_;
  bool nonlinear_active_ = false;
  bool potential_active_ = false;
  Field half_phase_;
  std::optional<double> reference_mass_;
};

inline SystemState step(const SystemState& s, const ModelParams& m, const Field* potential, const IntegratorConfig& cfg) {
  SplitStepIntegrator integ(m, s.grid(), potential ? std::optional<Field>(*potential) : std::nullopt, cfg);
  SystemState out = s;
  integ.step(out);
  return out;
}

/// Number of steps covering [0, T]; T must be a multiple of dt.
inline long step_count(double T, double dt) {
  if (!(T >= 0.0)) throw DomainError("T must be >= 0");
  const double r = T / dt;
  const long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw DomainError("T must be a multiple of dt");
  return n;
}

/// Runs T/dt steps; `on_sample(state, step)` fires after every diagnostics_stride-th step.
inline SystemState evolve(SystemState s, double T, SplitStepIntegrator& integ,
                          const std::function<void(const SystemState&, long)>& on_sample = {}) {
  const long steps = step_count(T, integ.config().dt);
  const double t0 = s.t;
  for (long k = 1; k <= steps; ++k) {
    integ.step(s);
    s.t = t0 + k * integ.config().dt;  // avoid accumulated roundoff in t
    if (on_sample && k % integ.config().diagnostics_stride == 0) on_sample(s, k);
  }
  return s;
}

}  // namespace hfc4
