#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hfc4/dynamics.hpp"
#include "hfc4/spectral.hpp"
#include "hfc4/weights.hpp"

namespace hfc4 {

inline std::vector<double> mass(const SystemState& s) {
  std::vector<double> out;
  for (const auto& f : s.u) out.push_back(l2_squared(f));
  return out;
}

struct EnergyBreakdown {
  double kin4 = 0.0;      // Σ ||Δu_j||^2
  double kin2 = 0.0;      // σ1 Σ ||∇u_j||^2
  double pot = 0.0;       // σ2 Σ ∫ V |u_j|^2
  double choquard = 0.0;  // (1/p) Σ b_jk ∫ [K1 * (w1|u_k|^p)] w1 |u_j|^p
  double hf_direct = 0.0;
  double hf_exchange = 0.0;
  double exchange_imag = 0.0;  // imaginary part of the exchange sum, should be roundoff

  double hf() const { return hf_direct - hf_exchange; }
  double total() const { return kin4 + kin2 + pot + choquard + hf(); }
};

/// Energy of the system. The Choquard term carries 1/p, the normalization whose
/// Wirtinger derivative is the Choquard part of F (with 1/(2p) the flow would not
/// conserve it). Hartree terms carry b/2 and include j = k, where they cancel.
inline EnergyBreakdown energy(const SystemState& s, const Nonlinearity& nl, const Field* potential) {
  s.validate();
  const ModelParams& m = nl.params();
  const double hd = s.grid().cell_volume();
  EnergyBreakdown e;
  for (const auto& f : s.u) {
    e.kin4 += spectral_quadratic(f, [](const Wavevector& w) { return w.norm2 * w.norm2; });
    if (m.sigma1 != 0) e.kin2 += spectral_quadratic(f, [](const Wavevector& w) { return w.norm2; });
    if (m.sigma2 != 0 && potential != nullptr) {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) acc += (*potential)[i].real() * std::norm(f[i]);
      e.pot += acc * hd;
    }
  }
  if (!(m.has_choquard() || m.has_hartree())) return e;
  const Interactions I = nl.interactions(s.u);
  const int N = m.N;
  if (nl.kernel1()) {
    double acc = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const double c = m.coupling(j, k);
        if (c == 0.0) continue;
        double t = 0.0;
        for (std::size_t i = 0; i < s.u[j].size(); ++i)
          t += I.choquard[k][i].real() * nl.weight1()[i].real() * abs_power(s.u[j][i], m.p);
        acc += c * t;
      }
    e.choquard = acc * hd / m.p;
  }
  if (nl.kernel2()) {
    double direct = 0.0;
    complex exchange{};
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        double t = 0.0;
        complex x{};
        const Field& D = I.direct[k];
        for (std::size_t i = 0; i < s.u[j].size(); ++i) {
          const double w = nl.weight2()[i].real();
          t += D[i].real() * w * std::norm(s.u[j][i]);
          complex X;
          if (j == k)
            X = D[i];
          else
            X = j < k ? I.exchange(j, k)[i] : std::conj(I.exchange(k, j)[i]);
          x += X * w * s.u[k][i] * std::conj(s.u[j][i]);
        }
        direct += t;
        exchange += x;
      }
    e.hf_direct = 0.5 * m.b * direct * hd;
    e.hf_exchange = 0.5 * m.b * exchange.real() * hd;
    e.exchange_imag = 0.5 * m.b * exchange.imag() * hd;
  }
  return e;
}

/// Radial weight centred at `center`, sampled as fields: gradient factor g with
/// ∇a = g (x − c).
inline Field radial_gradient_factor(const Grid& g, const RadialWeight& w, const Point& center) {
  Field out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.point(i);
    for (int a = 0; a < 3; ++a) x[a] -= center[a];
    out[i] = w.gradient_factor(norm2(x));
  }
  return out;
}

/// M_j = 2 Im h^d Σ conj(u_j) ∇u_j · ∇a.
inline std::vector<double> morawetz_action(const SystemState& s, const MorawetzWeight& weight) {
  s.validate();
  const Grid& g = s.grid();
  const Field gf = radial_gradient_factor(g, weight.radial, weight.center);
  std::vector<double> out;
  for (const auto& u : s.u) {
    const auto grad = gradient(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      complex dot{};
      for (int a = 0; a < g.dim(); ++a) dot += grad[a][i] * (x[a] - weight.center[a]);
      acc += (std::conj(u[i]) * dot * gf[i].real()).imag();
    }
    out.push_back(2.0 * acc * g.cell_volume());
  }
  return out;
}

/// max_j ||e^{-itL} u_j(t) − e^{-isL} u_j(s)||_{H^2} for the free flow L.
inline double scattering_residual(const SystemState& at_t, const SystemState& at_s, const ModelParams& m) {
  if (m.sigma2 != 0)
    throw DomainError("scattering residual refused for sigma2 = 1: the potential pullback is not exact here");
  if (at_t.components() != at_s.components()) throw DomainError("states have different component counts");
  const SystemState a = linear_propagator(at_t, at_t.t, Direction::backward, m.sigma1);
  const SystemState b = linear_propagator(at_s, at_s.t, Direction::backward, m.sigma1);
  double worst = 0.0;
  for (int j = 0; j < a.components(); ++j) worst = std::max(worst, sobolev2_norm(a.u[j] - b.u[j]));
  return worst;
}

/// Pullback e^{-itL} u(t), stored so residuals against later times are cheap.
inline SystemState pullback(const SystemState& s, int sigma1) {
  SystemState out = linear_propagator(s, s.t, Direction::backward, sigma1);
  out.t = s.t;
  return out;
}

inline double pulled_back_residual(const SystemState& a, const SystemState& b) {
  double worst = 0.0;
  for (int j = 0; j < a.components(); ++j) worst = std::max(worst, sobolev2_norm(a.u[j] - b.u[j]));
  return worst;
}

/// Fraction of the total mass outside the central half-box [-L/4, L/4)^d.
inline double boundary_shell_fraction(const SystemState& s) {
  const Grid& g = s.grid();
  const double q = 0.25 * g.length();
  double outer = 0.0, total = 0.0;
  for (const auto& f : s.u)
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      const double m = std::norm(f[i]);
      total += m;
      bool inside = true;
      for (int a = 0; a < g.dim(); ++a) inside = inside && (x[a] >= -q && x[a] < q);
      if (!inside) outer += m;
    }
  return total > 0.0 ? outer / total : 0.0;
}

inline constexpr double kBoundaryShellThreshold = 1e-6;

struct TensorAction {
  std::vector<double> matrix;  // N x N row-major
  double total = 0.0;
};

inline constexpr double kDefaultPairBudget = 2e9;

/// M_{jl} = 2 ∬ ∇a(x − y) · [P_j(x) ρ_l(y) − ρ_j(x) P_l(y)], P = Im(conj(u)∇u), ρ = |u|^2,
/// summed over the stride sublattice with cell volume (stride h)^d.
inline TensorAction tensor_action(const SystemState& s, const RadialWeight& w, int stride,
                                  double pair_budget = kDefaultPairBudget) {
  s.validate();
  if (stride < 1) throw DomainError("stride must be >= 1");
  const Grid& g = s.grid();
  const int d = g.dim();
  if (g.points() % stride != 0) throw DomainError("stride must divide the points per axis");
  std::vector<std::size_t> sites;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto i = g.unravel(idx);
    bool on = true;
    for (int a = 0; a < d; ++a) on = on && i[a] % stride == 0;
    if (on) sites.push_back(idx);
  }
  const int N = s.components();
  const double pairs = static_cast<double>(sites.size()) * sites.size() * N * N;
  if (pairs > pair_budget)
    throw BudgetError("tensor action needs " + std::to_string(pairs) +
                      " pair evaluations; increase the stride or lower the resolution");

  const std::size_t M = sites.size();
  std::vector<Point> x(M);
  for (std::size_t i = 0; i < M; ++i) x[i] = g.point(sites[i]);
  std::vector<std::vector<double>> rho(N, std::vector<double>(M));
  std::vector<std::vector<Point>> P(N, std::vector<Point>(M, Point{0, 0, 0}));
  for (int j = 0; j < N; ++j) {
    const auto grad = gradient(s.u[j]);
    for (std::size_t i = 0; i < M; ++i) {
      const auto idx = sites[i];
      rho[j][i] = std::norm(s.u[j][idx]);
      for (int a = 0; a < d; ++a) P[j][i][a] = (std::conj(s.u[j][idx]) * grad[a][idx]).imag();
    }
  }
  const double cell = std::pow(stride * g.spacing(), d);
  TensorAction out;
  out.matrix.assign(static_cast<std::size_t>(N) * N, 0.0);
  for (int j = 0; j < N; ++j)
    for (int l = 0; l < N; ++l) {
      double acc = 0.0;
      for (std::size_t a = 0; a < M; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < M; ++b) {
          Point z{x[a][0] - x[b][0], x[a][1] - x[b][1], x[a][2] - x[b][2]};
          const double gf = w.gradient_factor(norm2(z));
          const double t1 = dot(z, P[j][a]) * rho[l][b];
          const double t2 = rho[j][a] * dot(z, P[l][b]);
          row += gf * (t1 - t2);
        }
        acc += row;
      }
      out.matrix[static_cast<std::size_t>(j) * N + l] = 2.0 * acc * cell * cell;
      out.total += out.matrix[static_cast<std::size_t>(j) * N + l];
    }
  return out;
}

}  // namespace hfc4
