#include <gtest/gtest.h>

#include <random>

#include "hfc4/diagnostics.hpp"
#include "hfc4/oracle.hpp"
#include "hfc4/random_fields.hpp"

using namespace hfc4;

namespace {

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double state_diff(const SystemState& a, const SystemState& b) {
  double m = 0.0;
  for (int j = 0; j < a.components(); ++j) m = std::max(m, max_diff(a.u[j], b.u[j]));
  return m;
}

ModelParams system_params(int d, int N, double p, double gamma, double b) {
  ModelParams m;
  m.d = d;
  m.N = N;
  m.sigma1 = 1;
  m.p = p;
  m.gamma1 = m.gamma2 = gamma;
  m.b = b;
  m.bjk.assign(static_cast<std::size_t>(N) * N, 1.0);
  return m;
}

SystemState random_state(const Grid& g, int N, std::mt19937_64& rng, double scale = 1.0) {
  SystemState s;
  for (int j = 0; j < N; ++j) {
    Field f = random_smooth_field(g, rng, 2, 0.5);
    f *= scale;
    s.u.push_back(std::move(f));
  }
  return s;
}

}  // namespace

TEST(Nonlinearity, IdenticalComponentsCancelHartree) {
  const Grid g(2, 16, 8.0);
  ModelParams m = system_params(2, 2, 2.0, 1.0, 1.0);
  m.bjk.assign(4, 0.0);
  std::mt19937_64 rng(1);
  const Field u = random_smooth_field(g, rng);
  const SystemState s{0.0, {u, u}};
  const auto F = nonlinearity(s, m);
  for (const auto& f : F) EXPECT_LT(f.max_abs(), 1e-12 * u.max_abs());
}

TEST(Nonlinearity, ChoquardMatchesDirectSum) {
  // p = 2, single real Gaussian: F = (K * |u|^2) u.
  const Grid g(2, 16, 8.0);
  ModelParams m = system_params(2, 1, 2.0, 1.0, 0.0);
  const Field u = Field::sample(g, [](const Point& x) { return complex(std::exp(-norm2(x) / 2.0)); });
  Field dens(g);
  for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::norm(u[i]);
  const Field pot = oracle::convolve_direct(dens, 1.0);
  const Field expect = multiply(pot, u);
  const auto F = nonlinearity(SystemState{0.0, {u}}, m);
  EXPECT_LT(max_diff(F[0], expect), 1e-10 * expect.max_abs());
}

TEST(Nonlinearity, HartreeMatchesDirectSum) {
  const Grid g(1, 32, 8.0);
  ModelParams m = system_params(1, 2, 3.0, 0.5, 0.7);
  m.bjk.assign(4, 0.0);
  std::mt19937_64 rng(2);
  const SystemState s = random_state(g, 2, rng);
  Field d1(g), x01(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    d1[i] = std::norm(s.u[1][i]);
    x01[i] = std::conj(s.u[1][i]) * s.u[0][i];
  }
  const Field D = oracle::convolve_direct(d1, 0.5), X = oracle::convolve_direct(x01, 0.5);
  Field expect(g);
  for (std::size_t i = 0; i < g.size(); ++i) expect[i] = 0.7 * (D[i] * s.u[0][i] - X[i] * s.u[1][i]);
  const auto F = nonlinearity(s, m);
  EXPECT_LT(max_diff(F[0], expect), 1e-10 * expect.max_abs());

  const Nonlinearity nl(m, g);
  const auto I = nl.interactions(s.u);
  EXPECT_LT(max_diff(I.exchange(0, 1), X), 1e-10 * X.max_abs());
}

TEST(Nonlinearity, GaugeInvariant) {
  const Grid g(2, 16, 8.0);
  const ModelParams m = system_params(2, 3, 2.5, 1.2, 0.8);
  std::mt19937_64 rng(3);
  const SystemState s = random_state(g, 3, rng);
  const complex phase = std::polar(1.0, 0.9);
  SystemState r = s;
  for (auto& f : r.u) f *= phase;
  const auto F = nonlinearity(s, m), Fr = nonlinearity(r, m);
  for (int j = 0; j < 3; ++j) EXPECT_LT(max_diff(Fr[j], phase * F[j]), 1e-12 * F[j].max_abs());
}

TEST(Nonlinearity, MassPairingIsReal) {
  // Σ_j <u_j, F_j> must be real for the flow to conserve the total mass.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Grid g(2, 16, 8.0);
    const ModelParams m = system_params(2, 3, 2.0 + trial * 0.5, 1.0, 1.0);
    const SystemState s = random_state(g, 3, rng);
    const auto F = nonlinearity(s, m);
    complex total{};
    for (int j = 0; j < 3; ++j) total += inner(s.u[j], F[j]);
    EXPECT_LT(std::abs(total.imag()), 1e-12 * std::abs(total.real()));
  }
}

TEST(Rhs, PlaneWaveWithoutNonlinearity) {
  const Grid g(2, 16, 10.0);
  ModelParams m = system_params(2, 1, 2.0, 1.0, 0.0);
  m.bjk = {0.0};
  const Point k{2 * pi * 2 / 10.0, 2 * pi / 10.0, 0.0};
  const Field u = Field::sample(g, [&](const Point& x) { return std::polar(1.0, dot(k, x)); });
  const auto r = rhs(SystemState{0.0, {u}}, m, nullptr);
  const double k2 = norm2(k);
  EXPECT_LT(max_diff(r[0], complex(0, k2 * k2 + k2) * u), 1e-10 * k2 * k2);
}

TEST(Step, LinearStepIsExactPropagator) {
  const Grid g(2, 32, 16.0);
  ModelParams m = system_params(2, 2, 2.0, 1.0, 0.0);
  m.bjk.assign(4, 0.0);
  std::mt19937_64 rng(6);
  const SystemState s = random_state(g, 2, rng);
  const SystemState a = step(s, m, nullptr, IntegratorConfig{0.01, 1, 1e-4});
  const SystemState b = linear_propagator(s, 0.01, Direction::forward, 1);
  EXPECT_LT(state_diff(a, b), 1e-12);
  EXPECT_DOUBLE_EQ(a.t, 0.01);
}

TEST(Step, CentralDifferenceMatchesRhs) {
  const Grid g(1, 64, 20.0);
  const ModelParams m = system_params(1, 2, 3.0, 0.5, 0.5);
  SystemState s;
  s.u.push_back(Field::sample(g, [](const Point& x) { return complex(std::exp(-x[0] * x[0] / 4.0)); }));
  s.u.push_back(Field::sample(g, [](const Point& x) { return std::polar(0.8 * std::exp(-x[0] * x[0] / 6.0), 0.3 * x[0]); }));
  SplitStepIntegrator fwd(m, g, std::nullopt, {1e-4, 1, 1e-4});
  SystemState plus = s;
  fwd.step(plus);
  SplitStepIntegrator bwd_step(m, g, std::nullopt, {1e-4, 1, 1e-4});
  // backward: conjugation reverses time for a gauge-invariant, real-kernel flow
  SystemState minus{0.0, {s.u[0].conj(), s.u[1].conj()}};
  bwd_step.step(minus);
  for (auto& f : minus.u) f = f.conj();
  const auto r = rhs(s, m, nullptr);
  for (int j = 0; j < 2; ++j) {
    Field dudt = plus.u[j] - minus.u[j];
    dudt *= 1.0 / 2e-4;
    EXPECT_LT(max_diff(dudt, r[j]), 1e-4 * r[j].max_abs()) << j;
  }
}

TEST(Step, SecondOrderConvergence) {
  const Grid g(1, 64, 20.0);
  const ModelParams m = system_params(1, 2, 3.0, 0.5, 1.0);
  SystemState s;
  s.u.push_back(Field::sample(g, [](const Point& x) { return complex(1.2 * std::exp(-x[0] * x[0] / 2.0)); }));
  s.u.push_back(Field::sample(g, [](const Point& x) { return complex(0.9 * std::exp(-(x[0] - 1) * (x[0] - 1) / 3.0)); }));
  auto solve = [&](double dt) {
    SplitStepIntegrator integ(m, g, std::nullopt, {dt, 1, 1.0});
    return evolve(s, 0.2, integ);
  };
  const SystemState ref = solve(0.2 / 640);
  const double e1 = state_diff(solve(0.2 / 10), ref);
  const double e2 = state_diff(solve(0.2 / 20), ref);
  const double e3 = state_diff(solve(0.2 / 40), ref);
  EXPECT_GT(e1 / e2, 2.5);
  EXPECT_LT(e1 / e2, 6.0);
  EXPECT_GT(e2 / e3, 2.5);
  EXPECT_LT(e2 / e3, 6.0);
}

TEST(Step, ConservesMassAndEnergy) {
  const Grid g(2, 32, 16.0);
  ModelParams m = system_params(2, 2, 3.0, 1.0, 1.0);
  SystemState s;
  s.u.push_back(Field::sample(g, [](const Point& x) { return complex(0.8 * std::exp(-norm2(x) / 4.0)); }));
  s.u.push_back(Field::sample(g, [](const Point& x) {
    return std::polar(0.6 * std::exp(-(norm2(x) - 2 * x[0] + 1) / 5.0), 0.2 * x[1]);
  }));
  SplitStepIntegrator integ(m, g, std::nullopt, {2e-3, 1, 1e-4});
  const double m0 = total_mass(s);
  const double e0 = energy(s, integ.nonlinearity(), nullptr).total();
  const SystemState t = evolve(s, 0.1, integ);
  EXPECT_LT(std::abs(total_mass(t) - m0) / m0, 1e-8);
  const auto e = energy(t, integ.nonlinearity(), nullptr);
  EXPECT_LT(std::abs(e.total() - e0) / e0, 1e-4);
  EXPECT_LT(std::abs(e.exchange_imag), 1e-12 * std::abs(e.hf_exchange) + 1e-15);
}

TEST(Step, PotentialTermIsApplied) {
  const Grid g(1, 32, 10.0);
  ModelParams m = system_params(1, 1, 2.0, 0.5, 0.0);
  m.bjk = {0.0};
  m.sigma1 = 0;
  m.sigma2 = 1;
  Field v(g);
  for (auto& x : v.values()) x = 2.0;  // constant V only rotates the phase
  const Field u = Field::sample(g, [](const Point& x) { return complex(std::exp(-x[0] * x[0])); });
  const SystemState s = step(SystemState{0.0, {u}}, m, &v, {0.05, 1, 1e-4});
  const Field expect = std::polar(1.0, 2.0 * 0.05) * linear_propagator(u, 0.05, Direction::forward, 0);
  EXPECT_LT(max_diff(s.u[0], expect), 1e-6);
}

TEST(Step, DriftGuardAborts) {
  const Grid g(1, 32, 10.0);
  const ModelParams m = system_params(1, 1, 4.0, 0.5, 0.0);
  const Field u = Field::sample(g, [](const Point& x) { return complex(3.0 * std::exp(-x[0] * x[0])); });
  SplitStepIntegrator integ(m, g, std::nullopt, {0.2, 1, 1e-14});
  SystemState s{0.0, {u}};
  EXPECT_THROW(evolve(s, 2.0, integ), DriftGuardError);
}

TEST(Step, StepCountNeedsLattice) {
  EXPECT_EQ(step_count(20.0, 0.005), 4000);
  EXPECT_THROW(step_count(1.0, 0.3), DomainError);
  EXPECT_THROW(step_count(-1.0, 0.1), DomainError);
}

TEST(Step, RejectsUnsimulableModels) {
  const Grid g(3, 8, 4.0);
  ModelParams m = system_params(3, 1, 2.0, 3.0, 0.0);
  EXPECT_THROW(Nonlinearity(m, g), ValidationError);
  m = system_params(2, 1, 2.0, 1.0, 0.0);
  EXPECT_THROW(Nonlinearity(m, g), DomainError);
}
