#include <gtest/gtest.h>

#include <random>

#include "hfc4/oracle.hpp"
#include "hfc4/random_fields.hpp"

using namespace hfc4;

namespace {

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Field gaussian(const Grid& g, double w) {
  return Field::sample(g, [&](const Point& x) { return complex(std::exp(-norm2(x) / (2 * w * w))); });
}

}  // namespace

TEST(Spectral, PlaneWaveEigenvalues) {
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 16, 10.0);
    const Point k{2 * pi * 3 / g.length(), d > 1 ? -2 * pi * 2 / g.length() : 0.0, 0.0};
    const double kk = norm2(k);
    const Field f = Field::sample(g, [&](const Point& x) { return std::polar(1.0, dot(k, x)); });
    EXPECT_LT(max_diff(laplacian(f), complex(-kk) * f), 1e-11 * kk);
    EXPECT_LT(max_diff(bilaplacian(f), complex(kk * kk) * f), 1e-11 * kk * kk);
    EXPECT_LT(max_diff(partial(f, 0), complex(0, k[0]) * f), 1e-11 * kk);
  }
}

TEST(Spectral, GradientVanishesOnNyquistMode) {
  const Grid g(1, 16, 2 * pi);
  const Field f = Field::sample(g, [&](const Point& x) { return complex(std::cos(8 * x[0])); });
  EXPECT_LT(partial(f, 0).max_abs(), 1e-12);
  EXPECT_THROW(partial(f, 1), DomainError);
}

TEST(Spectral, AgreesWithFiniteDifferences) {
  // Spectral derivatives are exact on these fields, so the difference is the
  // stencil error: h^2 for the 3-point stencils, h^4 for the 5-point gradient.
  double lap_prev = 0.0, bilap_prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid g(1, n, 20.0);
    const Field f = gaussian(g, 1.5);
    const double e = max_diff(laplacian(f), oracle::fd_laplacian(f));
    const double e4 = max_diff(bilaplacian(f), oracle::fd_derivative(f, 0, 4));
    if (lap_prev > 0) {
      EXPECT_NEAR(lap_prev / e, 4.0, 0.4) << n;
      EXPECT_NEAR(bilap_prev / e4, 4.0, 0.4) << n;
    }
    lap_prev = e;
    bilap_prev = e4;
  }
  double err[2][2];
  for (int level = 0; level < 2; ++level) {
    const Grid g(2, 64 << level, 20.0);
    std::mt19937_64 rng(5);
    const Field f = random_smooth_field(g, rng, 3, 0.5);
    err[level][0] = max_diff(laplacian(f), oracle::fd_laplacian(f)) / laplacian(f).max_abs();
    const auto grad = gradient(f);
    const auto fd = oracle::fd_gradient(f);
    err[level][1] = max_diff(grad[0], fd[0]) / grad[0].max_abs();
  }
  EXPECT_LT(err[1][0], 1e-2);
  EXPECT_NEAR(err[0][0] / err[1][0], 4.0, 0.6);
  EXPECT_LT(err[1][1], 1e-3);
  EXPECT_NEAR(err[0][1] / err[1][1], 16.0, 3.0);
}

TEST(Spectral, LaplacianSquaredIsBilaplacian) {
  const Grid g(3, 16, 12.0);
  std::mt19937_64 rng(9);
  const Field f = random_smooth_field(g, rng);
  const Field b = bilaplacian(f);
  EXPECT_LT(max_diff(laplacian(laplacian(f)), b), 1e-10 * b.max_abs());
  EXPECT_LT(max_diff(apply_symbol(f, Symbol::fractional(2.0)), complex(-1.0) * laplacian(f)),
            1e-10 * laplacian(f).max_abs());
}

TEST(Spectral, HessianTraceIsLaplacian) {
  const Grid g(3, 16, 12.0);
  std::mt19937_64 rng(13);
  const Field f = random_smooth_field(g, rng);
  const auto h = hessian(f);
  const Field tr = h[0] + h[4] + h[8];
  EXPECT_LT(max_diff(tr, laplacian(f)), 1e-10 * tr.max_abs());
  EXPECT_LT(max_diff(h[1], h[3]), 1e-14);
}

TEST(Spectral, Plancherel) {
  std::mt19937_64 rng(17);
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 16, 9.0);
    for (int trial = 0; trial < 5; ++trial) {
      const Field f = random_smooth_field(g, rng);
      EXPECT_NEAR(spectral_l2_squared(f), l2_squared(f), 1e-12 * l2_squared(f));
    }
  }
}

TEST(Spectral, GaussianNorms) {
  // ||e^{-|x|^2/2}||_r^r = (2π/r)^{d/2}; at h = 1/2 the trapezoid error for r = 4 is ~1e-9.
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 32, 16.0);
    const Field f = gaussian(g, 1.0);
    for (double r : {2.0, 10.0 / 3.0, 4.0}) {
      const double exact = std::pow(std::pow(2 * pi / r, 0.5 * d), 1.0 / r);
      EXPECT_NEAR(lebesgue_norm(f, r), exact, 1e-8) << d << " " << r;
    }
    EXPECT_DOUBLE_EQ(lebesgue_norm(f, infinity), 1.0);
    EXPECT_THROW(lebesgue_norm(f, 0.5), DomainError);
  }
}

TEST(Spectral, ConstantFieldNorms) {
  const Grid g(2, 8, 3.0);
  Field one(g);
  for (auto& v : one.values()) v = 1.0;
  EXPECT_NEAR(lebesgue_norm(one, 2.0), 3.0, 1e-13);
  EXPECT_NEAR(lebesgue_norm(one, 4.0), std::sqrt(3.0), 1e-13);
  EXPECT_NEAR(sobolev2_norm(one), 3.0, 1e-13);
  EXPECT_NEAR(local_l2_sup(one, 10.0, 1), 3.0, 1e-12);
}

TEST(Spectral, LocalL2SupBoundedByGlobal) {
  std::mt19937_64 rng(21);
  const Grid g(2, 32, 16.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = random_smooth_field(g, rng);
    const double global = std::sqrt(l2_squared(f));
    double prev = 0.0;
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
      const double v = local_l2_sup(f, r, 1);
      EXPECT_LE(v, global * (1 + 1e-12));
      EXPECT_GE(v, prev - 1e-12);  // grows with the radius
      prev = v;
    }
  }
}

TEST(Spectral, PropagatorIsUnitaryGroup) {
  const Grid g(2, 32, 16.0);
  std::mt19937_64 rng(23);
  const Field f = random_smooth_field(g, rng);
  const Field a = linear_propagator(f, 0.3, Direction::forward, 1);
  EXPECT_NEAR(l2_squared(a), l2_squared(f), 1e-12 * l2_squared(f));
  EXPECT_LT(max_diff(linear_propagator(a, 0.3, Direction::backward, 1), f), 1e-12);
  const Field b = linear_propagator(linear_propagator(f, 0.1, Direction::forward, 0), 0.2, Direction::forward, 0);
  EXPECT_LT(max_diff(b, linear_propagator(f, 0.3, Direction::forward, 0)), 1e-12);
}

TEST(Spectral, PropagatorSolvesLinearEquation) {
  // i ∂t u = -(Δ² − Δ) u in symbol form: ∂t û = i(|ξ|^4 + |ξ|^2) û.
  const Grid g(1, 64, 20.0);
  const Field f = gaussian(g, 1.5);
  const double t = 0.2, dt = 1e-4;
  const Field plus = linear_propagator(f, t + dt, Direction::forward, 1);
  const Field minus = linear_propagator(f, t - dt, Direction::forward, 1);
  const Field ut = linear_propagator(f, t, Direction::forward, 1);
  Field dudt = plus - minus;
  dudt *= 1.0 / (2 * dt);
  Field rhs = bilaplacian(ut) - laplacian(ut);
  rhs *= complex(0, 1);
  EXPECT_LT(max_diff(dudt, rhs), 1e-6 * rhs.max_abs());
}

TEST(Riesz, MatchesDirectSum) {
  std::mt19937_64 rng(29);
  struct Case {
    int d, n;
    double gamma;
  };
  for (const Case c : {Case{1, 32, 0.5}, Case{2, 16, 1.0}, Case{2, 16, 1.5}, Case{3, 16, 2.0}, Case{3, 8, 1.0}}) {
    const Grid g(c.d, c.n, 8.0);
    const Field f = random_smooth_real_field(g, rng);
    const Field fast = riesz_convolve(f, c.gamma);
    const Field slow = oracle::convolve_direct(f, c.gamma);
    EXPECT_LT(max_diff(fast, slow), 1e-10 * slow.max_abs()) << c.d << " " << c.gamma;
    const Field z = random_smooth_field(g, rng);
    const Field zs = oracle::convolve_direct(z, c.gamma);
    EXPECT_LT(max_diff(RieszConvolver(g, c.gamma).convolve_complex(z), zs), 1e-10 * zs.max_abs());
  }
}

TEST(Riesz, PointMassReproducesKernel) {
  const Grid g(3, 16, 8.0);
  Field delta(g);
  delta[g.origin_index()] = 1.0 / g.cell_volume();
  const Field k = riesz_convolve(delta, 2.0);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const double expect = riesz_kernel_sample(3, 2.0, g.spacing(), norm2(g.point(i)));
    EXPECT_NEAR(k[i].real(), expect, 1e-10 * expect);
  }
}

TEST(Riesz, LinearPositiveAndPaired) {
  std::mt19937_64 rng(31);
  const Grid g(2, 16, 8.0);
  const RieszConvolver conv(g, 1.0);
  const Field a = random_smooth_real_field(g, rng), b = random_smooth_real_field(g, rng);
  const complex ca(0.7, -0.2), cb(-1.3, 0.4);
  const Field lhs = conv.convolve_complex(ca * a + cb * b);
  const Field rhs = ca * conv.convolve_complex(a) + cb * conv.convolve_complex(b);
  EXPECT_LT(max_diff(lhs, rhs), 1e-11 * rhs.max_abs());

  Field dens(g);
  for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::norm(a[i]);
  const Field pot = conv.convolve(dens);
  for (const auto& v : pot.values()) EXPECT_GT(v.real(), 0.0);
  EXPECT_EQ(pot.max_abs_imag(), 0.0);

  const auto [pa, pb] = conv.convolve_pair(a, b);
  EXPECT_LT(max_diff(pa, conv.convolve(a)), 1e-12 * pa.max_abs());
  EXPECT_LT(max_diff(pb, conv.convolve(b)), 1e-12 * pb.max_abs());
}

TEST(Riesz, RejectsGammaOutsideRange) {
  const Grid g(3, 8, 4.0);
  EXPECT_THROW(RieszConvolver(g, 3.0), DomainError);
  EXPECT_THROW(RieszConvolver(g, 0.0), DomainError);
}

TEST(SingularWeight, ValuesAndOriginCell) {
  const Grid g(3, 16, 8.0);
  const Field one = singular_weight(g, 0.0);
  for (const auto& v : one.values()) EXPECT_EQ(v, complex(1.0));
  const Field w = singular_weight(g, 1.0);
  EXPECT_DOUBLE_EQ(w[g.origin_index()].real(), 1.5 / cell_ball_radius(3, g.spacing()));
  const std::size_t i = g.origin_index() + 3;  // three cells along x
  EXPECT_NEAR(w[i].real(), 1.0 / (3 * g.spacing()), 1e-14);
  EXPECT_THROW(singular_weight(g, 3.0), DomainError);
}

TEST(Oracle, QuadratureOfGaussian) {
  const Grid g(2, 32, 16.0);
  const Field f = gaussian(g, 1.0);
  EXPECT_NEAR(oracle::quadrature(f).real(), 2 * pi, 1e-10);
  // ball of radius 1: 2π(1 − e^{-1/2}), lattice-resolved to a few percent
  EXPECT_NEAR(oracle::quadrature(f, Point{}, 1.0).real(), 2 * pi * (1 - std::exp(-0.5)), 0.1);
}

TEST(Oracle, DirectSumBudget) {
  const Grid g(3, 64, 8.0);
  EXPECT_THROW(oracle::convolve_direct(Field(g), 1.0), BudgetError);
  EXPECT_THROW(oracle::fd_derivative(Field(g), 0, 3), DomainError);
}
