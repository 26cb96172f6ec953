#pragma once

// Slow reference implementations used only by the tests: direct lattice sums,
// finite differences and plain quadrature.

#include <cmath>
#include <vector>

#include "hfc4/diagnostics.hpp"
#include "hfc4/riesz.hpp"

namespace hfc4::oracle {

inline constexpr std::size_t kDirectBudget = std::size_t{32} * 32 * 32;

/// h^d Σ_y K_γ(x − y) f(y) over the true (non-periodic) displacement.
inline Field convolve_direct(const Field& f, double gamma) {
  const Grid& g = f.grid();
  if (g.size() > kDirectBudget) throw BudgetError("direct convolution limited to 32^3 points");
  const int d = g.dim(), n = g.points();
  const double h = g.spacing();
  // kernel table indexed by |Δi| per axis, 0..n-1
  const std::size_t span = static_cast<std::size_t>(n);
  std::vector<double> table(static_cast<std::size_t>(std::pow(span, d)));
  for (std::size_t t = 0; t < table.size(); ++t) {
    std::size_t r = t;
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double k = static_cast<double>(r % span) * h;
      r /= span;
      r2 += k * k;
    }
    table[t] = riesz_kernel_sample(d, gamma, h, r2);
  }
  Field out(g);
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto ix = g.unravel(x);
    complex acc{};
    for (std::size_t y = 0; y < g.size(); ++y) {
      const auto iy = g.unravel(y);
      std::size_t t = 0, mul = 1;
      for (int a = 0; a < d; ++a) {
        t += static_cast<std::size_t>(std::abs(ix[a] - iy[a])) * mul;
        mul *= span;
      }
      acc += table[t] * f[y];
    }
    out[x] = acc * g.cell_volume();
  }
  return out;
}

/// Periodic centred differences along one axis. Order 2 is the 3-point second
/// derivative, order 4 that stencil applied twice. Order 1 is the 5-point first
/// derivative, used for momentum densities in the tensor oracle.
inline Field fd_derivative(const Field& f, int axis, int order) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw DomainError("axis out of range");
  if (order == 4) return fd_derivative(fd_derivative(f, axis, 2), axis, 2);
  if (order != 1 && order != 2) throw DomainError("finite-difference order must be 1, 2 or 4");
  const int n = g.points();
  const double h = g.spacing();
  Field out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto i = g.unravel(idx);
    auto at = [&](int off) {
      auto j = i;
      j[axis] = ((i[axis] + off) % n + n) % n;
      return f[g.index(j)];
    };
    if (order == 1)
      out[idx] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
    else
      out[idx] = (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
  }
  return out;
}

inline std::vector<Field> fd_gradient(const Field& f) {
  std::vector<Field> out;
  for (int a = 0; a < f.grid().dim(); ++a) out.push_back(fd_derivative(f, a, 1));
  return out;
}

inline Field fd_laplacian(const Field& f) {
  Field out(f.grid());
  for (int a = 0; a < f.grid().dim(); ++a) out += fd_derivative(f, a, 2);
  return out;
}

/// h^d Σ f over the whole grid, or over the closed ball |x − c| <= r.
inline complex quadrature(const Field& f) {
  complex s{};
  for (const auto& v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

inline complex quadrature(const Field& f, const Point& c, double r) {
  const Grid& g = f.grid();
  complex s{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    if (norm2({x[0] - c[0], x[1] - c[1], x[2] - c[2]}) <= r * r) s += f[i];
  }
  return s * g.cell_volume();
}

/// Tensor action by the plain double sum over all sites with finite-difference
/// momentum densities.
inline TensorAction tensor_action_direct(const SystemState& s, const RadialWeight& w) {
  const Grid& g = s.grid();
  if (g.size() > kDirectBudget) throw BudgetError("direct tensor action limited to 32^3 points");
  const int N = s.components(), d = g.dim();
  TensorAction out;
  out.matrix.assign(static_cast<std::size_t>(N) * N, 0.0);
  std::vector<std::vector<Field>> grads;
  for (const auto& u : s.u) grads.push_back(fd_gradient(u));
  const double hd = g.cell_volume();
  for (int j = 0; j < N; ++j)
    for (int l = 0; l < N; ++l) {
      double acc = 0.0;
      for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = 0; y < g.size(); ++y) {
          const Point px = g.point(x), py = g.point(y);
          double gx = 0.0, gy = 0.0;
          const double gf = w.gradient_factor(norm2({px[0] - py[0], px[1] - py[1], px[2] - py[2]}));
          for (int a = 0; a < d; ++a) {
            const double z = px[a] - py[a];
            gx += z * (std::conj(s.u[j][x]) * grads[j][a][x]).imag();
            gy += z * (std::conj(s.u[l][y]) * grads[l][a][y]).imag();
          }
          acc += gf * (gx * std::norm(s.u[l][y]) - std::norm(s.u[j][x]) * gy);
        }
      out.matrix[static_cast<std::size_t>(j) * N + l] = 2.0 * acc * hd * hd;
      out.total += out.matrix[static_cast<std::size_t>(j) * N + l];
    }
  return out;
}

}  // namespace hfc4::oracle
