#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "hfc4/fft.hpp"
#include "hfc4/grid.hpp"
#include "hfc4/state.hpp"

namespace hfc4 {

/// Wave vector of one spectral site, with the Nyquist flag per axis.
struct Wavevector {
  Point xi{0.0, 0.0, 0.0};
  std::array<bool, 3> nyquist{false, false, false};
  double norm2 = 0.0;
};

inline Field to_fourier(Field f) {
  fft::forward(f);
  return f;
}

/// Inverse transform including the 1/n^d factor.
inline Field from_fourier(Field f) {
  fft::backward(f);
  f *= 1.0 / static_cast<double>(f.size());
  return f;
}

template <class Fn>
void for_each_wavevector(const Grid& g, Fn&& fn) {
  const int n = g.points();
  const int d = g.dim();
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = g.wavenumber(i);
  std::size_t idx = 0;
  const int n1 = d > 1 ? n : 1;
  const int n2 = d > 2 ? n : 1;
  Wavevector w;
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < n; ++i0, ++idx) {
        w.xi = {k[i0], d > 1 ? k[i1] : 0.0, d > 2 ? k[i2] : 0.0};
        w.nyquist = {g.is_nyquist(i0), d > 1 && g.is_nyquist(i1), d > 2 && g.is_nyquist(i2)};
        w.norm2 = norm2(w.xi);
        fn(idx, w);
      }
}

/// Fourier multiplier: transform, multiply by symbol(w), transform back.
template <class Symbol>
Field multiply_symbol(const Field& f, Symbol&& symbol) {
  if (!f.is_finite()) throw DomainError("non-finite field passed to a spectral operator");
  Field fh = to_fourier(f);
  for_each_wavevector(f.grid(), [&](std::size_t i, const Wavevector& w) { fh[i] *= symbol(w); });
  return from_fourier(std::move(fh));
}

struct Symbol {
  enum class Kind { laplacian, bilaplacian, gradient, fractional, h2_weight };
  Kind kind = Kind::laplacian;
  int axis = 0;
  double order = 0.0;

  static Symbol laplacian() { return {Kind::laplacian}; }
  static Symbol bilaplacian() { return {Kind::bilaplacian}; }
  static Symbol gradient(int axis) { return {Kind::gradient, axis}; }
  static Symbol fractional(double s) { return {Kind::fractional, 0, s}; }
  static Symbol h2_weight() { return {Kind::h2_weight}; }

  // Odd symbols vanish on the Nyquist plane of their axis.
  complex operator()(const Wavevector& w) const {
    switch (kind) {
      case Kind::laplacian: return -w.norm2;
      case Kind::bilaplacian: return w.norm2 * w.norm2;
      case Kind::gradient: return w.nyquist[axis] ? complex{} : complex(0.0, w.xi[axis]);
      case Kind::fractional:
        if (w.norm2 == 0.0) return order == 0.0 ? 1.0 : 0.0;
        return std::pow(w.norm2, 0.5 * order);
      case Kind::h2_weight: return 1.0 + w.norm2;
    }
    return 0.0;
  }
};

inline Field apply_symbol(const Field& f, const Symbol& s) {
  if (s.kind == Symbol::Kind::gradient && (s.axis < 0 || s.axis >= f.grid().dim()))
    throw DomainError("gradient axis out of range");
  return multiply_symbol(f, s);
}

inline Field laplacian(const Field& f) { return apply_symbol(f, Symbol::laplacian()); }
inline Field bilaplacian(const Field& f) { return apply_symbol(f, Symbol::bilaplacian()); }
inline Field partial(const Field& f, int axis) { return apply_symbol(f, Symbol::gradient(axis)); }

/// Spectral gradient, one field per axis, sharing a single forward transform.
inline std::vector<Field> gradient(const Field& f) {
  const Field fh = to_fourier(f);
  std::vector<Field> out;
  for (int a = 0; a < f.grid().dim(); ++a) {
    Field g = fh;
    for_each_wavevector(f.grid(), [&](std::size_t i, const Wavevector& w) {
      g[i] *= w.nyquist[a] ? complex{} : complex(0.0, w.xi[a]);
    });
    out.push_back(from_fourier(std::move(g)));
  }
  return out;
}

/// Hessian components ∂_a∂_b f for a <= b, stored row-major in a d x d array.
inline std::vector<Field> hessian(const Field& f) {
  const int d = f.grid().dim();
  const Field fh = to_fourier(f);
  std::vector<Field> out(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Field g = fh;
      for_each_wavevector(f.grid(), [&](std::size_t i, const Wavevector& w) {
        if (a != b && (w.nyquist[a] || w.nyquist[b]))
          g[i] = 0.0;
        else
          g[i] *= -w.xi[a] * w.xi[b];
      });
      out[a * d + b] = from_fourier(std::move(g));
      if (a != b) out[b * d + a] = out[a * d + b];
    }
  return out;
}

/// (h^d / n^d) sum |f^|^2, the Plancherel side of the L2 norm.
inline double spectral_l2_squared(const Field& f) {
  const Field fh = to_fourier(f);
  double s = 0.0;
  for (const auto& v : fh.values()) s += std::norm(v);
  return s * f.grid().cell_volume() / static_cast<double>(f.size());
}

/// (h^d / n^d) sum m(ξ) |f^|^2 for a real multiplier m.
template <class Weight>
double spectral_quadratic(const Field& f, Weight&& m) {
  const Field fh = to_fourier(f);
  double s = 0.0;
  for_each_wavevector(f.grid(), [&](std::size_t i, const Wavevector& w) { s += m(w) * std::norm(fh[i]); });
  return s * f.grid().cell_volume() / static_cast<double>(f.size());
}

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline double lebesgue_norm(const Field& f, double r) {
  if (!(r >= 1.0)) throw DomainError("Lebesgue exponent must be >= 1");
  if (std::isinf(r)) return f.max_abs();
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), r);
  return std::pow(s * f.grid().cell_volume(), 1.0 / r);
}

/// ||(1 + |ξ|^2) f^|| with the Plancherel normalization.
inline double sobolev2_norm(const Field& f) {
  return std::sqrt(spectral_quadratic(f, [](const Wavevector& w) {
    const double m = 1.0 + w.norm2;
    return m * m;
  }));
}

/// Minimum-image ball mask of radius r centred at the origin index 0 (wrapped).
inline Field ball_mask(const Grid& g, double radius) {
  Field mask(g);
  const int n = g.points();
  const double h = g.spacing();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto i = g.unravel(idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const int k = i[a] < n / 2 ? i[a] : i[a] - n;
      r2 += (k * h) * (k * h);
    }
    if (r2 <= radius * radius) mask[idx] = 1.0;
  }
  return mask;
}

/// Periodic ball integrals: out(c) = h^d sum_{|x-c| <= r} g(x) for every site c.
inline Field ball_integrals(const Field& g, double radius) {
  const Grid& grid = g.grid();
  Field mh = to_fourier(ball_mask(grid, radius));
  Field gh = to_fourier(g);
  const double w = grid.cell_volume() / static_cast<double>(grid.size());
  // The mask is even, so the correlation equals the convolution.
  for (std::size_t i = 0; i < gh.size(); ++i) gh[i] *= mh[i] * w;
  fft::backward(gh);
  return gh;
}

/// Largest value of a real site field over the stride sublattice.
inline double max_on_sublattice(const Field& f, int stride) {
  if (stride < 1) throw DomainError("stride must be positive");
  const Grid& g = f.grid();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto i = g.unravel(idx);
    bool on = true;
    for (int a = 0; a < g.dim(); ++a) on = on && (i[a] % stride == 0);
    if (on) m = std::max(m, f[idx].real());
  }
  return m;
}

/// max over stride-sublattice centres of the ball-restricted L2 norm.
inline double local_l2_sup(const Field& f, double radius, int stride) {
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  Field density(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) density[i] = std::norm(f[i]);
  return std::sqrt(std::max(0.0, max_on_sublattice(ball_integrals(density, radius), stride)));
}

struct LebesgueSpec {
  double r;
};
struct Sobolev2Spec {};
struct LocalL2SupSpec {
  double radius;
  int stride;
};
using NormSpec = std::variant<LebesgueSpec, Sobolev2Spec, LocalL2SupSpec>;

inline double norm(const Field& f, const NormSpec& spec) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LebesgueSpec>)
          return lebesgue_norm(f, s.r);
        else if constexpr (std::is_same_v<S, Sobolev2Spec>)
          return sobolev2_norm(f);
        else
          return local_l2_sup(f, s.radius, s.stride);
      },
      spec);
}

enum class Direction { forward, backward };

/// Exact free flow e^{±it(|ξ|^4 + σ1|ξ|^2)}. Ignores any potential.
inline Field linear_propagator(const Field& f, double t, Direction dir, int sigma1) {
  if (t == 0.0) return f;
  const double s = dir == Direction::forward ? t : -t;
  return multiply_symbol(f, [&](const Wavevector& w) {
    return std::polar(1.0, s * (w.norm2 * w.norm2 + sigma1 * w.norm2));
  });
}

inline SystemState linear_propagator(const SystemState& state, double t, Direction dir, int sigma1) {
  state.validate();
  SystemState out{state.t + (dir == Direction::forward ? t : -t), {}};
  for (const auto& f : state.u) out.u.push_back(linear_propagator(f, t, dir, sigma1));
  return out;
}

}  // namespace hfc4
