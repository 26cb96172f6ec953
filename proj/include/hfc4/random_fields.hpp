#pragma once

#include <algorithm>
#include <random>

#include "hfc4/grid.hpp"

namespace hfc4 {

/// Sum of a few complex Gaussian packets with random centres, widths, amplitudes
/// and momenta. Centres stay within L/16 of the origin; widths are at least 1.5
/// cells so the packets are resolved even on 16-point grids.
inline Field random_smooth_field(const Grid& g, std::mt19937_64& rng, int packets = 3, double max_momentum = 1.0) {
  const double L = g.length(), h = g.spacing();
  std::uniform_real_distribution<double> centre(-L / 16.0, L / 16.0);
  std::uniform_real_distribution<double> width(std::max(1.5 * h, L / 24.0), std::max(2.0 * h, L / 14.0));
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> mom(-max_momentum, max_momentum);
  Field f(g);
  for (int k = 0; k < packets; ++k) {
    Point c{0, 0, 0}, v{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      c[a] = centre(rng);
      v[a] = mom(rng);
    }
    const double w = width(rng);
    const complex A(amp(rng), amp(rng));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      const Point z{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
      f[i] += A * std::polar(std::exp(-norm2(z) / (2.0 * w * w)), dot(v, x));
    }
  }
  return f;
}

/// Real part only, for checks that need real-valued operands.
inline Field random_smooth_real_field(const Grid& g, std::mt19937_64& rng, int packets = 3) {
  Field f = random_smooth_field(g, rng, packets, 0.0);
  for (auto& v : f.values()) v = v.real();
  return f;
}

}  // namespace hfc4
