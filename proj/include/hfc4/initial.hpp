#pragma once

#include <cmath>

#include "hfc4/config.hpp"
#include "hfc4/state.hpp"

namespace hfc4 {

/// u_j(x) = A_j exp(−|x − c_j|^2 / (2 w_j^2)) e^{i v_j·x}.
inline Field gaussian_packet(const Grid& g, double amplitude, double width, const Point& center, const Point& velocity) {
  return Field::sample(g, [&](const Point& x) {
    Point z{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    return std::polar(amplitude * std::exp(-norm2(z) / (2.0 * width * width)), dot(velocity, x));
  });
}

inline SystemState initial_state(const Grid& g, const RunConfig& c) {
  SystemState s{0.0, {}};
  const auto& in = c.initial;
  for (int j = 0; j < c.model.N; ++j)
    s.u.push_back(gaussian_packet(g, in.amplitude[j], in.width[j], in.center[j], in.velocity[j]));
  return s;
}

}  // namespace hfc4
