#pragma once

#include <vector>

#include "hfc4/grid.hpp"

namespace hfc4 {

/// Time plus the N components u_1..u_N on a common grid.
struct SystemState {
  double t = 0.0;
  std::vector<Field> u;

  const Grid& grid() const {
    if (u.empty()) throw DomainError("state has no components");
    return u.front().grid();
  }
  int components() const { return static_cast<int>(u.size()); }

  void validate() const {
    if (u.empty()) throw DomainError("state has no components");
    for (const auto& f : u) {
      u.front().check_same(f);
      if (!f.is_finite()) throw DomainError("state contains non-finite values");
    }
  }
};

}  // namespace hfc4
