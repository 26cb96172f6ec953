#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hfc4/grid.hpp"
#include "hfc4/spectral.hpp"

namespace hfc4 {

struct PotentialSpec {
  enum class Family { zero, gaussian_bump, tabulated };
  Family family = Family::zero;
  double amplitude = 0.0;  // V0
  double width = 1.0;      // s
  std::vector<double> table;  // one value per site, x-fastest, for tabulated
};

/// V(x) = V0 exp(-|x|^2 / (2 s^2)) for the bump, so x·∇V = -(|x|^2/s^2) V.
inline Field sample_potential(const PotentialSpec& spec, const Grid& g) {
  Field v(g);
  switch (spec.family) {
    case PotentialSpec::Family::zero: break;
    case PotentialSpec::Family::gaussian_bump:
      if (!(spec.width > 0.0)) throw DomainError("potential width must be positive");
      for (std::size_t i = 0; i < g.size(); ++i)
        v[i] = spec.amplitude * std::exp(-norm2(g.point(i)) / (2.0 * spec.width * spec.width));
      break;
    case PotentialSpec::Family::tabulated:
      if (spec.table.size() != g.size()) throw DomainError("tabulated potential size does not match grid");
      for (std::size_t i = 0; i < g.size(); ++i) v[i] = spec.table[i];
      break;
  }
  return v;
}

struct PotentialReport {
  bool accepted = true;
  bool nonnegative = true;
  bool radially_nonincreasing = true;
  double min_value = 0.0;
  double max_radial_derivative = 0.0;  // max of x·∇V
  double ld4_norm = 0.0;               // (h^d Σ|V|^{d/4})^{4/d}
  bool hardy_applicable = false;
  double hardy_sup = 0.0;
  std::vector<std::string> messages;

  std::string text() const {
    std::ostringstream os;
    os << "V >= 0: " << (nonnegative ? "ok" : "FAIL") << " (min " << min_value << ")\n";
    os << "x.grad V <= 0: " << (radially_nonincreasing ? "ok" : "FAIL") << " (max " << max_radial_derivative << ")\n";
    os << "L^{d/4} norm: " << ld4_norm << "\n";
    os << "sup_y int V/|x-y|^{d-4}: " << (hardy_applicable ? std::to_string(hardy_sup) : "not applicable (d<5)") << "\n";
    for (const auto& m : messages) os << "note: " << m << "\n";
    return os.str();
  }
};

/// Grid proxies of the potential hypotheses. The radial monotonicity check uses a
/// spectral gradient, so it tolerates roundoff of 1e-10 * max|V|.
inline PotentialReport potential_admissibility(const PotentialSpec& spec, const Grid& g) {
  PotentialReport rep;
  const Field v = sample_potential(spec, g);
  double vmax = 0.0;
  rep.min_value = v.size() ? v[0].real() : 0.0;
  for (const auto& x : v.values()) {
    rep.min_value = std::min(rep.min_value, x.real());
    vmax = std::max(vmax, std::abs(x.real()));
  }
  rep.nonnegative = rep.min_value >= 0.0;
  if (!rep.nonnegative) {
    rep.accepted = false;
    rep.messages.push_back("negative potential sample; rejected");
  }

  const auto grad = gradient(v);
  double radial_max = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += x[a] * grad[a][i].real();
    radial_max = std::max(radial_max, s);
  }
  rep.max_radial_derivative = radial_max;
  rep.radially_nonincreasing = radial_max <= 1e-10 * std::max(vmax, 1e-300);
  if (!rep.radially_nonincreasing) {
    rep.accepted = false;
    rep.messages.push_back("x.grad V > 0 somewhere; potential is not radially nonincreasing");
  }

  const double q = g.dim() / 4.0;
  double s = 0.0;
  for (const auto& x : v.values()) s += std::pow(std::abs(x.real()), q);
  rep.ld4_norm = std::pow(s * g.cell_volume(), 1.0 / q);

  // The lattice only exists for d <= 3, where this term is not part of the hypotheses.
  rep.hardy_applicable = false;
  return rep;
}

}  // namespace hfc4
