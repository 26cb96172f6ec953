#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hfc4/diagnostics.hpp"

namespace hfc4 {

// ---------------------------------------------------------------------------
// Localized interaction monitor

enum class LocalizedVariant {
  case1,  // Choquard triple term plus σ1 quartic term
  case2   // quartic term only
};

struct LocalizedWindow {
  double radius = 2.0;
  int stride = 4;
};

/// Integrand q(t) of the localized estimate. At d = 3 the x and y balls coincide
/// (one ball integral of |u_j|^p |u_l|^2); otherwise they are separate balls.
inline double localized_integrand(const SystemState& s, const ModelParams& m, const LocalizedWindow& win,
                                  LocalizedVariant variant) {
  s.validate();
  const Grid& g = s.grid();
  const int N = s.components();
  const bool coincident = g.dim() == 3;
  auto density = [&](int j, double pj, int l, double pl) {
    Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double v = abs_power(s.u[j][i], pj);
      if (l >= 0) v *= abs_power(s.u[l][i], pl);
      f[i] = v;
    }
    return ball_integrals(f, win.radius);
  };
  double q = 0.0;
  if (variant == LocalizedVariant::case1 && m.p > 2.0 && m.has_choquard()) {
    std::vector<Field> bp, b2;
    for (int k = 0; k < N; ++k) {
      bp.push_back(density(k, m.p, -1, 0));
      b2.push_back(density(k, 2.0, -1, 0));
    }
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        const Field first = coincident ? density(j, m.p, l, 2.0) : Field();
        for (int k = 0; k < N; ++k) {
          const double bt = 4.0 * m.coupling(j, k) * (m.p - 2.0) / m.p;
          if (bt == 0.0) continue;
          Field prod(g);
          for (std::size_t i = 0; i < g.size(); ++i) {
            const double a = coincident ? first[i].real() : bp[j][i].real() * b2[l][i].real();
            prod[i] = a * bp[k][i].real();
          }
          q += bt * std::max(0.0, max_on_sublattice(prod, win.stride));
        }
      }
  }
  const bool quartic = variant == LocalizedVariant::case2 || m.sigma1 != 0;
  if (quartic) {
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        Field f(g);
        if (coincident) {
          f = density(j, 2.0, l, 2.0);
        } else {
          const Field a = density(j, 2.0, -1, 0), b = density(l, 2.0, -1, 0);
          for (std::size_t i = 0; i < g.size(); ++i) f[i] = a[i].real() * b[i].real();
        }
        const double v = std::max(0.0, max_on_sublattice(f, win.stride));
        q += (variant == LocalizedVariant::case1 ? m.sigma1 : 1.0) * v;
      }
  }
  return q;
}

/// Cumulative trapezoid integral of the localized integrand over the samples.
class LocalizedMonitor {
 public:
  LocalizedMonitor(ModelParams m, LocalizedWindow win, LocalizedVariant v) : m_(std::move(m)), win_(win), v_(v) {}

  /// Adds a sample and returns Q(t).
  double add(const SystemState& s) {
    const double q = localized_integrand(s, m_, win_, v_);
    if (!times_.empty()) {
      const double dt = s.t - times_.back();
      if (!(dt > 0.0)) throw DomainError("localized monitor samples must increase in time");
      cumulative_.push_back(cumulative_.back() + 0.5 * dt * (q + integrand_.back()));
    } else {
      cumulative_.push_back(0.0);
      double c = 0.0;
      for (const auto& u : s.u) c += std::pow(sobolev2_norm(u), 4);
      c_box_ = c;
    }
    times_.push_back(s.t);
    integrand_.push_back(q);
    return cumulative_.back();
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& integrand() const { return integrand_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  double c_box() const { return c_box_; }

  /// Q at time t by linear interpolation of the cumulative series.
  double at(double t) const {
    if (times_.empty()) return 0.0;
    if (t <= times_.front()) return cumulative_.front();
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (t <= times_[i] + 1e-12) {
        const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
        return cumulative_[i - 1] + w * (cumulative_[i] - cumulative_[i - 1]);
      }
    return cumulative_.back();
  }

 private:
  ModelParams m_;
  LocalizedWindow win_;
  LocalizedVariant v_;
  std::vector<double> times_, integrand_, cumulative_;
  double c_box_ = 0.0;
};

// ---------------------------------------------------------------------------
// Pointwise inequality (x − z)·((x − y)/|x − y| − (z − y)/|z − y|) >= 0

inline double triple_value(const Point& x, const Point& y, const Point& z) {
  Point a{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  Point b{z[0] - y[0], z[1] - y[1], z[2] - y[2]};
  const double na = std::sqrt(norm2(a)), nb = std::sqrt(norm2(b));
  Point xz{x[0] - z[0], x[1] - z[1], x[2] - z[2]};
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += xz[k] * (a[k] / na - b[k] / nb);
  return s;
}

/// The same quantity as (|A| + |B|)(|A||B| − A·B)/(|A||B|), visibly nonnegative.
inline double triple_value_factored(const Point& x, const Point& y, const Point& z) {
  Point a{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  Point b{z[0] - y[0], z[1] - y[1], z[2] - y[2]};
  const double na = std::sqrt(norm2(a)), nb = std::sqrt(norm2(b));
  return (na + nb) * (na * nb - dot(a, b)) / (na * nb);
}

struct TripleScan {
  long samples = 0;
  long violations = 0;  // values below −floor
  double minimum = 0.0;
};

inline TripleScan scan_triples(long samples, int d, std::uint64_t seed, double floor = 1e-12) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  TripleScan out;
  out.samples = samples;
  out.minimum = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    Point x{0, 0, 0}, y{0, 0, 0}, z{0, 0, 0};
    for (int k = 0; k < d; ++k) {
      x[k] = gauss(rng);
      y[k] = gauss(rng);
      z[k] = gauss(rng);
    }
    const double v = triple_value(x, y, z);
    out.minimum = std::min(out.minimum, v);
    if (v < -floor) ++out.violations;
  }
  return out;
}

struct KernelScan {
  long samples = 0;
  long violations = 0;
  double min_scaled = 0.0;  // min of K / scale
};

/// K_l(x, z) = (x − z)·Σ_y h^d |u_l(y)|^2 ((x − y)/|x − y| − (z − y)/|z − y|) at random
/// off-lattice points; scale = 2|x − z| ||u_l||^2.
inline KernelScan scan_kernel_positivity(const Field& ul, long samples, std::uint64_t seed, double floor = 1e-10) {
  const Grid& g = ul.grid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5 * g.length(), 0.5 * g.length());
  std::vector<double> rho(g.size());
  std::vector<Point> y(g.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    rho[i] = std::norm(ul[i]) * g.cell_volume();
    y[i] = g.point(i);
    mass += rho[i];
  }
  KernelScan out;
  out.samples = samples;
  out.min_scaled = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    Point x{0, 0, 0}, z{0, 0, 0};
    for (int k = 0; k < g.dim(); ++k) {
      x[k] = unif(rng);
      z[k] = unif(rng);
    }
    double K = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (rho[i] != 0.0) K += rho[i] * triple_value(x, y[i], z);
    const double scale = 2.0 * std::sqrt(norm2({x[0] - z[0], x[1] - z[1], x[2] - z[2]})) * mass;
    const double scaled = scale > 0.0 ? K / scale : 0.0;
    out.min_scaled = std::min(out.min_scaled, scaled);
    if (scaled < -floor) ++out.violations;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gagliardo–Nirenberg localization ratio

inline double gn_exponent(int d) { return (2.0 * d + 4.0) / d; }

/// ||u||_q^q / ((sup-ball L2)^{4/d} ||u||_{H^2}^2), q = (2d + 4)/d.
inline double gn_ratio(const Field& u, double radius, int stride) {
  const int d = u.grid().dim();
  const double q = gn_exponent(d);
  const double num = std::pow(lebesgue_norm(u, q), q);
  const double loc = local_l2_sup(u, radius, stride);
  const double h2 = sobolev2_norm(u);
  const double den = std::pow(loc, 4.0 / d) * h2 * h2;
  return den > 0.0 ? num / den : 0.0;
}

/// Largest ratio over centred Gaussians exp(−|x|^2/(2 s^2)) of several widths.
inline double calibrate_gn_constant(const Grid& g, double radius, int stride) {
  double c = 0.0;
  for (double s : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    if (6.0 * s > 0.5 * g.length()) continue;
    const Field u = Field::sample(g, [&](const Point& x) { return std::exp(-norm2(x) / (2.0 * s * s)); });
    c = std::max(c, gn_ratio(u, radius, stride));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Spectral pairing −Σ_{ξ≠0} |ξ|^{5−d} |ρ^(ξ)|^2 for ρ = Σ_j |u_j|^2

inline double spectral_pairing(const SystemState& s) {
  s.validate();
  const Grid& g = s.grid();
  Field rho(g);
  for (const auto& u : s.u)
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] += std::norm(u[i]);
  const double e = 5.0 - g.dim();
  return -spectral_quadratic(rho, [&](const Wavevector& w) { return w.norm2 == 0.0 ? 0.0 : std::pow(w.norm2, 0.5 * e); });
}

struct InequalityReport {
  TripleScan triples;
  std::vector<KernelScan> kernels;  // one per component
  double gn_constant = 0.0;
  std::vector<double> gn_ratios;
  bool gn_ok = true;
  double pairing = 0.0;
  bool pairing_ok = true;

  bool ok() const {
    bool k = triples.violations == 0;
    for (const auto& s : kernels) k = k && s.violations == 0;
    return k && gn_ok && pairing_ok;
  }
};

struct InequalitySettings {
  long triples = 1000000;
  long kernel_pairs = 64;
  double radius = 1.0;
  int stride = 4;
  std::uint64_t seed = 1;
};

inline InequalityReport inequality_monitors(const SystemState& s, const InequalitySettings& set) {
  InequalityReport r;
  r.triples = scan_triples(set.triples, 3, set.seed);
  for (int j = 0; j < s.components(); ++j)
    r.kernels.push_back(scan_kernel_positivity(s.u[j], set.kernel_pairs, set.seed + 1 + j));
  r.gn_constant = calibrate_gn_constant(s.grid(), set.radius, set.stride);
  for (const auto& u : s.u) {
    const double ratio = gn_ratio(u, set.radius, set.stride);
    r.gn_ratios.push_back(ratio);
    r.gn_ok = r.gn_ok && std::isfinite(ratio) && ratio <= r.gn_constant;
  }
  r.pairing = spectral_pairing(s);
  r.pairing_ok = r.pairing <= 0.0;
  return r;
}

}  // namespace hfc4
