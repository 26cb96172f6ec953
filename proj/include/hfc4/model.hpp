#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfc4/errors.hpp"
#include "hfc4/rational.hpp"

namespace hfc4 {

struct ModelParams {
  int d = 3;
  int N = 1;
  int sigma1 = 0;
  int sigma2 = 0;
  double p = 2.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double b = 0.0;
  std::vector<double> bjk;  // N x N, row-major

  double coupling(int j, int k) const { return bjk[static_cast<std::size_t>(j) * N + k]; }

  bool has_choquard() const {
    for (double v : bjk)
      if (v != 0.0) return true;
    return false;
  }
  bool has_hartree() const { return b != 0.0 && N > 1; }

  bool symmetric_couplings() const {
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < j; ++k)
        if (coupling(j, k) != coupling(k, j)) return false;
    return true;
  }

  /// Invariants every parameter set must satisfy before anything is evaluated.
  void check_structure() const {
    auto fail = [](const std::string& m) { throw ValidationError(m); };
    if (d < 1) fail("d must be >= 1");
    if (N < 1) fail("N must be >= 1");
    if ((sigma1 != 0 && sigma1 != 1) || (sigma2 != 0 && sigma2 != 1)) fail("sigma1, sigma2 must be 0 or 1");
    for (double v : {p, gamma1, gamma2, rho1, rho2, b})
      if (!std::isfinite(v)) fail("model parameters must be finite");
    if (!(p >= 2.0)) fail("p must be >= 2");
    if (rho1 < 0.0 || rho2 < 0.0) fail("rho1, rho2 must be >= 0");
    if (b < 0.0) fail("b must be >= 0 (defocusing)");
    if (bjk.size() != static_cast<std::size_t>(N) * N) fail("b_jk must have N*N entries");
    for (double v : bjk)
      if (!std::isfinite(v) || v < 0.0) fail("every b_jk must be finite and >= 0 (defocusing)");
  }

  /// Extra gate for running the lattice simulator.
  void check_simulable() const {
    check_structure();
    auto fail = [](const std::string& m) { throw ValidationError(m); };
    if (d > 3) fail("simulation supports d <= 3 only; higher d is validator-only");
    if (!(gamma1 > 0.0 && gamma1 < d)) fail("simulation needs 0 < gamma1 < d");
    if (!(gamma2 > 0.0 && gamma2 < d)) fail("simulation needs 0 < gamma2 < d");
    if (!(rho1 < d) || !(rho2 < d)) fail("simulation needs rho < d");
  }
};

struct CriticalExponents {
  Exponent p_star;
  Exponent p1_star;
  Exponent p2_star;
};

/// (d + γ1 + ρ1)/(d − 4), the energy-critical power above dimension four.
inline Exponent high_dimension_p_star(int d, double gamma1, double rho1) {
  if (d <= 4) throw DomainError("the d >= 5 branch of p* needs d >= 5");
  return Exponent((d + exact(gamma1) + exact(rho1)) / (d - 4));
}

/// p_κ* = (d + γ_κ + 4 + ρ_κ)/d.
inline Exponent mass_critical_power(int d, double gamma, double rho) {
  if (d < 1) throw DomainError("d must be >= 1");
  return Exponent((d + exact(gamma) + 4 + exact(rho)) / d);
}

/// p* is infinite up to d = 4 (H^2 controls every power there).
inline CriticalExponents critical_exponents(int d, double gamma1, double gamma2, double rho1, double rho2) {
  if (d < 1) throw DomainError("d must be >= 1");
  CriticalExponents c;
  c.p_star = d <= 4 ? Exponent::infinity() : high_dimension_p_star(d, gamma1, rho1);
  c.p1_star = mass_critical_power(d, gamma1, rho1);
  c.p2_star = mass_critical_power(d, gamma2, rho2);
  return c;
}

enum class TheoremCase { none, case1, case2 };

inline const char* to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::case1: return "Case1";
    case TheoremCase::case2: return "Case2";
    default: return "None";
  }
}

struct Condition {
  std::string key;
  bool holds = false;
  bool applicable = true;
  std::string bound;  // evaluated bound, human readable
};

struct AdmissibilityReport {
  std::vector<Condition> conditions;
  CriticalExponents critical;
  bool intercritical = false;  // hypotheses shared by both theorems
  TheoremCase decay_case = TheoremCase::none;
  TheoremCase scattering_case = TheoremCase::none;
  std::vector<std::string> messages;

  const Condition& at(const std::string& key) const {
    for (const auto& c : conditions)
      if (c.key == key) return c;
    throw DomainError("unknown condition " + key);
  }

  std::string text() const {
    std::ostringstream os;
    os << "p_star = " << critical.p_star << ", p1_star = " << critical.p1_star
       << ", p2_star = " << critical.p2_star << "\n";
    for (const auto& c : conditions)
      os << (c.applicable ? (c.holds ? "  ok    " : "  FAIL  ") : "  n/a   ") << c.key << ": " << c.bound << "\n";
    os << "decay_case = " << to_string(decay_case) << "\n";
    os << "scattering_case = " << to_string(scattering_case) << "\n";
    for (const auto& m : messages) os << "note: " << m << "\n";
    return os.str();
  }
};

namespace detail {
inline std::string fmt(const Rational& r) {
  std::ostringstream os;
  os << r << " (" << r.convert_to<double>() << ")";
  return os.str();
}
}  // namespace detail

/// Reports (never throws on inadmissible values) which hypotheses hold and which
/// theorem case the parameters fall into. Structural validity is a precondition.
inline AdmissibilityReport validate_params(const ModelParams& m) {
  m.check_structure();
  AdmissibilityReport rep;
  rep.critical = critical_exponents(m.d, m.gamma1, m.gamma2, m.rho1, m.rho2);
  const Rational d(m.d);
  const Rational p = exact(m.p);
  const Rational gamma[2] = {exact(m.gamma1), exact(m.gamma2)};
  const Rational rho[2] = {exact(m.rho1), exact(m.rho2)};
  auto add = [&](std::string key, bool holds, std::string bound, bool applicable = true) {
    rep.conditions.push_back({std::move(key), holds, applicable, std::move(bound)});
  };

  bool base = true;
  for (int k = 0; k < 2; ++k) {
    const std::string idx = std::to_string(k + 1);
    const Rational lo = m.d > 8 ? d - 8 : Rational(0);
    const bool ok = lo < gamma[k] && gamma[k] < d;
    add("gamma" + idx + "_range", ok, detail::fmt(lo) + " < gamma" + idx + " < " + detail::fmt(d));
    base = base && ok;
  }
  {
    const bool ok = p >= 2 && Exponent(p) < rep.critical.p_star;
    add("p_range", ok, "2 <= p < p_star = " + rep.critical.p_star.str());
    base = base && ok;
  }
  add("p_above_p1_star", rep.critical.p1_star < Exponent(p),
      "p > p1_star = " + rep.critical.p1_star.str() + " (scattering only)");
  for (int k = 0; k < 2; ++k) {
    const std::string idx = std::to_string(k + 1);
    Rational cap = d + gamma[k];
    cap = std::min(cap, Rational(4 * (1 + gamma[k] / d)));
    cap = std::min(cap, Rational(8 + gamma[k] - d));
    const bool ok = rho[k] >= 0 && rho[k] < cap;
    add("rho" + idx + "_range", ok, "0 <= rho" + idx + " < " + detail::fmt(cap));
    base = base && ok;
  }
  for (int k = 0; k < 2; ++k) {
    const std::string idx = std::to_string(k + 1);
    const bool applicable = m.d >= 3 && m.d <= 4;
    const Rational v = 2 * gamma[k] - 4 * rho[k] + d;
    const bool ok = !applicable || v > 0;
    add("rho" + idx + "_low_dimension", ok, "2 gamma" + idx + " - 4 rho" + idx + " + d = " + detail::fmt(v) + " > 0",
        applicable);
    base = base && ok;
  }
  const bool p2_ok = rep.critical.p2_star <= Exponent(Rational(2));
  add("p2_star_at_most_2", p2_ok, "p2_star = " + rep.critical.p2_star.str() + " <= 2 (scattering only)");

  rep.intercritical = base;

  bool every_component_driven = true;
  for (int j = 0; j < m.N; ++j) every_component_driven = every_component_driven && (m.coupling(j, j) != 0.0 || m.sigma1 != 0);
  const bool no_weights = m.rho1 == 0.0 && m.rho2 == 0.0;
  const bool weighted_or_potential = !no_weights || m.sigma2 != 0;

  if (!base) {
    rep.messages.push_back("intercriticality hypotheses fail; no theorem case applies");
  } else {
    if (m.d >= 3 && every_component_driven && no_weights && m.sigma2 == 0)
      rep.decay_case = TheoremCase::case1;
    else if (m.d >= 5 && weighted_or_potential)
      rep.decay_case = TheoremCase::case2;
    else
      rep.messages.push_back("decay: neither case list matches");

    const bool above = rep.critical.p1_star < Exponent(p);
    if (!above || !p2_ok) {
      rep.messages.push_back("scattering: needs p > p1_star and p2_star <= 2");
    } else if (m.d >= 3 && every_component_driven && m.p > 2.0 && m.b == 0.0 && no_weights && m.sigma2 == 0) {
      rep.scattering_case = TheoremCase::case1;
    } else if (m.d >= 5 && (m.p == 2.0 || weighted_or_potential)) {
      rep.scattering_case = TheoremCase::case2;
    } else {
      rep.messages.push_back("scattering: neither case list matches");
    }
  }
  if (m.sigma2 != 0) rep.messages.push_back("potential hypotheses are checked separately on the grid");
  if (!m.symmetric_couplings()) rep.messages.push_back("b_jk is not symmetric; the energy is not conserved");
  if (m.d <= 2) rep.messages.push_back("d <= 2 is outside every theorem case (they need d >= 3)");
  return rep;
}

/// 4/q + d/r = d/2 exactly, both exponents in [2, ∞], and (q, r, d) != (2, ∞, 4).
inline bool is_biharmonic_admissible(const Exponent& q, const Exponent& r, int d) {
  const Exponent two(Rational(2));
  if (q < two || r < two) return false;
  if (q == two && r.is_infinite() && d == 4) return false;
  return 4 * q.reciprocal() + d * r.reciprocal() == Rational(d) / 2;
}

struct ExponentPair {
  Exponent q;
  Exponent r;
  bool relation = false;   // 4/q + d/r = d/2
  bool admissible = false;  // relation plus ranges
};

struct ScatteringPairs {
  std::array<ExponentPair, 8> pairs;
  std::array<std::optional<Rational>, 8> theta;  // empty when q is not a finite exponent > 1
  std::vector<std::string> violations;
};

namespace detail {
inline Exponent from_reciprocal(const Rational& inv) {
  if (inv == 0) return Exponent::infinity();
  return Exponent(Rational(1) / inv);
}
}  // namespace detail

/// The eight pairs (q_i, r_i) used for the nonlinear estimates: i = 1, 3, 4, 5 are
/// the Choquard family, i = 2, 6, 7, 8 the Hartree family (p = 2). Pair 2 is the
/// p = 2 instance of pair 1.
inline ScatteringPairs scattering_pairs(const ModelParams& m) {
  m.check_structure();
  const Rational d(m.d);
  const Rational p = exact(m.p);
  const Rational g1 = exact(m.gamma1), g2 = exact(m.gamma2);
  const Rational r1 = exact(m.rho1), r2 = exact(m.rho2);

  std::array<std::pair<Rational, Rational>, 8> inv;  // (1/q, 1/r)
  inv[0] = {(d * p - d - g1) / (8 * p), (d + g1) / (2 * d * p)};
  inv[1] = {(2 * d - d - g1) / 16, (d + g1) / (4 * d)};
  inv[2] = {(d * p - d - g1 + 2 * r1) / (8 * p), (d + g1 - 2 * r1) / (2 * d * p)};
  for (int i = 0; i < 2; ++i) {
    const Rational x = d + (i == 0 ? 4 : 6) + 2 * g1 - 4 * r1;
    inv[3 + i] = {(d * (2 * p - 1) - x) / (8 * (2 * p - 1)), x / (2 * d * (2 * p - 1))};
  }
  inv[5] = {(d - g2 + 2 * r2) / 16, (d + g2 - 2 * r2) / (4 * d)};
  for (int i = 0; i < 2; ++i) {
    const Rational y = (i == 0 ? 4 : 6) + 2 * g2 - 4 * r2;
    inv[6 + i] = {(2 * d - y) / 24, (d + y) / (6 * d)};
  }

  ScatteringPairs out;
  for (int i = 0; i < 8; ++i) {
    auto& pr = out.pairs[i];
    pr.q = detail::from_reciprocal(inv[i].first);
    pr.r = detail::from_reciprocal(inv[i].second);
    pr.relation = 4 * inv[i].first + d * inv[i].second == d / 2;
    pr.admissible = is_biharmonic_admissible(pr.q, pr.r, m.d);
    if (!pr.admissible)
      out.violations.push_back("pair " + std::to_string(i + 1) + " (" + pr.q.str() + ", " + pr.r.str() +
                               ") is not biharmonic-admissible");

    const bool choquard = i == 0 || i == 2 || i == 3 || i == 4;
    const Rational power = choquard ? p : Rational(2);
    if (!pr.q.is_infinite() && pr.q.value() > 1) {
      const Rational q = pr.q.value();
      const Rational qc = q / (q - 1);
      const Rational theta = (q - qc) / (2 * power * qc - 2 * qc);
      out.theta[i] = theta;
      if (!(theta > 0 && theta < 1))
        out.violations.push_back("theta" + std::to_string(i + 1) + " = " + theta.str() + " leaves (0,1)");
    } else {
      out.violations.push_back("theta" + std::to_string(i + 1) + " undefined for q = " + pr.q.str());
    }
  }
  return out;
}

}  // namespace hfc4
