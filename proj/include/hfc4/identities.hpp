#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hfc4/diagnostics.hpp"

namespace hfc4 {

struct NamedTerm {
  std::string name;
  double value;
};

/// Right-hand side of the Morawetz identity, term by term.
struct MorawetzBreakdown {
  std::vector<std::vector<NamedTerm>> per_component;  // linear, potential, Choquard, direct Hartree
  std::vector<double> exchange_per_component;          // exchange contribution before integration by parts
  double exchange_total = 0.0;                         // exchange term after integration by parts, summed over j,k
  double printed_extra = 0.0;                          // the two Δa Hartree terms that a correct derivation cancels
  std::vector<double> direct_form;                     // −2 Re ∫ G_j (Δa conj(u_j) + 2∇a·∇conj(u_j))

  double component_total(int j) const {
    double s = exchange_per_component[j];
    for (const auto& t : per_component[j]) s += t.value;
    return s;
  }
  double total() const {
    double s = exchange_total;
    for (const auto& terms : per_component)
      for (const auto& t : terms) s += t.value;
    return s;
  }
};

namespace detail {

struct WeightFields {
  Field lap, bilap;               // Δa, Δ²a
  Field grad_factor;              // ∇a = g z
  Field hess1, hess2;             // D²a = h1 I + h2 z zᵀ
  Field hb1, hb2;                 // D²(Δa − σ1 a)
  std::vector<Point> z;           // x − c
};

inline WeightFields sample_weight(const Grid& g, const MorawetzWeight& weight, int sigma1) {
  const RadialWeight& a = weight.radial;
  const RadialWeight la = a.laplacian();
  const RadialWeight l2a = la.laplacian();
  const RadialWeight b = la - a.scaled(sigma1);
  WeightFields w{Field(g), Field(g), Field(g), Field(g), Field(g), Field(g), Field(g), {}};
  w.z.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point z = g.point(i);
    for (int k = 0; k < 3; ++k) z[k] -= weight.center[k];
    w.z[i] = z;
    const double r2 = norm2(z);
    w.lap[i] = la.value(r2);
    w.bilap[i] = l2a.value(r2);
    w.grad_factor[i] = a.gradient_factor(r2);
    const auto [h1, h2] = a.hessian_factors(r2);
    w.hess1[i] = h1;
    w.hess2[i] = h2;
    const auto [b1, b2] = b.hessian_factors(r2);
    w.hb1[i] = b1;
    w.hb2[i] = b2;
  }
  return w;
}

// ∇[w · K*(w g)] = ∇w (K*(w g)) + w K*(∇(w g)), with ∇(w g) = g ∇w + w ∇g and ∇g spectral.
inline std::vector<Field> weighted_potential_gradient(const RieszConvolver& k, const Field& w,
                                                      const std::vector<Field>& grad_w, const Field& conv_wg,
                                                      const Field& g_field) {
  const Grid& grid = g_field.grid();
  const auto grad_g = gradient(g_field);
  std::vector<Field> out;
  for (int a = 0; a < grid.dim(); ++a) {
    Field inner(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      inner[i] = g_field[i] * grad_w[a][i].real() + w[i].real() * grad_g[a][i];
    Field c = k.convolve_complex(inner);
    for (std::size_t i = 0; i < grid.size(); ++i) c[i] = grad_w[a][i].real() * conv_wg[i] + w[i].real() * c[i];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Every term of the Morawetz identity for the weight a(x) = f(x − c). Field derivatives
/// are spectral, weight derivatives analytic.
inline MorawetzBreakdown morawetz_rhs(const SystemState& s, const Nonlinearity& nl, const Field* potential,
                                      const MorawetzWeight& weight) {
  s.validate();
  const Grid& g = s.grid();
  const int d = g.dim();
  const ModelParams& m = nl.params();
  const int N = s.components();
  const double hd = g.cell_volume();
  const auto W = detail::sample_weight(g, weight, m.sigma1);

  std::vector<Field> gradV;
  if (m.sigma2 != 0 && potential != nullptr) gradV = gradient(*potential);

  const bool nonlinear = m.has_choquard() || m.has_hartree();
  Interactions I;
  if (nonlinear) I = nl.interactions(s.u);

  MorawetzBreakdown out;
  out.per_component.resize(N);
  out.exchange_per_component.assign(N, 0.0);

  std::vector<std::vector<Field>> grads(N);
  for (int j = 0; j < N; ++j) grads[j] = gradient(s.u[j]);

  // Gradients of the weighted Choquard and direct potentials, one per source component.
  std::vector<Field> grad_w1, grad_w2;
  std::vector<std::vector<Field>> grad_choquard(N), grad_direct(N);
  if (nl.kernel1()) {
    grad_w1 = singular_weight_gradient(g, m.rho1);
    for (int k = 0; k < N; ++k) {
      Field gk(g);
      for (std::size_t i = 0; i < g.size(); ++i) gk[i] = abs_power(s.u[k][i], m.p);
      grad_choquard[k] = detail::weighted_potential_gradient(*nl.kernel1(), nl.weight1(), grad_w1, I.choquard[k], gk);
    }
  }
  if (nl.kernel2()) {
    grad_w2 = singular_weight_gradient(g, m.rho2);
    for (int k = 0; k < N; ++k) {
      Field gk(g);
      for (std::size_t i = 0; i < g.size(); ++i) gk[i] = std::norm(s.u[k][i]);
      grad_direct[k] = detail::weighted_potential_gradient(*nl.kernel2(), nl.weight2(), grad_w2, I.direct[k], gk);
    }
  }

  for (int j = 0; j < N; ++j) {
    const Field& u = s.u[j];
    const auto& du = grads[j];
    const auto D2u = hessian(u);
    // ∫(−Δ³a + σ1Δ²a)ρ is evaluated as ∫Δa(−Δ²ρ + σ1Δρ): Δ³a peaks like ε^{-5} and is
    // not resolved by the lattice at ε of a few cells, while ρ is smooth.
    Field rho_f(g);
    for (std::size_t i = 0; i < g.size(); ++i) rho_f[i] = std::norm(u[i]);
    const Field lap_rho = laplacian(rho_f), bilap_rho = laplacian(lap_rho);
    double l1 = 0, l2 = 0, l3 = 0, l4 = 0, lv = 0, c1 = 0, c2 = 0, hd_dir = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point& z = W.z[i];
      const double rho = std::norm(u[i]);
      l1 += W.lap[i].real() * (-bilap_rho[i].real() + m.sigma1 * lap_rho[i].real());
      double grad2 = 0.0;
      complex zdu{};
      for (int a = 0; a < d; ++a) {
        grad2 += std::norm(du[a][i]);
        zdu += z[a] * du[a][i];
      }
      l2 += 2.0 * W.bilap[i].real() * grad2;
      l3 += 4.0 * (W.hb1[i].real() * grad2 + W.hb2[i].real() * std::norm(zdu));
      // tr(D²u D²a D²ū) with D²a = h1 I + h2 z zᵀ
      double hs = 0.0, hz = 0.0;
      for (int a = 0; a < d; ++a) {
        complex row{};
        for (int b = 0; b < d; ++b) {
          hs += std::norm(D2u[a * d + b][i]);
          row += D2u[a * d + b][i] * z[b];
        }
        hz += std::norm(row);
      }
      l4 += -8.0 * (W.hess1[i].real() * hs + W.hess2[i].real() * hz);
      if (!gradV.empty()) {
        double gv = 0.0;
        for (int a = 0; a < d; ++a) gv += z[a] * gradV[a][i].real();
        lv += 2.0 * W.grad_factor[i].real() * gv * rho;
      }
      if (nl.kernel1()) {
        const double up = abs_power(u[i], m.p);
        double wsum = 0.0, gsum = 0.0;
        for (int k = 0; k < N; ++k) {
          const double c = m.coupling(j, k);
          if (c == 0.0) continue;
          wsum += c * nl.weight1()[i].real() * I.choquard[k][i].real();
          double gd = 0.0;
          for (int a = 0; a < d; ++a) gd += z[a] * grad_choquard[k][a][i].real();
          gsum += c * gd;
        }
        c1 += -2.0 * (m.p - 2.0) / m.p * W.lap[i].real() * wsum * up;
        c2 += 4.0 / m.p * W.grad_factor[i].real() * gsum * up;
      }
      if (nl.kernel2()) {
        double gsum = 0.0;
        for (int k = 0; k < N; ++k) {
          if (k == j) continue;
          double gd = 0.0;
          for (int a = 0; a < d; ++a) gd += z[a] * grad_direct[k][a][i].real();
          gsum += gd;
        }
        hd_dir += 2.0 * m.b * W.grad_factor[i].real() * gsum * rho;
      }
    }
    auto& terms = out.per_component[j];
    terms.push_back({"sixth_order", l1 * hd});
    terms.push_back({"bilaplacian_gradient", l2 * hd});
    terms.push_back({"hessian_laplacian", l3 * hd});
    terms.push_back({"hessian_hessian", l4 * hd});
    terms.push_back({"potential", lv * hd});
    terms.push_back({"choquard_laplacian", c1 * hd});
    terms.push_back({"choquard_gradient", c2 * hd});
    terms.push_back({"hartree_direct", hd_dir * hd});
  }

  if (nl.kernel2()) {
    // Per-component exchange contribution, 2b Σ_k Re ∫ E_jk u_k (Δa ū_j + 2∇a·∇ū_j), and the
    // integrated-by-parts sum −2b Σ_{j≠k} Re ∫ ∇a·∇E_jk u_k ū_j.
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        if (k == j) continue;
        const Field& X = j < k ? I.exchange(j, k) : I.exchange(k, j);
        const bool cj = j > k;
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const complex x = cj ? std::conj(X[i]) : X[i];
          const complex E = nl.weight2()[i].real() * x;
          complex zdu{};
          for (int a = 0; a < d; ++a) zdu += W.z[i][a] * std::conj(grads[j][a][i]);
          const complex bracket = W.lap[i].real() * std::conj(s.u[j][i]) + 2.0 * W.grad_factor[i].real() * zdu;
          acc += (E * s.u[k][i] * bracket).real();
        }
        out.exchange_per_component[j] += 2.0 * m.b * acc * hd;
      }
    for (int j = 0; j < N; ++j)
      for (int k = j + 1; k < N; ++k) {
        const Field& X = I.exchange(j, k);
        Field z(g);
        for (std::size_t i = 0; i < g.size(); ++i) z[i] = std::conj(s.u[k][i]) * s.u[j][i];
        // ∇E_jk with E_jk = w2 K2*(w2 ū_k u_j)
        const auto gradE = detail::weighted_potential_gradient(*nl.kernel2(), nl.weight2(), grad_w2, X, z);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          complex ga{};
          for (int a = 0; a < d; ++a) ga += W.z[i][a] * gradE[a][i];
          ga *= W.grad_factor[i].real();
          // (j,k) term plus its conjugate partner (k,j)
          acc += 2.0 * (ga * s.u[k][i] * std::conj(s.u[j][i])).real();
        }
        out.exchange_total += -2.0 * m.b * acc * hd;
      }
    // The two printed Δa Hartree terms, kept only for comparison.
    double extra = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        if (k == j) continue;
        const Field& X = j < k ? I.exchange(j, k) : I.exchange(k, j);
        const bool cj = j > k;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double w = nl.weight2()[i].real();
          const complex x = cj ? std::conj(X[i]) : X[i];
          extra += -2.0 * m.b * W.lap[i].real() * I.direct[k][i].real() * w * std::norm(s.u[j][i]);
          extra += 2.0 * m.b * W.lap[i].real() * (x * w * s.u[k][i] * std::conj(s.u[j][i])).real();
        }
      }
    out.printed_extra = extra * hd;
  }

  // Direct form from the equation itself.
  const auto G = rhs(s, nl, potential);  // i G_j
  for (int j = 0; j < N; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const complex Gj = G[j][i] * complex(0.0, -1.0);
      complex zdu{};
      for (int a = 0; a < d; ++a) zdu += W.z[i][a] * std::conj(grads[j][a][i]);
      const complex bracket = W.lap[i].real() * std::conj(s.u[j][i]) + 2.0 * W.grad_factor[i].real() * zdu;
      acc += (Gj * bracket).real();
    }
    out.direct_form.push_back(-2.0 * acc * hd);
  }
  return out;
}

struct MorawetzResidual {
  double t = 0.0;
  double lhs = 0.0;  // centred difference of Σ M_j
  double rhs = 0.0;
  double residual = 0.0;
  std::vector<double> component_lhs;
  std::vector<double> component_rhs;
  std::vector<double> component_residual;
  MorawetzBreakdown terms;
};

inline double relative_gap(double a, double b, double floor) {
  return std::abs(a - b) / (std::abs(a) + std::abs(b) + floor);
}

inline constexpr double kResidualFloor = 1e-12;

/// Compares (ΣM(t+δ) − ΣM(t−δ))/2δ with the identity evaluated at t.
inline MorawetzResidual morawetz_identity_residual(const SystemState& before, const SystemState& at,
                                                   const SystemState& after, const Nonlinearity& nl,
                                                   const Field* potential, const MorawetzWeight& weight,
                                                   double floor = kResidualFloor) {
  const double d1 = at.t - before.t, d2 = after.t - at.t;
  if (!(d1 > 0.0) || std::abs(d1 - d2) > 1e-9 * d1) throw DomainError("window states must be equally spaced in time");
  const double delta = 0.5 * (d1 + d2);
  const auto m0 = morawetz_action(before, weight);
  const auto m1 = morawetz_action(after, weight);
  MorawetzResidual r;
  r.terms = morawetz_rhs(at, nl, potential, weight);
  const int N = at.components();
  for (int j = 0; j < N; ++j) {
    const double l = (m1[j] - m0[j]) / (2.0 * delta);
    r.component_lhs.push_back(l);
    r.component_rhs.push_back(r.terms.component_total(j));
    r.component_residual.push_back(relative_gap(l, r.component_rhs.back(), floor));
    r.lhs += l;
  }
  r.rhs = r.terms.total();
  r.residual = relative_gap(r.lhs, r.rhs, floor);
  return r;
}

struct AppendixCheck {
  double lhs = 0.0;    // Δ_{x,y} pairing form
  double rhs = 0.0;    // expanded form
  double residual = 0.0;
  double cross = 0.0;  // ∬ Im(ū_j∇u_j)(x) · ∂x∂y a · Im(ū_l∇u_l)(y)
  std::vector<NamedTerm> rhs_terms;
};

/// Both sides of the bilinear/tensor equivalence for a(x, y) = A(x − y), by direct
/// double summation. With H = D²A(x − y) the mixed Hessian ∂x∂y a equals −H, so
///   rhs = 2∬Δ²A ρ_j ρ_l − 4∬(∇u_j H ∇ū_j) ρ_l − 4∬ρ_j (∇u_l H ∇ū_l) − 8∬P_j (∂x∂y a) P_l.
/// The first term is summed as 2∬ΔA (Δρ_j) ρ_l: at d = 1 ΔA is a bump of width ε and
/// Δ²A its second derivative, which the lattice does not resolve at ε = 2h.
inline AppendixCheck appendix_identity_check(const Field& uj, const Field& ul, const RadialWeight& A,
                                             double pair_budget = 1e9, double floor = kResidualFloor) {
  uj.check_same(ul);
  const Grid& g = uj.grid();
  const int d = g.dim();
  if (d > 2) throw DomainError("appendix identity check runs at d = 1 or 2");
  if (A.dim() != d) throw DomainError("weight dimension differs from the grid");
  const std::size_t M = g.size();
  if (static_cast<double>(M) * M > pair_budget) throw BudgetError("appendix double sum exceeds the pair budget");

  const RadialWeight lapA = A.laplacian();
  const Field lj = laplacian(uj), ll = laplacian(ul);
  Field rj(g);
  for (std::size_t i = 0; i < M; ++i) rj[i] = std::norm(uj[i]);
  const Field lap_rj = laplacian(rj);
  const auto gj = gradient(uj), gl = gradient(ul);
  std::vector<Point> x(M);
  for (std::size_t i = 0; i < M; ++i) x[i] = g.point(i);

  double lhs = 0.0, t_bilap = 0.0, t_j = 0.0, t_l = 0.0, t_cross = 0.0;
  for (std::size_t a = 0; a < M; ++a) {
    const double rho_j = std::norm(uj[a]);
    Point Pj{0, 0, 0};
    for (int k = 0; k < d; ++k) Pj[k] = (std::conj(uj[a]) * gj[k][a]).imag();
    for (std::size_t b = 0; b < M; ++b) {
      Point z{x[a][0] - x[b][0], x[a][1] - x[b][1], 0.0};
      const double r2 = norm2(z);
      const double lap = lapA.value(r2);
      const double gf = A.gradient_factor(r2);
      const auto [h1, h2] = A.hessian_factors(r2);

      // z(x,y) = u_j(x) u_l(y)
      const complex zz = uj[a] * ul[b];
      const complex dz = lj[a] * ul[b] + uj[a] * ll[b];
      complex gzbar{};  // (∇x a, ∇y a)·(∇x z̄, ∇y z̄) with ∇y a = −∇x a
      for (int k = 0; k < d; ++k) gzbar += gf * z[k] * (std::conj(gj[k][a] * ul[b]) - std::conj(uj[a] * gl[k][b]));
      lhs += 2.0 * (dz * (2.0 * lap) * std::conj(zz)).real() + 4.0 * (dz * gzbar).real();

      const double rho_l = std::norm(ul[b]);
      t_bilap += 2.0 * lapA.value(r2) * lap_rj[a].real() * rho_l;
      complex zgj{}, zgl{};
      double nj = 0.0, nl = 0.0, zpj = 0.0, zpl = 0.0, pp = 0.0;
      for (int k = 0; k < d; ++k) {
        zgj += z[k] * gj[k][a];
        zgl += z[k] * gl[k][b];
        nj += std::norm(gj[k][a]);
        nl += std::norm(gl[k][b]);
        const double Pl = (std::conj(ul[b]) * gl[k][b]).imag();
        zpj += z[k] * Pj[k];
        zpl += z[k] * Pl;
        pp += Pj[k] * Pl;
      }
      t_j += -4.0 * (h1 * nj + h2 * std::norm(zgj)) * rho_l;
      t_l += -4.0 * rho_j * (h1 * nl + h2 * std::norm(zgl));
      // P_j (∂x∂y a) P_l = −P_j H P_l
      t_cross += -(h1 * pp + h2 * zpj * zpl);
    }
  }
  const double w = g.cell_volume() * g.cell_volume();
  AppendixCheck out;
  out.lhs = lhs * w;
  out.cross = t_cross * w;
  out.rhs_terms = {{"bilaplacian", t_bilap * w}, {"hessian_j", t_j * w}, {"hessian_l", t_l * w},
                   {"cross", -8.0 * out.cross}};
  for (const auto& t : out.rhs_terms) out.rhs += t.value;
  out.residual = relative_gap(out.lhs, out.rhs, floor);
  return out;
}

}  // namespace hfc4
