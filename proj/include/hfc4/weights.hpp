#pragma once

// Radial Morawetz weights written as finite Laurent sums f = Σ c_m A^m in the
// regularized radius A = sqrt(|z|^2 + ε^2). Every derivative needed by the
// identities stays in this class:
//   ∇A^m  = m A^{m-2} z
//   D²A^m = m A^{m-2} I + m(m-2) A^{m-4} z zᵀ
//   ΔA^m  = m(d+m-2) A^{m-2} − m(m-2) ε² A^{m-4}

#include <cmath>
#include <map>
#include <stdexcept>

#include "hfc4/grid.hpp"

namespace hfc4 {

class RadialWeight {
 public:
  RadialWeight(int d, double eps) : d_(d), eps_(eps) {
    if (d < 1) throw DomainError("weight dimension must be >= 1");
    if (!(eps >= 0.0)) throw DomainError("weight regularization must be >= 0");
  }

  /// sqrt(|z|^2 + ε^2), the regularized |x| (or |x − y|) weight.
  static RadialWeight regularized_abs(int d, double eps) {
    if (!(eps > 0.0)) throw DomainError("regularization length must be positive");
    RadialWeight w(d, eps);
    w.coef_[1] = 1.0;
    return w;
  }
  /// |z|^2 / 2 written as (A^2 − ε^2)/2 with ε = 0.
  static RadialWeight half_square(int d) {
    RadialWeight w(d, 0.0);
    w.coef_[2] = 0.5;
    return w;
  }

  RadialWeight& add_term(int m, double c) {
    coef_[m] += c;
    return *this;
  }

  int dim() const { return d_; }
  double eps() const { return eps_; }
  const std::map<int, double>& terms() const { return coef_; }

  double radius(double r2) const { return std::sqrt(r2 + eps_ * eps_); }

  double value(double r2) const {
    const double A = radius(r2);
    double s = 0.0;
    for (const auto& [m, c] : coef_) s += c * std::pow(A, m);
    return s;
  }

  /// g with ∇f(z) = g(|z|^2) z.
  double gradient_factor(double r2) const {
    const double A = radius(r2);
    double s = 0.0;
    for (const auto& [m, c] : coef_)
      if (m != 0) s += c * m * std::pow(A, m - 2);
    return s;
  }

  /// (g1, g2) with D²f(z) = g1 I + g2 z zᵀ.
  std::pair<double, double> hessian_factors(double r2) const {
    const double A = radius(r2);
    double g1 = 0.0, g2 = 0.0;
    for (const auto& [m, c] : coef_) {
      if (m == 0) continue;
      g1 += c * m * std::pow(A, m - 2);
      if (m != 2) g2 += c * m * (m - 2) * std::pow(A, m - 4);
    }
    return {g1, g2};
  }

  RadialWeight laplacian() const {
    RadialWeight out(d_, eps_);
    for (const auto& [m, c] : coef_) {
      if (m == 0) continue;
      const double a = static_cast<double>(m) * (d_ + m - 2);
      if (a != 0.0) out.coef_[m - 2] += c * a;
      const double b = static_cast<double>(m) * (m - 2) * eps_ * eps_;
      if (b != 0.0) out.coef_[m - 4] -= c * b;
    }
    out.prune();
    return out;
  }

  RadialWeight scaled(double s) const {
    RadialWeight out = *this;
    for (auto& [m, c] : out.coef_) c *= s;
    return out;
  }

  RadialWeight operator-(const RadialWeight& o) const {
    RadialWeight out = *this;
    for (const auto& [m, c] : o.coef_) out.coef_[m] -= c;
    out.prune();
    return out;
  }

 private:
  void prune() {
    for (auto it = coef_.begin(); it != coef_.end();) it = it->second == 0.0 ? coef_.erase(it) : std::next(it);
  }

  int d_;
  double eps_;
  std::map<int, double> coef_;
};

/// Which variable the weight is centred on.
enum class WeightFamily { abs_x, abs_xy, custom };

struct MorawetzWeight {
  WeightFamily family = WeightFamily::abs_x;
  RadialWeight radial;
  Point center{0.0, 0.0, 0.0};

  static MorawetzWeight abs_x_regularized(int d, double eps) {
    return {WeightFamily::abs_x, RadialWeight::regularized_abs(d, eps), {}};
  }
  static MorawetzWeight abs_xy_regularized(int d, double eps) {
    return {WeightFamily::abs_xy, RadialWeight::regularized_abs(d, eps), {}};
  }
  static MorawetzWeight custom_radial(RadialWeight w) { return {WeightFamily::custom, std::move(w), {}}; }
};

}  // namespace hfc4
