#pragma once

// Free-space Riesz potentials K_γ * f with K_γ(x) = |x|^{-(d-γ)} and the singular
// weights |x|^{-ρ}. Both regularize the origin cell by the average of the power
// over a ball with the cell's volume; the direct-sum oracle uses the same helpers.

#include <cmath>
#include <memory>
#include <utility>

#include "hfc4/fft.hpp"
#include "hfc4/grid.hpp"

namespace hfc4 {

/// Radius of the ball whose volume equals one lattice cell.
inline double cell_ball_radius(int d, double h) {
  return h * std::pow(std::tgamma(0.5 * d + 1.0) / std::pow(pi, 0.5 * d), 1.0 / d);
}

/// Mean of |x|^{-s} over the ball of radius rc in R^d (needs s < d).
inline double ball_average_of_power(int d, double s, double rc) {
  return d / (d - s) * std::pow(rc, -s);
}

/// K_γ sampled at displacement of squared length r2, origin cell averaged.
inline double riesz_kernel_sample(int d, double gamma, double h, double r2) {
  const double s = d - gamma;
  if (r2 == 0.0) return ball_average_of_power(d, s, cell_ball_radius(d, h));
  return std::pow(r2, -0.5 * s);
}

/// |x|^{-ρ} on the grid; ρ = 0 gives exact ones.
inline Field singular_weight(const Grid& g, double rho) {
  if (!(rho >= 0.0)) throw DomainError("weight exponent must be >= 0");
  if (rho >= g.dim()) throw DomainError("weight exponent must be < d");
  Field w(g);
  if (rho == 0.0) {
    for (auto& v : w.values()) v = 1.0;
    return w;
  }
  const double origin = ball_average_of_power(g.dim(), rho, cell_ball_radius(g.dim(), g.spacing()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r2 = norm2(g.point(i));
    w[i] = r2 == 0.0 ? origin : std::pow(r2, -0.5 * rho);
  }
  return w;
}

/// Gradient of |x|^{-ρ}: -ρ x |x|^{-ρ-2}, set to 0 on the origin cell.
inline std::vector<Field> singular_weight_gradient(const Grid& g, double rho) {
  std::vector<Field> out(g.dim(), Field(g));
  if (rho == 0.0) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    const double r2 = norm2(x);
    if (r2 == 0.0) continue;
    const double c = -rho * std::pow(r2, -0.5 * rho - 1.0);
    for (int a = 0; a < g.dim(); ++a) out[a][i] = c * x[a];
  }
  return out;
}

/// Convolution with a real, even kernel on the 2n-padded lattice. The kernel is
/// sampled at every minimum-image displacement of the padded box, i.e. truncated
/// to the box of half-width L.
class RieszConvolver {
 public:
  RieszConvolver(const Grid& g, double gamma) : grid_(g), gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < g.dim()))
      throw DomainError("Riesz exponent must satisfy 0 < gamma < d");
    const int d = g.dim();
    const int n = g.points();
    m_ = 2 * n;
    padded_size_ = 1;
    for (int a = 0; a < d; ++a) padded_size_ *= static_cast<std::size_t>(m_);
    const double h = g.spacing();

    Buffer k(padded_size_);
    for (std::size_t idx = 0; idx < padded_size_; ++idx) {
      std::size_t rest = idx;
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const int i = static_cast<int>(rest % m_);
        rest /= m_;
        const int s = i < n ? i : i - m_;
        r2 += (s * h) * (s * h);
      }
      k[idx] = riesz_kernel_sample(d, gamma, h, r2);
    }
    fft::transform_cube(k.data(), d, m_, FFTW_FORWARD);
    // Circularly even kernel: its transform is real. Fold in h^d and 1/M^d.
    const double scale = g.cell_volume() / static_cast<double>(padded_size_);
    kernel_hat_.resize(padded_size_);
    for (std::size_t i = 0; i < padded_size_; ++i) kernel_hat_[i] = k[i].real() * scale;
  }

  const Grid& grid() const { return grid_; }
  double gamma() const { return gamma_; }

  /// Complex operand: the kernel is real, so this is the convolution of the real
  /// and imaginary parts packed into one transform.
  Field convolve_complex(const Field& f) const {
    if (!(f.grid() == grid_)) throw DomainError("field grid does not match convolver");
    const int d = grid_.dim();
    const int n = grid_.points();
    Buffer& work = scratch(padded_size_);
    std::fill(work.begin(), work.end(), complex{});
    // Embed the n^d block at the low corner.
    for_each_line(n, [&](std::size_t src, std::size_t dst) {
      std::copy_n(f.data() + src, n, work.data() + dst);
    });
    for (int a = 0; a < d; ++a) fft::transform(work.data(), pruned_layout(a), FFTW_FORWARD);
    for (std::size_t i = 0; i < padded_size_; ++i) work[i] *= kernel_hat_[i];
    for (int a = d - 1; a >= 0; --a) fft::transform(work.data(), pruned_layout(a), FFTW_BACKWARD);
    Field out(grid_);
    for_each_line(n, [&](std::size_t dst, std::size_t src) {
      std::copy_n(work.data() + src, n, out.data() + dst);
    });
    return out;
  }

  /// Real operand; the imaginary roundoff of the result is checked and dropped.
  Field convolve(const Field& f) const {
    const double fmax = f.max_abs();
    if (f.max_abs_imag() > 1e-14 * fmax) throw DomainError("riesz_convolve expects a real field");
    Field out = convolve_complex(f);
    check_and_drop_imaginary(out, std::sqrt(l2_squared(f)));
    return out;
  }

  /// Two real operands through one complex transform.
  std::pair<Field, Field> convolve_pair(const Field& a, const Field& b) const {
    Field packed(grid_);
    for (std::size_t i = 0; i < packed.size(); ++i) packed[i] = complex(a[i].real(), b[i].real());
    Field c = convolve_complex(packed);
    Field ra(grid_), rb(grid_);
    for (std::size_t i = 0; i < c.size(); ++i) {
      ra[i] = c[i].real();
      rb[i] = c[i].imag();
    }
    return {std::move(ra), std::move(rb)};
  }

 private:
  static void check_and_drop_imaginary(Field& out, double input_norm) {
    double re = 0.0;
    for (const auto& v : out.values()) re = std::max(re, std::abs(v.real()));
    const double im = out.max_abs_imag();
    if (im > 1e-10 * std::max(input_norm, re))
      throw Error("Riesz convolution produced a non-negligible imaginary part");
    for (auto& v : out.values()) v = v.real();
  }

  // Visits the n^{d-1} x-lines of the small block: fn(small_offset, padded_offset).
  template <class Fn>
  void for_each_line(int n, Fn&& fn) const {
    const int d = grid_.dim();
    const int n1 = d > 1 ? n : 1;
    const int n2 = d > 2 ? n : 1;
    const std::size_t m = static_cast<std::size_t>(m_);
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i1 = 0; i1 < n1; ++i1) {
        const std::size_t small = (static_cast<std::size_t>(i2) * n + i1) * n;
        const std::size_t big = (static_cast<std::size_t>(i2) * m + i1) * m;
        fn(small, big);
      }
  }

  // Axis a is transformed on lines whose slower axes (b > a) stay inside the
  // nonzero block [0, n) and whose faster axes (b < a) span all of [0, 2n).
  fft::Layout pruned_layout(int a) const {
    const int d = grid_.dim();
    const int n = grid_.points();
    fft::Layout layout;
    int stride_a = 1;
    for (int b = 0; b < a; ++b) stride_a *= m_;
    layout.dims.push_back({m_, stride_a});
    int stride = 1;
    for (int b = 0; b < d; ++b) {
      if (b != a) layout.loops.push_back({b > a ? n : m_, stride});
      stride *= m_;
    }
    return layout;
  }

  static Buffer& scratch(std::size_t size) {
    thread_local Buffer buf;
    if (buf.size() != size) {
      Buffer fresh(size);
      buf.swap(fresh);
    }
    return buf;
  }

  Grid grid_;
  double gamma_;
  int m_ = 0;
  std::size_t padded_size_ = 0;
  std::vector<double> kernel_hat_;
};

/// One-shot free-space convolution of a real field.
inline Field riesz_convolve(const Field& f, double gamma) {
  return RieszConvolver(f.grid(), gamma).convolve(f);
}

}  // namespace hfc4
