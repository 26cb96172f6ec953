#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <new>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hfc4/errors.hpp"

namespace hfc4 {

using complex = std::complex<double>;
using Point = std::array<double, 3>;

inline constexpr double pi = std::numbers::pi;

/// Allocator handing out fftw_malloc memory so every buffer shares one alignment
/// and plans made on scratch arrays can be executed on any field.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  friend bool operator==(const FftwAllocator&, const FftwAllocator&) { return true; }
};

using Buffer = std::vector<complex, FftwAllocator<complex>>;

// 128^3 sites; the padded convolution lattice is 8x this.
inline constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 21;

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Periodic lattice on [-L/2, L/2)^d with n points per axis. The origin sits at
/// index n/2 on every axis.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int points, double length, std::size_t point_budget = kDefaultPointBudget)
      : dim_(dim), n_(points), length_(length) {
    if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
    if (points < 8 || !is_power_of_two(points))
      throw DomainError("points per axis must be a power of two >= 8");
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("box length must be positive");
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points);
    if (total > point_budget)
      throw BudgetError("grid has " + std::to_string(total) + " sites, budget is " +
                        std::to_string(point_budget));
    size_ = total;
  }

  int dim() const { return dim_; }
  int points() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(n_);
    return s;
  }

  double coordinate(int i) const { return -0.5 * length_ + i * spacing(); }
  double wavenumber(int i) const {
    const int k = i < n_ / 2 ? i : i - n_;
    return 2.0 * pi / length_ * k;
  }
  bool is_nyquist(int i) const { return i == n_ / 2; }

  std::array<int, 3> unravel(std::size_t idx) const {
    std::array<int, 3> out{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      out[a] = static_cast<int>(idx % n_);
      idx /= n_;
    }
    return out;
  }
  std::size_t index(const std::array<int, 3>& i) const {
    std::size_t idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) idx = idx * n_ + static_cast<std::size_t>(i[a]);
    return idx;
  }
  Point point(std::size_t idx) const {
    const auto i = unravel(idx);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(i[a]);
    return x;
  }
  std::size_t origin_index() const { return index({n_ / 2, n_ / 2, n_ / 2}); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  int dim_ = 1;
  int n_ = 8;
  double length_ = 1.0;
  std::size_t size_ = 8;
};

inline double norm2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Complex lattice function, x-fastest. Also used to hold spectra (FFT order).
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g) : grid_(g), values_(g.size(), complex{}) {}
  Field(const Grid& g, Buffer values) : grid_(g), values_(std::move(values)) {
    if (values_.size() != g.size()) throw DomainError("field value count does not match grid");
  }

  template <class Fn>
  static Field sample(const Grid& g, Fn&& fn) {
    Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.values_[i] = complex(fn(g.point(i)));
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  complex& operator[](std::size_t i) { return values_[i]; }
  const complex& operator[](std::size_t i) const { return values_[i]; }
  complex* data() { return values_.data(); }
  const complex* data() const { return values_.data(); }
  std::span<complex> values() { return values_; }
  std::span<const complex> values() const { return values_; }

  bool is_finite() const {
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
  double max_abs_imag() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(complex c) {
    for (auto& v : values_) v *= c;
    return *this;
  }
  /// this += c * o
  Field& add_scaled(complex c, const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * o.values_[i];
    return *this;
  }
  Field conj() const {
    Field out(*this);
    for (auto& v : out.values_) v = std::conj(v);
    return out;
  }

  void check_same(const Field& o) const {
    if (!(grid_ == o.grid_)) throw DomainError("fields live on different grids");
  }

 private:
  Grid grid_;
  Buffer values_;
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(complex c, Field a) { return a *= c; }

/// Pointwise product.
inline Field multiply(const Field& a, const Field& b) {
  a.check_same(b);
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

/// h^d sum of |f|^2.
inline double l2_squared(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return s * f.grid().cell_volume();
}

/// h^d sum of conj(a) b.
inline complex inner(const Field& a, const Field& b) {
  a.check_same(b);
  complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_volume();
}

}  // namespace hfc4
