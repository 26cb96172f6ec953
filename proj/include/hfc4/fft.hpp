#pragma once

// FFTW plumbing. Forward transforms are unscaled, inverse transforms are unscaled
// too; callers fold 1/n^d (and any quadrature weight) into their multipliers.

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "hfc4/grid.hpp"

namespace hfc4::fft {

/// FFTW_MEASURE picks plans by timing, so two processes may pick different
/// algorithms and differ in the last bits. ESTIMATE is the deterministic default.
enum class Planner { estimate, measure };

struct Dim {
  int n;
  int stride;
};

/// Guru layout: transformed dimensions plus loop ("howmany") dimensions, all in
/// units of complex elements, in place.
struct Layout {
  std::vector<Dim> dims;
  std::vector<Dim> loops;

  std::size_t extent() const {
    std::size_t e = 1;
    for (const auto& d : dims) e += static_cast<std::size_t>(d.n - 1) * d.stride;
    for (const auto& d : loops) e += static_cast<std::size_t>(d.n - 1) * d.stride;
    return e;
  }
};

namespace detail {

struct Registry {
  std::mutex mutex;
  std::map<std::string, fftw_plan> plans;
  Planner planner = Planner::estimate;
  int threads = 1;
  bool threads_initialized = false;

  ~Registry() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

inline Registry& registry() {
  static Registry r;
  return r;
}

inline std::vector<fftw_iodim> iodims(const std::vector<Dim>& dims) {
  std::vector<fftw_iodim> out;
  for (const auto& d : dims) out.push_back(fftw_iodim{d.n, d.stride, d.stride});
  return out;
}

}  // namespace detail

inline void set_planner(Planner p) {
  auto& r = detail::registry();
  std::lock_guard lock(r.mutex);
  r.planner = p;
}

inline Planner planner() {
  auto& r = detail::registry();
  std::lock_guard lock(r.mutex);
  return r.planner;
}

/// Thread count used for plans created from now on. Results are deterministic for
/// a fixed count only.
inline void set_threads(int n) {
  auto& r = detail::registry();
  std::lock_guard lock(r.mutex);
  if (n < 1) n = 1;
  if (!r.threads_initialized) {
    fftw_init_threads();
    r.threads_initialized = true;
  }
  r.threads = n;
}

inline int threads() {
  auto& r = detail::registry();
  std::lock_guard lock(r.mutex);
  return r.threads;
}

/// Reads HFC4_THREADS if present.
inline void configure_threads_from_environment() {
  if (const char* s = std::getenv("HFC4_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) set_threads(n);
  }
}

/// In-place guru transform of `data` (fftw_malloc'd base pointer).
inline void transform(complex* data, const Layout& layout, int sign) {
  auto& r = detail::registry();
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(r.mutex);
    std::ostringstream key;
    key << sign << '|' << static_cast<int>(r.planner) << '|' << r.threads << '|'
        << fftw_alignment_of(reinterpret_cast<double*>(data)) << '|';
    for (const auto& d : layout.dims) key << d.n << ',' << d.stride << ';';
    key << '|';
    for (const auto& d : layout.loops) key << d.n << ',' << d.stride << ';';
    auto it = r.plans.find(key.str());
    if (it == r.plans.end()) {
      // Planning may scribble on its arrays, so plan on scratch of equal alignment.
      Buffer scratch(layout.extent() + 4);
      auto* base = scratch.data();
      while (fftw_alignment_of(reinterpret_cast<double*>(base)) !=
             fftw_alignment_of(reinterpret_cast<double*>(data)))
        base = reinterpret_cast<complex*>(reinterpret_cast<double*>(base) + 1);
      if (r.threads_initialized) fftw_plan_with_nthreads(r.threads);
      const auto dims = detail::iodims(layout.dims);
      const auto loops = detail::iodims(layout.loops);
      const unsigned flags = r.planner == Planner::measure ? FFTW_MEASURE : FFTW_ESTIMATE;
      auto* p = reinterpret_cast<fftw_complex*>(base);
      fftw_plan made = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                          static_cast<int>(loops.size()), loops.data(), p, p,
                                          sign, flags);
      if (made == nullptr) throw Error("FFTW could not create a plan");
      it = r.plans.emplace(key.str(), made).first;
    }
    plan = it->second;
  }
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

/// Full d-dimensional transform of an n^d array.
inline void transform_cube(complex* data, int dim, int n, int sign) {
  Layout layout;
  // FFTW wants the slowest dimension first; x is fastest.
  int stride = 1;
  std::vector<Dim> dims;
  for (int a = 0; a < dim; ++a) {
    dims.insert(dims.begin(), Dim{n, stride});
    stride *= n;
  }
  layout.dims = dims;
  transform(data, layout, sign);
}

inline void forward(Field& f) {
  transform_cube(f.data(), f.grid().dim(), f.grid().points(), FFTW_FORWARD);
}

/// Unscaled inverse.
inline void backward(Field& f) {
  transform_cube(f.data(), f.grid().dim(), f.grid().points(), FFTW_BACKWARD);
}

}  // namespace hfc4::fft
