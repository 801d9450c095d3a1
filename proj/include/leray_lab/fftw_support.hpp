#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace leray_lab {

using Complex = std::complex<double>;

/// Allocator backed by fftw_malloc so that every buffer has the SIMD
/// alignment FFTW assumed when the shared plans were created.
template <typename T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() noexcept = default;
  template <typename U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <typename U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using RealArray = std::vector<double, FftwAllocator<double>>;
using ComplexArray = std::vector<Complex, FftwAllocator<Complex>>;

namespace detail {

// The FFTW planner is not reentrant; execution of an existing plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Thread count for FFTW plans, read once from LERAY_LAB_THREADS.
inline int configured_threads() {
  static const int threads = [] {
    const char* env = std::getenv("LERAY_LAB_THREADS");
    if (env == nullptr) return 1;
    try {
      const int n = std::stoi(env);
      return n > 0 ? n : 1;
    } catch (...) {
      return 1;
    }
  }();
  return threads;
}

inline void init_fftw_threads() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
}

}  // namespace detail

/// Owns a forward (r2c) and inverse (c2r) plan pair for one grid shape.
/// Plans are created with FFTW_ESTIMATE so results are reproducible run to run.
class FftPlans {
 public:
  explicit FftPlans(const std::vector<int>& shape) {
    detail::init_fftw_threads();
    std::size_t real_size = 1;
    for (int n : shape) real_size *= static_cast<std::size_t>(n);
    const std::size_t complex_size = real_size / static_cast<std::size_t>(shape.back()) *
                                     static_cast<std::size_t>(shape.back() / 2 + 1);
    RealArray real(real_size);
    ComplexArray spec(complex_size);
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const int rank = static_cast<int>(shape.size());

    {
      std::lock_guard<std::mutex> lock(detail::planner_mutex());
      fftw_plan_with_nthreads(detail::configured_threads());
      forward_ = fftw_plan_dft_r2c(rank, shape.data(), real.data(), cplx, FFTW_ESTIMATE);
      inverse_ = fftw_plan_dft_c2r(rank, shape.data(), cplx, real.data(),
                                   FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    }
    if (forward_ == nullptr || inverse_ == nullptr) {
      release();
      throw std::runtime_error("FFTW failed to create plans");
    }
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() { release(); }

  /// Unnormalized r2c transform.
  void forward(double* in, Complex* out) const {
    fftw_execute_dft_r2c(forward_, in, reinterpret_cast<fftw_complex*>(out));
  }

  /// Unnormalized c2r transform; destroys `in`.
  void inverse(Complex* in, double* out) const {
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  void release() noexcept {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (inverse_ != nullptr) fftw_destroy_plan(inverse_);
    forward_ = nullptr;
    inverse_ = nullptr;
  }

  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace leray_lab
