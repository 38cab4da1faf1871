#pragma once

// Thin RAII layer over FFTW. Plans are created once per (size, direction) with
// FFTW_ESTIMATE, which keeps results bit-reproducible from run to run, and are
// executed on fftw_malloc'd buffers so the cached plan's alignment always holds.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <tuple>
#include <vector>

namespace spectrosat::fft {

namespace detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using Buffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
Buffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)));
  if (p == nullptr) throw std::bad_alloc();
  return Buffer<T>(p);
}

enum class Kind { Forward, Backward, RealToComplex };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_plan plan = nullptr;
    const int size = static_cast<int>(n);
    if (kind == Kind::RealToComplex) {
      auto in = allocate<double>(n);
      auto out = allocate<fftw_complex>(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(size, in.get(), out.get(), FFTW_ESTIMATE);
    } else {
      auto in = allocate<fftw_complex>(n);
      auto out = allocate<fftw_complex>(n);
      plan = fftw_plan_dft_1d(size, in.get(), out.get(),
                              kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<Kind, std::size_t>, fftw_plan> plans_;
};

inline std::vector<std::complex<double>> complex_transform(std::span<const std::complex<double>> x,
                                                           Kind kind) {
  const std::size_t n = x.size();
  auto in = allocate<fftw_complex>(n);
  auto out = allocate<fftw_complex>(n);
  std::memcpy(in.get(), x.data(), sizeof(fftw_complex) * n);
  fftw_execute_dft(PlanCache::instance().get(kind, n), in.get(), out.get());
  std::vector<std::complex<double>> result(n);
  std::memcpy(static_cast<void*>(result.data()), out.get(), sizeof(fftw_complex) * n);
  return result;
}

}  // namespace detail

/// X[m] = sum_k x[k] exp(-2 pi i m k / n)
inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  return detail::complex_transform(x, detail::Kind::Forward);
}

/// x[k] = sum_m X[m] exp(+2 pi i m k / n), unnormalised.
inline std::vector<std::complex<double>> backward(std::span<const std::complex<double>> x) {
  return detail::complex_transform(x, detail::Kind::Backward);
}

/// Non-redundant half (n/2 + 1 bins) of the forward transform of real data.
inline std::vector<std::complex<double>> real_forward(std::span<const double> x) {
  const std::size_t n = x.size();
  auto in = detail::allocate<double>(n);
  auto out = detail::allocate<fftw_complex>(n / 2 + 1);
  std::memcpy(in.get(), x.data(), sizeof(double) * n);
  fftw_execute_dft_r2c(detail::PlanCache::instance().get(detail::Kind::RealToComplex, n), in.get(),
                       out.get());
  std::vector<std::complex<double>> result(n / 2 + 1);
  std::memcpy(static_cast<void*>(result.data()), out.get(), sizeof(fftw_complex) * result.size());
  return result;
}

/// Smallest 2^a * 3^b * 5^c >= n.
inline std::size_t good_size(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace spectrosat::fft
