#pragma once

// Voigt line shape via the Faddeeva function w(z), z = x + iy, y >= 0.
//
// Region switching in the spirit of Humlicek's rational approximations:
//   |z| >= 60      five-term asymptotic series
//   |z| >= 12      asymptotic series, summed until terms drop below 1e-16
//   |x| + y >= 8   Laplace continued fraction (24 levels)
//   y < 1e-4       second-order expansion about the real axis
//   otherwise      Weideman's 32-term rational approximation
// Relative error of Re w stays below ~1e-7 over the half plane.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "spectrosat/error.hpp"

namespace spectrosat {

namespace detail {

inline constexpr int kWeidemanTerms = 32;

struct WeidemanTable {
  double L;
  std::array<double, kWeidemanTerms> c;  // p(Z) = sum_j c[j] Z^j
};

inline const WeidemanTable& weideman_table() {
  static const WeidemanTable table = [] {
    constexpr int N = kWeidemanTerms;
    constexpr int M = 2 * N;
    constexpr int M2 = 2 * M;
    WeidemanTable t{};
    const long double L = std::sqrt(static_cast<long double>(N) / std::sqrt(2.0L));
    t.L = static_cast<double>(L);
    std::array<long double, M2> f{};
    f[0] = 0.0L;
    for (int i = 1; i < M2; ++i) {
      const int k = i - M;  // -M+1 .. M-1
      const long double theta = k * std::numbers::pi_v<long double> / M;
      const long double tt = L * std::tan(theta / 2);
      f[i] = std::exp(-tt * tt) * (L * L + tt * tt);
    }
    // fftshift followed by the real part of a forward DFT
    std::array<long double, M2> shifted{};
    for (int i = 0; i < M2; ++i) shifted[i] = f[(i + M) % M2];
    for (int j = 1; j <= N; ++j) {
      long double acc = 0.0L;
      for (int i = 0; i < M2; ++i)
        acc += shifted[i] * std::cos(2.0L * std::numbers::pi_v<long double> * i * j / M2);
      t.c[j - 1] = static_cast<double>(acc / M2);
    }
    return t;
  }();
  return table;
}

inline std::complex<double> faddeeva_weideman(std::complex<double> z) {
  const auto& t = weideman_table();
  const std::complex<double> i1(0.0, 1.0);
  const std::complex<double> denom = t.L - i1 * z;
  const std::complex<double> Z = (t.L + i1 * z) / denom;
  std::complex<double> p = t.c[kWeidemanTerms - 1];
  for (int j = kWeidemanTerms - 2; j >= 0; --j) p = p * Z + t.c[j];
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

inline std::complex<double> faddeeva_continued_fraction(std::complex<double> z) {
  std::complex<double> r = 0.0;
  for (int n = 24; n >= 1; --n) r = (0.5 * n) / (z - r);
  return std::complex<double>(0.0, 1.0 / std::sqrt(std::numbers::pi)) / (z - r);
}

/// w(z) ~ i / (sqrt(pi) z) * sum_n (2n-1)!! / (2 z^2)^n, valid in the upper half plane.
inline std::complex<double> faddeeva_asymptotic(double x, double y) {
  const double r2 = x * x + y * y;
  const double ix = x / r2, iy = -y / r2;              // 1/z
  const double hx = 0.5 * (ix * ix - iy * iy), hy = ix * iy;  // 1/(2 z^2)
  double sx = 1.0, sy = 0.0, tx = 1.0, ty = 0.0;
  for (int n = 1; n < 40; ++n) {
    const double f = 2.0 * n - 1.0;
    const double nx = f * (tx * hx - ty * hy);
    ty = f * (tx * hy + ty * hx);
    tx = nx;
    sx += tx;
    sy += ty;
    if (std::abs(tx) + std::abs(ty) < 1e-16 * (std::abs(sx) + std::abs(sy))) break;
  }
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  const double px = ix * sx - iy * sy, py = ix * sy + iy * sx;  // S / z
  return {-py * inv_sqrt_pi, px * inv_sqrt_pi};
}

inline constexpr double kAsymptoticRadius2 = 144.0;
inline constexpr double kFarWingRadius2 = 3600.0;

/// Re w(z) from the first five series terms; truncation error < 1e-13 for |z| >= 60.
inline double voigt_far_wing(double x, double y) {
  const double inv = 1.0 / (x * x + y * y);
  const double ix = x * inv, iy = -y * inv;
  const double hx = 0.5 * (ix * ix - iy * iy), hy = ix * iy;
  // S = 1 + h (1 + 3h (1 + 5h (1 + 7h)))
  double sx = 1.0 + 7.0 * hx, sy = 7.0 * hy;
  double tx = 5.0 * (hx * sx - hy * sy), ty = 5.0 * (hx * sy + hy * sx);
  sx = 1.0 + tx, sy = ty;
  tx = 3.0 * (hx * sx - hy * sy), ty = 3.0 * (hx * sy + hy * sx);
  sx = 1.0 + tx, sy = ty;
  tx = hx * sx - hy * sy, ty = hx * sy + hy * sx;
  sx = 1.0 + tx, sy = ty;
  return -(ix * sy + iy * sx) * std::numbers::inv_sqrtpi;
}

}  // namespace detail

/// Faddeeva function w(z) for Im z >= 0.
inline std::complex<double> faddeeva(std::complex<double> z) {
  const double x = z.real();
  const double y = z.imag();
  if (x * x + y * y >= detail::kAsymptoticRadius2) return detail::faddeeva_asymptotic(x, y);
  if (std::abs(x) + y >= 8.0) return detail::faddeeva_continued_fraction(z);
  return detail::faddeeva_weideman(z);
}

/// Voigt function K(x, y) = Re w(x + iy), y >= 0.
inline double voigt_k(double x, double y) {
  x = std::abs(x);
  if (x * x + y * y >= detail::kFarWingRadius2) return detail::voigt_far_wing(x, y);
  if (x * x + y * y >= detail::kAsymptoticRadius2) return detail::faddeeva_asymptotic(x, y).real();
  if (x + y >= 8.0) return detail::faddeeva_continued_fraction({x, y}).real();
  if (y < 1e-4) {
    const double g = std::exp(-x * x);
    const double im_w = detail::faddeeva_weideman({x, 0.0}).imag();
    return g + y * (2.0 * x * im_w - 2.0 / std::sqrt(std::numbers::pi)) -
           0.5 * y * y * (4.0 * x * x - 2.0) * g;
  }
  return detail::faddeeva_weideman({x, y}).real();
}

/// Area-normalised Voigt profile, 1/cm^-1.
/// gamma_l: Lorentz HWHM, gamma_g: Gaussian HWHM, both cm^-1.
inline double voigt(double delta_nu, double gamma_l, double gamma_g) {
  if (gamma_l < 0.0 || gamma_g < 0.0)
    fail(ErrorCode::InvalidArgument, "line widths must be non-negative");
  if (gamma_l == 0.0 && gamma_g == 0.0)
    fail(ErrorCode::DegenerateProfile, "both Lorentz and Gaussian widths are zero");
  if (gamma_g == 0.0)
    return gamma_l / (std::numbers::pi * (delta_nu * delta_nu + gamma_l * gamma_l));
  const double sqrt_ln2 = std::sqrt(std::numbers::ln2);
  const double norm = sqrt_ln2 / (gamma_g * std::sqrt(std::numbers::pi));
  const double x = sqrt_ln2 * delta_nu / gamma_g;
  if (gamma_l == 0.0) return norm * std::exp(-x * x);
  return norm * voigt_k(x, sqrt_ln2 * gamma_l / gamma_g);
}

}  // namespace spectrosat
