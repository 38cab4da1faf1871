#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "spectrosat/error.hpp"

namespace spectrosat {

/// Uniform wavenumber grid nu_start + k*nu_step, k in [0, count).
struct SpectralGrid {
  double nu_start = 0.0;  // cm^-1
  double nu_step = 1.0;   // cm^-1
  std::size_t count = 2;

  SpectralGrid() = default;
  SpectralGrid(double start, double step, std::size_t n) : nu_start(start), nu_step(step), count(n) {
    if (!(step > 0.0) || !std::isfinite(step))
      fail(ErrorCode::InvalidArgument, "grid step must be positive");
    if (n < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
  }

  /// Grid from lo to at least hi with the given step.
  static SpectralGrid covering(double lo, double hi, double step) {
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    return SpectralGrid(lo, step, n);
  }

  double at(std::size_t k) const { return nu_start + static_cast<double>(k) * nu_step; }
  double nu_end() const { return at(count - 1); }

  /// Index range [first, last) of points with lo <= nu <= hi.
  std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const {
    double a = std::ceil((lo - nu_start) / nu_step - 1e-9);
    double b = std::floor((hi - nu_start) / nu_step + 1e-9);
    if (a < 0) a = 0;
    if (b > static_cast<double>(count - 1)) b = static_cast<double>(count - 1);
    if (b < a) return {0, 0};
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b) + 1};
  }

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.nu_start == b.nu_start && a.nu_step == b.nu_step && a.count == b.count;
  }
};

enum class SpectrumKind { Transmittance, Radiance, Recovered, OpticalDepth };

constexpr std::string_view kind_name(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Transmittance: return "transmittance";
    case SpectrumKind::Radiance: return "radiance";
    case SpectrumKind::Recovered: return "recovered";
    case SpectrumKind::OpticalDepth: return "optical_depth";
  }
  return "?";
}

/// Values on a SpectralGrid. Radiance is W m^-2 sr^-1 / cm^-1; recovered
/// spectra are detector power spectral density, W / cm^-1.
struct Spectrum {
  SpectralGrid grid;
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::Recovered;

  Spectrum() = default;
  Spectrum(SpectralGrid g, std::vector<double> v, SpectrumKind k)
      : grid(g), values(std::move(v)), kind(k) {
    if (values.size() != grid.count)
      fail(ErrorCode::InvalidArgument, "spectrum has " + std::to_string(values.size()) +
                                           " values for a grid of " + std::to_string(grid.count));
  }
  Spectrum(SpectralGrid g, SpectrumKind k) : grid(g), values(g.count, 0.0), kind(k) {}

  std::size_t size() const { return values.size(); }
  double nu(std::size_t k) const { return grid.at(k); }
};

}  // namespace spectrosat
