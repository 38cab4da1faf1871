#pragma once

// Interferogram processing: frame averaging, apodization, Fourier transform
// with Mertz phase correction, transmittance ratios and SNR estimation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectrosat/error.hpp"
#include "spectrosat/fft.hpp"
#include "spectrosat/instrument.hpp"
#include "spectrosat/spectrum.hpp"

namespace spectrosat {

enum class ApodizationKind { Boxcar, Hann, NortonBeerMedium };

constexpr std::string_view apodization_name(ApodizationKind k) {
  switch (k) {
    case ApodizationKind::Boxcar: return "boxcar";
    case ApodizationKind::Hann: return "hann";
    case ApodizationKind::NortonBeerMedium: return "norton_beer_medium";
  }
  return "?";
}

inline std::optional<ApodizationKind> apodization_from_name(std::string_view name) {
  for (auto k : {ApodizationKind::Boxcar, ApodizationKind::Hann, ApodizationKind::NortonBeerMedium})
    if (apodization_name(k) == name) return k;
  return std::nullopt;
}

/// One-sided window at fractional OPD u = x / x_max in [0, 1]; w(0) = 1.
inline double apodization_window(ApodizationKind kind, double u) {
  switch (kind) {
    case ApodizationKind::Boxcar:
      return 1.0;
    case ApodizationKind::Hann:
      return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
    case ApodizationKind::NortonBeerMedium: {
      const double s = 1.0 - u * u;
      return 0.152442 - 0.136176 * s + 0.983734 * s * s;
    }
  }
  return 1.0;
}

struct ProcessingOptions {
  ApodizationKind apodization = ApodizationKind::NortonBeerMedium;
  bool phase_correction = true;
  std::size_t zero_fill = 2;
  std::size_t phase_points = 256;  // one side of the double-sided phase segment
};

/// Pointwise mean; metadata from the first frame, seed cleared.
inline Interferogram average_interferograms(std::span<const Interferogram> frames) {
  if (frames.empty()) fail(ErrorCode::EmptyInput, "no interferograms to average");
  const auto& first = frames.front();
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.size() != first.size() || f.opd_step != first.opd_step || f.channel != first.channel)
      fail(ErrorCode::IncompatibleFrames, "frame " + std::to_string(i) +
                                              " differs from frame 0 in size, OPD step or channel");
  }
  // Deviations from the first frame are summed, so identical frames average exactly.
  std::vector<double> dev(first.size(), 0.0);
  for (std::size_t i = 1; i < frames.size(); ++i)
    for (std::size_t k = 0; k < dev.size(); ++k) dev[k] += frames[i].samples[k] - first.samples[k];
  Interferogram out = first;
  out.seed.reset();
  const double n = static_cast<double>(frames.size());
  for (std::size_t k = 0; k < dev.size(); ++k) out.samples[k] += dev[k] / n;
  return out;
}

namespace detail {

// Low-resolution complex spectrum of the first `points` samples mirrored about
// ZPD (single-sided scans have no measured negative-OPD arm).
inline std::vector<std::complex<double>> phase_reference(std::span<const double> centred,
                                                         std::size_t points) {
  points = std::min(points, centred.size());
  const std::size_t len = 2 * points;
  std::vector<std::complex<double>> z(len, 0.0);
  for (std::size_t j = 0; j < points; ++j) {
    const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(j) /
                                            static_cast<double>(points)));
    z[j] = centred[j] * w;
    if (j > 0) z[len - j] = z[j];
  }
  return fft::forward(z);
}

}  // namespace detail

/// Recovered spectrum on nu_m = m / (zero_fill * N * opd_step), m = 0 .. Nyquist.
/// Values are detector power spectral density, W / cm^-1: for a smooth input
/// spectrum B(nu) sampled on a fine grid the result converges to
/// etendue * throughput * B convolved with the instrument line shape.
inline Spectrum interferogram_to_spectrum(const Interferogram& frame,
                                          const ProcessingOptions& options = {}) {
  const std::size_t n = frame.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "interferogram needs at least two samples");
  if (!(frame.opd_step > 0.0)) fail(ErrorCode::InvalidArgument, "OPD step must be positive");
  const std::size_t zf = std::max<std::size_t>(1, options.zero_fill);
  const std::size_t len = zf * n;

  double mean = 0.0;
  for (double s : frame.samples) mean += s;
  mean /= static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t k = 0; k < n; ++k) centred[k] = frame.samples[k] - mean;

  std::vector<double> y(len, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    y[k] = centred[k] *
           apodization_window(options.apodization, static_cast<double>(k) / static_cast<double>(n));
  y[0] *= 0.5;  // ZPD sits on the fold of a one-sided scan
  const auto spectrum = fft::real_forward(y);

  const std::size_t bins = len / 2 + 1;
  const double scale = 8.0 * frame.opd_step;
  std::vector<double> values(bins);
  if (options.phase_correction) {
    const auto low = detail::phase_reference(centred, options.phase_points);
    const std::size_t low_len = low.size();
    for (std::size_t m = 0; m < bins; ++m) {
      const double pos = static_cast<double>(m) * static_cast<double>(low_len) / static_cast<double>(len);
      const auto q = std::min(static_cast<std::size_t>(pos), low_len / 2);
      const double t = pos - static_cast<double>(q);
      const auto ref = (1.0 - t) * low[q] + t * low[std::min(q + 1, low_len - 1)];
      const double mag = std::abs(ref);
      const std::complex<double> rotation = mag > 0.0 ? std::conj(ref) / mag : 1.0;
      values[m] = scale * (spectrum[m] * rotation).real();
    }
  } else {
    for (std::size_t m = 0; m < bins; ++m) values[m] = scale * std::abs(spectrum[m]);
  }
  const SpectralGrid grid(0.0, 1.0 / (static_cast<double>(len) * frame.opd_step), bins);
  return Spectrum(grid, std::move(values), SpectrumKind::Recovered);
}

struct WavenumberBand {
  double lo = 0.0;  // cm^-1
  double hi = 0.0;

  bool contains(double nu) const { return nu >= lo && nu <= hi; }
};

struct TransmittanceRatio {
  Spectrum transmittance;
  std::size_t clipped = 0;
};

inline constexpr double kRatioClipMax = 1.05;

/// sample / reference on the points of `band` (whole grid if absent), clipped to [0, 1.05].
inline TransmittanceRatio transmittance_ratio(const Spectrum& sample, const Spectrum& reference,
                                              std::optional<WavenumberBand> band = std::nullopt) {
  if (!(sample.grid == reference.grid))
    fail(ErrorCode::GridMismatch, "sample and reference grids differ");
  auto [first, last] = band ? sample.grid.index_range(band->lo, band->hi)
                            : std::pair<std::size_t, std::size_t>{0, sample.size()};
  if (last - first < 2) fail(ErrorCode::BandOutOfRange, "evaluation band holds fewer than 2 points");
  TransmittanceRatio out;
  std::vector<double> values(last - first);
  for (std::size_t k = first; k < last; ++k) {
    const double ref = reference.values[k];
    if (!(ref > 0.0))
      fail(ErrorCode::ZeroReference, "reference is not positive at " + std::to_string(sample.nu(k)) +
                                         " cm^-1");
    double t = sample.values[k] / ref;
    if (t < 0.0 || t > kRatioClipMax) {
      t = std::clamp(t, 0.0, kRatioClipMax);
      ++out.clipped;
    }
    values[k - first] = t;
  }
  const SpectralGrid grid(sample.grid.at(first), sample.grid.nu_step, last - first);
  out.transmittance = Spectrum(grid, std::move(values), SpectrumKind::Transmittance);
  return out;
}

struct SnrReport {
  double signal_level = 0.0;
  double noise_sigma = 0.0;
  double snr = 0.0;
  WavenumberBand signal_band;
  WavenumberBand noise_band;
};

inline constexpr WavenumberBand kDefaultSignalBand{6100.0, 6200.0};
inline constexpr WavenumberBand kDefaultNoiseBand{6600.0, 6700.0};
/// Outside both default channels: only detector noise, and wide enough that the
/// sigma estimate itself scatters by about 1%.
inline constexpr WavenumberBand kOutOfBandNoise{8500.0, 11500.0};
inline constexpr std::size_t kMinBandPoints = 8;

namespace detail {

inline std::pair<std::size_t, std::size_t> band_indices(const Spectrum& s, WavenumberBand band,
                                                        std::string_view what) {
  if (!(band.lo < band.hi) || band.lo < s.grid.nu_start || band.hi > s.grid.nu_end())
    fail(ErrorCode::BandOutOfRange, std::string(what) + " band [" + std::to_string(band.lo) + ", " +
                                        std::to_string(band.hi) + "] outside the spectrum grid");
  auto range = s.grid.index_range(band.lo, band.hi);
  if (range.second - range.first < kMinBandPoints)
    fail(ErrorCode::DegenerateBand,
         std::string(what) + " band holds fewer than " + std::to_string(kMinBandPoints) + " points");
  return range;
}

/// Residual standard deviation about a least-squares line.
inline double detrended_sigma(std::span<const double> nu, std::span<const double> v) {
  const std::size_t n = v.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += nu[i], my += v[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (nu[i] - mx) * (nu[i] - mx);
    sxy += (nu[i] - mx) * (v[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - my - slope * (nu[i] - mx);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(n - 2));
}

}  // namespace detail

/// Mean over the signal band divided by the detrended scatter over a line-free noise band.
inline SnrReport estimate_snr(const Spectrum& spectrum, WavenumberBand signal_band = kDefaultSignalBand,
                              WavenumberBand noise_band = kDefaultNoiseBand) {
  auto [s0, s1] = detail::band_indices(spectrum, signal_band, "signal");
  auto [n0, n1] = detail::band_indices(spectrum, noise_band, "noise");
  SnrReport report;
  report.signal_band = signal_band;
  report.noise_band = noise_band;
  for (std::size_t k = s0; k < s1; ++k) report.signal_level += spectrum.values[k];
  report.signal_level /= static_cast<double>(s1 - s0);

  std::vector<double> nu, v;
  double scale = 0.0;
  for (std::size_t k = n0; k < n1; ++k) {
    nu.push_back(spectrum.nu(k));
    v.push_back(spectrum.values[k]);
    scale = std::max(scale, std::abs(spectrum.values[k]));
  }
  report.noise_sigma = detail::detrended_sigma(nu, v);
  scale = std::max(scale, std::abs(report.signal_level));
  // Rounding alone leaves residuals near 1e-16 of the level; that is not noise.
  if (!(report.noise_sigma > 1e-12 * scale))
    fail(ErrorCode::DegenerateNoise, "noise band shows no scatter; SNR undefined");
  report.snr = report.signal_level / report.noise_sigma;
  return report;
}

}  // namespace spectrosat
