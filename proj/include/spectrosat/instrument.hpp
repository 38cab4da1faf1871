#pragma once

// Michelson interferometer forward model: radiance spectrum -> sampled
// interferogram on the reference-laser OPD grid, plus detector noise.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectrosat/error.hpp"
#include "spectrosat/fft.hpp"
#include "spectrosat/rng.hpp"
#include "spectrosat/spectrum.hpp"

namespace spectrosat {

enum class DetectorKind { InGaAs, Si };

constexpr std::string_view detector_name(DetectorKind d) {
  return d == DetectorKind::InGaAs ? "InGaAs" : "Si";
}

inline std::optional<DetectorKind> detector_from_name(std::string_view name) {
  if (name == "InGaAs") return DetectorKind::InGaAs;
  if (name == "Si") return DetectorKind::Si;
  return std::nullopt;
}

struct DetectorSpec {
  DetectorKind name = DetectorKind::InGaAs;
  double band_lo = 1.25;      // um
  double band_hi = 1.70;      // um
  double active_side = 1.0;   // mm
  std::optional<double> d_star;  // cm sqrt(Hz) / W
  std::optional<double> nep;     // W / sqrt(Hz)

  /// Bandpass in wavenumber, cm^-1.
  double nu_lo() const { return 1e4 / band_hi; }
  double nu_hi() const { return 1e4 / band_lo; }

  void validate() const {
    const std::string who(detector_name(name));
    if (!(band_lo > 0.0 && band_lo < band_hi))
      fail(ErrorCode::ValidationError, who + ": band_lo must be positive and below band_hi");
    if (!(active_side > 0.0)) fail(ErrorCode::ValidationError, who + ": active_side must be > 0");
    if (d_star && !(*d_star > 0.0)) fail(ErrorCode::ValidationError, who + ": d_star must be > 0");
    if (nep && !(*nep > 0.0)) fail(ErrorCode::ValidationError, who + ": nep must be > 0");
    if (!d_star && !nep) fail(ErrorCode::MissingNoiseSpec, who + ": needs d_star or nep");
  }
};

/// Extended InGaAs receiver. Spans 1.25-1.70 um so that the O2 1.27 um band
/// and the CO2/CH4 1.6 um bands fall inside one channel.
inline DetectorSpec default_ingaas() {
  return {DetectorKind::InGaAs, 1.25, 1.70, 1.0, 2.0e12, std::nullopt};
}

/// Si photodiode behind the 0.75-0.80 um filter (O2 A band).
inline DetectorSpec default_si() { return {DetectorKind::Si, 0.75, 0.80, 1.0, std::nullopt, 6.2e-15}; }

/// Noise-equivalent power, W/sqrt(Hz): the stated NEP, else sqrt(area)/D*.
inline double nep_of(const DetectorSpec& detector) {
  if (detector.nep) return *detector.nep;
  if (detector.d_star) return (detector.active_side / 10.0) / *detector.d_star;
  fail(ErrorCode::MissingNoiseSpec,
       std::string(detector_name(detector.name)) + " has neither NEP nor D*");
}

struct InstrumentConfig {
  double aperture_diameter = 100.0;  // mm
  double fov = 0.01;                 // rad, full angle
  double input_magnification = 4.0;
  double lambda_ref = 632.8;         // nm
  double opd_step = 632.8 / 4.0;     // nm
  std::size_t n_samples = 32000;
  double scan_period = 4.0;          // s per interferogram
  double stroke = 4.0;               // mm, mirror travel (metadata only)
  double optical_efficiency = 0.1;
  std::vector<DetectorSpec> channels{default_ingaas(), default_si()};

  double opd_step_cm() const { return opd_step * 1e-7; }
  double max_opd_cm() const { return opd_step_cm() * static_cast<double>(n_samples); }
  double nyquist() const { return 1.0 / (2.0 * opd_step_cm()); }

  /// Aperture area times field-of-view solid angle, m^2 sr.
  double etendue() const {
    const double radius = aperture_diameter * 1e-3 / 2.0;
    const double solid_angle = 2.0 * std::numbers::pi * (1.0 - std::cos(fov / 2.0));
    return std::numbers::pi * radius * radius * solid_angle;
  }

  /// Fraction of the collected flux reaching the detector. The input
  /// magnification is carried as a divisor on the optical efficiency.
  double throughput() const { return optical_efficiency / input_magnification; }

  /// Electrical noise bandwidth: half the sample rate.
  double electrical_bandwidth() const {
    return static_cast<double>(n_samples) / (2.0 * scan_period);
  }

  const DetectorSpec& channel(DetectorKind name) const {
    for (const auto& c : channels)
      if (c.name == name) return c;
    fail(ErrorCode::BandMismatch, "no " + std::string(detector_name(name)) + " channel configured");
  }

  void validate() const {
    if (!(aperture_diameter > 0.0)) fail(ErrorCode::ValidationError, "aperture_diameter must be > 0");
    if (!(fov > 0.0 && fov < 0.1)) fail(ErrorCode::ValidationError, "fov outside (0, 0.1)");
    if (!(input_magnification > 0.0))
      fail(ErrorCode::ValidationError, "input_magnification must be > 0");
    if (!(lambda_ref > 0.0)) fail(ErrorCode::ValidationError, "lambda_ref must be > 0");
    if (!(opd_step > 0.0)) fail(ErrorCode::ValidationError, "opd_step must be > 0");
    if (n_samples < 2) fail(ErrorCode::ValidationError, "n_samples must be >= 2");
    if (!(scan_period > 0.0)) fail(ErrorCode::ValidationError, "scan_period must be > 0");
    if (!(optical_efficiency > 0.0 && optical_efficiency <= 1.0))
      fail(ErrorCode::ValidationError, "optical_efficiency outside (0, 1]");
    for (std::size_t i = 0; i < channels.size(); ++i) {
      channels[i].validate();
      for (std::size_t j = 0; j < i; ++j)
        if (channels[j].name == channels[i].name)
          fail(ErrorCode::ValidationError,
               "duplicate channel " + std::string(detector_name(channels[i].name)));
      if (channels[i].nu_hi() >= nyquist())
        fail(ErrorCode::NyquistViolation,
             std::string(detector_name(channels[i].name)) + " upper band edge " +
                 std::to_string(channels[i].nu_hi()) + " cm^-1 exceeds Nyquist " +
                 std::to_string(nyquist()) + " cm^-1");
    }
  }
};

/// Theoretical (boxcar) resolution 1 / max OPD, cm^-1.
inline double spectral_resolution(const InstrumentConfig& config) {
  return 1.0 / (static_cast<double>(config.n_samples) * config.opd_step_cm());
}

struct Interferogram {
  std::vector<double> samples;  // W at the detector, responsivity 1
  double opd_step = 0.0;        // cm
  double lambda_ref = 632.8;    // nm
  DetectorKind channel = DetectorKind::InGaAs;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return samples.size(); }
};

/// Per-sample noise standard deviation, W.
inline double noise_sigma(const InstrumentConfig& config, DetectorKind channel) {
  return nep_of(config.channel(channel)) * std::sqrt(config.electrical_bandwidth());
}

namespace detail {

struct InBand {
  std::size_t first = 0;
  std::size_t last = 0;
  double scale = 0.0;  // radiance -> power per grid point, W / (radiance unit)
};

inline InBand in_band(const Spectrum& radiance, const InstrumentConfig& config,
                      const DetectorSpec& det, bool require_cover = true) {
  const auto& g = radiance.grid;
  if (require_cover && (g.nu_start > det.nu_lo() + 1e-9 || g.nu_end() < det.nu_hi() - 1e-9))
    fail(ErrorCode::BandMismatch, "radiance grid [" + std::to_string(g.nu_start) + ", " +
                                      std::to_string(g.nu_end()) + "] does not cover the " +
                                      std::string(detector_name(det.name)) + " band [" +
                                      std::to_string(det.nu_lo()) + ", " +
                                      std::to_string(det.nu_hi()) + "]");
  auto [first, last] = g.index_range(det.nu_lo(), det.nu_hi());
  return {first, last, config.etendue() * config.throughput() * g.nu_step};
}

inline long double frac(long double v) { return v - std::floor(v); }

}  // namespace detail

/// Optical power reaching the detector inside the channel bandpass, W.
inline double in_band_power(const Spectrum& radiance, const InstrumentConfig& config,
                            DetectorKind channel) {
  const auto band = detail::in_band(radiance, config, config.channel(channel));
  double total = 0.0;
  for (std::size_t j = band.first; j < band.last; ++j) total += radiance.values[j] * band.scale;
  return total;
}

namespace detail {

/// I_k = sum_j P_j (1 + cos(2 pi nu_j x_k)) / 2 over the grid points [band.first, band.last).
///
/// The cosine sum is a chirp-z transform, evaluated exactly (up to rounding)
/// for any uniform input grid by Bluestein's convolution.
inline std::vector<double> cosine_samples(const Spectrum& radiance, const InstrumentConfig& config,
                                          const InBand& band) {
  const std::size_t n = config.n_samples;
  std::vector<double> out(n, 0.0);
  const std::size_t b = band.last - band.first;
  if (b == 0) return out;

  const long double dx = static_cast<long double>(config.opd_step) * 1e-7L;
  const long double alpha = static_cast<long double>(radiance.grid.nu_step) * dx;  // cycles per (j*k)
  const long double nu0 = static_cast<long double>(radiance.grid.at(band.first));
  const long double pi = std::numbers::pi_v<long double>;

  // exp(i pi alpha m^2), with alpha m^2 reduced modulo 2 before scaling by pi.
  auto chirp = [&](std::int64_t m) {
    const auto mm = static_cast<long double>(static_cast<std::uint64_t>(m * m));
    const long double turns = std::fmod(alpha * mm, 2.0L);
    return std::complex<double>(static_cast<double>(std::cos(pi * turns)),
                                static_cast<double>(std::sin(pi * turns)));
  };

  const std::size_t len = fft::good_size(b + n - 1);
  std::vector<std::complex<double>> u(len), v(len);
  double dc = 0.0;
  for (std::size_t j = 0; j < b; ++j) {
    const double power = radiance.values[band.first + j] * band.scale;
    dc += power;
    u[j] = power * chirp(static_cast<std::int64_t>(j));
  }
  for (std::int64_t m = -static_cast<std::int64_t>(b) + 1; m < static_cast<std::int64_t>(n); ++m) {
    const std::size_t idx = m >= 0 ? static_cast<std::size_t>(m) : len - static_cast<std::size_t>(-m);
    v[idx] = std::conj(chirp(m));
  }
  auto uf = fft::forward(u);
  const auto vf = fft::forward(v);
  for (std::size_t i = 0; i < len; ++i) uf[i] *= vf[i];
  const auto conv = fft::backward(uf);
  const double inv_len = 1.0 / static_cast<double>(len);
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> sum = chirp(static_cast<std::int64_t>(k)) * conv[k] * inv_len;
    const long double turns = detail::frac(nu0 * dx * static_cast<long double>(k));
    const std::complex<double> carrier(static_cast<double>(std::cos(2.0L * pi * turns)),
                                       static_cast<double>(std::sin(2.0L * pi * turns)));
    out[k] = 0.5 * dc + 0.5 * (carrier * sum).real();
  }
  return out;
}

}  // namespace detail

/// Noiseless samples I_k = sum_j P_j (1 + cos(2 pi nu_j x_k)) / 2, x_k = k * opd_step,
/// where P_j is the power of grid point j inside the channel bandpass. The grid
/// must cover the whole bandpass.
inline std::vector<double> noiseless_samples(const Spectrum& radiance, const InstrumentConfig& config,
                                             DetectorKind channel) {
  config.validate();
  return detail::cosine_samples(radiance, config,
                                detail::in_band(radiance, config, config.channel(channel)));
}

/// Same sum restricted to whatever part of the bandpass the grid overlaps.
/// Samples are linear in radiance, so contributions of disjoint or differenced
/// spectra add up to the samples of the whole.
inline std::vector<double> interferogram_contribution(const Spectrum& radiance,
                                                      const InstrumentConfig& config,
                                                      DetectorKind channel) {
  config.validate();
  return detail::cosine_samples(radiance, config,
                                detail::in_band(radiance, config, config.channel(channel), false));
}

/// Adds zero-mean Gaussian noise from the counter stream `seed`.
inline void add_noise(std::vector<double>& samples, double sigma, std::uint64_t seed) {
  const CounterRng rng(seed);
  for (std::size_t k = 0; k < samples.size(); ++k) samples[k] += sigma * rng.normal(k);
}

inline Interferogram synthesize_interferogram(const Spectrum& radiance,
                                              const InstrumentConfig& config, DetectorKind channel,
                                              std::optional<std::uint64_t> noise_seed) {
  Interferogram frame;
  frame.samples = noiseless_samples(radiance, config, channel);
  frame.opd_step = config.opd_step_cm();
  frame.lambda_ref = config.lambda_ref;
  frame.channel = channel;
  frame.seed = noise_seed;
  if (noise_seed) add_noise(frame.samples, noise_sigma(config, channel), *noise_seed);
  return frame;
}

/// `count` frames of one scene; frame i carries noise seed derive_seed(base_seed, i).
inline std::vector<Interferogram> scan_sequence(const Spectrum& radiance,
                                                const InstrumentConfig& config,
                                                DetectorKind channel, std::size_t count,
                                                std::uint64_t base_seed) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "scan_sequence needs count >= 1");
  Interferogram clean = synthesize_interferogram(radiance, config, channel, std::nullopt);
  const double sigma = noise_sigma(config, channel);
  std::vector<Interferogram> frames(count, clean);
  for (std::size_t i = 0; i < count; ++i) {
    frames[i].seed = derive_seed(base_seed, i);
    add_noise(frames[i].samples, sigma, *frames[i].seed);
  }
  return frames;
}

}  // namespace spectrosat
