#pragma once

// Depth-based retrieval: line depth and integrated absorbance against a
// linear baseline, weak-line column inversion and O2-normalised mixing ratios.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectrosat/dsp.hpp"
#include "spectrosat/error.hpp"
#include "spectrosat/instrument.hpp"
#include "spectrosat/linelist.hpp"
#include "spectrosat/parallel.hpp"
#include "spectrosat/radtran.hpp"
#include "spectrosat/spectrum.hpp"

namespace spectrosat {

struct RetrievalBand {
  GasSpecies species = GasSpecies::CO2;
  double nu_center = 0.0;         // cm^-1
  double window_halfwidth = 15.0;  // cm^-1
  double baseline_margin = 10.0;   // cm^-1, width of each flanking strip

  double window_lo() const { return nu_center - window_halfwidth; }
  double window_hi() const { return nu_center + window_halfwidth; }
  double outer_lo() const { return window_lo() - baseline_margin; }
  double outer_hi() const { return window_hi() + baseline_margin; }

  void validate() const {
    if (!(nu_center > 0.0)) fail(ErrorCode::ValidationError, "band nu_center must be > 0");
    if (!(window_halfwidth > 0.0)) fail(ErrorCode::ValidationError, "window_halfwidth must be > 0");
    if (!(baseline_margin > 0.0)) fail(ErrorCode::ValidationError, "baseline_margin must be > 0");
  }

  friend bool operator==(const RetrievalBand&, const RetrievalBand&) = default;
};

inline std::vector<RetrievalBand> default_bands() {
  return {{GasSpecies::O2, 7880.0}, {GasSpecies::CO2, 6250.0}, {GasSpecies::CO2, 6350.0},
          {GasSpecies::CH4, 6024.0}};
}

/// Depth at or above this marks the band as saturated.
inline constexpr double kSaturationDepth = 0.95;
inline constexpr double kMinRatio = 1e-6;
/// Results from spectra with a lower SNR are flagged.
inline constexpr double kLowSnr = 10.0;

struct Baseline {
  double level = 0.0;  // at the band centre
  double slope = 0.0;  // per cm^-1
  double nu_center = 0.0;

  double at(double nu) const { return level + slope * (nu - nu_center); }
};

struct LineDepth {
  double depth = 0.0;                  // 1 - min(T / baseline), clamped to [0, 1]
  double integrated_absorbance = 0.0;  // cm^-1
  Baseline baseline;
  bool saturated = false;
};

/// Baseline from a least-squares line through both flanking strips, then depth
/// and integrated absorbance over the window.
inline LineDepth measure_line_depth(const Spectrum& spectrum, const RetrievalBand& band) {
  band.validate();
  if (spectrum.kind == SpectrumKind::OpticalDepth)
    fail(ErrorCode::InvalidArgument, "line depth needs a transmittance or radiance spectrum");
  const auto& g = spectrum.grid;
  if (band.outer_lo() < g.nu_start - 1e-9 || band.outer_hi() > g.nu_end() + 1e-9)
    fail(ErrorCode::BandOutOfRange,
         std::string(species_name(band.species)) + " band at " + std::to_string(band.nu_center) +
             " cm^-1 needs [" + std::to_string(band.outer_lo()) + ", " +
             std::to_string(band.outer_hi()) + "] but the grid spans [" +
             std::to_string(g.nu_start) + ", " + std::to_string(g.nu_end()) + "]");

  const auto [o0, o1] = g.index_range(band.outer_lo(), band.outer_hi());
  for (std::size_t k = o0; k < o1; ++k)
    if (spectrum.values[k] < 0.0)
      fail(ErrorCode::NegativeTransmittance,
           "negative value " + std::to_string(spectrum.values[k]) + " at " +
               std::to_string(spectrum.nu(k)) + " cm^-1");

  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto [lo, hi] : {std::pair{band.outer_lo(), band.window_lo()},
                        std::pair{band.window_hi(), band.outer_hi()}}) {
    const auto [a, b] = g.index_range(lo, hi);
    for (std::size_t k = a; k < b; ++k) {
      const double x = spectrum.nu(k) - band.nu_center;
      const double y = spectrum.values[k];
      sw += 1.0, sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
  }
  if (sw < 2.0) fail(ErrorCode::DegenerateBand, "baseline strips hold fewer than 2 points");
  const double det = sw * sxx - sx * sx;
  LineDepth out;
  out.baseline.nu_center = band.nu_center;
  out.baseline.slope = det > 0.0 ? (sw * sxy - sx * sy) / det : 0.0;
  out.baseline.level = (sy - out.baseline.slope * sx) / sw;

  const auto [w0, w1] = g.index_range(band.window_lo(), band.window_hi());
  if (w1 - w0 < 2) fail(ErrorCode::DegenerateBand, "line window holds fewer than 2 points");
  double min_ratio = 1.0;
  double prev = 0.0;
  for (std::size_t k = w0; k < w1; ++k) {
    const double base = out.baseline.at(spectrum.nu(k));
    if (!(base > 0.0))
      fail(ErrorCode::DegenerateBand,
           "baseline is not positive at " + std::to_string(spectrum.nu(k)) + " cm^-1");
    const double ratio = spectrum.values[k] / base;
    min_ratio = std::min(min_ratio, ratio);
    const double a = -std::log(std::max(ratio, kMinRatio));
    if (k > w0) out.integrated_absorbance += 0.5 * (a + prev) * g.nu_step;
    prev = a;
  }
  out.depth = std::clamp(1.0 - min_ratio, 0.0, 1.0);
  out.saturated = out.depth >= kSaturationDepth;
  return out;
}

/// Sum of catalog intensities of the band's species inside its window.
inline double band_intensity(const LineCatalog& catalog, const RetrievalBand& band) {
  band.validate();
  double total = 0.0;
  for (const auto& line : query_band(catalog, band.species, band.window_lo(), band.window_hi()))
    total += line.intensity;
  if (!(total > 0.0))
    fail(ErrorCode::MissingLines, "no " + std::string(species_name(band.species)) +
                                      " lines inside the window at " +
                                      std::to_string(band.nu_center) + " cm^-1");
  return total;
}

/// Weak-line inversion: absorbance / (AMF * sum S), molecules/cm^2, floored at 0.
inline double integral_column(double integrated_absorbance, const RetrievalBand& band,
                              const LineCatalog& catalog, const ObservationGeometry& geometry) {
  geometry.validate();
  const double s = band_intensity(catalog, band);
  return std::max(0.0, integrated_absorbance / (geometry.air_mass_factor() * s));
}

/// ppm relative to dry air, with O2 as the 20.95% tracer.
inline double volume_mixing_ratio(double gas_column, double o2_column) {
  if (!(o2_column > 0.0)) fail(ErrorCode::ZeroOxygenColumn, "O2 column is zero; cannot normalise");
  return gas_column / (o2_column / kO2DryAirFraction) * 1e6;
}

enum class RetrievalFlag { Saturated, LowSignal, ZeroOxygenColumn, FrameFailed };

constexpr std::string_view flag_name(RetrievalFlag f) {
  switch (f) {
    case RetrievalFlag::Saturated: return "saturated";
    case RetrievalFlag::LowSignal: return "low_signal";
    case RetrievalFlag::ZeroOxygenColumn: return "zero_oxygen_column";
    case RetrievalFlag::FrameFailed: return "frame_failed";
  }
  return "?";
}

struct FlagEntry {
  RetrievalFlag flag;
  std::string detail;
};

struct BandResult {
  RetrievalBand band;
  LineDepth measurement;
  double integral_column = 0.0;  // molecules/cm^2
};

struct GasResult {
  GasSpecies species;
  double column = 0.0;   // molecules/cm^2, all bands of the gas combined
  double vmr_ppm = 0.0;
};

struct RetrievalResult {
  std::vector<BandResult> bands;
  std::vector<GasResult> gases;  // in kAllSpecies order, only gases with a band
  std::optional<SnrReport> snr;
  std::vector<FlagEntry> flags;

  const GasResult* gas(GasSpecies s) const {
    for (const auto& g : gases)
      if (g.species == s) return &g;
    return nullptr;
  }
  bool has_flag(RetrievalFlag f) const {
    return std::any_of(flags.begin(), flags.end(), [f](const auto& e) { return e.flag == f; });
  }
};

/// Runs every band, combines bands of one gas as sum(A) / (AMF * sum(S)) and
/// normalises by the O2 column. The SNR is attached when the spectrum covers
/// the default SNR bands and shows noise there.
inline RetrievalResult retrieve(const Spectrum& spectrum, std::span<const RetrievalBand> bands,
                                const LineCatalog& catalog, const ObservationGeometry& geometry) {
  if (bands.empty()) fail(ErrorCode::InvalidArgument, "no retrieval bands given");
  geometry.validate();
  const bool has_o2 = std::any_of(bands.begin(), bands.end(),
                                  [](const auto& b) { return b.species == GasSpecies::O2; });
  const bool has_other = std::any_of(bands.begin(), bands.end(),
                                     [](const auto& b) { return b.species != GasSpecies::O2; });
  if (has_other && !has_o2)
    fail(ErrorCode::MissingO2Band, "mixing ratios need an O2 band for normalisation");

  RetrievalResult result;
  const double amf = geometry.air_mass_factor();
  std::map<GasSpecies, std::pair<double, double>> sums;  // absorbance, intensity
  for (const auto& band : bands) {
    BandResult br{band, measure_line_depth(spectrum, band), 0.0};
    const double s = band_intensity(catalog, band);
    br.integral_column = std::max(0.0, br.measurement.integrated_absorbance / (amf * s));
    if (br.measurement.saturated)
      result.flags.push_back({RetrievalFlag::Saturated, std::string(species_name(band.species)) +
                                                            " band at " +
                                                            std::to_string(band.nu_center)});
    auto& [a, st] = sums[band.species];
    a += br.measurement.integrated_absorbance;
    st += s;
    result.bands.push_back(std::move(br));
  }

  double o2_column = 0.0;
  for (auto s : kAllSpecies) {
    auto it = sums.find(s);
    if (it == sums.end()) continue;
    const double column = std::max(0.0, it->second.first / (amf * it->second.second));
    result.gases.push_back({s, column, 0.0});
    if (s == GasSpecies::O2) o2_column = column;
  }
  for (auto& g : result.gases) {
    if (o2_column > 0.0) {
      g.vmr_ppm = volume_mixing_ratio(g.column, o2_column);
    } else if (!result.has_flag(RetrievalFlag::ZeroOxygenColumn)) {
      result.flags.push_back({RetrievalFlag::ZeroOxygenColumn, "no O2 absorption measured"});
    }
  }

  try {
    result.snr = estimate_snr(spectrum);
  } catch (const Error&) {
    // noiseless or band-limited input: no SNR to report
  }
  if (result.snr && result.snr->snr < kLowSnr)
    result.flags.push_back({RetrievalFlag::LowSignal, "SNR " + std::to_string(result.snr->snr)});
  return result;
}

struct TimeseriesOptions {
  ProcessingOptions processing;
  std::size_t block = 1;      // frames averaged per retrieval
  double frame_period = 4.0;  // s between frame starts
};

struct TimeseriesEntry {
  std::size_t frame_index = 0;  // first frame of the block
  std::size_t frames = 0;       // frames in the block
  double time_s = 0.0;          // start time of the block
  std::optional<RetrievalResult> result;
  std::vector<FlagEntry> flags;  // FrameFailed lands here when result is empty
};

/// One retrieval per block of consecutive frames; a trailing partial block is
/// kept. A failing block is flagged and the rest of the series continues.
inline std::vector<TimeseriesEntry> process_timeseries(std::span<const Interferogram> frames,
                                                       const TimeseriesOptions& options,
                                                       std::span<const RetrievalBand> bands,
                                                       const LineCatalog& catalog,
                                                       const ObservationGeometry& geometry) {
  if (frames.empty()) fail(ErrorCode::EmptyInput, "no frames to process");
  const std::size_t block = std::max<std::size_t>(1, options.block);
  const std::size_t count = (frames.size() + block - 1) / block;
  std::vector<TimeseriesEntry> out(count);
  parallel_for(count, [&](std::size_t i) {
    auto& e = out[i];
    e.frame_index = i * block;
    e.frames = std::min(block, frames.size() - e.frame_index);
    e.time_s = static_cast<double>(e.frame_index) * options.frame_period;
    try {
      const auto avg = average_interferograms(frames.subspan(e.frame_index, e.frames));
      const auto spectrum = interferogram_to_spectrum(avg, options.processing);
      e.result = retrieve(spectrum, bands, catalog, geometry);
    } catch (const Error& err) {
      e.flags.push_back({RetrievalFlag::FrameFailed, err.what()});
    }
  });
  return out;
}

}  // namespace spectrosat
