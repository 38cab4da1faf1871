#pragma once

// Scene-level helpers shared by the CLI and the tests: forward simulation of a
// channel, and frame sequences with a linearly ramped gas.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "spectrosat/instrument.hpp"
#include "spectrosat/parallel.hpp"
#include "spectrosat/radtran.hpp"

namespace spectrosat {

inline constexpr double kDefaultGridStep = 0.01;  // cm^-1

/// Fine radiance grid over a channel bandpass, start aligned to a multiple of `step`.
inline SpectralGrid channel_grid(const InstrumentConfig& config, DetectorKind channel,
                                 double step = kDefaultGridStep) {
  const auto& det = config.channel(channel);
  const double lo = std::floor(det.nu_lo() / step) * step;
  return SpectralGrid::covering(lo, det.nu_hi(), step);
}

/// Species with a nonzero amount and at least one line reaching the grid.
inline std::vector<GasSpecies> active_species(const LineCatalog& catalog,
                                              const AtmosphereColumn& column,
                                              const SpectralGrid& grid) {
  std::vector<GasSpecies> out;
  for (auto s : kAllSpecies) {
    if (!(column.column(s) > 0.0)) continue;
    if (query_band(catalog, s, grid.nu_start - kLineCutoff, grid.nu_end() + kLineCutoff).empty())
      continue;
    out.push_back(s);
  }
  return out;
}

struct SceneSpectra {
  Spectrum optical_depth;
  Spectrum transmittance;
  Spectrum radiance;
};

inline SceneSpectra simulate_scene(const LineCatalog& catalog, const AtmosphereColumn& column,
                                   const ObservationGeometry& geometry, const SpectralGrid& grid) {
  const auto species = active_species(catalog, column, grid);
  SceneSpectra out;
  out.optical_depth = total_optical_depth(catalog, column, species, grid);
  out.transmittance = transmittance(out.optical_depth, geometry);
  out.radiance = at_aperture_radiance(out.transmittance, geometry);
  return out;
}

/// vmr of one gas moving linearly from start to end over a frame sequence.
struct GasRamp {
  GasSpecies species = GasSpecies::CO2;
  double start_vmr = 400e-6;
  double end_vmr = 450e-6;

  /// vmr of frame i out of n (frame 0 at start, frame n-1 at end).
  double at(std::size_t i, std::size_t n) const {
    if (n < 2) return start_vmr;
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    return start_vmr + (end_vmr - start_vmr) * t;
  }
};

/// Frames of a scene whose `ramp.species` changes from frame to frame.
///
/// The other gases are computed once. Each frame adds the interferogram of the
/// radiance change over the ramped gas's lines to the base interferogram, which
/// by linearity equals synthesising the full frame.
inline std::vector<Interferogram> simulate_ramp(const LineCatalog& catalog,
                                                const AtmosphereColumn& column,
                                                const ObservationGeometry& geometry,
                                                const SpectralGrid& grid,
                                                const InstrumentConfig& config,
                                                DetectorKind channel, const GasRamp& ramp,
                                                std::size_t frames,
                                                std::optional<std::uint64_t> base_seed) {
  if (frames < 1) fail(ErrorCode::InvalidArgument, "ramp needs at least one frame");
  if (!(ramp.start_vmr >= 0.0 && ramp.start_vmr <= 1.0 && ramp.end_vmr >= 0.0 &&
        ramp.end_vmr <= 1.0))
    fail(ErrorCode::InvalidArgument, "ramp vmr outside [0, 1]");
  AtmosphereColumn fixed = column;
  fixed.set_vmr(ramp.species, 0.0);
  const auto base = simulate_scene(catalog, fixed, geometry, grid);
  const auto base_samples = noiseless_samples(base.radiance, config, channel);

  const auto lines = query_band(catalog, ramp.species, grid.nu_start - kLineCutoff,
                                grid.nu_end() + kLineCutoff);
  if (lines.empty())
    fail(ErrorCode::MissingLines,
         "no " + std::string(species_name(ramp.species)) + " lines reach the channel grid");
  auto [first, last] = grid.index_range(lines.front().nu0 - kLineCutoff - 1.0,
                                        lines.back().nu0 + kLineCutoff + 1.0);
  if (last - first < 2) fail(ErrorCode::MissingLines, "ramped gas lines fall outside the grid");
  const SpectralGrid sub(grid.at(first), grid.nu_step, last - first);

  const double amf = geometry.air_mass_factor();
  const double sigma = noise_sigma(config, channel);
  std::vector<Interferogram> out(frames);
  parallel_for(frames, [&](std::size_t i) {
    AtmosphereColumn frame_column = column;
    frame_column.set_vmr(ramp.species, ramp.at(i, frames));
    const auto tau = optical_depth(catalog, frame_column, ramp.species, sub);
    Spectrum delta(sub, SpectrumKind::Radiance);
    for (std::size_t k = 0; k < sub.count; ++k)
      delta.values[k] = base.radiance.values[first + k] * std::expm1(-amf * tau.values[k]);
    auto samples = interferogram_contribution(delta, config, channel);
    for (std::size_t k = 0; k < samples.size(); ++k) samples[k] += base_samples[k];

    auto& f = out[i];
    f.samples = std::move(samples);
    f.opd_step = config.opd_step_cm();
    f.lambda_ref = config.lambda_ref;
    f.channel = channel;
    if (base_seed) {
      f.seed = derive_seed(*base_seed, i);
      add_noise(f.samples, sigma, *f.seed);
    }
  });
  return out;
}

}  // namespace spectrosat
