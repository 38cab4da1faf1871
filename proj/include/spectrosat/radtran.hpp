#pragma once

// Line-by-line optical depth, two-way reflected-sunlight transmittance and
// at-aperture radiance.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spectrosat/error.hpp"
#include "spectrosat/linelist.hpp"
#include "spectrosat/spectrum.hpp"
#include "spectrosat/voigt.hpp"

namespace spectrosat {

namespace phys {
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kLightSpeed = 299792458.0;     // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kAtomicMass = 1.66053906660e-27;  // kg
inline constexpr double kAtmosphere = 101325.0;        // Pa
inline constexpr double kReferenceTemperature = 296.0;  // K, catalog intensities
inline constexpr double kSunTemperature = 5772.0;       // K
inline constexpr double kSunSolidAngle = 6.794e-5;      // sr, seen from 1 au
}  // namespace phys

/// Line wings are evaluated out to this distance from the (shifted) centre.
inline constexpr double kLineCutoff = 25.0;  // cm^-1

struct AtmosphereLayer {
  double pressure = 1.0;       // atm
  double temperature = 296.0;  // K
  double thickness = 1.0;      // km
  std::map<GasSpecies, double> vmr;  // mol/mol

  double vmr_of(GasSpecies s) const {
    auto it = vmr.find(s);
    return it == vmr.end() ? 0.0 : it->second;
  }
  /// Air number density, molecules/cm^3.
  double air_density() const {
    return pressure * phys::kAtmosphere / (phys::kBoltzmann * temperature) * 1e-6;
  }
};

struct AtmosphereColumn {
  std::vector<AtmosphereLayer> layers;

  void validate() const {
    if (layers.empty()) fail(ErrorCode::InvalidArgument, "atmosphere has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      const std::string where = "layer " + std::to_string(i) + ": ";
      if (!(l.thickness > 0.0)) fail(ErrorCode::InvalidArgument, where + "thickness must be > 0");
      if (!(l.pressure > 0.0)) fail(ErrorCode::InvalidArgument, where + "pressure must be > 0");
      if (!(l.temperature > 150.0 && l.temperature < 350.0))
        fail(ErrorCode::InvalidArgument, where + "temperature outside (150, 350) K");
      for (auto [s, v] : l.vmr)
        if (!(v >= 0.0 && v <= 1.0))
          fail(ErrorCode::InvalidArgument,
               where + "vmr of " + std::string(species_name(s)) + " outside [0, 1]");
    }
  }

  /// Vertical column of one species, molecules/cm^2.
  double column(GasSpecies s) const {
    double total = 0.0;
    for (const auto& l : layers) total += l.vmr_of(s) * l.air_density() * l.thickness * 1e5;
    return total;
  }

  void set_vmr(GasSpecies s, double v) {
    for (auto& l : layers) l.vmr[s] = v;
  }
};

struct AtmosphereProfile {
  std::size_t layer_count = 20;
  double layer_thickness = 1.0;     // km
  double surface_pressure = 1.0;    // atm
  double scale_height = 8.0;        // km
  double temperature = 296.0;       // K
};

inline std::map<GasSpecies, double> default_vmr() {
  return {{GasSpecies::O2, kO2DryAirFraction}, {GasSpecies::CO2, 420e-6}, {GasSpecies::CH4, 1.9e-6}};
}

/// Isothermal exponential atmosphere; each layer takes the pressure at its mid-height.
inline AtmosphereColumn layered_atmosphere(const AtmosphereProfile& profile,
                                           const std::map<GasSpecies, double>& vmr) {
  AtmosphereColumn column;
  for (std::size_t i = 0; i < profile.layer_count; ++i) {
    const double z_mid = (static_cast<double>(i) + 0.5) * profile.layer_thickness;
    AtmosphereLayer layer;
    layer.pressure = profile.surface_pressure * std::exp(-z_mid / profile.scale_height);
    layer.temperature = profile.temperature;
    layer.thickness = profile.layer_thickness;
    layer.vmr = vmr;
    column.layers.push_back(std::move(layer));
  }
  column.validate();
  return column;
}

inline AtmosphereColumn default_atmosphere() { return layered_atmosphere({}, default_vmr()); }

struct ObservationGeometry {
  double altitude = 500.0;       // km
  double solar_zenith = 0.5;     // rad
  double view_zenith = 0.0;      // rad, 0 = nadir
  double surface_albedo = 0.2;
  double fov = 0.01;             // rad, full angle

  void validate() const {
    if (!(altitude > 0.0)) fail(ErrorCode::InvalidArgument, "altitude must be > 0");
    if (!(solar_zenith >= 0.0 && solar_zenith < std::numbers::pi / 2))
      fail(ErrorCode::InvalidArgument, "solar_zenith outside [0, pi/2)");
    if (!(view_zenith >= 0.0 && view_zenith < std::numbers::pi / 3))
      fail(ErrorCode::InvalidArgument, "view_zenith outside [0, pi/3)");
    if (!(surface_albedo >= 0.0 && surface_albedo <= 1.0))
      fail(ErrorCode::InvalidArgument, "surface_albedo outside [0, 1]");
    if (!(fov > 0.0 && fov < 0.1)) fail(ErrorCode::InvalidArgument, "fov outside (0, 0.1)");
  }

  /// Two-way geometric air-mass factor, sun -> surface -> satellite.
  double air_mass_factor() const { return 1.0 / std::cos(solar_zenith) + 1.0 / std::cos(view_zenith); }
};

/// Doppler (Gaussian) half width at half maximum, cm^-1.
inline double doppler_hwhm(double nu0, double temperature, double molar_mass_g) {
  const double m = molar_mass_g * phys::kAtomicMass;
  return nu0 / phys::kLightSpeed *
         std::sqrt(2.0 * std::numbers::ln2 * phys::kBoltzmann * temperature / m);
}

/// Pressure-broadened Lorentz half width, cm^-1.
inline double lorentz_hwhm(const SpectralLine& line, double pressure, double temperature,
                           double vmr) {
  const double t_scale = std::pow(phys::kReferenceTemperature / temperature, line.n_air);
  return t_scale * (line.gamma_air * pressure * (1.0 - vmr) + line.gamma_self * pressure * vmr);
}

/// Vertical optical depth of one species on a grid. Intensities stay at the
/// 296 K reference; only the widths follow layer pressure and temperature.
inline Spectrum optical_depth(const LineCatalog& catalog, const AtmosphereColumn& column,
                              GasSpecies species, const SpectralGrid& grid) {
  column.validate();
  const auto lines =
      query_band(catalog, species, grid.nu_start - kLineCutoff, grid.nu_end() + kLineCutoff);
  if (lines.empty())
    fail(ErrorCode::MissingLines, "no " + std::string(species_name(species)) + " lines in [" +
                                      std::to_string(grid.nu_start) + ", " +
                                      std::to_string(grid.nu_end()) + "] cm^-1");
  Spectrum tau(grid, SpectrumKind::OpticalDepth);
  const double sqrt_ln2 = std::sqrt(std::numbers::ln2);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (const auto& layer : column.layers) {
    const double vmr = layer.vmr_of(species);
    if (vmr == 0.0) continue;
    const double amount = vmr * layer.air_density() * layer.thickness * 1e5;  // molecules/cm^2
    for (const auto& line : lines) {
      const double center = line.nu0 + line.delta_air * layer.pressure;
      const double gamma_l = lorentz_hwhm(line, layer.pressure, layer.temperature, vmr);
      const double gamma_g = doppler_hwhm(line.nu0, layer.temperature, molar_mass(species));
      const double strength = line.intensity * amount;
      auto [first, last] = grid.index_range(center - kLineCutoff, center + kLineCutoff);
      if (gamma_g == 0.0 || gamma_l == 0.0) {
        for (std::size_t k = first; k < last; ++k)
          tau.values[k] += strength * voigt(grid.at(k) - center, gamma_l, gamma_g);
        continue;
      }
      const double x_scale = sqrt_ln2 / gamma_g;
      const double y = sqrt_ln2 * gamma_l / gamma_g;
      const double norm = strength * x_scale * inv_sqrt_pi;
      for (std::size_t k = first; k < last; ++k)
        tau.values[k] += norm * voigt_k((grid.at(k) - center) * x_scale, y);
    }
  }
  return tau;
}

/// Sum of optical_depth over several species.
inline Spectrum total_optical_depth(const LineCatalog& catalog, const AtmosphereColumn& column,
                                    std::span<const GasSpecies> species,
                                    const SpectralGrid& grid) {
  Spectrum total(grid, SpectrumKind::OpticalDepth);
  for (auto s : species) {
    auto tau = optical_depth(catalog, column, s, grid);
    for (std::size_t k = 0; k < grid.count; ++k) total.values[k] += tau.values[k];
  }
  return total;
}

/// T = exp(-AMF * tau) along the two-way path.
inline Spectrum transmittance(const Spectrum& optical_depth, const ObservationGeometry& geometry) {
  geometry.validate();
  const double amf = geometry.air_mass_factor();
  Spectrum out(optical_depth.grid, SpectrumKind::Transmittance);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double tau = optical_depth.values[k];
    if (!(tau >= 0.0))
      fail(ErrorCode::InvalidArgument, "negative optical depth at " + std::to_string(out.nu(k)));
    out.values[k] = std::exp(-amf * tau);
  }
  return out;
}

/// Planck spectral radiance, W m^-2 sr^-1 / cm^-1, at wavenumber nu (cm^-1).
inline double planck_radiance(double nu, double temperature) {
  const double nu_m = 100.0 * nu;
  const double c1 = 2.0 * phys::kPlanck * phys::kLightSpeed * phys::kLightSpeed;
  const double x = phys::kPlanck * phys::kLightSpeed * nu_m / (phys::kBoltzmann * temperature);
  return 100.0 * c1 * nu_m * nu_m * nu_m / std::expm1(x);
}

/// Top-of-atmosphere solar irradiance from a diluted blackbody, W m^-2 / cm^-1.
inline double solar_irradiance(double nu, double sun_temperature = phys::kSunTemperature) {
  return planck_radiance(nu, sun_temperature) * phys::kSunSolidAngle;
}

/// Sunlight reflected by a Lambertian surface and attenuated along the two-way path.
inline Spectrum at_aperture_radiance(const Spectrum& transmittance,
                                     const ObservationGeometry& geometry,
                                     double sun_temperature = phys::kSunTemperature) {
  if (transmittance.kind != SpectrumKind::Transmittance)
    fail(ErrorCode::InvalidArgument, "at_aperture_radiance expects a transmittance spectrum");
  geometry.validate();
  const double factor = std::cos(geometry.solar_zenith) * geometry.surface_albedo / std::numbers::pi;
  Spectrum out(transmittance.grid, SpectrumKind::Radiance);
  for (std::size_t k = 0; k < out.size(); ++k)
    out.values[k] =
        solar_irradiance(out.nu(k), sun_temperature) * factor * transmittance.values[k];
  return out;
}

/// Nadir footprint diameter (small-angle), km.
inline double footprint_diameter(double fov, double altitude) {
  if (fov < 0.0 || !(altitude > 0.0))
    fail(ErrorCode::InvalidArgument, "footprint needs fov >= 0 and altitude > 0");
  return fov * altitude;
}

}  // namespace spectrosat
