#pragma once

// JSON run configuration. Unknown keys are rejected, every omitted field takes
// its default and is listed in `defaults_applied`, and cross-field invariants
// are checked after loading.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "spectrosat/dsp.hpp"
#include "spectrosat/error.hpp"
#include "spectrosat/instrument.hpp"
#include "spectrosat/io.hpp"
#include "spectrosat/pipeline.hpp"
#include "spectrosat/radtran.hpp"
#include "spectrosat/retrieval.hpp"

#ifndef SPECTROSAT_DATA_DIR
#define SPECTROSAT_DATA_DIR "data"
#endif

namespace spectrosat {

using json = nlohmann::json;

struct NoiseSettings {
  bool enabled = true;
  std::uint64_t base_seed = 0;
};

struct ProcessingSettings {
  ProcessingOptions options;
  std::size_t averaging_block = 1;
};

struct RunConfig {
  InstrumentConfig instrument;
  DetectorKind channel = DetectorKind::InGaAs;  // channel simulated and processed
  AtmosphereProfile profile;
  std::map<GasSpecies, double> vmr = default_vmr();
  std::optional<GasRamp> ramp;
  double grid_step = kDefaultGridStep;
  ObservationGeometry geometry;
  std::vector<RetrievalBand> bands = default_bands();
  NoiseSettings noise;
  ProcessingSettings processing;
  std::filesystem::path catalog = std::filesystem::path(SPECTROSAT_DATA_DIR) / "fixture_lines.par";
  std::size_t frames = 1;

  std::vector<std::string> defaults_applied;

  AtmosphereColumn atmosphere() const { return layered_atmosphere(profile, vmr); }
  TimeseriesOptions timeseries_options() const {
    return {processing.options, processing.averaging_block, instrument.scan_period};
  }
};

namespace config_detail {

/// Reads one JSON object, tracking consumed keys and applied defaults.
class ObjectReader {
 public:
  ObjectReader(const json* j, std::string path, std::vector<std::string>& defaults)
      : j_(j), path_(std::move(path)), defaults_(defaults) {
    if (j_ && !j_->is_object()) fail(ErrorCode::ValidationError, path_ + ": expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    if (!j_) return nullptr;
    auto it = j_->find(key);
    if (it == j_->end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return defaulted(key, fallback);
    if (!v->is_number()) fail(ErrorCode::ValidationError, field(key) + ": expected a number");
    return v->get<double>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return defaulted(key, fallback);
    if (!v->is_number_unsigned())
      fail(ErrorCode::ValidationError, field(key) + ": expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return defaulted(key, fallback);
    if (!v->is_boolean()) fail(ErrorCode::ValidationError, field(key) + ": expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return defaulted(key, fallback);
    if (!v->is_string()) fail(ErrorCode::ValidationError, field(key) + ": expected a string");
    return v->get<std::string>();
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) fail(ErrorCode::UnknownKey, field(it.key()));
  }

  void note_default(const std::string& key) { defaults_.push_back(field(key)); }

 private:
  template <typename T>
  T defaulted(const std::string& key, T fallback) {
    note_default(key);
    return fallback;
  }

  const json* j_;
  std::string path_;
  std::vector<std::string>& defaults_;
  std::set<std::string> used_;
};

inline GasSpecies species_field(const std::string& name, const std::string& where) {
  auto s = species_from_name(name);
  if (!s) fail(ErrorCode::ValidationError, where + ": unknown species '" + name + "'");
  return *s;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline DetectorSpec read_channel(const json& j, const std::string& path,
                                 std::vector<std::string>& defaults) {
  ObjectReader r(&j, path, defaults);
  const std::string name = r.string("name", "InGaAs");
  const auto kind = detector_from_name(name);
  if (!kind) fail(ErrorCode::ValidationError, r.field("name") + ": unknown channel '" + name + "'");
  DetectorSpec d = *kind == DetectorKind::InGaAs ? default_ingaas() : default_si();
  d.band_lo = r.number("band_lo_um", d.band_lo);
  d.band_hi = r.number("band_hi_um", d.band_hi);
  d.active_side = r.number("active_side_mm", d.active_side);
  const json* dstar = r.find("d_star");
  const json* nep = r.find("nep");
  if (dstar || nep) {
    d.d_star.reset();
    d.nep.reset();
    for (auto [key, value, slot] : {std::tuple{"d_star", dstar, &d.d_star}, std::tuple{"nep", nep, &d.nep}}) {
      if (!value || value->is_null()) continue;
      if (!value->is_number()) fail(ErrorCode::ValidationError, r.field(key) + ": expected a number");
      *slot = value->get<double>();
    }
  } else {
    r.note_default("d_star");
    r.note_default("nep");
  }
  r.finish();
  try {
    d.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ValidationError, path + ": " + e.what());
  }
  return d;
}

}  // namespace config_detail

/// Builds a RunConfig from parsed JSON. `base_dir` resolves a relative catalog path.
inline RunConfig config_from_json(const json& root, const std::filesystem::path& base_dir = {}) {
  using config_detail::ObjectReader;
  RunConfig c;
  auto& d = c.defaults_applied;
  ObjectReader top(&root, "", d);

  {
    const json* sec = top.find("instrument");
    if (!sec) d.push_back("instrument");
    ObjectReader r(sec, "instrument", d);
    auto& in = c.instrument;
    in.aperture_diameter = r.number("aperture_mm", in.aperture_diameter);
    in.fov = r.number("fov_rad", in.fov);
    in.input_magnification = r.number("input_magnification", in.input_magnification);
    in.lambda_ref = r.number("lambda_ref_nm", in.lambda_ref);
    in.opd_step = r.number("opd_step_nm", in.lambda_ref / 4.0);
    in.n_samples = r.unsigned_integer("n_samples", in.n_samples);
    in.scan_period = r.number("scan_period_s", in.scan_period);
    in.stroke = r.number("stroke_mm", in.stroke);
    in.optical_efficiency = r.number("optical_efficiency", in.optical_efficiency);
    if (const json* ch = r.find("channels")) {
      if (!ch->is_array() || ch->empty())
        fail(ErrorCode::ValidationError, "instrument.channels: expected a non-empty array");
      in.channels.clear();
      for (std::size_t i = 0; i < ch->size(); ++i)
        in.channels.push_back(config_detail::read_channel(
            (*ch)[i], "instrument.channels[" + std::to_string(i) + "]", d));
    } else {
      r.note_default("channels");
    }
    const std::string channel = r.string("active_channel", "InGaAs");
    auto kind = detector_from_name(channel);
    if (!kind)
      fail(ErrorCode::ValidationError, "instrument.active_channel: unknown channel '" + channel + "'");
    c.channel = *kind;
    r.finish();
  }

  {
    const json* sec = top.find("atmosphere");
    if (!sec) d.push_back("atmosphere");
    ObjectReader r(sec, "atmosphere", d);
    if (const json* v = r.find("vmr_ppm")) {
      ObjectReader vr(v, "atmosphere.vmr_ppm", d);
      for (auto s : kAllSpecies) {
        const std::string key(species_name(s));
        c.vmr[s] = vr.number(key, default_vmr().at(s) * 1e6) * 1e-6;
      }
      vr.finish();
    } else {
      r.note_default("vmr_ppm");
    }
    {
      const json* p = r.find("profile");
      if (!p) r.note_default("profile");
      ObjectReader pr(p, "atmosphere.profile", d);
      auto& prof = c.profile;
      prof.layer_count = pr.unsigned_integer("layers", prof.layer_count);
      prof.layer_thickness = pr.number("layer_thickness_km", prof.layer_thickness);
      prof.surface_pressure = pr.number("surface_pressure_atm", prof.surface_pressure);
      prof.scale_height = pr.number("scale_height_km", prof.scale_height);
      prof.temperature = pr.number("temperature_k", prof.temperature);
      pr.finish();
    }
    if (const json* rp = r.find("ramp"); rp && !rp->is_null()) {
      ObjectReader rr(rp, "atmosphere.ramp", d);
      GasRamp ramp;
      ramp.species = config_detail::species_field(rr.string("species", "CO2"), "atmosphere.ramp.species");
      ramp.start_vmr = rr.number("start_ppm", 400.0) * 1e-6;
      ramp.end_vmr = rr.number("end_ppm", 450.0) * 1e-6;
      rr.finish();
      c.ramp = ramp;
    }
    c.grid_step = r.number("grid_step_cm", c.grid_step);
    r.finish();
  }

  {
    const json* sec = top.find("geometry");
    if (!sec) d.push_back("geometry");
    ObjectReader r(sec, "geometry", d);
    auto& g = c.geometry;
    g.altitude = r.number("altitude_km", g.altitude);
    g.solar_zenith = r.number("solar_zenith_rad", g.solar_zenith);
    g.view_zenith = r.number("view_zenith_rad", g.view_zenith);
    g.surface_albedo = r.number("surface_albedo", g.surface_albedo);
    g.fov = c.instrument.fov;
    r.finish();
  }

  if (const json* sec = top.find("bands")) {
    if (!sec->is_array() || sec->empty())
      fail(ErrorCode::ValidationError, "bands: expected a non-empty array");
    c.bands.clear();
    for (std::size_t i = 0; i < sec->size(); ++i) {
      const std::string path = "bands[" + std::to_string(i) + "]";
      ObjectReader r(&(*sec)[i], path, d);
      RetrievalBand b;
      b.species = config_detail::species_field(r.string("species", "CO2"), path + ".species");
      b.nu_center = r.number("center_cm", b.nu_center);
      b.window_halfwidth = r.number("halfwidth_cm", b.window_halfwidth);
      b.baseline_margin = r.number("baseline_margin_cm", b.baseline_margin);
      r.finish();
      c.bands.push_back(b);
    }
  } else {
    d.push_back("bands");
  }

  {
    const json* sec = top.find("noise");
    if (!sec) d.push_back("noise");
    ObjectReader r(sec, "noise", d);
    c.noise.enabled = r.boolean("enabled", c.noise.enabled);
    c.noise.base_seed = r.unsigned_integer("base_seed", c.noise.base_seed);
    r.finish();
  }

  {
    const json* sec = top.find("processing");
    if (!sec) d.push_back("processing");
    ObjectReader r(sec, "processing", d);
    auto& p = c.processing;
    const std::string apod =
        r.string("apodization", std::string(apodization_name(p.options.apodization)));
    auto kind = apodization_from_name(apod);
    if (!kind) fail(ErrorCode::ValidationError, "processing.apodization: unknown window '" + apod + "'");
    p.options.apodization = *kind;
    p.options.phase_correction = r.boolean("phase_correction", p.options.phase_correction);
    p.options.zero_fill = r.unsigned_integer("zero_fill", p.options.zero_fill);
    p.options.phase_points = r.unsigned_integer("phase_points", p.options.phase_points);
    p.averaging_block = r.unsigned_integer("averaging_block", p.averaging_block);
    r.finish();
  }

  if (const json* cat = top.find("catalog")) {
    if (!cat->is_string()) fail(ErrorCode::ValidationError, "catalog: expected a path string");
    std::filesystem::path p = cat->get<std::string>();
    c.catalog = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else {
    d.push_back("catalog");
  }
  c.frames = top.unsigned_integer("frames", c.frames);
  top.finish();

  // cross-field invariants
  const auto invalid = [](const std::string& path, const std::string& msg) {
    fail(ErrorCode::ValidationError, path + ": " + msg);
  };
  if (c.frames < 1) invalid("frames", "must be >= 1");
  if (c.processing.options.zero_fill < 1) invalid("processing.zero_fill", "must be >= 1");
  if (c.processing.averaging_block < 1) invalid("processing.averaging_block", "must be >= 1");
  if (!(c.grid_step > 0.0 && c.grid_step <= 0.1))
    invalid("atmosphere.grid_step_cm", "must lie in (0, 0.1]");
  try {
    c.instrument.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NyquistViolation) {
      for (std::size_t i = 0; i < c.instrument.channels.size(); ++i)
        if (c.instrument.channels[i].nu_hi() >= c.instrument.nyquist())
          invalid("instrument.channels[" + std::to_string(i) + "]", e.what());
    }
    invalid("instrument", e.what());
  }
  bool channel_found = false;
  for (const auto& ch : c.instrument.channels) channel_found |= ch.name == c.channel;
  if (!channel_found)
    invalid("instrument.active_channel", std::string(detector_name(c.channel)) + " is not configured");
  try {
    c.atmosphere();
  } catch (const Error& e) {
    invalid("atmosphere", e.what());
  }
  try {
    c.geometry.validate();
  } catch (const Error& e) {
    invalid("geometry", e.what());
  }
  const auto& det = c.instrument.channel(c.channel);
  for (std::size_t i = 0; i < c.bands.size(); ++i) {
    const auto& b = c.bands[i];
    const std::string path = "bands[" + std::to_string(i) + "]";
    try {
      b.validate();
    } catch (const Error& e) {
      invalid(path, e.what());
    }
    if (b.outer_lo() < det.nu_lo() || b.outer_hi() > det.nu_hi())
      invalid(path, "window with baseline strips [" + io::format_double(b.outer_lo()) + ", " +
                        io::format_double(b.outer_hi()) + "] cm^-1 is outside the " +
                        std::string(detector_name(det.name)) + " band");
  }
  if (c.ramp && c.vmr.count(c.ramp->species) == 0) c.vmr[c.ramp->species] = c.ramp->start_vmr;
  return c;
}

/// Parses JSON text; syntax errors carry line and column.
inline RunConfig config_from_text(const std::string& text, const std::string& source,
                                  const std::filesystem::path& base_dir = {}) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = config_detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                    ": " + e.what());
  }
  if (!root.is_object()) fail(ErrorCode::ParseError, source + ": top level must be a JSON object");
  return config_from_json(root, base_dir);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return config_from_text(io::read_file(path), path.string(), path.parent_path());
}

namespace config_detail {

/// ppm value that the reader maps back to exactly `vmr`, in as few digits as possible.
inline double ppm_of(double vmr) {
  const double direct = vmr * 1e6;
  for (int digits = 6; digits <= 17; ++digits) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, direct);
    const double candidate = std::strtod(buf, nullptr);
    if (candidate * 1e-6 == vmr) return candidate;
  }
  return direct;
}

}  // namespace config_detail

/// Fully resolved configuration; loading it back yields the same RunConfig.
inline json config_to_json(const RunConfig& c) {
  using config_detail::ppm_of;
  json j;
  const auto& in = c.instrument;
  json channels = json::array();
  for (const auto& ch : in.channels) {
    json o{{"name", detector_name(ch.name)},
           {"band_lo_um", ch.band_lo},
           {"band_hi_um", ch.band_hi},
           {"active_side_mm", ch.active_side}};
    o["d_star"] = ch.d_star ? json(*ch.d_star) : json(nullptr);
    o["nep"] = ch.nep ? json(*ch.nep) : json(nullptr);
    channels.push_back(o);
  }
  j["instrument"] = {{"aperture_mm", in.aperture_diameter},
                     {"fov_rad", in.fov},
                     {"input_magnification", in.input_magnification},
                     {"lambda_ref_nm", in.lambda_ref},
                     {"opd_step_nm", in.opd_step},
                     {"n_samples", in.n_samples},
                     {"scan_period_s", in.scan_period},
                     {"stroke_mm", in.stroke},
                     {"optical_efficiency", in.optical_efficiency},
                     {"channels", channels},
                     {"active_channel", detector_name(c.channel)}};
  json vmr = json::object();
  for (auto [s, v] : c.vmr) vmr[std::string(species_name(s))] = ppm_of(v);
  j["atmosphere"] = {{"vmr_ppm", vmr},
                     {"profile",
                      {{"layers", c.profile.layer_count},
                       {"layer_thickness_km", c.profile.layer_thickness},
                       {"surface_pressure_atm", c.profile.surface_pressure},
                       {"scale_height_km", c.profile.scale_height},
                       {"temperature_k", c.profile.temperature}}},
                     {"grid_step_cm", c.grid_step}};
  j["atmosphere"]["ramp"] = c.ramp ? json{{"species", species_name(c.ramp->species)},
                                          {"start_ppm", ppm_of(c.ramp->start_vmr)},
                                          {"end_ppm", ppm_of(c.ramp->end_vmr)}}
                                   : json(nullptr);
  j["geometry"] = {{"altitude_km", c.geometry.altitude},
                   {"solar_zenith_rad", c.geometry.solar_zenith},
                   {"view_zenith_rad", c.geometry.view_zenith},
                   {"surface_albedo", c.geometry.surface_albedo}};
  json bands = json::array();
  for (const auto& b : c.bands)
    bands.push_back({{"species", species_name(b.species)},
                     {"center_cm", b.nu_center},
                     {"halfwidth_cm", b.window_halfwidth},
                     {"baseline_margin_cm", b.baseline_margin}});
  j["bands"] = bands;
  j["noise"] = {{"enabled", c.noise.enabled}, {"base_seed", c.noise.base_seed}};
  j["processing"] = {{"apodization", apodization_name(c.processing.options.apodization)},
                     {"phase_correction", c.processing.options.phase_correction},
                     {"zero_fill", c.processing.options.zero_fill},
                     {"phase_points", c.processing.options.phase_points},
                     {"averaging_block", c.processing.averaging_block}};
  j["catalog"] = c.catalog.string();
  j["frames"] = c.frames;
  return j;
}

}  // namespace spectrosat
