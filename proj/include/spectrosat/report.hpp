#pragma once

// JSON and CSV renderings of retrieval results, SNR reports and run manifests.

#include <filesystem>
#include <string>
#include <vector>

#include "spectrosat/config.hpp"
#include "spectrosat/io.hpp"
#include "spectrosat/retrieval.hpp"

#ifndef SPECTROSAT_VERSION
#define SPECTROSAT_VERSION "0.0.0"
#endif

namespace spectrosat {

inline json snr_to_json(const SnrReport& r) {
  return {{"signal_level", r.signal_level},
          {"noise_sigma", r.noise_sigma},
          {"snr", r.snr},
          {"signal_band_cm", {r.signal_band.lo, r.signal_band.hi}},
          {"noise_band_cm", {r.noise_band.lo, r.noise_band.hi}}};
}

inline json flags_to_json(const std::vector<FlagEntry>& flags) {
  json out = json::array();
  for (const auto& f : flags) out.push_back({{"flag", flag_name(f.flag)}, {"detail", f.detail}});
  return out;
}

inline json result_to_json(const RetrievalResult& r) {
  json bands = json::array();
  for (const auto& b : r.bands)
    bands.push_back({{"species", species_name(b.band.species)},
                     {"center_cm", b.band.nu_center},
                     {"line_depth", b.measurement.depth},
                     {"integrated_absorbance_cm", b.measurement.integrated_absorbance},
                     {"baseline_level", b.measurement.baseline.level},
                     {"baseline_slope", b.measurement.baseline.slope},
                     {"saturated", b.measurement.saturated},
                     {"integral_column_cm2", b.integral_column}});
  json gases = json::array();
  for (const auto& g : r.gases)
    gases.push_back({{"species", species_name(g.species)},
                     {"column_cm2", g.column},
                     {"vmr_ppm", g.vmr_ppm}});
  return {{"bands", bands},
          {"gases", gases},
          {"snr", r.snr ? snr_to_json(*r.snr) : json(nullptr)},
          {"flags", flags_to_json(r.flags)}};
}

inline json timeseries_entry_to_json(const TimeseriesEntry& e) {
  json j = e.result ? result_to_json(*e.result) : json::object();
  j["frame_index"] = e.frame_index;
  j["frames"] = e.frames;
  j["time_s"] = e.time_s;
  if (!e.result) j["flags"] = flags_to_json(e.flags);
  return j;
}

inline constexpr std::string_view kTimeseriesHeader = "frame_index,time_s,co2_ppm,ch4_ppm,o2_column,snr";

/// Aggregate CSV; fields without a value (failed block, gas not retrieved) are left empty.
inline std::string timeseries_to_csv(const std::vector<TimeseriesEntry>& entries) {
  std::string out(kTimeseriesHeader);
  out += '\n';
  auto field = [](const RetrievalResult* r, GasSpecies s, bool column) -> std::string {
    if (!r) return {};
    const auto* g = r->gas(s);
    if (!g) return {};
    return io::format_double(column ? g->column : g->vmr_ppm);
  };
  for (const auto& e : entries) {
    const RetrievalResult* r = e.result ? &*e.result : nullptr;
    out += std::to_string(e.frame_index) + "," + io::format_double(e.time_s) + "," +
           field(r, GasSpecies::CO2, false) + "," + field(r, GasSpecies::CH4, false) + "," +
           field(r, GasSpecies::O2, true) + "," +
           (r && r->snr ? io::format_double(r->snr->snr) : std::string()) + "\n";
  }
  return out;
}

/// Collects everything needed to reproduce an output directory.
class Manifest {
 public:
  /// Wall-clock timings are kept only when `record_timings` is set, so that
  /// repeated runs produce identical manifests by default.
  Manifest(std::string command, std::vector<std::string> arguments, bool record_timings = false)
      : command_(std::move(command)), arguments_(std::move(arguments)), timed_(record_timings) {}

  void set_config(const RunConfig& config) {
    config_ = config_to_json(config);
    defaults_ = config.defaults_applied;
  }
  void set_seed(std::optional<std::uint64_t> seed) { seed_ = seed; }
  void add_input(const std::filesystem::path& path) {
    inputs_.push_back({{"path", path.string()}, {"sha256", io::file_sha256(path)}});
  }
  /// Records an output file by name (relative to the output directory) and content.
  void add_output(const std::string& name, std::string_view content) {
    outputs_.push_back(
        {{"path", name}, {"bytes", content.size()}, {"sha256", io::sha256_hex(content)}});
  }
  void add_timing(const std::string& stage, double seconds) {
    if (timed_) timings_[stage] = seconds;
  }
  void set_extra(const std::string& key, json value) { extra_[key] = std::move(value); }

  json to_json() const {
    json j;
    j["tool"] = "spectrosat";
    j["version"] = SPECTROSAT_VERSION;
    j["command"] = command_;
    j["arguments"] = arguments_;
    if (!config_.is_null()) {
      j["config"] = config_;
      j["config_sha256"] = io::sha256_hex(config_.dump());
      j["defaults_applied"] = defaults_;
    }
    j["seed"] = seed_ ? json(*seed_) : json(nullptr);
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    if (!timings_.empty()) j["timings_s"] = timings_;
    for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
    return j;
  }

  void write(const std::filesystem::path& dir) const {
    io::atomic_write(dir / "manifest.json", to_json().dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  bool timed_ = false;
  json config_;
  std::vector<std::string> defaults_;
  std::optional<std::uint64_t> seed_;
  json inputs_ = json::array();
  json outputs_ = json::array();
  json timings_ = json::object();
  json extra_ = json::object();
};

}  // namespace spectrosat
