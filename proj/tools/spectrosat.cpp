// spectrosat: command-line driver for simulation, transformation and retrieval.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 I/O error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectrosat/spectrosat.hpp"

namespace fs = std::filesystem;
using namespace spectrosat;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kIoError = 2, kNumericalError = 3 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::UnknownKey:
    case ErrorCode::NyquistViolation:
    case ErrorCode::InvalidBand:
      return kConfigError;
    case ErrorCode::IoFailure:
    case ErrorCode::EmptyCatalog:
      return kIoError;
    default:
      return kNumericalError;
  }
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> frames;
  bool average = false;
  bool no_noise = false;
  bool record_timings = false;
  std::vector<std::string> inputs;
  std::string apodization;
  bool no_phase_correction = false;
  std::optional<std::size_t> zero_fill;
  std::optional<std::size_t> block;
  std::string catalog;
  std::string species;
  double nu_from = 0.0;
  double nu_to = 0.0;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Output directory plus the manifest entries of everything written into it.
class OutputTree {
 public:
  OutputTree(const std::string& dir, Manifest& manifest) : dir_(dir), manifest_(manifest) {
    if (dir.empty()) fail(ErrorCode::ValidationError, "--out DIR is required");
    io::ensure_directory(dir_);
  }

  void emit(const std::string& name, const std::string& content) {
    io::atomic_write(dir_ / name, content);
    manifest_.add_output(name, content);
  }
  void finish() const { manifest_.write(dir_); }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  Manifest& manifest_;
};

std::vector<std::string> describe(const Options& o, const std::string& command) {
  std::vector<std::string> args{command};
  if (!o.config.empty()) args.push_back("--config=" + o.config);
  if (o.seed) args.push_back("--seed=" + std::to_string(*o.seed));
  if (o.frames) args.push_back("--frames=" + std::to_string(*o.frames));
  if (o.average) args.push_back("--average");
  if (o.no_noise) args.push_back("--no-noise");
  if (!o.apodization.empty()) args.push_back("--apodization=" + o.apodization);
  if (o.no_phase_correction) args.push_back("--no-phase-correction");
  if (o.zero_fill) args.push_back("--zero-fill=" + std::to_string(*o.zero_fill));
  if (o.block) args.push_back("--block=" + std::to_string(*o.block));
  if (!o.catalog.empty()) args.push_back("--catalog=" + o.catalog);
  for (const auto& i : o.inputs) args.push_back(i);
  return args;
}

RunConfig resolve_config(const Options& o) {
  return o.config.empty() ? config_from_json(json::object()) : load_config(o.config);
}

LineCatalog read_catalog(const fs::path& path, Manifest& manifest) {
  std::istringstream in(io::read_file(path));
  auto loaded = load_catalog(in);
  for (const auto& d : loaded.diagnostics)
    std::cerr << path.string() << ":" << d.line_number << ": skipped: " << d.message << "\n";
  manifest.add_input(path);
  manifest.set_extra("catalog_lines", loaded.catalog.size());
  manifest.set_extra("catalog_skipped_records", loaded.diagnostics.size());
  return std::move(loaded.catalog);
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu.csv", i);
  return buf;
}

/// Directories expand to their frame_*.csv files in name order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("frame_", 0) == 0 && e.path().extension() == ".csv")
          found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) fail(ErrorCode::IoFailure, "no interferogram files found");
  return out;
}

std::vector<Interferogram> read_frames(const std::vector<fs::path>& files, Manifest& manifest) {
  std::vector<Interferogram> frames(files.size());
  parallel_for(files.size(), [&](std::size_t i) { frames[i] = io::read_interferogram(files[i]); });
  for (const auto& f : files) manifest.add_input(f);
  return frames;
}

ProcessingOptions processing_from(const Options& o, const RunConfig& config) {
  ProcessingOptions p = config.processing.options;
  if (!o.apodization.empty()) {
    auto k = apodization_from_name(o.apodization);
    if (!k) fail(ErrorCode::ValidationError, "--apodization: unknown window '" + o.apodization + "'");
    p.apodization = *k;
  }
  if (o.no_phase_correction) p.phase_correction = false;
  if (o.zero_fill) {
    if (*o.zero_fill < 1) fail(ErrorCode::ValidationError, "--zero-fill must be >= 1");
    p.zero_fill = *o.zero_fill;
  }
  return p;
}

json snr_or_reason(const Spectrum& s, WavenumberBand noise_band = kDefaultNoiseBand) {
  try {
    return snr_to_json(estimate_snr(s, kDefaultSignalBand, noise_band));
  } catch (const Error& e) {
    return {{"error", e.what()}};
  }
}

int cmd_simulate(const Options& o) {
  Stopwatch clock;
  RunConfig config = resolve_config(o);
  if (o.seed) config.noise.base_seed = *o.seed;
  if (o.no_noise) config.noise.enabled = false;
  if (o.frames) config.frames = *o.frames;
  if (config.frames < 1) fail(ErrorCode::ValidationError, "--frames must be >= 1");

  Manifest manifest("simulate", describe(o, "simulate"), o.record_timings);
  OutputTree out(o.out, manifest);
  if (!o.config.empty()) manifest.add_input(o.config);
  const auto catalog = read_catalog(config.catalog, manifest);
  const auto grid = channel_grid(config.instrument, config.channel, config.grid_step);
  const auto column = config.atmosphere();
  const std::optional<std::uint64_t> seed =
      config.noise.enabled ? std::optional(config.noise.base_seed) : std::nullopt;
  manifest.set_config(config);
  manifest.set_seed(seed);
  manifest.set_extra("channel", detector_name(config.channel));
  manifest.set_extra("frames", config.frames);

  std::vector<Interferogram> frames;
  SceneSpectra scene;
  if (config.ramp) {
    AtmosphereColumn start = column;
    start.set_vmr(config.ramp->species, config.ramp->start_vmr);
    scene = simulate_scene(catalog, start, config.geometry, grid);
    frames = simulate_ramp(catalog, column, config.geometry, grid, config.instrument,
                           config.channel, *config.ramp, config.frames, seed);
  } else {
    scene = simulate_scene(catalog, column, config.geometry, grid);
    if (seed)
      frames = scan_sequence(scene.radiance, config.instrument, config.channel, config.frames, *seed);
    else
      frames.assign(config.frames, synthesize_interferogram(scene.radiance, config.instrument,
                                                            config.channel, std::nullopt));
  }
  manifest.add_timing("simulate", clock.lap());

  out.emit("truth_transmittance.csv", io::spectrum_to_csv(scene.transmittance));
  std::string truth = "frame_index,time_s";
  for (auto s : kAllSpecies) truth += "," + std::string(species_name(s)) + "_ppm";
  truth += "\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    truth += std::to_string(i) + "," +
             io::format_double(static_cast<double>(i) * config.instrument.scan_period);
    for (auto s : kAllSpecies) {
      double v = column.layers.front().vmr_of(s);
      if (config.ramp && config.ramp->species == s) v = config.ramp->at(i, frames.size());
      truth += "," + io::format_double(v * 1e6);
    }
    truth += "\n";
  }
  out.emit("truth_series.csv", truth);
  for (std::size_t i = 0; i < frames.size(); ++i)
    out.emit(frame_name(i), io::interferogram_to_csv(frames[i]));
  manifest.add_timing("write", clock.lap());
  out.finish();
  std::cout << "wrote " << frames.size() << " interferogram(s) to " << out.dir().string() << "\n";
  return kOk;
}

int cmd_transform(const Options& o) {
  Stopwatch clock;
  const RunConfig config = resolve_config(o);
  const ProcessingOptions processing = processing_from(o, config);
  Manifest manifest("transform", describe(o, "transform"), o.record_timings);
  OutputTree out(o.out, manifest);
  if (!o.config.empty()) manifest.add_input(o.config);
  const auto files = expand_inputs(o.inputs);
  const auto frames = read_frames(files, manifest);
  manifest.add_timing("read", clock.lap());

  std::vector<Spectrum> spectra(frames.size());
  parallel_for(frames.size(),
               [&](std::size_t i) { spectra[i] = interferogram_to_spectrum(frames[i], processing); });

  json processing_json = {{"apodization", apodization_name(processing.apodization)},
                          {"phase_correction", processing.phase_correction},
                          {"zero_fill", processing.zero_fill},
                          {"phase_points", processing.phase_points}};
  manifest.set_extra("processing", processing_json);

  if (o.average) {
    const auto averaged = interferogram_to_spectrum(average_interferograms(frames), processing);
    json report = {{"frames", frames.size()}, {"averaged", snr_or_reason(averaged)}};
    json singles = json::array();
    for (const auto& s : spectra) singles.push_back(snr_or_reason(s));
    report["single_frames"] = singles;
    // The gain is measured against the wide out-of-band noise region, where the
    // sigma estimate is precise enough to resolve sqrt(N).
    const json wide = snr_or_reason(averaged, kOutOfBandNoise);
    double sum = 0.0;
    std::size_t valid = 0;
    for (const auto& s : spectra) {
      const json r = snr_or_reason(s, kOutOfBandNoise);
      if (r.contains("snr")) sum += r["snr"].get<double>(), ++valid;
    }
    if (valid > 0 && wide.contains("snr")) {
      const double mean = sum / static_cast<double>(valid);
      report["gain"] = {{"noise_band_cm", {kOutOfBandNoise.lo, kOutOfBandNoise.hi}},
                        {"averaged_snr", wide["snr"]},
                        {"single_frame_mean_snr", mean},
                        {"snr_gain", wide["snr"].get<double>() / mean},
                        {"expected_gain", std::sqrt(static_cast<double>(frames.size()))}};
    }
    out.emit("spectrum.csv", io::spectrum_to_csv(averaged));
    out.emit("snr.json", report.dump(2) + "\n");
  } else {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string stem = files[i].stem().string();
      out.emit("spectrum_" + stem + ".csv", io::spectrum_to_csv(spectra[i]));
      out.emit("snr_" + stem + ".json", snr_or_reason(spectra[i]).dump(2) + "\n");
    }
  }
  manifest.add_timing("transform", clock.lap());
  out.finish();
  std::cout << "transformed " << frames.size() << " frame(s) into " << out.dir().string() << "\n";
  return kOk;
}

int cmd_retrieve(const Options& o) {
  const RunConfig config = resolve_config(o);
  if (o.inputs.size() != 1) fail(ErrorCode::ValidationError, "retrieve takes exactly one spectrum file");
  Manifest manifest("retrieve", describe(o, "retrieve"), o.record_timings);
  OutputTree out(o.out, manifest);
  if (!o.config.empty()) manifest.add_input(o.config);
  manifest.set_config(config);
  const auto catalog = read_catalog(config.catalog, manifest);
  const auto spectrum = io::read_spectrum(o.inputs.front());
  manifest.add_input(o.inputs.front());
  const auto result = retrieve(spectrum, config.bands, catalog, config.geometry);
  out.emit("retrieval.json", result_to_json(result).dump(2) + "\n");
  out.finish();
  for (const auto& g : result.gases)
    std::cout << species_name(g.species) << " column " << io::format_double(g.column)
              << " cm^-2, " << io::format_double(g.vmr_ppm) << " ppm\n";
  return kOk;
}

int cmd_timeseries(const Options& o) {
  Stopwatch clock;
  const RunConfig config = resolve_config(o);
  TimeseriesOptions options = config.timeseries_options();
  options.processing = processing_from(o, config);
  if (o.block) options.block = *o.block;
  if (options.block < 1) fail(ErrorCode::ValidationError, "--block must be >= 1");
  Manifest manifest("timeseries", describe(o, "timeseries"), o.record_timings);
  OutputTree out(o.out, manifest);
  if (!o.config.empty()) manifest.add_input(o.config);
  manifest.set_config(config);
  const auto catalog = read_catalog(config.catalog, manifest);
  const auto frames = read_frames(expand_inputs(o.inputs), manifest);
  manifest.add_timing("read", clock.lap());
  const auto entries = process_timeseries(frames, options, config.bands, catalog, config.geometry);
  manifest.add_timing("process", clock.lap());

  std::string lines;
  std::size_t failed = 0;
  for (const auto& e : entries) {
    lines += timeseries_entry_to_json(e).dump() + "\n";
    failed += e.result ? 0 : 1;
  }
  out.emit("results.jsonl", lines);
  out.emit("timeseries.csv", timeseries_to_csv(entries));
  manifest.set_extra("block", options.block);
  manifest.set_extra("failed_blocks", failed);
  out.finish();
  std::cout << entries.size() << " retrieval(s), " << failed << " failed\n";
  return kOk;
}

int cmd_lines(const Options& o) {
  RunConfig config = resolve_config(o);
  if (!o.catalog.empty()) config.catalog = o.catalog;
  Manifest manifest("lines", describe(o, "lines"), o.record_timings);
  const auto catalog = read_catalog(config.catalog, manifest);
  std::vector<GasSpecies> species;
  if (o.species.empty()) {
    species.assign(kAllSpecies.begin(), kAllSpecies.end());
  } else {
    auto s = species_from_name(o.species);
    if (!s) fail(ErrorCode::ValidationError, "--species: unknown species '" + o.species + "'");
    species.push_back(*s);
  }
  std::vector<SpectralLine> lines;
  for (auto s : species) {
    auto found = query_band(catalog, s, o.nu_from, o.nu_to);
    lines.insert(lines.end(), found.begin(), found.end());
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const auto& a, const auto& b) { return a.nu0 < b.nu0; });
  std::string table = "molecule,isotopologue,nu0_cm,intensity,gamma_air,gamma_self,elower,n_air,delta_air\n";
  for (const auto& l : lines) {
    table += std::string(species_name(*species_from_code(l.molecule_id))) + "," +
             std::to_string(l.isotopologue) + "," + io::format_double(l.nu0) + "," +
             io::format_double(l.intensity) + "," + io::format_double(l.gamma_air) + "," +
             io::format_double(l.gamma_self) + "," + io::format_double(l.elower) + "," +
             io::format_double(l.n_air) + "," + io::format_double(l.delta_air) + "\n";
  }
  if (!o.out.empty()) {
    OutputTree out(o.out, manifest);
    out.emit("lines.csv", table);
    out.finish();
  }
  std::cout << table;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrosat: FTIR greenhouse-gas spectroradiometer simulation and retrieval"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--record-timings", o.record_timings, "Store wall-clock timings in the manifest");
  };
  auto processing = [&](CLI::App* sub) {
    sub->add_option("--apodization", o.apodization, "boxcar, hann or norton_beer_medium");
    sub->add_flag("--no-phase-correction", o.no_phase_correction, "Magnitude spectrum instead of Mertz correction");
    sub->add_option("--zero-fill", o.zero_fill, "Zero-fill factor");
  };

  auto* simulate = app.add_subcommand("simulate", "Forward-model a scene into interferogram frames");
  common(simulate);
  simulate->add_option("--seed", o.seed, "Base noise seed (overrides noise.base_seed)");
  simulate->add_option("--frames", o.frames, "Number of frames");
  simulate->add_flag("--no-noise", o.no_noise, "Noiseless frames");

  auto* transform = app.add_subcommand("transform", "Interferogram frames to spectra and SNR reports");
  common(transform);
  processing(transform);
  transform->add_option("inputs", o.inputs, "Frame CSV files or directories")->required();
  transform->add_flag("--average", o.average, "Average all frames before transforming");

  auto* retrieve_cmd = app.add_subcommand("retrieve", "Retrieve columns and mixing ratios from a spectrum");
  common(retrieve_cmd);
  retrieve_cmd->add_option("spectrum", o.inputs, "Spectrum CSV")->required();

  auto* timeseries = app.add_subcommand("timeseries", "Retrieve a time series from a frame directory");
  common(timeseries);
  processing(timeseries);
  timeseries->add_option("inputs", o.inputs, "Frame CSV files or directories")->required();
  timeseries->add_option("--block", o.block, "Frames averaged per retrieval");

  auto* lines = app.add_subcommand("lines", "List catalog lines in a band");
  common(lines);
  lines->add_option("--catalog", o.catalog, "HITRAN-format catalog (default: bundled fixture)");
  lines->add_option("--species", o.species, "O2, CO2 or CH4 (default: all)");
  lines->add_option("--from", o.nu_from, "Lower wavenumber, cm^-1")->required();
  lines->add_option("--to", o.nu_to, "Upper wavenumber, cm^-1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*transform) return cmd_transform(o);
    if (*retrieve_cmd) return cmd_retrieve(o);
    if (*timeseries) return cmd_timeseries(o);
    if (*lines) return cmd_lines(o);
  } catch (const Error& e) {
    std::cerr << "spectrosat: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "spectrosat: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "spectrosat: " << e.what() << "\n";
    return kNumericalError;
  }
  return kConfigError;
}
