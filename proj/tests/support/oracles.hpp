#pragma once

// Independent reference computations and fixtures shared by the test binaries.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "spectrosat/spectrosat.hpp"

namespace oracle {

using namespace spectrosat;
namespace fs = std::filesystem;

// ---- line records -------------------------------------------------------

struct RecordFields {
  int molecule = 2;
  int isotopologue = 1;
  double nu = 6350.0;
  double intensity = 1.0e-23;
  double einstein_a = 1.0e-3;
  double gamma_air = 0.07;
  double gamma_self = 0.09;
  double elower = 100.0;
  double n_air = 0.75;
  double delta_air = -0.005;
};

// Right-aligns `text` in `width` columns, dropping a redundant leading zero
// ("0.0700" -> ".0700") the way catalog files do when a field is tight.
inline std::string fit(std::string text, std::size_t width) {
  if (text.size() > width) {
    const auto zero = text.find("0.");
    if (zero != std::string::npos && (zero == 0 || text[zero - 1] == '-')) text.erase(zero, 1);
  }
  if (text.size() > width) throw std::runtime_error("field overflow: " + text);
  return std::string(width - text.size(), ' ') + text;
}

inline std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

/// A full 160-column record with filler in the ignored trailing fields.
inline std::string par_record(const RecordFields& f) {
  std::string r;
  r += fit(std::to_string(f.molecule), 2);
  r += std::to_string(f.isotopologue).substr(0, 1);
  r += fit(format("%.6f", f.nu), 12);
  r += fit(format("%.3E", f.intensity), 10);
  r += fit(format("%.3E", f.einstein_a), 10);
  r += fit(format("%.4f", f.gamma_air), 5);
  r += fit(format("%.3f", f.gamma_self), 5);
  r += fit(format("%.4f", f.elower), 10);
  r += fit(format("%.2f", f.n_air), 4);
  r += fit(format("%.6f", f.delta_air), 8);
  r += std::string(kParRecordLength - r.size(), 'x');
  return r;
}

// ---- generators ---------------------------------------------------------

/// Seeded value source for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }
  GasSpecies species() { return kAllSpecies[index(0, kAllSpecies.size() - 1)]; }

  SpectralLine line(GasSpecies s, double nu_lo, double nu_hi) {
    SpectralLine l;
    l.molecule_id = molecule_code(s);
    l.isotopologue = static_cast<int>(index(1, 3));
    l.nu0 = uniform(nu_lo, nu_hi);
    l.intensity = log_uniform(1e-26, 1e-22);
    l.gamma_air = uniform(0.02, 0.1);
    l.gamma_self = uniform(0.02, 0.12);
    l.elower = uniform(0.0, 2000.0);
    l.n_air = uniform(0.5, 0.8);
    l.delta_air = uniform(-0.01, 0.005);
    return l;
  }

  RecordFields record() {
    RecordFields f;
    f.molecule = molecule_code(species());
    f.isotopologue = static_cast<int>(index(1, 9));
    f.nu = uniform(1.0, 99999.0);
    f.intensity = log_uniform(1e-30, 1e-18);
    f.einstein_a = log_uniform(1e-6, 10.0);
    f.gamma_air = uniform(0.0, 0.2);
    f.gamma_self = uniform(0.0, 0.5);
    f.elower = uniform(0.0, 9999.0);
    f.n_air = uniform(0.0, 0.99);
    f.delta_air = uniform(-0.05, 0.05);
    return f;
  }

  AtmosphereColumn column(std::size_t max_layers, double vmr_scale) {
    AtmosphereColumn c;
    const std::size_t n = index(1, max_layers);
    for (std::size_t i = 0; i < n; ++i) {
      AtmosphereLayer l;
      l.pressure = uniform(0.05, 1.2);
      l.temperature = uniform(200.0, 320.0);
      l.thickness = uniform(0.2, 3.0);
      for (auto s : kAllSpecies) l.vmr[s] = uniform(0.0, vmr_scale);
      c.layers.push_back(l);
    }
    return c;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ---- physics oracles ----------------------------------------------------

/// Planck radiance (W m^-2 sr^-1 / cm^-1) evaluated in 50-digit decimal arithmetic.
inline double planck_high_precision(double nu_cm, double temperature) {
  using big = boost::multiprecision::cpp_dec_float_50;
  const big h("6.62607015e-34"), c("299792458"), k("1.380649e-23");
  const big nu = big(nu_cm) * 100;
  const big x = h * c * nu / (k * big(temperature));
  const big value = 2 * h * c * c * nu * nu * nu / (exp(x) - 1) * 100;
  return value.convert_to<double>();
}

/// Gaussian (HWHM gg) convolved with Lorentzian (HWHM gl), by adaptive quadrature.
inline double voigt_convolution(double delta, double gl, double gg) {
  const double ln2 = std::numbers::ln2;
  const double gauss_norm = std::sqrt(ln2 / std::numbers::pi) / gg;
  auto lorentz = [gl](double d) { return gl / (std::numbers::pi * (d * d + gl * gl)); };
  auto integrand = [&](double t) {
    return gauss_norm * std::exp(-ln2 * t * t / (gg * gg)) * (lorentz(delta - t) + lorentz(delta + t));
  };
  // Split at the Lorentz peak so both rules cluster their nodes on it.
  boost::math::quadrature::exp_sinh<double> tail;
  const double right = tail.integrate(integrand, delta, std::numeric_limits<double>::infinity(), 1e-14);
  if (delta <= 0.0) return right;
  boost::math::quadrature::tanh_sinh<double> core;
  return core.integrate(integrand, 0.0, delta, 1e-14) + right;
}

/// I_k = sum_j P_j (1 + cos(2 pi nu_j x_k)) / 2 evaluated term by term in long double.
inline std::vector<double> brute_samples(const Spectrum& radiance, const InstrumentConfig& config,
                                         DetectorKind channel) {
  const auto& det = config.channel(channel);
  const auto [first, last] = radiance.grid.index_range(det.nu_lo(), det.nu_hi());
  const long double scale = config.etendue() * config.throughput() * radiance.grid.nu_step;
  const long double dx = config.opd_step_cm();
  std::vector<double> out(config.n_samples);
  for (std::size_t k = 0; k < out.size(); ++k) {
    long double sum = 0.0L;
    for (std::size_t j = first; j < last; ++j) {
      const long double nu = radiance.grid.at(j);
      sum += radiance.values[j] * scale * 0.5L *
             (1.0L + std::cos(2.0L * std::numbers::pi_v<long double> * nu * dx * k));
    }
    out[k] = static_cast<double>(sum);
  }
  return out;
}

/// 8 dx sum_k w_k y_k exp(-2 pi i nu x_k) at one wavenumber, with the mean
/// removed and the ZPD sample half-weighted.
inline std::complex<double> direct_transform(const Interferogram& frame, ApodizationKind window,
                                             double nu) {
  const std::size_t n = frame.size();
  long double mean = 0.0L;
  for (double s : frame.samples) mean += s;
  mean /= n;
  std::complex<long double> sum = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    long double y = (frame.samples[k] - mean) * apodization_window(window, double(k) / double(n));
    if (k == 0) y *= 0.5L;
    const long double phase = -2.0L * std::numbers::pi_v<long double> * nu * frame.opd_step * k;
    sum += y * std::complex<long double>(std::cos(phase), std::sin(phase));
  }
  sum *= 8.0L * frame.opd_step;
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

inline double direct_spectrum(const Interferogram& frame, ApodizationKind window, double nu) {
  return std::abs(direct_transform(frame, window, nu));
}

// ---- fixtures -----------------------------------------------------------

inline fs::path fixture_path() { return fs::path(SPECTROSAT_DATA_DIR) / "fixture_lines.par"; }

inline const LineCatalog& fixture_catalog() {
  static const LineCatalog catalog = [] {
    std::ifstream in(fixture_path());
    return load_catalog(in).catalog;
  }();
  return catalog;
}

/// Default InGaAs scene on the default fine grid.
inline const SceneSpectra& default_scene() {
  static const SceneSpectra scene = [] {
    const InstrumentConfig config;
    return simulate_scene(fixture_catalog(), default_atmosphere(), ObservationGeometry{},
                          channel_grid(config, DetectorKind::InGaAs));
  }();
  return scene;
}

/// Same geometry with every absorber removed.
inline Spectrum clear_sky_radiance(const SpectralGrid& grid,
                                   const ObservationGeometry& geometry = {}) {
  Spectrum t(grid, std::vector<double>(grid.count, 1.0), SpectrumKind::Transmittance);
  return at_aperture_radiance(t, geometry);
}

inline Spectrum scaled(Spectrum s, double c) {
  for (auto& v : s.values) v *= c;
  return s;
}

/// Column-weighted retrieval of a noiseless full-pipeline scene.
inline RetrievalResult pipeline_retrieval(const Spectrum& radiance, const InstrumentConfig& config = {},
                                          const ObservationGeometry& geometry = {}) {
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  const auto spectrum = interferogram_to_spectrum(frame);
  const auto bands = default_bands();
  return retrieve(spectrum, bands, fixture_catalog(), geometry);
}

inline double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---- scratch directories and the CLI ------------------------------------

inline fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::path(SPECTROSAT_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + SPECTROSAT_CLI + "\" " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const fs::path& p) { return io::read_file(p); }

}  // namespace oracle
