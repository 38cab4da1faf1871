#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace spectrosat;

namespace {

ProcessingOptions raw(ApodizationKind window = ApodizationKind::Boxcar, std::size_t zero_fill = 1) {
  ProcessingOptions p;
  p.apodization = window;
  p.phase_correction = false;
  p.zero_fill = zero_fill;
  return p;
}

Interferogram cosine_frame(std::size_t n, std::size_t bin, double amplitude, double dx = 158.2e-7) {
  Interferogram f;
  f.opd_step = dx;
  f.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    f.samples[k] = 0.5 * amplitude *
                   (1.0 + std::cos(2.0 * std::numbers::pi * double(bin) * double(k) / double(n)));
  return f;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

/// Local maxima of v on [lo, hi] cm^-1.
std::vector<double> peaks(const Spectrum& s, double lo, double hi) {
  std::vector<double> out;
  auto [a, b] = s.grid.index_range(lo, hi);
  for (std::size_t k = std::max<std::size_t>(a, 1); k + 1 < b; ++k)
    if (s.values[k] > s.values[k - 1] && s.values[k] > s.values[k + 1]) out.push_back(s.nu(k));
  return out;
}

}  // namespace

TEST(Average, IdenticalFramesUnchanged) {
  const auto f = cosine_frame(256, 10, 3.0);
  std::vector<Interferogram> frames(5, f);
  const auto avg = average_interferograms(frames);
  EXPECT_EQ(avg.samples, f.samples);
}

TEST(Average, ClearsSeedKeepsMetadata) {
  auto f = cosine_frame(64, 3, 1.0);
  f.seed = 5;
  f.channel = DetectorKind::Si;
  std::vector<Interferogram> frames{f, f};
  const auto avg = average_interferograms(frames);
  EXPECT_FALSE(avg.seed.has_value());
  EXPECT_EQ(avg.channel, DetectorKind::Si);
  EXPECT_EQ(avg.opd_step, f.opd_step);
}

TEST(Average, EmptyAndIncompatibleInput) {
  EXPECT_EQ(code_of([] { average_interferograms({}); }), ErrorCode::EmptyInput);
  std::vector<Interferogram> frames{cosine_frame(64, 3, 1.0), cosine_frame(65, 3, 1.0)};
  EXPECT_EQ(code_of([&] { average_interferograms(frames); }), ErrorCode::IncompatibleFrames);
  frames[1] = cosine_frame(64, 3, 1.0, 1e-5);
  EXPECT_EQ(code_of([&] { average_interferograms(frames); }), ErrorCode::IncompatibleFrames);
}

TEST(Average, ResidualNoiseFallsAsRootN) {
  const std::size_t n = 32000;
  const auto clean = cosine_frame(n, 4000, 1.0);
  const double sigma = 0.01;
  std::vector<Interferogram> frames(15, clean);
  for (std::size_t i = 0; i < frames.size(); ++i) add_noise(frames[i].samples, sigma, derive_seed(21, i));
  const auto avg = average_interferograms(frames);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) ss += std::pow(avg.samples[k] - clean.samples[k], 2);
  const double residual = std::sqrt(ss / double(n));
  EXPECT_LT(std::abs(residual * std::sqrt(15.0) / sigma - 1.0), 0.1);
}

TEST(Transform, OnGridCosineGivesSingleBin) {
  const std::size_t n = 4096, bin = 700;
  const double amplitude = 2.5;
  const auto f = cosine_frame(n, bin, amplitude);
  const auto s = interferogram_to_spectrum(f, raw());
  ASSERT_EQ(s.size(), n / 2 + 1);
  const double peak = 2.0 * f.opd_step * amplitude * double(n - 1);
  EXPECT_LT(oracle::relative(s.values[bin], peak), 1e-10);
  // Away from the line every bin carries the same ZPD term, 1/(N-1) of the peak:
  // the exact Dirichlet-kernel value of the two-sided sum.
  const double floor = 2.0 * f.opd_step * amplitude;
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (m == bin) continue;
    ASSERT_NEAR(s.values[m], floor, 1e-10 * peak) << m;
  }
  EXPECT_NEAR(s.nu(bin), double(bin) / (double(n) * f.opd_step), 1e-9);
}

TEST(Transform, OnBinRoundTripIsExact) {
  // Radiance on the transform bins: S_m = 2 dx (N P_m - sum P), P_m the in-band power per bin.
  InstrumentConfig config;
  const double dx = config.opd_step_cm();
  const std::size_t n = config.n_samples;
  const double step = 1.0 / (double(n) * dx);
  const auto grid = SpectralGrid::covering(0.0, 8100.0, step);
  oracle::Gen gen(3);
  Spectrum radiance(grid, SpectrumKind::Radiance);
  for (auto& v : radiance.values) v = gen.uniform(0.5, 1.5);
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  const auto s = interferogram_to_spectrum(frame, raw());
  ASSERT_EQ(s.grid.nu_step, step);

  const auto& det = config.channel(DetectorKind::InGaAs);
  const auto [first, last] = grid.index_range(det.nu_lo(), det.nu_hi());
  const double per_bin = config.etendue() * config.throughput() * step;
  double total = 0.0;
  for (std::size_t j = first; j < last; ++j) total += radiance.values[j] * per_bin;

  double err2 = 0.0, ref2 = 0.0, sxy = 0.0, sxx = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double p = (m >= first && m < last) ? radiance.values[m] * per_bin : 0.0;
    const double expected = std::abs(2.0 * dx * (double(n) * p - total));
    err2 += std::pow(s.values[m] - expected, 2);
    ref2 += expected * expected;
    if (p > 0.0) {
      const double x = p, y = s.values[m] + 2.0 * dx * total;
      sxy += x * y, sxx += x * x;
    }
  }
  EXPECT_LT(std::sqrt(err2 / ref2), 1e-9);

  // Proportionality over the band once the constant ZPD term is restored.
  const double gain = sxy / sxx;
  EXPECT_LT(oracle::relative(gain, 2.0 * dx * double(n)), 1e-9);
  double dev2 = 0.0, sig2 = 0.0;
  for (std::size_t m = first; m < last; ++m) {
    const double p = radiance.values[m] * per_bin;
    dev2 += std::pow(s.values[m] + 2.0 * dx * total - gain * p, 2);
    sig2 += std::pow(gain * p, 2);
  }
  EXPECT_LT(std::sqrt(dev2 / sig2), 1e-6);
}

TEST(Transform, ContinuumLevelIsEtendueTimesRadiance) {
  InstrumentConfig config;
  const auto grid = channel_grid(config, DetectorKind::InGaAs, 0.05);
  const Spectrum radiance(grid, std::vector<double>(grid.count, 1.0), SpectrumKind::Radiance);
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  const auto s = interferogram_to_spectrum(frame);
  const double expected = config.etendue() * config.throughput();
  auto [a, b] = s.grid.index_range(6500.0, 7500.0);
  for (std::size_t m = a; m < b; ++m) ASSERT_LT(oracle::relative(s.values[m], expected), 2e-3) << s.nu(m);
}

TEST(Transform, TwoLinesTwoWavenumbersApartResolved) {
  const InstrumentConfig config;
  const auto grid = channel_grid(config, DetectorKind::InGaAs);
  Spectrum radiance(grid, SpectrumKind::Radiance);
  for (double nu : {6300.0, 6302.0}) radiance.values[grid.index_range(nu, nu).first] = 1.0;
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  const auto s = interferogram_to_spectrum(frame, raw(ApodizationKind::Boxcar, 4));

  // The FFT bins agree with a direct evaluation of the transform sum.
  auto [a, b] = s.grid.index_range(6297.0, 6305.0);
  for (std::size_t m = a; m < b; ++m) {
    const double direct = oracle::direct_spectrum(frame, ApodizationKind::Boxcar, s.nu(m));
    ASSERT_NEAR(s.values[m], direct, 1e-9 * direct + 1e-12 * s.values[m]) << s.nu(m);
  }
  const auto found = peaks(s, 6298.0, 6304.0);
  ASSERT_EQ(found.size(), 2u);
  // Boxcar sidelobes of each line pull the other peak outward slightly.
  EXPECT_NEAR(found[0], 6300.0, 0.5);
  EXPECT_NEAR(found[1], 6302.0, 0.5);
  const double mid = s.values[s.grid.index_range(6301.0, 6301.0).first];
  const double top = s.values[s.grid.index_range(found[0], found[0]).first];
  EXPECT_LT(mid, 0.9 * top);
}

TEST(Transform, ParsevalIdentity) {
  oracle::Gen gen(17);
  Interferogram f;
  f.opd_step = 158.2e-7;
  f.samples.resize(2048);
  for (auto& v : f.samples) v = gen.normal() + 3.0;
  const auto s = interferogram_to_spectrum(f, raw());
  double mean = 0.0;
  for (double v : f.samples) mean += v;
  mean /= double(f.size());
  double energy = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double y = (f.samples[k] - mean) * (k == 0 ? 0.5 : 1.0);
    energy += y * y;
  }
  const double scale = 8.0 * f.opd_step;
  double spectral = 0.0;
  const std::size_t n = f.size();
  for (std::size_t m = 0; m <= n / 2; ++m) {
    const double w = (m == 0 || m == n / 2) ? 1.0 : 2.0;
    spectral += w * std::pow(s.values[m] / scale, 2);
  }
  spectral /= double(n);
  EXPECT_LT(oracle::relative(spectral, energy), 1e-9);
}

TEST(Transform, PhaseCorrectedIsRealPartOfDirectSum) {
  // A symmetric scene has zero phase: the corrected spectrum is the cosine
  // transform, while the magnitude also picks up the sine part.
  const InstrumentConfig config;
  const auto frame =
      synthesize_interferogram(oracle::default_scene().radiance, config, DetectorKind::InGaAs, std::nullopt);
  ProcessingOptions corrected;
  corrected.apodization = ApodizationKind::Boxcar;
  corrected.zero_fill = 1;
  const auto s = interferogram_to_spectrum(frame, corrected);
  for (double nu : {6150.0, 6250.0, 6350.0, 7880.0}) {
    const std::size_t m = s.grid.index_range(nu, nu + s.grid.nu_step).first;
    const auto direct = oracle::direct_transform(frame, ApodizationKind::Boxcar, s.nu(m));
    EXPECT_NEAR(s.values[m], direct.real(), 1e-9 * std::abs(direct)) << nu;
  }
}

TEST(Windows, RangeAndZeroPathValue) {
  for (auto k : {ApodizationKind::Boxcar, ApodizationKind::Hann, ApodizationKind::NortonBeerMedium}) {
    EXPECT_DOUBLE_EQ(apodization_window(k, 0.0), 1.0);
    for (int i = 0; i <= 1000; ++i) {
      const double w = apodization_window(k, i / 1000.0);
      ASSERT_GE(w, 0.0);
      ASSERT_LE(w, 1.0 + 1e-12);
    }
    EXPECT_EQ(apodization_from_name(apodization_name(k)), k);
  }
  EXPECT_NEAR(apodization_window(ApodizationKind::Hann, 1.0), 0.0, 1e-15);
  EXPECT_FALSE(apodization_from_name("triangle").has_value());
}

TEST(Ratio, IdenticalInputsGiveUnity) {
  const auto& r = oracle::default_scene().radiance;
  const auto t = transmittance_ratio(r, r);
  EXPECT_EQ(t.clipped, 0u);
  for (double v : t.transmittance.values) ASSERT_EQ(v, 1.0);
  EXPECT_EQ(t.transmittance.kind, SpectrumKind::Transmittance);
}

TEST(Ratio, ZeroReferenceAndGridMismatch) {
  Spectrum a(SpectralGrid(0.0, 1.0, 10), std::vector<double>(10, 1.0), SpectrumKind::Recovered);
  Spectrum b = a;
  b.values[4] = 0.0;
  EXPECT_EQ(code_of([&] { transmittance_ratio(a, b); }), ErrorCode::ZeroReference);
  Spectrum c(SpectralGrid(0.0, 1.0, 11), std::vector<double>(11, 1.0), SpectrumKind::Recovered);
  EXPECT_EQ(code_of([&] { transmittance_ratio(a, c); }), ErrorCode::GridMismatch);
}

TEST(Ratio, ClipsAndCounts) {
  Spectrum ref(SpectralGrid(0.0, 1.0, 4), std::vector<double>(4, 1.0), SpectrumKind::Recovered);
  Spectrum s = ref;
  s.values = {1.2, -0.1, 0.5, 1.0};
  const auto t = transmittance_ratio(s, ref);
  EXPECT_EQ(t.clipped, 2u);
  EXPECT_EQ(t.transmittance.values[0], kRatioClipMax);
  EXPECT_EQ(t.transmittance.values[1], 0.0);
}

TEST(Ratio, RecoversForwardModelTransmittance) {
  const InstrumentConfig config;
  const auto& scene = oracle::default_scene();
  const auto clear = oracle::clear_sky_radiance(scene.radiance.grid);
  const auto sample = interferogram_to_spectrum(
      synthesize_interferogram(scene.radiance, config, DetectorKind::InGaAs, std::nullopt));
  const auto reference = interferogram_to_spectrum(
      synthesize_interferogram(clear, config, DetectorKind::InGaAs, std::nullopt));
  const WavenumberBand band{6000.0, 7900.0};
  const auto t = transmittance_ratio(sample, reference, band).transmittance;
  // Truth at instrument resolution: the fine transmittance averaged over each bin.
  double err2 = 0.0;
  const auto& fine = scene.transmittance;
  const double half = 0.5 * t.grid.nu_step;
  for (std::size_t m = 0; m < t.size(); ++m) {
    auto [a, b] = fine.grid.index_range(t.nu(m) - half, t.nu(m) + half);
    double mean = 0.0;
    for (std::size_t k = a; k < b; ++k) mean += fine.values[k];
    mean /= double(b - a);
    err2 += std::pow(t.values[m] - mean, 2);
  }
  EXPECT_LT(std::sqrt(err2 / double(t.size())), 0.01);
}

TEST(Snr, ConstructedNoise) {
  oracle::Gen gen(8);
  const double c = 5.0, sigma = 0.05;
  Spectrum s(SpectralGrid(6000.0, 0.25, 4001), SpectrumKind::Recovered);
  for (auto& v : s.values) v = c + sigma * gen.normal();
  const auto r = estimate_snr(s);
  EXPECT_LT(std::abs(r.snr / (c / sigma) - 1.0), 0.1);
  EXPECT_DOUBLE_EQ(r.snr, r.signal_level / r.noise_sigma);
}

TEST(Snr, NoiselessIsDegenerate) {
  const Spectrum s(SpectralGrid(6000.0, 0.25, 4001), std::vector<double>(4001, 2.0), SpectrumKind::Recovered);
  EXPECT_EQ(code_of([&] { estimate_snr(s); }), ErrorCode::DegenerateNoise);
}

TEST(Snr, BandErrors) {
  const Spectrum s(SpectralGrid(6000.0, 0.25, 4001), std::vector<double>(4001, 2.0), SpectrumKind::Recovered);
  EXPECT_EQ(code_of([&] { estimate_snr(s, {5000.0, 5100.0}, kDefaultNoiseBand); }), ErrorCode::BandOutOfRange);
  EXPECT_EQ(code_of([&] { estimate_snr(s, kDefaultSignalBand, {6600.0, 6601.0}); }), ErrorCode::DegenerateBand);
}

TEST(Snr, DefaultFrameNearReportedValue) {
  const InstrumentConfig config;
  const auto frame = synthesize_interferogram(oracle::default_scene().radiance, config, DetectorKind::InGaAs, 1);
  const auto r = estimate_snr(interferogram_to_spectrum(frame));
  EXPECT_GT(r.snr, 1220.0 / 3.0);
  EXPECT_LT(r.snr, 1220.0 * 3.0);
}

TEST(Snr, AveragingGainFollowsRootK) {
  const InstrumentConfig config;
  const auto frames = scan_sequence(oracle::default_scene().radiance, config, DetectorKind::InGaAs, 16, 99);
  std::vector<double> single;
  for (const auto& f : frames) single.push_back(estimate_snr(interferogram_to_spectrum(f), kDefaultSignalBand, kOutOfBandNoise).snr);
  for (std::size_t k : {4, 9, 15, 16}) {
    const std::span<const Interferogram> subset(frames.data(), k);
    const double averaged =
        estimate_snr(interferogram_to_spectrum(average_interferograms(subset)), kDefaultSignalBand, kOutOfBandNoise).snr;
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += single[i];
    mean /= double(k);
    EXPECT_LT(std::abs(averaged / mean / std::sqrt(double(k)) - 1.0), 0.1) << k;
  }
}
