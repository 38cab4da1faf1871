#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace spectrosat;

namespace {

InstrumentConfig small_config(std::size_t n) {
  InstrumentConfig c;
  c.n_samples = n;
  return c;
}

/// Radiance covering the InGaAs band on a coarse grid, filled by `fn(nu)`.
template <typename Fn>
Spectrum coarse_radiance(double step, Fn fn) {
  const auto grid = SpectralGrid::covering(5850.0, 8050.0, step);
  Spectrum s(grid, SpectrumKind::Radiance);
  for (std::size_t k = 0; k < grid.count; ++k) s.values[k] = fn(grid.at(k));
  return s;
}

double sample_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(Detector, SiliconNepPassThrough) {
  EXPECT_EQ(nep_of(default_si()), 6.2e-15);
}

TEST(Detector, IndiumGalliumArsenideNepFromDetectivity) {
  DetectorSpec d = default_ingaas();
  d.d_star = 2.0e12;
  d.active_side = 1.0;
  EXPECT_NEAR(nep_of(d), 5.0e-14, 5.0e-14 * 1e-3);
}

TEST(Detector, InfiniteDetectivityMeansNoNoise) {
  DetectorSpec d = default_ingaas();
  d.d_star = 1e300;
  EXPECT_LT(nep_of(d), 1e-280);
}

TEST(Detector, MissingNoiseSpec) {
  DetectorSpec d = default_ingaas();
  d.d_star.reset();
  d.nep.reset();
  try {
    nep_of(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingNoiseSpec);
  }
}

TEST(Resolution, DefaultInstrument) {
  const InstrumentConfig c;
  EXPECT_NEAR(c.opd_step, 158.2, 1e-12);
  EXPECT_NEAR(c.max_opd_cm(), 0.50624, 1e-12);
  const double r = spectral_resolution(c);
  EXPECT_NEAR(r, 1.0 / 0.50624, 1e-12);
  EXPECT_NEAR(r, 1.975, 0.001);
  EXPECT_LT(std::abs(r - 2.0) / 2.0, 0.02);
}

TEST(Resolution, ReciprocalInSampleCount) {
  InstrumentConfig c;
  const double r = spectral_resolution(c);
  c.n_samples *= 2;
  EXPECT_NEAR(spectral_resolution(c), r / 2.0, 1e-15);
  c.n_samples = 2;
  c.opd_step = 1e7;  // 1 cm
  EXPECT_DOUBLE_EQ(spectral_resolution(c), 0.5);
}

TEST(Synthesis, MonochromaticLineIsRaisedCosine) {
  const auto config = small_config(4096);
  const double nu0 = 6300.0;
  const auto radiance = coarse_radiance(0.5, [&](double nu) { return std::abs(nu - nu0) < 0.1 ? 1.0 : 0.0; });
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  const double power = config.etendue() * config.throughput() * 0.5;
  const double dx = config.opd_step_cm();
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const double expected = 0.5 * power * (1.0 + std::cos(2.0 * std::numbers::pi * nu0 * dx * k));
    ASSERT_NEAR(frame.samples[k], expected, 1e-12 * power) << k;
  }
}

TEST(Synthesis, MatchesTermByTermSum) {
  const auto config = small_config(512);
  oracle::Gen gen(11);
  const auto radiance = coarse_radiance(0.37, [&](double) { return gen.uniform(0.0, 2.0); });
  const auto fast = noiseless_samples(radiance, config, DetectorKind::InGaAs);
  const auto brute = oracle::brute_samples(radiance, config, DetectorKind::InGaAs);
  const double scale = *std::max_element(brute.begin(), brute.end());
  for (std::size_t k = 0; k < fast.size(); ++k) ASSERT_NEAR(fast[k], brute[k], 1e-11 * scale) << k;
}

TEST(Synthesis, ZeroRadianceWithoutNoiseIsZero) {
  const InstrumentConfig config;
  const auto radiance = coarse_radiance(1.0, [](double) { return 0.0; });
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
  EXPECT_EQ(frame.size(), 32000u);
  for (double s : frame.samples) ASSERT_EQ(s, 0.0);
  EXPECT_FALSE(frame.seed.has_value());
}

TEST(Synthesis, NoiseLevelFromNep) {
  const InstrumentConfig config;
  const auto radiance = coarse_radiance(1.0, [](double) { return 0.0; });
  const auto frame = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, 42);
  const double sigma = 5.0e-14 * std::sqrt(32000.0 / (2.0 * 4.0));
  EXPECT_NEAR(noise_sigma(config, DetectorKind::InGaAs), sigma, sigma * 1e-3);
  EXPECT_LT(std::abs(sample_sd(frame.samples) - sigma) / sigma, 0.05);
  EXPECT_EQ(frame.seed, std::optional<std::uint64_t>(42));
}

TEST(Synthesis, BitIdenticalForSameSeed) {
  const auto config = small_config(2048);
  const auto radiance = coarse_radiance(0.5, [](double nu) { return 1.0 + std::sin(nu); });
  const auto a = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, 9);
  const auto b = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, 9);
  EXPECT_EQ(a.samples, b.samples);
  const auto c = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, 10);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Synthesis, MeanIsHalfInBandPower) {
  const InstrumentConfig config;
  const auto& radiance = oracle::default_scene().radiance;
  const auto samples = noiseless_samples(radiance, config, DetectorKind::InGaAs);
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  const double half_power = 0.5 * in_band_power(radiance, config, DetectorKind::InGaAs);
  EXPECT_LT(std::abs(mean - half_power) / half_power, 1e-3);
}

TEST(Synthesis, GridMustCoverBand) {
  const InstrumentConfig config;
  const Spectrum partial(SpectralGrid(6000.0, 1.0, 100), SpectrumKind::Radiance);
  try {
    synthesize_interferogram(partial, config, DetectorKind::InGaAs, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BandMismatch);
  }
}

TEST(Synthesis, NyquistGuard) {
  InstrumentConfig config;
  config.opd_step = 632.8;  // Nyquist 7901 cm^-1, below the InGaAs edge
  const auto radiance = coarse_radiance(1.0, [](double) { return 1.0; });
  try {
    synthesize_interferogram(radiance, config, DetectorKind::InGaAs, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NyquistViolation);
  }
}

TEST(ScanSequence, FifteenFramesSpanOneMinute) {
  const auto config = small_config(1024);
  const auto radiance = coarse_radiance(1.0, [](double) { return 1.0; });
  const auto frames = scan_sequence(radiance, config, DetectorKind::InGaAs, 15, 3);
  EXPECT_EQ(frames.size(), 15u);
  EXPECT_DOUBLE_EQ(static_cast<double>(frames.size()) * config.scan_period, 60.0);
}

TEST(ScanSequence, SingleFrameMatchesDirectSynthesis) {
  const auto config = small_config(1024);
  const auto radiance = coarse_radiance(1.0, [](double nu) { return nu * 1e-4; });
  const auto frames = scan_sequence(radiance, config, DetectorKind::InGaAs, 1, 77);
  ASSERT_EQ(frames.size(), 1u);
  const auto direct = synthesize_interferogram(radiance, config, DetectorKind::InGaAs, derive_seed(77, 0));
  EXPECT_EQ(frames[0].samples, direct.samples);
  EXPECT_EQ(frames[0].seed, direct.seed);
}

TEST(ScanSequence, IndependentNoiseSharedSignal) {
  const auto config = small_config(4096);
  const auto radiance = coarse_radiance(1.0, [](double) { return 1.0; });
  const auto frames = scan_sequence(radiance, config, DetectorKind::InGaAs, 2, 5);
  const auto clean = noiseless_samples(radiance, config, DetectorKind::InGaAs);
  std::vector<double> n0(clean.size()), n1(clean.size());
  for (std::size_t k = 0; k < clean.size(); ++k) {
    n0[k] = frames[0].samples[k] - clean[k];
    n1[k] = frames[1].samples[k] - clean[k];
  }
  EXPECT_NE(n0, n1);
  const double sigma = noise_sigma(config, DetectorKind::InGaAs);
  EXPECT_NEAR(sample_sd(n0), sigma, 0.1 * sigma);
  EXPECT_NEAR(sample_sd(n1), sigma, 0.1 * sigma);
  double corr = 0.0;
  for (std::size_t k = 0; k < clean.size(); ++k) corr += n0[k] * n1[k];
  corr /= static_cast<double>(clean.size()) * sigma * sigma;
  EXPECT_LT(std::abs(corr), 0.06);
}

TEST(Config, EtendueAndThroughput) {
  const InstrumentConfig c;
  const double area = std::numbers::pi * 0.05 * 0.05;
  const double omega = 2.0 * std::numbers::pi * (1.0 - std::cos(0.005));
  EXPECT_NEAR(c.etendue(), area * omega, 1e-20);
  EXPECT_DOUBLE_EQ(c.throughput(), c.optical_efficiency / 4.0);
  EXPECT_NEAR(c.nyquist(), 1.0 / (2.0 * 158.2e-7), 1e-9);
}
