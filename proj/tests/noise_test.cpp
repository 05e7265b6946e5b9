#include "kljn/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

namespace kljn {
namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y, std::size_t lag = 0) {
  const std::size_t n = std::min(x.size(), y.size()) - lag;
  double sxy = 0, sxx = 0, syy = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i + lag];
  }
  mx /= n;
  my /= n;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i + lag] - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  return sxy / std::sqrt(sxx * syy);
}

NoiseSpec waveform_spec() {
  NoiseSpec spec;
  spec.mode = SamplingMode::waveform;
  spec.bandwidth = 500.0;
  spec.oversample = 8;
  return spec;
}

TEST(JohnsonRms, Examples) {
  EXPECT_NEAR(johnson_rms(1000.0, NoiseSpec{}), std::sqrt(1000.0), 1e-12);
  EXPECT_NEAR(johnson_rms(1000.0, NoiseSpec{}), 31.62, 0.005);
  EXPECT_EQ(johnson_rms(0.0, NoiseSpec{}), 0.0);

  NoiseSpec si;
  si.t_eff = 300.0;
  si.bandwidth = 5000.0;
  EXPECT_NEAR(johnson_rms(1000.0, si), 2.87817546372697716e-7, 1e-20);
  EXPECT_THROW(johnson_rms(-1.0, si), std::invalid_argument);
}

TEST(JohnsonRms, QuadrupledResistanceDoublesRms) {
  NoiseSpec si;
  si.t_eff = 1e15;
  si.bandwidth = 1234.5;
  for (double r = 0.37; r < 1e7; r *= 3.1) {
    EXPECT_EQ(johnson_rms(4.0 * r, si), 2.0 * johnson_rms(r, si));
    EXPECT_EQ(johnson_rms(4.0 * r, NoiseSpec{}), 2.0 * johnson_rms(r, NoiseSpec{}));
  }
}

TEST(NoiseSpec, DerivedQuantitiesAndValidation) {
  NoiseSpec spec = waveform_spec();
  EXPECT_DOUBLE_EQ(spec.correlation_time(), 1e-3);
  EXPECT_DOUBLE_EQ(spec.sample_rate(), 8000.0);
  EXPECT_EQ(spec.samples_per_correlation_time(), 8u);
  EXPECT_EQ(NoiseSpec{}.samples_per_correlation_time(), 1u);
  EXPECT_EQ(NoiseSpec{}.unit_scale(), 1.0);

  spec.oversample = 1;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  NoiseSpec bad;
  bad.bandwidth = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = NoiseSpec{};
  bad.t_eff = -3.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(StreamIds, DistinctAcrossPeriodsAndRoles) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t p = 0; p < 1000; ++p) {
    for (auto role : {StreamRole::choices, StreamRole::alice_noise, StreamRole::bob_noise}) {
      EXPECT_TRUE(ids.insert(derive_stream_id(p, role)).second);
    }
  }
}

TEST(GaussianStream, MomentBounds) {
  constexpr std::size_t n = 1000000;
  const auto x = gaussian_stream({2024, 7}, n);
  ASSERT_EQ(x.size(), n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(double(n)));
  EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(GaussianStream, Deterministic) {
  EXPECT_EQ(gaussian_stream({42, 3}, 1000), gaussian_stream({42, 3}, 1000));
  EXPECT_NE(gaussian_stream({42, 3}, 10), gaussian_stream({43, 3}, 10));

  GaussianSource src({42, 3});
  const auto batch = gaussian_stream({42, 3}, 5);
  for (double v : batch) EXPECT_EQ(src.next(), v);
}

TEST(GaussianStream, DistinctStreamsAreUncorrelated) {
  constexpr std::size_t n = 200000;
  const auto a = gaussian_stream({1, derive_stream_id(0, StreamRole::alice_noise)}, n);
  const auto b = gaussian_stream({1, derive_stream_id(0, StreamRole::bob_noise)}, n);
  const auto c = gaussian_stream({1, derive_stream_id(1, StreamRole::alice_noise)}, n);
  EXPECT_LT(std::abs(correlation(a, b)), 4.0 / std::sqrt(double(n)));
  EXPECT_LT(std::abs(correlation(a, c)), 4.0 / std::sqrt(double(n)));
}

TEST(LowpassKernel, ShapeAndEnergy) {
  const auto h = lowpass_kernel(waveform_spec());
  ASSERT_EQ(h.size(), lowpass_kernel_length);
  double energy = 0.0;
  for (double v : h) energy += v * v;
  EXPECT_NEAR(energy, 1.0, 1e-12);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], h[h.size() - 1 - i], 1e-15);
  EXPECT_EQ(h.front(), 0.0);
}

TEST(BandLimitedStream, CorrelationTimeAndVariance) {
  const NoiseSpec spec = waveform_spec();
  constexpr std::size_t n = 200000;
  const auto x = band_limited_stream({77, 0}, spec, n);
  ASSERT_EQ(x.size(), n);

  double var = 0.0;
  for (double v : x) var += v * v;
  var /= n;
  EXPECT_NEAR(var, 1.0, 0.03);

  const auto lag = static_cast<std::size_t>(std::lround(spec.correlation_time() * spec.sample_rate()));
  EXPECT_EQ(lag, spec.samples_per_correlation_time());
  // The Hann-windowed kernel decorrelates to ~0.05 one correlation time out.
  const auto h = lowpass_kernel(spec);
  double kernel_lag = 0.0;
  for (std::size_t i = 0; i + lag < h.size(); ++i) kernel_lag += h[i] * h[i + lag];
  EXPECT_LT(std::abs(kernel_lag), 0.06);
  EXPECT_NEAR(correlation(x, x, lag), kernel_lag, 0.015);
  // Adjacent samples are strongly correlated: the waveform really is band-limited.
  EXPECT_GT(correlation(x, x, 1), 0.9);
}

TEST(BandLimitedStream, DeterministicAndModeChecked) {
  const NoiseSpec spec = waveform_spec();
  EXPECT_EQ(band_limited_stream({0, 0}, spec, 500), band_limited_stream({0, 0}, spec, 500));
  EXPECT_THROW(band_limited_stream({0, 0}, NoiseSpec{}, 10), std::invalid_argument);
}

}  // namespace
}  // namespace kljn
