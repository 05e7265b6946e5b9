#include "kljn/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kljn {

double NoiseSpec::unit_scale() const {
  if (!t_eff) return 1.0;
  return 4.0 * boltzmann_constant * *t_eff * bandwidth;
}

double NoiseSpec::sample_rate() const {
  const double nyquist_rate = 2.0 * bandwidth;
  return mode == SamplingMode::waveform ? nyquist_rate * oversample : nyquist_rate;
}

std::size_t NoiseSpec::samples_per_correlation_time() const {
  return mode == SamplingMode::waveform ? static_cast<std::size_t>(oversample) : 1;
}

void NoiseSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("noise bandwidth must be positive and finite");
  }
  if (t_eff && (!(*t_eff > 0.0) || !std::isfinite(*t_eff))) {
    throw std::invalid_argument("effective temperature must be positive and finite");
  }
  if (mode == SamplingMode::waveform && oversample < 2) {
    throw std::invalid_argument("waveform mode needs oversample >= 2");
  }
}

double johnson_rms(double resistance, const NoiseSpec& spec) {
  if (!(resistance >= 0.0)) throw std::invalid_argument("resistance must be nonnegative");
  return std::sqrt(spec.unit_scale() * resistance);
}

std::mt19937_64 make_engine(SeededStream stream) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(stream.master_seed), hi(stream.master_seed), lo(stream.stream_id),
                    hi(stream.stream_id)};
  return std::mt19937_64(seq);
}

GaussianSource::GaussianSource(SeededStream stream) : engine_(make_engine(stream)) {}

void GaussianSource::fill(std::vector<double>& out) {
  for (double& x : out) x = next();
}

std::vector<double> gaussian_stream(SeededStream stream, std::size_t n) {
  std::vector<double> out(n);
  GaussianSource(stream).fill(out);
  return out;
}

std::vector<double> lowpass_kernel(const NoiseSpec& spec) {
  constexpr std::size_t length = lowpass_kernel_length;
  constexpr double center = (length - 1) / 2.0;
  // Cutoff in cycles per sample.
  const double fc = spec.bandwidth / spec.sample_rate();

  std::vector<double> h(length);
  double energy = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    const double t = static_cast<double>(n) - center;
    const double arg = 2.0 * fc * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / (length - 1)));
    h[n] = 2.0 * fc * sinc * hann;
    energy += h[n] * h[n];
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : h) v *= scale;
  return h;
}

std::vector<double> band_limited_stream(SeededStream stream, const NoiseSpec& spec, std::size_t n) {
  if (spec.mode != SamplingMode::waveform) {
    throw std::invalid_argument("band_limited_stream requires a waveform-mode noise spec");
  }
  spec.validate();
  const std::vector<double> h = lowpass_kernel(spec);
  const std::vector<double> white = gaussian_stream(stream, n + h.size() - 1);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * white[i + k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> unit_noise(SeededStream stream, const NoiseSpec& spec, std::size_t n) {
  return spec.mode == SamplingMode::waveform ? band_limited_stream(stream, spec, n)
                                             : gaussian_stream(stream, n);
}

}  // namespace kljn
