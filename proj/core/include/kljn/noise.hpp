#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace kljn {

inline constexpr double boltzmann_constant = 1.380649e-23;  // J/K

enum class SamplingMode { independent, waveform };

/// Johnson noise generator settings shared by Alice and Bob.
///
/// With `t_eff` unset the generators run in normalized units, where the
/// product 4 k T_eff B is exactly 1 and a resistor of R ohms produces a
/// source voltage of mean square R. With `t_eff` set, SI units are used.
///
/// In independent mode every sample is one correlation time apart. In
/// waveform mode the noise is band-limited to `bandwidth` and sampled at
/// `oversample * 2 * bandwidth`.
struct NoiseSpec {
  std::optional<double> t_eff;
  double bandwidth = 1.0;  // Hz
  SamplingMode mode = SamplingMode::independent;
  int oversample = 8;

  /// 4 k T_eff B, or 1 in normalized units.
  double unit_scale() const;
  double correlation_time() const { return 1.0 / (2.0 * bandwidth); }
  double sample_rate() const;
  /// Number of samples spanning one correlation time.
  std::size_t samples_per_correlation_time() const;

  /// Throws std::invalid_argument on a nonpositive bandwidth or temperature,
  /// or an oversample factor below 2 in waveform mode.
  void validate() const;

  bool operator==(const NoiseSpec&) const = default;
};

/// RMS open-circuit Johnson noise voltage of a resistor, sqrt(4 k T_eff R B).
double johnson_rms(double resistance, const NoiseSpec& spec);

/// Identifies one reproducible random stream. Equal (master_seed, stream_id)
/// pairs always yield identical sequences.
struct SeededStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const SeededStream&) const = default;
};

/// Purposes of the streams owned by one bit period.
enum class StreamRole : std::uint64_t { choices = 0, alice_noise = 1, bob_noise = 2 };

/// Counter-based stream id for (bit period, role). Distinct periods and roles
/// never share an id, so results do not depend on evaluation order.
constexpr std::uint64_t derive_stream_id(std::uint64_t period_index, StreamRole role) {
  return period_index * 4 + static_cast<std::uint64_t>(role);
}

std::mt19937_64 make_engine(SeededStream stream);

/// Standard normal draws on demand.
class GaussianSource {
 public:
  explicit GaussianSource(SeededStream stream);

  double next() { return normal_(engine_); }
  void fill(std::vector<double>& out);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// n i.i.d. standard normal samples.
std::vector<double> gaussian_stream(SeededStream stream, std::size_t n);

/// Hann-windowed sinc low-pass kernel with cutoff at the noise bandwidth,
/// scaled to unit energy so that filtered white noise keeps unit variance.
std::vector<double> lowpass_kernel(const NoiseSpec& spec);

inline constexpr std::size_t lowpass_kernel_length = 129;

/// n unit-variance samples of noise band-limited to spec.bandwidth, sampled
/// at spec.sample_rate(). Rejects independent-mode specs.
std::vector<double> band_limited_stream(SeededStream stream, const NoiseSpec& spec, std::size_t n);

/// Unit-variance samples for the spec's sampling mode.
std::vector<double> unit_noise(SeededStream stream, const NoiseSpec& spec, std::size_t n);

}  // namespace kljn
