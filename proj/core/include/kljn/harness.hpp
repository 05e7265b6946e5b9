#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kljn/attack.hpp"
#include "kljn/circuit.hpp"
#include "kljn/noise.hpp"
#include "kljn/protocol.hpp"
#include "kljn/stats.hpp"

namespace kljn::harness {

inline constexpr int report_schema_version = 1;
inline constexpr int config_schema_version = 1;

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_runtime_error = 2;

/// Invalid or unresolvable configuration. The message starts with the
/// offending key path, e.g. "network.r_alice: must be positive and finite".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure after the configuration was accepted (I/O and the like).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view version();

/// Everything a run needs. The network's r_alice/r_bob double as the
/// resistor pair the parties choose from during simulation.
struct ExperimentConfig {
  NetworkConfig network;
  NoiseSpec noise;
  std::size_t n_bits = 10000;
  std::size_t samples_per_bit = 100;
  AlarmPolicy alarm;
  std::size_t max_measurements = default_max_measurements;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> report_path;
  std::optional<std::string> trace_csv_path;

  std::uint64_t resolved_seed() const { return seed.value_or(0); }
  /// {min, max} of the network's two resistors.
  ResistorPair pair() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// Throws ConfigError when the configuration cannot be simulated.
  CampaignConfig campaign() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Preset network with defaults for everything else.
ExperimentConfig config_from_preset(std::string_view name);

/// Parses a strict-schema JSON config: unknown keys, wrong types and a
/// missing `network` are ConfigErrors.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

/// Fully explicit JSON echo of a config; config_from_json accepts it back.
std::string config_to_json(const ExperimentConfig& config);

/// Seed from text such as a --seed value or KLJN_SEED; nullopt when not a
/// base-10 unsigned 64-bit integer.
std::optional<std::uint64_t> parse_seed(std::string_view text);

/// Mean squares and correlation of the two end currents over the samples of
/// secure periods, oriented as low-resistance end vs. high-resistance end.
struct EndCurrentStats {
  std::uint64_t samples = 0;
  double sum_low_sq = 0.0;
  double sum_high_sq = 0.0;
  double sum_cross = 0.0;

  void add(const BitPeriodTrace& trace);
  double ms_low() const;
  double ms_high() const;
  double ratio() const { return ms_low() / ms_high(); }
  /// Zero-mean correlation coefficient of the low- and high-end currents.
  double correlation() const;
};

struct AnalyticSection {
  CurrentMoments moments;
  CurrentMoments moments_exact;
  EveCalibration calibration;
  AttackProbabilities probabilities;
};

struct EmpiricalSection {
  KeyExchangeRecord exchange;
  AttackStats attack;
  EndCurrentStats currents;
  double mean_secure_rel_difference = 0.0;
};

struct Provenance {
  std::string version;
  std::uint64_t seed = 0;
  std::string timestamp;
};

struct RunReport {
  std::string kind;  // "analyze" or "simulate"
  ExperimentConfig config;
  AnalyticSection analytic;
  std::optional<EmpiricalSection> empirical;
  Provenance provenance;
};

/// Tolerance on the empirical/analytic mean-square ratio.
inline constexpr double ratio_rel_tolerance = 0.02;

/// Closed-form section only; no sampling.
RunReport analyze(const ExperimentConfig& config, std::string timestamp = {});

/// Analytic section plus a full key exchange with alarm and attack
/// campaign. When trace_csv is given every sample of every period is
/// written as `period,sample,i_alice,i_bob,v_node`.
RunReport simulate(const ExperimentConfig& config, std::string timestamp = {},
                   std::ostream* trace_csv = nullptr);

std::string to_json(const RunReport& report);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

inline constexpr std::string_view trace_csv_header = "period,sample,i_alice,i_bob,v_node";

}  // namespace kljn::harness
