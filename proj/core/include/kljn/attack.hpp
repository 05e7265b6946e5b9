#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "kljn/circuit.hpp"
#include "kljn/protocol.hpp"
#include "kljn/stats.hpp"

namespace kljn {

/// What Eve derives from the public resistor values and temperature.
/// Squared currents are multiplied by norm_constant so the high-resistance
/// end has unit mean square; the low-resistance end then has mean square
/// `threshold`.
struct EveCalibration {
  double norm_constant = 1.0;
  double threshold = 1.0;
};

EveCalibration calibrate(const NetworkConfig& net, const NoiseSpec& noise);

enum class Verdict { alice_is_low, bob_is_low, no_answer };

/// One end above the threshold and the other below: the end above is the
/// low-resistance one. Anything else, including ties with the threshold,
/// is no answer.
Verdict single_sample_decision(double x_alice, double x_bob, const EveCalibration& cal);

/// Bit implied by a verdict under the HL = 1, LH = 0 convention.
std::optional<int> bit_from_verdict(Verdict v);

struct BitAttackOutcome {
  std::optional<int> guess;
  std::optional<bool> correct;
  std::size_t measurements_used = 0;
  bool gave_up = false;
};

inline constexpr std::size_t default_max_measurements = 64;

/// Repeats single-sample decisions on measurements `stride` samples apart
/// until one answers or max_measurements (or the trace) runs out. Rejects
/// traces of insecure periods.
BitAttackOutcome attack_bit(const BitPeriodTrace& trace, const EveCalibration& cal,
                            std::size_t max_measurements, std::size_t stride = 1);

/// Per-trial outcome counts. Addition is associative and commutative.
struct TrialCounts {
  std::uint64_t successes = 0;
  std::uint64_t errors = 0;
  std::uint64_t no_answers = 0;

  std::uint64_t total() const { return successes + errors + no_answers; }
  TrialCounts& operator+=(const TrialCounts& o);
  bool operator==(const TrialCounts&) const = default;
};

struct AttackStats {
  TrialCounts trials;     // single-measurement trials, all secure periods
  TrialCounts trials_lh;  // Alice low
  TrialCounts trials_hl;  // Bob low

  std::uint64_t bits_attacked = 0;
  std::uint64_t bits_answered = 0;
  std::uint64_t bits_correct = 0;
  std::uint64_t bits_gave_up = 0;
  std::uint64_t measurements_to_answer = 0;  // summed over answered bits
  std::map<std::size_t, std::uint64_t> measurements_histogram;

  double p_success() const;
  double p_error() const;
  double p_no_answer() const;
  /// Correct answers over all answers, single-measurement trials.
  double conditional_fidelity() const;
  /// Correct guesses over answered bits, repeat-until-answer.
  double bit_fidelity() const;
  /// Mean measurements per answered bit; NaN when no bit was answered.
  double mean_measurements() const;

  Interval success_ci(double z = z_99) const;
  Interval error_ci(double z = z_99) const;
  Interval no_answer_ci(double z = z_99) const;
  Interval fidelity_ci(double z = z_99) const;

  void record_trial(Verdict v, BitState truth);
  void record_bit(const BitAttackOutcome& outcome);
  AttackStats& operator+=(const AttackStats& o);
};

struct CampaignConfig {
  ExchangeConfig exchange;
  std::size_t max_measurements = default_max_measurements;
  /// Replaces the calibrated threshold (for degenerate-rule checks).
  std::optional<double> threshold_override;
};

struct CampaignResult {
  EveCalibration calibration;
  KeyExchangeRecord exchange;
  AttackStats attack;
};

/// Runs n_bits protocol periods and attacks every secure one twice: each
/// measurement as an independent single-sample trial, and the whole period
/// with repeat-until-answer. `also` sees every trace after the attack.
CampaignResult attack_campaign(std::size_t n_bits, const CampaignConfig& config,
                               const TraceVisitor& also = {});

}  // namespace kljn
