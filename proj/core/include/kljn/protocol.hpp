#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "kljn/circuit.hpp"
#include "kljn/noise.hpp"

namespace kljn {

enum class Choice { low, high };

/// Named by (Alice, Bob): LH means Alice holds the low resistor.
enum class BitState { LL, LH, HL, HH };

std::string_view to_string(BitState state);
std::string_view to_string(Choice choice);

struct StateClass {
  BitState state;
  bool secure;
};

/// LH and HL are secure; LL and HH are discarded.
StateClass classify_state(Choice alice, Choice bob);

/// Key bit carried by a secure state: 1 when Alice holds High (HL), 0 when
/// Bob holds High (LH). Insecure states carry none.
std::optional<int> key_bit(BitState state);

/// The two resistor values each party chooses from.
struct ResistorPair {
  double r_low = 1000.0;
  double r_high = 10000.0;

  double value(Choice c) const { return c == Choice::low ? r_low : r_high; }
  /// Requires 0 < r_low < r_high.
  void validate() const;

  bool operator==(const ResistorPair&) const = default;
};

struct BitPeriodTrace {
  Choice alice_choice = Choice::low;
  Choice bob_choice = Choice::low;
  BitState state = BitState::LL;
  std::vector<InstantState> samples;
  std::uint64_t period_index = 0;

  bool secure() const { return state == BitState::LH || state == BitState::HL; }
};

/// Current-comparison defense parameters: the alarm fires when the windowed
/// mean squares of the two end currents differ by more than rel_tolerance of
/// the larger one.
struct AlarmPolicy {
  double rel_tolerance = 0.1;
  std::size_t window = 50;

  void validate() const;
  bool operator==(const AlarmPolicy&) const = default;
};

struct AlarmReport {
  bool triggered = false;
  /// Index of the last sample of the first window that exceeded tolerance.
  std::optional<std::size_t> first_trigger_sample;
  /// Relative difference of the triggering window, or the largest one seen
  /// when nothing triggered.
  double rel_difference = 0.0;
};

/// Draws the period's source voltages and solves the network for every
/// sample. The template's r_alice/r_bob are replaced by the chosen values.
BitPeriodTrace run_bit_period(Choice alice, Choice bob, const ResistorPair& pair,
                              const NetworkConfig& net_template, const NoiseSpec& noise,
                              std::size_t n_samples, std::uint64_t master_seed,
                              std::uint64_t period_index);

/// Slides a window of policy.window samples over the trace. Throws
/// std::invalid_argument when the trace is shorter than the window.
AlarmReport current_alarm(const BitPeriodTrace& trace, const AlarmPolicy& policy);

struct ExchangeConfig {
  ResistorPair pair;
  NetworkConfig net_template;
  NoiseSpec noise;
  std::size_t samples_per_bit = 100;
  AlarmPolicy alarm;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct PeriodSummary {
  std::uint64_t period_index = 0;
  Choice alice_choice = Choice::low;
  Choice bob_choice = Choice::low;
  BitState state = BitState::LL;
  bool secure = false;
  std::optional<int> key_bit;
  AlarmReport alarm;

  bool operator==(const PeriodSummary& o) const;
};

struct KeyExchangeRecord {
  std::vector<PeriodSummary> periods;
  std::size_t secure_periods = 0;
  std::size_t alarms = 0;
  std::size_t secure_alarms = 0;

  /// Bits of the secure periods, in period order.
  std::vector<int> key_bits() const;
  double secure_fraction() const;
};

/// Called once per period, in period order, while the trace is alive.
using TraceVisitor = std::function<void(const BitPeriodTrace&, const PeriodSummary&)>;

/// Choices for a period, drawn from its own seeded stream.
std::pair<Choice, Choice> draw_choices(std::uint64_t master_seed, std::uint64_t period_index);

/// Runs n_bits periods with independent random choices. Every period is
/// generated, including LL/HH ones that are then discarded for key purposes.
KeyExchangeRecord run_key_exchange(std::size_t n_bits, const ExchangeConfig& config,
                                   const TraceVisitor& visit = {});

}  // namespace kljn
