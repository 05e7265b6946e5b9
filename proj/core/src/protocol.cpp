#include "kljn/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kljn {

std::string_view to_string(BitState state) {
  switch (state) {
    case BitState::LL: return "LL";
    case BitState::LH: return "LH";
    case BitState::HL: return "HL";
    case BitState::HH: return "HH";
  }
  return "?";
}

std::string_view to_string(Choice choice) { return choice == Choice::low ? "low" : "high"; }

StateClass classify_state(Choice alice, Choice bob) {
  if (alice == Choice::low) {
    return bob == Choice::low ? StateClass{BitState::LL, false} : StateClass{BitState::LH, true};
  }
  return bob == Choice::low ? StateClass{BitState::HL, true} : StateClass{BitState::HH, false};
}

std::optional<int> key_bit(BitState state) {
  if (state == BitState::HL) return 1;
  if (state == BitState::LH) return 0;
  return std::nullopt;
}

void ResistorPair::validate() const {
  if (!(r_low > 0.0) || !std::isfinite(r_high) || !(r_low < r_high)) {
    throw std::invalid_argument("resistor pair must satisfy 0 < r_low < r_high");
  }
}

void AlarmPolicy::validate() const {
  if (!(rel_tolerance > 0.0)) throw std::invalid_argument("alarm rel_tolerance must be > 0");
  if (window < 2) throw std::invalid_argument("alarm window must be >= 2");
}

void ExchangeConfig::validate() const {
  pair.validate();
  if (net_template.pad) net_template.pad->validate();
  noise.validate();
  alarm.validate();
  if (samples_per_bit < alarm.window) {
    throw std::invalid_argument("samples_per_bit must be at least the alarm window");
  }
}

BitPeriodTrace run_bit_period(Choice alice, Choice bob, const ResistorPair& pair,
                              const NetworkConfig& net_template, const NoiseSpec& noise,
                              std::size_t n_samples, std::uint64_t master_seed,
                              std::uint64_t period_index) {
  if (n_samples < 1) throw std::invalid_argument("run_bit_period: n_samples must be >= 1");
  pair.validate();

  NetworkConfig net = net_template;
  net.r_alice = pair.value(alice);
  net.r_bob = pair.value(bob);
  net.validate();

  const std::vector<double> noise_a =
      unit_noise({master_seed, derive_stream_id(period_index, StreamRole::alice_noise)}, noise, n_samples);
  const std::vector<double> noise_b =
      unit_noise({master_seed, derive_stream_id(period_index, StreamRole::bob_noise)}, noise, n_samples);
  const double rms_a = johnson_rms(net.r_alice, noise);
  const double rms_b = johnson_rms(net.r_bob, noise);

  BitPeriodTrace trace;
  trace.alice_choice = alice;
  trace.bob_choice = bob;
  trace.state = classify_state(alice, bob).state;
  trace.period_index = period_index;
  trace.samples.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    trace.samples.push_back(solve_network_sample(rms_a * noise_a[k], rms_b * noise_b[k], net));
  }
  return trace;
}

namespace {

double relative_difference(double ms_a, double ms_b) {
  const double larger = std::max(ms_a, ms_b);
  return larger > 0.0 ? std::abs(ms_a - ms_b) / larger : 0.0;
}

}  // namespace

AlarmReport current_alarm(const BitPeriodTrace& trace, const AlarmPolicy& policy) {
  policy.validate();
  const auto& s = trace.samples;
  const std::size_t w = policy.window;
  if (s.size() < w) throw std::invalid_argument("current_alarm: trace shorter than alarm window");

  AlarmReport report;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    sum_a += s[k].i_alice * s[k].i_alice;
    sum_b += s[k].i_bob * s[k].i_bob;
    if (k + 1 < w) continue;
    if (k + 1 > w) {
      const auto& leaving = s[k - w];
      sum_a -= leaving.i_alice * leaving.i_alice;
      sum_b -= leaving.i_bob * leaving.i_bob;
    }
    const double diff = relative_difference(sum_a, sum_b);
    if (diff > policy.rel_tolerance) {
      report.triggered = true;
      report.first_trigger_sample = k;
      report.rel_difference = diff;
      return report;
    }
    report.rel_difference = std::max(report.rel_difference, diff);
  }
  return report;
}

bool PeriodSummary::operator==(const PeriodSummary& o) const {
  return period_index == o.period_index && alice_choice == o.alice_choice &&
         bob_choice == o.bob_choice && state == o.state && secure == o.secure &&
         key_bit == o.key_bit && alarm.triggered == o.alarm.triggered &&
         alarm.first_trigger_sample == o.alarm.first_trigger_sample &&
         alarm.rel_difference == o.alarm.rel_difference;
}

std::vector<int> KeyExchangeRecord::key_bits() const {
  std::vector<int> bits;
  for (const auto& p : periods) {
    if (p.key_bit) bits.push_back(*p.key_bit);
  }
  return bits;
}

double KeyExchangeRecord::secure_fraction() const {
  return periods.empty() ? 0.0 : static_cast<double>(secure_periods) / static_cast<double>(periods.size());
}

std::pair<Choice, Choice> draw_choices(std::uint64_t master_seed, std::uint64_t period_index) {
  auto engine = make_engine({master_seed, derive_stream_id(period_index, StreamRole::choices)});
  const std::uint64_t bits = engine();
  return {(bits & 1u) ? Choice::high : Choice::low, (bits & 2u) ? Choice::high : Choice::low};
}

KeyExchangeRecord run_key_exchange(std::size_t n_bits, const ExchangeConfig& config,
                                   const TraceVisitor& visit) {
  if (n_bits < 1) throw std::invalid_argument("run_key_exchange: n_bits must be >= 1");
  config.validate();

  KeyExchangeRecord record;
  record.periods.reserve(n_bits);
  for (std::uint64_t period = 0; period < n_bits; ++period) {
    const auto [alice, bob] = draw_choices(config.master_seed, period);
    const BitPeriodTrace trace = run_bit_period(alice, bob, config.pair, config.net_template, config.noise,
                                                config.samples_per_bit, config.master_seed, period);
    PeriodSummary summary;
    summary.period_index = period;
    summary.alice_choice = alice;
    summary.bob_choice = bob;
    summary.state = trace.state;
    summary.secure = trace.secure();
    summary.key_bit = key_bit(trace.state);
    summary.alarm = current_alarm(trace, config.alarm);

    record.secure_periods += summary.secure ? 1 : 0;
    record.alarms += summary.alarm.triggered ? 1 : 0;
    record.secure_alarms += (summary.secure && summary.alarm.triggered) ? 1 : 0;
    if (visit) visit(trace, summary);
    record.periods.push_back(summary);
  }
  return record;
}

}  // namespace kljn
