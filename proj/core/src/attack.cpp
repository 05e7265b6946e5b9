#include "kljn/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kljn {
namespace {

double rate(std::uint64_t count, std::uint64_t total) {
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(count) / static_cast<double>(total);
}

Interval interval_or_full(std::uint64_t count, std::uint64_t total, double z) {
  return total == 0 ? Interval{0.0, 1.0} : wilson_ci(count, total, z);
}

Verdict true_verdict(BitState state) {
  return state == BitState::LH ? Verdict::alice_is_low : Verdict::bob_is_low;
}

}  // namespace

EveCalibration calibrate(const NetworkConfig& net, const NoiseSpec& noise) {
  const CurrentMoments m = analytic_mean_square_currents(net, noise);
  return {1.0 / std::min(m.ms_alice, m.ms_bob), m.ratio};
}

Verdict single_sample_decision(double x_alice, double x_bob, const EveCalibration& cal) {
  const double t = cal.threshold;
  if (x_alice > t && x_bob < t) return Verdict::alice_is_low;
  if (x_bob > t && x_alice < t) return Verdict::bob_is_low;
  return Verdict::no_answer;
}

std::optional<int> bit_from_verdict(Verdict v) {
  // Alice low means Bob holds High: LH, bit 0.
  switch (v) {
    case Verdict::alice_is_low: return 0;
    case Verdict::bob_is_low: return 1;
    case Verdict::no_answer: return std::nullopt;
  }
  return std::nullopt;
}

BitAttackOutcome attack_bit(const BitPeriodTrace& trace, const EveCalibration& cal,
                            std::size_t max_measurements, std::size_t stride) {
  if (!trace.secure()) throw std::invalid_argument("attack_bit: trace is not from a secure period");
  if (max_measurements < 1) throw std::invalid_argument("attack_bit: max_measurements must be >= 1");
  if (stride < 1) throw std::invalid_argument("attack_bit: stride must be >= 1");

  const int truth = *key_bit(trace.state);
  BitAttackOutcome out;
  for (std::size_t k = 0; k < trace.samples.size() && out.measurements_used < max_measurements; k += stride) {
    const InstantState& s = trace.samples[k];
    ++out.measurements_used;
    const Verdict v = single_sample_decision(s.i_alice * s.i_alice * cal.norm_constant,
                                             s.i_bob * s.i_bob * cal.norm_constant, cal);
    if (v != Verdict::no_answer) {
      out.guess = bit_from_verdict(v);
      out.correct = *out.guess == truth;
      return out;
    }
  }
  out.gave_up = true;
  return out;
}

TrialCounts& TrialCounts::operator+=(const TrialCounts& o) {
  successes += o.successes;
  errors += o.errors;
  no_answers += o.no_answers;
  return *this;
}

double AttackStats::p_success() const { return rate(trials.successes, trials.total()); }
double AttackStats::p_error() const { return rate(trials.errors, trials.total()); }
double AttackStats::p_no_answer() const { return rate(trials.no_answers, trials.total()); }

double AttackStats::conditional_fidelity() const {
  return rate(trials.successes, trials.successes + trials.errors);
}

double AttackStats::bit_fidelity() const { return rate(bits_correct, bits_answered); }

double AttackStats::mean_measurements() const { return rate(measurements_to_answer, bits_answered); }

Interval AttackStats::success_ci(double z) const { return interval_or_full(trials.successes, trials.total(), z); }
Interval AttackStats::error_ci(double z) const { return interval_or_full(trials.errors, trials.total(), z); }
Interval AttackStats::no_answer_ci(double z) const {
  return interval_or_full(trials.no_answers, trials.total(), z);
}
Interval AttackStats::fidelity_ci(double z) const {
  return interval_or_full(trials.successes, trials.successes + trials.errors, z);
}

void AttackStats::record_trial(Verdict v, BitState truth) {
  TrialCounts one;
  if (v == Verdict::no_answer) {
    one.no_answers = 1;
  } else if (v == true_verdict(truth)) {
    one.successes = 1;
  } else {
    one.errors = 1;
  }
  trials += one;
  (truth == BitState::LH ? trials_lh : trials_hl) += one;
}

void AttackStats::record_bit(const BitAttackOutcome& outcome) {
  ++bits_attacked;
  if (outcome.gave_up) {
    ++bits_gave_up;
    return;
  }
  ++bits_answered;
  bits_correct += *outcome.correct ? 1 : 0;
  measurements_to_answer += outcome.measurements_used;
  ++measurements_histogram[outcome.measurements_used];
}

AttackStats& AttackStats::operator+=(const AttackStats& o) {
  trials += o.trials;
  trials_lh += o.trials_lh;
  trials_hl += o.trials_hl;
  bits_attacked += o.bits_attacked;
  bits_answered += o.bits_answered;
  bits_correct += o.bits_correct;
  bits_gave_up += o.bits_gave_up;
  measurements_to_answer += o.measurements_to_answer;
  for (const auto& [k, n] : o.measurements_histogram) measurements_histogram[k] += n;
  return *this;
}

CampaignResult attack_campaign(std::size_t n_bits, const CampaignConfig& config, const TraceVisitor& also) {
  const ExchangeConfig& ex = config.exchange;
  ex.validate();

  NetworkConfig public_net = ex.net_template;
  public_net.r_alice = ex.pair.r_low;
  public_net.r_bob = ex.pair.r_high;

  CampaignResult result;
  result.calibration = calibrate(public_net, ex.noise);
  if (config.threshold_override) result.calibration.threshold = *config.threshold_override;
  const EveCalibration& cal = result.calibration;
  const std::size_t stride = ex.noise.samples_per_correlation_time();

  result.exchange = run_key_exchange(n_bits, ex, [&](const BitPeriodTrace& trace, const PeriodSummary& summary) {
    if (trace.secure()) {
      for (std::size_t k = 0; k < trace.samples.size(); k += stride) {
        const InstantState& s = trace.samples[k];
        result.attack.record_trial(single_sample_decision(s.i_alice * s.i_alice * cal.norm_constant,
                                                          s.i_bob * s.i_bob * cal.norm_constant, cal),
                                   trace.state);
      }
      result.attack.record_bit(attack_bit(trace, cal, config.max_measurements, stride));
    }
    if (also) also(trace, summary);
  });
  return result;
}

}  // namespace kljn
