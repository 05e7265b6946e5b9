#include "kljn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kljn {

double chi2_cdf_1(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("chi2_cdf_1: x must be nonnegative");
  return std::erf(std::sqrt(0.5 * x));
}

double chi2_sf_1(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("chi2_sf_1: x must be nonnegative");
  return std::erfc(std::sqrt(0.5 * x));
}

AttackProbabilities analytic_attack_probabilities(double ratio) {
  if (!(ratio >= 1.0)) {
    throw std::invalid_argument("analytic_attack_probabilities: ratio must be >= 1");
  }
  // Weak current (mean square 1) and strong current (mean square `ratio`),
  // both compared against the threshold `ratio`.
  const double weak_below = chi2_cdf_1(ratio);
  const double weak_above = chi2_sf_1(ratio);
  const double strong_below = chi2_cdf_1(1.0);
  const double strong_above = chi2_sf_1(1.0);

  AttackProbabilities p;
  p.p_success = weak_below * strong_above;
  p.p_error = weak_above * strong_below;
  p.p_no_answer = weak_below * strong_below + weak_above * strong_above;
  const double answered = p.p_success + p.p_error;
  p.expected_measurements = 1.0 / answered;
  p.conditional_fidelity = p.p_success / answered;
  return p;
}

Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_ci: trials must be >= 1");
  if (successes > trials) throw std::invalid_argument("wilson_ci: successes exceed trials");
  if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("wilson_ci: z must be finite and >= 0");

  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));

  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) ci.lower = 0.0;
  if (successes == trials) ci.upper = 1.0;
  return ci;
}

void MomentAccumulator::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n_a = static_cast<double>(count_);
  const double n_b = static_cast<double>(other.count_);
  const double n = n_a + n_b;
  const double delta = other.mean_ - mean_;
  mean_ += delta * n_b / n;
  m2_ += other.m2_ + delta * delta * n_a * n_b / n;
  count_ += other.count_;
}

Moments MomentAccumulator::moments() const {
  if (count_ == 0) throw std::logic_error("MomentAccumulator: no samples");
  const double variance = m2_ / static_cast<double>(count_);
  return {mean_, variance + mean_ * mean_, variance};
}

Moments empirical_moments(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_moments: empty input");
  MomentAccumulator acc;
  for (double x : samples) acc.add(x);
  return acc.moments();
}

}  // namespace kljn
