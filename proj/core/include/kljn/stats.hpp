#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace kljn {

/// CDF of the chi-squared distribution with one degree of freedom, i.e. of
/// the square of a standard normal variable: erf(sqrt(x / 2)).
double chi2_cdf_1(double x);

/// Upper tail 1 - chi2_cdf_1(x), computed without cancellation.
double chi2_sf_1(double x);

/// Closed-form outcome probabilities of one current-comparison trial, for a
/// normalized squared-current pair with mean squares 1 and `ratio`, the
/// threshold placed at `ratio`, and the two currents treated as independent.
struct AttackProbabilities {
  double p_success = 0.0;
  double p_error = 0.0;
  double p_no_answer = 0.0;
  double expected_measurements = 0.0;  // mean trials until an answer
  double conditional_fidelity = 0.0;   // P(correct | answered)
};

/// Rejects ratio < 1 and NaN.
AttackProbabilities analytic_attack_probabilities(double ratio);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

inline constexpr double z_95 = 1.959963984540054;
inline constexpr double z_99 = 2.5758293035489004;

/// Wilson score interval for a binomial proportion, clipped to [0, 1].
Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double z);

struct Moments {
  double mean = 0.0;
  double mean_square = 0.0;
  double variance = 0.0;  // population variance
};

/// Streaming mean/variance (Welford). Constant inputs give exactly zero
/// variance.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);

  std::uint64_t count() const { return count_; }
  Moments moments() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Throws std::invalid_argument on empty input.
Moments empirical_moments(std::span<const double> samples);

}  // namespace kljn
