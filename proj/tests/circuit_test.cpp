#include "kljn/circuit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"

namespace kljn {
namespace {

// Frozen from a 30-digit evaluation of the closed-form expressions
// (R_A = 1 k, R_B = 10 k, R_2 = 500, 4kTB = 1).
constexpr double kMsAlice = 4.69302809573361082e-4;
constexpr double kMsBob = 9.46930280957336108e-5;
constexpr double kRatio = 4.95604395604395604;

NetworkConfig gaa_without_series() { return {1000.0, 10000.0, AttenuatorConfig{0.0, 500.0}, "gaa-r1-0"}; }

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

TEST(ParallelResistance, Examples) {
  EXPECT_NEAR(parallel_resistance(10000.0, 500.0), 476.190476190476, 1e-9);
  EXPECT_NEAR(parallel_resistance(1000.0, 500.0), 333.333333333333, 1e-9);
  EXPECT_EQ(parallel_resistance(1000.0, std::nullopt), 1000.0);
  EXPECT_EQ(parallel_resistance(0.0, 500.0), 0.0);
  EXPECT_EQ(parallel_resistance(0.0, 0.0), 0.0);
}

TEST(AnalyticMoments, GaaValues) {
  const CurrentMoments m = analytic_mean_square_currents(gaa_without_series(), NoiseSpec{});
  EXPECT_LT(rel_err(m.ms_alice, kMsAlice), 1e-13);
  EXPECT_LT(rel_err(m.ms_bob, kMsBob), 1e-13);
  EXPECT_LT(rel_err(m.ratio, kRatio), 1e-13);
  EXPECT_NEAR(m.ratio, 4.95, 0.01);
}

TEST(AnalyticMoments, SeriesElementIsIgnoredByClosedForm) {
  const auto preset = *network_preset("gaa-1db");
  EXPECT_EQ(analytic_mean_square_currents(preset, {}).ratio,
            analytic_mean_square_currents(gaa_without_series(), {}).ratio);
}

TEST(AnalyticMoments, LosslessEqualsLoopFormula) {
  const NetworkConfig net{1000.0, 10000.0, std::nullopt, ""};
  const CurrentMoments m = analytic_mean_square_currents(net, {});
  EXPECT_EQ(m.ms_alice, m.ms_bob);
  EXPECT_NEAR(m.ms_alice, 1.0 / 11000.0, 1e-18);
  EXPECT_EQ(m.ratio, 1.0);

  const CurrentMoments eq = analytic_mean_square_currents({2200.0, 2200.0, AttenuatorConfig{1.0, 300.0}, ""}, {});
  EXPECT_EQ(eq.ratio, 1.0);
}

TEST(AnalyticMoments, OpenShuntPadIsSingleLoop) {
  const NetworkConfig net{1000.0, 10000.0, AttenuatorConfig{2.9, std::nullopt}, ""};
  EXPECT_TRUE(net.single_loop());
  const CurrentMoments m = analytic_mean_square_currents(net, {});
  EXPECT_EQ(m.ms_alice, m.ms_bob);
}

TEST(AnalyticMoments, RejectsNonpositiveResistances) {
  EXPECT_THROW(analytic_mean_square_currents({0.0, 10.0, std::nullopt, ""}, {}), std::invalid_argument);
  EXPECT_THROW(analytic_mean_square_currents({10.0, -1.0, std::nullopt, ""}, {}), std::invalid_argument);
  EXPECT_THROW(analytic_mean_square_currents({10.0, 10.0, AttenuatorConfig{-1.0, 5.0}, ""}, {}),
               std::invalid_argument);
  EXPECT_THROW(analytic_mean_square_currents({10.0, 10.0, AttenuatorConfig{1.0, 0.0}, ""}, {}),
               std::invalid_argument);
  EXPECT_THROW(analytic_mean_square_currents({std::numeric_limits<double>::quiet_NaN(), 10.0, std::nullopt, ""}, {}),
               std::invalid_argument);
}

TEST(CurrentRatio, Examples) {
  EXPECT_EQ(current_ratio({2.0, 2.0, 0.0}), 1.0);
  EXPECT_EQ(current_ratio({1.0, 4.0, 0.0}), 4.0);
  const auto m = analytic_mean_square_currents(*network_preset("gaa-1db"), {});
  EXPECT_NEAR(current_ratio(m), 4.95, 0.01);
  EXPECT_EQ(current_ratio(analytic_mean_square_currents(network_preset("gaa-1db")->swapped(), {})), current_ratio(m));
}

TEST(SolveNetworkSample, Examples) {
  const NetworkConfig loop{1000.0, 10000.0, std::nullopt, ""};
  const InstantState s = solve_network_sample(1.0, 0.0, loop);
  EXPECT_DOUBLE_EQ(s.i_alice, 1.0 / 11000.0);
  EXPECT_EQ(s.i_alice, s.i_bob);

  const InstantState zero = solve_network_sample(0.0, 0.0, *network_preset("gaa-1db"));
  EXPECT_EQ(zero.i_alice, 0.0);
  EXPECT_EQ(zero.i_bob, 0.0);
  EXPECT_EQ(zero.v_node, 0.0);

  // Hand nodal analysis: v = (1/1000) / (1/1000 + 1/10000 + 1/500) = 10/31.
  const InstantState g = solve_network_sample(1.0, 0.0, gaa_without_series());
  EXPECT_NEAR(g.v_node, 10.0 / 31.0, 1e-15);
  EXPECT_NEAR(g.v_node, 0.32258, 1e-5);
  EXPECT_NEAR(g.i_alice, 6.774e-4, 1e-7);
  EXPECT_NEAR(g.i_bob, 3.226e-5, 1e-8);
}

TEST(SolveNetworkSample, SingleLoopWithSeriesUsesFullLoopResistance) {
  const NetworkConfig net{1000.0, 10000.0, AttenuatorConfig{2.9, std::nullopt}, ""};
  const InstantState s = solve_network_sample(2.0, -1.0, net);
  EXPECT_DOUBLE_EQ(s.i_alice, 3.0 / (11000.0 + 5.8));
  EXPECT_EQ(s.i_alice, s.i_bob);
}

TEST(SolveNetworkSample, MatchesModifiedNodalAnalysis) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> volts(-5.0, 5.0);
  std::uniform_real_distribution<double> log_r(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double ra = std::pow(10.0, log_r(rng));
    const double rb = std::pow(10.0, log_r(rng));
    const double r1 = trial % 3 == 0 ? 0.0 : std::pow(10.0, log_r(rng) - 2.0);
    const std::optional<double> r2 = trial % 5 == 0 ? std::nullopt : std::optional(std::pow(10.0, log_r(rng)));
    const NetworkConfig net{ra, rb, AttenuatorConfig{r1, r2}, ""};
    const double ua = volts(rng);
    const double ub = volts(rng);

    const InstantState got = solve_network_sample(ua, ub, net);
    const oracle::MnaResult want = oracle::mna_two_loop(ua, ub, ra, rb, r1, r2);
    const double scale = (std::abs(ua) + std::abs(ub)) / std::min(ra, rb);
    EXPECT_NEAR(got.i_alice, want.i_alice, 1e-11 * scale) << "trial " << trial;
    EXPECT_NEAR(got.i_bob, want.i_bob, 1e-11 * scale) << "trial " << trial;
    if (r2) EXPECT_NEAR(got.v_node, want.v_node, 1e-11 * (std::abs(ua) + std::abs(ub))) << "trial " << trial;
  }
}

TEST(CircuitProperties, SwapSymmetry) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(10.0, 1e5);
  for (int i = 0; i < 200; ++i) {
    const NetworkConfig net{r(rng), r(rng), AttenuatorConfig{0.0, r(rng)}, ""};
    const CurrentMoments a = analytic_mean_square_currents(net, {});
    const CurrentMoments b = analytic_mean_square_currents(net.swapped(), {});
    EXPECT_EQ(a.ms_alice, b.ms_bob);
    EXPECT_EQ(a.ms_bob, b.ms_alice);
    EXPECT_EQ(a.ratio, b.ratio);
  }
}

TEST(CircuitProperties, LosslessDegeneration) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> r(10.0, 1e5);
  std::normal_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const NetworkConfig net{r(rng), r(rng), std::nullopt, ""};
    const CurrentMoments m = analytic_mean_square_currents(net, {});
    EXPECT_EQ(m.ms_alice, m.ms_bob);
    const InstantState s = solve_network_sample(u(rng), u(rng), net);
    EXPECT_EQ(s.i_alice, s.i_bob);
  }
}

TEST(CircuitProperties, ScaleInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(10.0, 1e5);
  std::uniform_real_distribution<double> t(1.0, 1e18);
  for (int i = 0; i < 200; ++i) {
    const NetworkConfig net{r(rng), r(rng), AttenuatorConfig{1.0, r(rng)}, ""};
    NoiseSpec si;
    si.t_eff = t(rng);
    si.bandwidth = r(rng);
    const CurrentMoments unit = analytic_mean_square_currents(net, {});
    const CurrentMoments scaled = analytic_mean_square_currents(net, si);
    const double c = si.unit_scale();
    EXPECT_EQ(scaled.ratio, unit.ratio);
    EXPECT_EQ(scaled.ms_alice > scaled.ms_bob, unit.ms_alice > unit.ms_bob);
    EXPECT_LT(rel_err(scaled.ms_alice, c * unit.ms_alice), 1e-15);
    EXPECT_LT(rel_err(scaled.ms_bob, c * unit.ms_bob), 1e-15);
  }
}

TEST(CircuitProperties, SuperpositionMatchesClosedFormWithoutSeries) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> r(10.0, 1e5);
  for (int i = 0; i < 300; ++i) {
    const std::optional<double> shunt = i % 4 == 0 ? std::nullopt : std::optional(r(rng));
    const NetworkConfig net{r(rng), r(rng), AttenuatorConfig{0.0, shunt}, ""};
    // Transfer coefficients straight from the solver.
    const InstantState from_a = solve_network_sample(1.0, 0.0, net);
    const InstantState from_b = solve_network_sample(0.0, 1.0, net);
    const double ms_a = net.r_alice * from_a.i_alice * from_a.i_alice + net.r_bob * from_b.i_alice * from_b.i_alice;
    const double ms_b = net.r_alice * from_a.i_bob * from_a.i_bob + net.r_bob * from_b.i_bob * from_b.i_bob;
    const CurrentMoments m = analytic_mean_square_currents(net, {});
    EXPECT_LT(rel_err(m.ms_alice, ms_a), 1e-13);
    EXPECT_LT(rel_err(m.ms_bob, ms_b), 1e-13);
    const CurrentMoments exact = exact_mean_square_currents(net, {});
    EXPECT_LT(rel_err(exact.ms_alice, m.ms_alice), 1e-13);
    EXPECT_LT(rel_err(exact.ms_bob, m.ms_bob), 1e-13);
  }
}

TEST(CircuitProperties, RatioFallsMonotonicallyToOneAsShuntOpens) {
  for (const auto [ra, rb] : {std::pair{1000.0, 10000.0}, std::pair{47.0, 3300.0}, std::pair{9000.0, 200.0}}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double r2 = 1.0; r2 <= 1e12; r2 *= 1.5) {
      const double ratio = analytic_mean_square_currents({ra, rb, AttenuatorConfig{0.0, r2}, ""}, {}).ratio;
      EXPECT_LE(ratio, previous * (1.0 + 1e-15)) << "r2 = " << r2;
      EXPECT_GE(ratio, 1.0);
      previous = ratio;
    }
    EXPECT_LT(previous - 1.0, 1e-6);
  }
}

TEST(ExactMoments, SeriesApproximationErrorIsBelowOnePercentForGaa) {
  const auto net = *network_preset("gaa-1db");
  const CurrentMoments closed = analytic_mean_square_currents(net, {});
  const CurrentMoments exact = exact_mean_square_currents(net, {});
  EXPECT_LT(rel_err(exact.ratio, closed.ratio), 0.01);
  EXPECT_NE(exact.ratio, closed.ratio);
  // 30-digit reference with R1 = 2.9 kept.
  EXPECT_LT(rel_err(exact.ratio, 4.93981227708488405), 1e-13);
}

TEST(DesignTeePad, OneDecibel) {
  const AttenuatorConfig pad = design_tee_pad(1.0, 50.0);
  ASSERT_TRUE(pad.r_shunt);
  EXPECT_NEAR(pad.r_series, 2.875, 5e-4);
  EXPECT_NEAR(*pad.r_shunt, 433.3, 0.05);
  EXPECT_NEAR(pad.r_series, 2.87505638922686290, 1e-12);
  EXPECT_NEAR(*pad.r_shunt, 433.336552996934944, 1e-9);

  const auto [z_in, transfer] = oracle::tee_pad_terminated(pad.r_series, *pad.r_shunt, 50.0);
  EXPECT_NEAR(z_in, 50.0, 1e-9);
  EXPECT_NEAR(transfer, std::pow(10.0, -1.0 / 20.0), 1e-9);
}

TEST(DesignTeePad, TenthDecibel) {
  const AttenuatorConfig pad = design_tee_pad(0.1, 50.0);
  ASSERT_TRUE(pad.r_shunt);
  EXPECT_NEAR(pad.r_series, 0.288, 5e-4);
  EXPECT_NEAR(*pad.r_shunt, 4343.0, 0.5);
  const auto [z_in, transfer] = oracle::tee_pad_terminated(pad.r_series, *pad.r_shunt, 50.0);
  EXPECT_NEAR(z_in, 50.0, 1e-9);
  EXPECT_NEAR(transfer, std::pow(10.0, -0.1 / 20.0), 1e-9);
}

TEST(DesignTeePad, ConditionsHoldOverAGrid) {
  for (double db = 0.05; db < 40.0; db *= 1.3) {
    for (double z0 : {50.0, 75.0, 600.0}) {
      const AttenuatorConfig pad = design_tee_pad(db, z0);
      const auto [z_in, transfer] = oracle::tee_pad_terminated(pad.r_series, *pad.r_shunt, z0);
      EXPECT_NEAR(z_in / z0, 1.0, 1e-9) << db << " dB";
      EXPECT_NEAR(transfer / std::pow(10.0, -db / 20.0), 1.0, 1e-9) << db << " dB";
    }
  }
}

TEST(DesignTeePad, ZeroAndInvalid) {
  const AttenuatorConfig pad = design_tee_pad(0.0, 50.0);
  EXPECT_EQ(pad.r_series, 0.0);
  EXPECT_FALSE(pad.r_shunt);
  EXPECT_THROW(design_tee_pad(-1.0, 50.0), std::invalid_argument);
  EXPECT_THROW(design_tee_pad(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(design_tee_pad(std::numeric_limits<double>::quiet_NaN(), 50.0), std::invalid_argument);
}

TEST(Presets, Values) {
  const auto gaa = network_preset("gaa-1db");
  ASSERT_TRUE(gaa);
  EXPECT_EQ(gaa->r_alice, 1000.0);
  EXPECT_EQ(gaa->r_bob, 10000.0);
  EXPECT_EQ(gaa->pad->r_series, 2.9);
  EXPECT_EQ(*gaa->pad->r_shunt, 500.0);

  const auto tenth = network_preset("gaa-0p1db");
  ASSERT_TRUE(tenth);
  EXPECT_EQ(*tenth->pad, design_tee_pad(0.1, 50.0));

  const auto lossless = network_preset("lossless");
  ASSERT_TRUE(lossless);
  EXPECT_FALSE(lossless->pad);
  EXPECT_TRUE(lossless->single_loop());

  EXPECT_FALSE(network_preset("gaa-2db"));
  EXPECT_EQ(network_preset_names().size(), 3u);
}

}  // namespace
}  // namespace kljn
