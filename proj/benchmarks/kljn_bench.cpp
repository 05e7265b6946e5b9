#include <benchmark/benchmark.h>

#include "kljn/attack.hpp"
#include "kljn/circuit.hpp"
#include "kljn/noise.hpp"
#include "kljn/protocol.hpp"
#include "kljn/stats.hpp"

namespace {

using namespace kljn;

void BM_SolveNetworkSample(benchmark::State& state) {
  const NetworkConfig net = *network_preset("gaa-1db");
  double ua = 0.3, ub = -0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_network_sample(ua, ub, net));
    ua += 1e-9;
  }
}
BENCHMARK(BM_SolveNetworkSample);

void BM_GaussianStream(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_stream({1, id++}, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianStream)->Arg(100)->Arg(10000);

void BM_BandLimitedStream(benchmark::State& state) {
  NoiseSpec spec;
  spec.mode = SamplingMode::waveform;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(band_limited_stream({1, id++}, spec, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BandLimitedStream)->Arg(800);

void BM_RunBitPeriod(benchmark::State& state) {
  const NetworkConfig net = *network_preset("gaa-1db");
  std::uint64_t period = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bit_period(Choice::low, Choice::high, ResistorPair{}, net, {}, 100, 7, period++));
  }
}
BENCHMARK(BM_RunBitPeriod);

void BM_AttackCampaign(benchmark::State& state) {
  CampaignConfig c;
  c.exchange.net_template = *network_preset("gaa-1db");
  for (auto _ : state) benchmark::DoNotOptimize(attack_campaign(static_cast<std::size_t>(state.range(0)), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AttackCampaign)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AnalyticProbabilities(benchmark::State& state) {
  double r = 4.95;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic_attack_probabilities(r));
    r += 1e-12;
  }
}
BENCHMARK(BM_AnalyticProbabilities);

}  // namespace

BENCHMARK_MAIN();
