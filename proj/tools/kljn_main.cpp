// kljn: analyze, simulate, and design-pad front end for the kljn core library.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kljn/circuit.hpp"
#include "kljn/harness.hpp"

namespace {

using namespace kljn;
using namespace kljn::harness;

struct SourceOptions {
  std::string config_path;
  std::string preset;
  std::string out_path;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentConfig load_source(const SourceOptions& src) {
  if (!src.config_path.empty() && !src.preset.empty()) {
    throw ConfigError("--config/--preset: give exactly one");
  }
  if (src.config_path.empty() && src.preset.empty()) {
    throw ConfigError("--config/--preset: one of them is required");
  }
  return src.config_path.empty() ? config_from_preset(src.preset) : load_config_file(src.config_path);
}

void apply_seed_fallback(ExperimentConfig& cfg) {
  if (cfg.seed) return;
  if (const char* env = std::getenv("KLJN_SEED")) {
    auto seed = parse_seed(env);
    if (!seed) throw ConfigError("KLJN_SEED: expected an unsigned 64-bit integer");
    cfg.seed = seed;
  }
}

void emit(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(*path);
  out << text << '\n';
  if (!out) throw RuntimeError("cannot write report to '" + *path + "'");
}

int run_analyze(const SourceOptions& src) {
  ExperimentConfig cfg = load_source(src);
  if (!src.out_path.empty()) cfg.report_path = src.out_path;
  apply_seed_fallback(cfg);
  emit(to_json(analyze(cfg, utc_timestamp())), cfg.report_path);
  return exit_ok;
}

struct SimulateOptions {
  std::optional<std::string> seed;
  std::optional<std::uint64_t> bits;
  std::optional<std::uint64_t> samples_per_bit;
  std::optional<std::string> trace_csv;
  std::optional<std::string> mode;
  std::optional<double> alarm_tolerance;
  std::optional<std::uint64_t> alarm_window;
  std::optional<std::uint64_t> max_measurements;
};

int run_simulate(const SourceOptions& src, const SimulateOptions& opt) {
  ExperimentConfig cfg = load_source(src);
  if (!src.out_path.empty()) cfg.report_path = src.out_path;
  if (opt.seed) {
    cfg.seed = parse_seed(*opt.seed);
    if (!cfg.seed) throw ConfigError("--seed: expected an unsigned 64-bit integer");
  }
  apply_seed_fallback(cfg);
  if (opt.bits) cfg.n_bits = *opt.bits;
  if (opt.samples_per_bit) cfg.samples_per_bit = *opt.samples_per_bit;
  if (opt.trace_csv) cfg.trace_csv_path = *opt.trace_csv;
  if (opt.mode) cfg.noise.mode = *opt.mode == "waveform" ? SamplingMode::waveform : SamplingMode::independent;
  if (opt.alarm_tolerance) cfg.alarm.rel_tolerance = *opt.alarm_tolerance;
  if (opt.alarm_window) cfg.alarm.window = *opt.alarm_window;
  if (opt.max_measurements) cfg.max_measurements = *opt.max_measurements;
  cfg.validate();

  std::optional<std::ofstream> csv;
  if (cfg.trace_csv_path) {
    csv.emplace(*cfg.trace_csv_path);
    if (!*csv) throw RuntimeError("cannot open trace CSV '" + *cfg.trace_csv_path + "'");
  }
  const RunReport report = simulate(cfg, utc_timestamp(), csv ? &*csv : nullptr);
  emit(to_json(report), cfg.report_path);
  return exit_ok;
}

int run_design_pad(double loss_db, double z0) {
  AttenuatorConfig pad;
  try {
    pad = design_tee_pad(loss_db, z0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--loss-db/--z0: ") + e.what());
  }
  nlohmann::ordered_json out{{"loss_db", loss_db},
                             {"z0", z0},
                             {"r_series", pad.r_series},
                             {"r_shunt", pad.r_shunt ? nlohmann::ordered_json(*pad.r_shunt) : nullptr}};
  std::cout << out.dump(2) << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and analyzer for KLJN key exchange over single- and two-loop networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  SourceOptions analyze_src;
  auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form moments and attack probabilities");
  analyze_cmd->add_option("--config", analyze_src.config_path, "JSON config file");
  analyze_cmd->add_option("--preset", analyze_src.preset, "Built-in network: gaa-1db, gaa-0p1db, lossless");
  analyze_cmd->add_option("--out", analyze_src.out_path, "Write the JSON report here instead of stdout");

  SourceOptions sim_src;
  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo key exchange, alarm, and attack campaign");
  sim_cmd->add_option("--config", sim_src.config_path, "JSON config file");
  sim_cmd->add_option("--preset", sim_src.preset, "Built-in network: gaa-1db, gaa-0p1db, lossless");
  sim_cmd->add_option("--out", sim_src.out_path, "Write the JSON report here instead of stdout");
  sim_cmd->add_option("--seed", sim.seed, "Master seed (falls back to KLJN_SEED, then 0)");
  sim_cmd->add_option("--bits", sim.bits, "Number of bit periods");
  sim_cmd->add_option("--samples-per-bit", sim.samples_per_bit, "Samples per bit period");
  sim_cmd->add_option("--trace-csv", sim.trace_csv, "Dump every sample as CSV");
  sim_cmd->add_option("--mode", sim.mode, "Noise sampling mode")
      ->check(CLI::IsMember({"independent", "waveform"}));
  sim_cmd->add_option("--alarm-tolerance", sim.alarm_tolerance, "Alarm relative tolerance");
  sim_cmd->add_option("--alarm-window", sim.alarm_window, "Alarm window in samples");
  sim_cmd->add_option("--max-measurements", sim.max_measurements, "Eve's per-bit measurement budget");

  double loss_db = 0.0;
  double z0 = 50.0;
  auto* pad_cmd = app.add_subcommand("design-pad", "Symmetric T attenuator for a given loss and impedance");
  pad_cmd->add_option("--loss-db", loss_db, "Attenuation in dB")->required();
  pad_cmd->add_option("--z0", z0, "Image impedance in ohms")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config_error;
  }

  try {
    if (*analyze_cmd) return run_analyze(analyze_src);
    if (*sim_cmd) return run_simulate(sim_src, sim);
    if (*pad_cmd) return run_design_pad(loss_db, z0);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime_error;
  }
  return exit_ok;
}
