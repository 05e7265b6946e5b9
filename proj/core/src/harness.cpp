#include "kljn/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#ifndef KLJN_VERSION
#define KLJN_VERSION "0.0.0"
#endif

namespace kljn::harness {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Strict view of one JSON object: every key must be consumed before finish().
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path) : obj_(value), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    auto it = obj_.find(std::string(key));
    if (it == obj_.end()) return nullptr;
    seen_.insert(std::string(key));
    return &*it;
  }

  const json& require(std::string_view key) {
    const json* v = find(key);
    if (!v) fail(key_path(key), "missing required key");
    return *v;
  }

  std::optional<double> number(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(key_path(key), "expected a number");
    return v->get<double>();
  }

  std::optional<std::uint64_t> count(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) fail(key_path(key), "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> text(std::string_view key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(key_path(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.contains(item.key())) fail(key_path(item.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

NetworkConfig parse_network(const json& value) {
  ObjectReader r(value, "network");
  if (auto preset = r.text("preset")) {
    r.finish();
    auto net = network_preset(*preset);
    if (!net) fail("network.preset", "unknown preset '" + *preset + "'");
    return *net;
  }

  NetworkConfig net;
  if (!r.find("r_alice")) fail("network.r_alice", "missing required key");
  if (!r.find("r_bob")) fail("network.r_bob", "missing required key");
  net.r_alice = *r.number("r_alice");
  net.r_bob = *r.number("r_bob");
  net.label = r.text("label").value_or("custom");
  if (const json* pad = r.find("pad"); pad && !pad->is_null()) {
    ObjectReader p(*pad, "network.pad");
    AttenuatorConfig cfg;
    cfg.r_series = p.number("r_series").value_or(0.0);
    if (const json* shunt = p.find("r_shunt"); shunt && !shunt->is_null()) {
      if (!shunt->is_number()) fail("network.pad.r_shunt", "expected a number or null");
      cfg.r_shunt = shunt->get<double>();
    }
    p.finish();
    net.pad = cfg;
  }
  r.finish();
  return net;
}

NoiseSpec parse_noise(const json& value) {
  ObjectReader r(value, "noise");
  NoiseSpec spec;
  if (const json* t = r.find("t_eff")) {
    if (t->is_string()) {
      if (t->get<std::string>() != "normalized") fail("noise.t_eff", "expected a number or \"normalized\"");
    } else if (t->is_number()) {
      spec.t_eff = t->get<double>();
    } else {
      fail("noise.t_eff", "expected a number or \"normalized\"");
    }
  }
  if (auto b = r.number("bandwidth")) spec.bandwidth = *b;
  if (auto mode = r.text("mode")) {
    if (*mode == "independent") {
      spec.mode = SamplingMode::independent;
    } else if (*mode == "waveform") {
      spec.mode = SamplingMode::waveform;
    } else {
      fail("noise.mode", "expected \"independent\" or \"waveform\"");
    }
  }
  if (auto os = r.count("oversample")) {
    if (*os > 1u << 20) fail("noise.oversample", "too large");
    spec.oversample = static_cast<int>(*os);
  }
  r.finish();
  return spec;
}

void parse_protocol(const json& value, ExperimentConfig& cfg) {
  ObjectReader r(value, "protocol");
  if (auto n = r.count("n_bits")) cfg.n_bits = *n;
  if (auto n = r.count("samples_per_bit")) cfg.samples_per_bit = *n;
  if (const json* alarm = r.find("alarm")) {
    ObjectReader a(*alarm, "protocol.alarm");
    if (auto d = a.number("rel_tolerance")) cfg.alarm.rel_tolerance = *d;
    if (auto w = a.count("window")) cfg.alarm.window = *w;
    a.finish();
  }
  r.finish();
}

ordered_json interval_json(const Interval& ci) { return ordered_json::array({ci.lower, ci.upper}); }

ordered_json moments_json(const CurrentMoments& m) {
  return {{"ms_alice", m.ms_alice}, {"ms_bob", m.ms_bob}, {"ratio", m.ratio}};
}

ordered_json network_json(const NetworkConfig& net) {
  ordered_json out{{"r_alice", net.r_alice}, {"r_bob", net.r_bob}, {"label", net.label}};
  if (net.pad) {
    out["pad"] = {{"r_series", net.pad->r_series},
                  {"r_shunt", net.pad->r_shunt ? ordered_json(*net.pad->r_shunt) : ordered_json(nullptr)}};
  } else {
    out["pad"] = nullptr;
  }
  return out;
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json noise{{"t_eff", c.noise.t_eff ? ordered_json(*c.noise.t_eff) : ordered_json("normalized")},
                     {"bandwidth", c.noise.bandwidth},
                     {"mode", c.noise.mode == SamplingMode::waveform ? "waveform" : "independent"},
                     {"oversample", c.noise.oversample}};
  ordered_json out{
      {"schema_version", config_schema_version},
      {"network", network_json(c.network)},
      {"noise", noise},
      {"protocol",
       {{"n_bits", c.n_bits},
        {"samples_per_bit", c.samples_per_bit},
        {"alarm", {{"rel_tolerance", c.alarm.rel_tolerance}, {"window", c.alarm.window}}}}},
      {"attack", {{"max_measurements", c.max_measurements}}},
      {"seed", c.resolved_seed()},
  };
  ordered_json output = ordered_json::object();
  if (c.report_path) output["report"] = *c.report_path;
  if (c.trace_csv_path) output["trace_csv"] = *c.trace_csv_path;
  out["output"] = output;
  return out;
}

ordered_json rate_json(double rate, const Interval& ci, double analytic) {
  return {{"rate", rate}, {"ci99", interval_json(ci)}, {"analytic", analytic}, {"covered", ci.contains(analytic)}};
}

void write_trace_rows(std::ostream& out, const BitPeriodTrace& trace) {
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const InstantState& s = trace.samples[k];
    out << trace.period_index << ',' << k << ',' << format_double(s.i_alice) << ','
        << format_double(s.i_bob) << ',' << format_double(s.v_node) << '\n';
  }
}

}  // namespace

std::string_view version() { return KLJN_VERSION; }

ResistorPair ExperimentConfig::pair() const {
  return {std::min(network.r_alice, network.r_bob), std::max(network.r_alice, network.r_bob)};
}

void ExperimentConfig::validate() const {
  try {
    network.validate();
  } catch (const std::invalid_argument& e) {
    fail("network", e.what());
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    fail("noise", e.what());
  }
  if (!(alarm.rel_tolerance > 0.0)) fail("protocol.alarm.rel_tolerance", "must be > 0");
  if (alarm.window < 2) fail("protocol.alarm.window", "must be >= 2");
  if (n_bits < 1) fail("protocol.n_bits", "must be >= 1");
  if (samples_per_bit < alarm.window) fail("protocol.samples_per_bit", "must be at least protocol.alarm.window");
  if (max_measurements < 1) fail("attack.max_measurements", "must be >= 1");
}

CampaignConfig ExperimentConfig::campaign() const {
  validate();
  if (network.r_alice == network.r_bob) {
    fail("network", "r_alice and r_bob must differ to form the low/high resistor pair");
  }
  CampaignConfig c;
  c.exchange.pair = pair();
  c.exchange.net_template = network;
  c.exchange.noise = noise;
  c.exchange.samples_per_bit = samples_per_bit;
  c.exchange.alarm = alarm;
  c.exchange.master_seed = resolved_seed();
  c.max_measurements = max_measurements;
  return c;
}

ExperimentConfig config_from_preset(std::string_view name) {
  auto net = network_preset(name);
  if (!net) fail("network.preset", "unknown preset '" + std::string(name) + "'");
  ExperimentConfig cfg;
  cfg.network = *net;
  return cfg;
}

ExperimentConfig config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config", std::string("malformed JSON: ") + e.what());
  }

  ObjectReader r(doc, "");
  ExperimentConfig cfg;
  if (auto v = r.count("schema_version"); v && *v != static_cast<std::uint64_t>(config_schema_version)) {
    fail("schema_version", "unsupported version " + std::to_string(*v));
  }
  cfg.network = parse_network(r.require("network"));
  if (const json* noise = r.find("noise")) cfg.noise = parse_noise(*noise);
  if (const json* protocol = r.find("protocol")) parse_protocol(*protocol, cfg);
  if (const json* attack = r.find("attack")) {
    ObjectReader a(*attack, "attack");
    if (auto m = a.count("max_measurements")) cfg.max_measurements = *m;
    a.finish();
  }
  cfg.seed = r.count("seed");
  if (const json* output = r.find("output")) {
    ObjectReader o(*output, "output");
    cfg.report_path = o.text("report");
    cfg.trace_csv_path = o.text("trace_csv");
    o.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("--config", "cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::optional<std::uint64_t> parse_seed(std::string_view text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

void EndCurrentStats::add(const BitPeriodTrace& trace) {
  const bool alice_low = trace.state == BitState::LH;
  for (const InstantState& s : trace.samples) {
    const double low = alice_low ? s.i_alice : s.i_bob;
    const double high = alice_low ? s.i_bob : s.i_alice;
    sum_low_sq += low * low;
    sum_high_sq += high * high;
    sum_cross += low * high;
  }
  samples += trace.samples.size();
}

double EndCurrentStats::ms_low() const {
  return samples ? sum_low_sq / static_cast<double>(samples) : std::numeric_limits<double>::quiet_NaN();
}

double EndCurrentStats::ms_high() const {
  return samples ? sum_high_sq / static_cast<double>(samples) : std::numeric_limits<double>::quiet_NaN();
}

double EndCurrentStats::correlation() const { return sum_cross / std::sqrt(sum_low_sq * sum_high_sq); }

RunReport analyze(const ExperimentConfig& config, std::string timestamp) {
  config.validate();
  RunReport report;
  report.kind = "analyze";
  report.config = config;
  report.analytic.moments = analytic_mean_square_currents(config.network, config.noise);
  report.analytic.moments_exact = exact_mean_square_currents(config.network, config.noise);
  report.analytic.calibration = calibrate(config.network, config.noise);
  report.analytic.probabilities = analytic_attack_probabilities(report.analytic.calibration.threshold);
  report.provenance = {std::string(version()), config.resolved_seed(), std::move(timestamp)};
  return report;
}

RunReport simulate(const ExperimentConfig& config, std::string timestamp, std::ostream* trace_csv) {
  const CampaignConfig campaign = config.campaign();
  RunReport report = analyze(config, std::move(timestamp));
  report.kind = "simulate";

  if (trace_csv) *trace_csv << trace_csv_header << '\n';

  EmpiricalSection emp;
  double rel_sum = 0.0;
  CampaignResult result = attack_campaign(config.n_bits, campaign, [&](const BitPeriodTrace& trace,
                                                                       const PeriodSummary& summary) {
    if (trace.secure()) {
      emp.currents.add(trace);
      rel_sum += summary.alarm.rel_difference;
    }
    if (trace_csv) write_trace_rows(*trace_csv, trace);
  });
  if (trace_csv && !*trace_csv) throw RuntimeError("failed while writing the trace CSV");

  emp.exchange = std::move(result.exchange);
  emp.attack = std::move(result.attack);
  emp.mean_secure_rel_difference = emp.exchange.secure_periods
                                       ? rel_sum / static_cast<double>(emp.exchange.secure_periods)
                                       : std::numeric_limits<double>::quiet_NaN();
  report.empirical = std::move(emp);
  return report;
}

std::string to_json(const RunReport& report) {
  const AnalyticSection& an = report.analytic;
  ordered_json out{{"schema_version", report_schema_version}, {"kind", report.kind}};
  out["config"] = config_json(report.config);
  out["analytic"] = {
      {"moments", moments_json(an.moments)},
      {"moments_exact", moments_json(an.moments_exact)},
      {"calibration", {{"norm_constant", an.calibration.norm_constant}, {"threshold", an.calibration.threshold}}},
      {"probabilities",
       {{"p_success", an.probabilities.p_success},
        {"p_error", an.probabilities.p_error},
        {"p_no_answer", an.probabilities.p_no_answer},
        {"expected_measurements", an.probabilities.expected_measurements},
        {"conditional_fidelity", an.probabilities.conditional_fidelity}}},
      {"bit_convention", "HL (Alice high) = 1, LH (Bob high) = 0"},
  };

  if (report.empirical) {
    const EmpiricalSection& emp = *report.empirical;
    const KeyExchangeRecord& ex = emp.exchange;
    const AttackStats& at = emp.attack;
    const std::uint64_t n_periods = ex.periods.size();

    const Interval secure_ci = wilson_ci(ex.secure_periods, n_periods, z_99);
    const Interval alarm_ci = ex.secure_periods ? wilson_ci(ex.secure_alarms, ex.secure_periods, z_99) : Interval{};
    const double ratio_dev = std::abs(emp.currents.ratio() / an.moments.ratio - 1.0);

    ordered_json histogram = ordered_json::object();
    for (const auto& [k, n] : at.measurements_histogram) histogram[std::to_string(k)] = n;

    const auto orientation = [](const TrialCounts& c) {
      const Interval ci = c.total() ? wilson_ci(c.successes, c.total(), z_99) : Interval{};
      return ordered_json{{"trials", c.total()},
                          {"p_success", c.total() ? static_cast<double>(c.successes) / c.total() : NAN},
                          {"ci99", interval_json(ci)}};
    };

    const auto& p = an.probabilities;
    ordered_json attack{
        {"trials", at.trials.total()},
        {"successes", at.trials.successes},
        {"errors", at.trials.errors},
        {"no_answers", at.trials.no_answers},
        {"p_success", rate_json(at.p_success(), at.success_ci(), p.p_success)},
        {"p_error", rate_json(at.p_error(), at.error_ci(), p.p_error)},
        {"p_no_answer", rate_json(at.p_no_answer(), at.no_answer_ci(), p.p_no_answer)},
        {"conditional_fidelity", rate_json(at.conditional_fidelity(), at.fidelity_ci(), p.conditional_fidelity)},
        {"orientation", {{"LH", orientation(at.trials_lh)}, {"HL", orientation(at.trials_hl)}}},
        {"bits",
         {{"attacked", at.bits_attacked},
          {"answered", at.bits_answered},
          {"correct", at.bits_correct},
          {"gave_up", at.bits_gave_up},
          {"fidelity", at.bit_fidelity()},
          {"mean_measurements", at.mean_measurements()},
          {"expected_measurements", p.expected_measurements},
          {"max_measurements", report.config.max_measurements},
          {"histogram", histogram}}},
    };

    out["empirical"] = {
        {"periods", n_periods},
        {"secure_periods", ex.secure_periods},
        {"secure_fraction", rate_json(ex.secure_fraction(), secure_ci, 0.5)},
        {"alarm",
         {{"rel_tolerance", report.config.alarm.rel_tolerance},
          {"window", report.config.alarm.window},
          {"alarms_total", ex.alarms},
          {"alarms_secure", ex.secure_alarms},
          {"rate_secure", ex.secure_periods ? static_cast<double>(ex.secure_alarms) / ex.secure_periods : NAN},
          {"rate_secure_ci99", interval_json(alarm_ci)},
          {"mean_rel_difference_secure", emp.mean_secure_rel_difference}}},
        {"currents",
         {{"samples", emp.currents.samples},
          {"ms_low_end", emp.currents.ms_low()},
          {"ms_high_end", emp.currents.ms_high()},
          {"ratio", emp.currents.ratio()},
          {"analytic_ratio", an.moments.ratio},
          {"exact_ratio", an.moments_exact.ratio},
          {"rel_deviation", ratio_dev},
          {"correlation", emp.currents.correlation()}}},
        {"attack", attack},
    };
    out["agreement"] = {
        {"ratio_within_2pct", ratio_dev <= ratio_rel_tolerance},
        {"p_success_covered", at.success_ci().contains(p.p_success)},
        {"p_error_covered", at.error_ci().contains(p.p_error)},
        {"p_no_answer_covered", at.no_answer_ci().contains(p.p_no_answer)},
        {"conditional_fidelity_covered", at.fidelity_ci().contains(p.conditional_fidelity)},
        {"secure_fraction_covered", secure_ci.contains(0.5)},
    };
  }

  out["provenance"] = {{"version", report.provenance.version},
                       {"seed", report.provenance.seed},
                       {"timestamp", report.provenance.timestamp}};
  return out.dump(2);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace kljn::harness
