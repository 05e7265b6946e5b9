#include "kljn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace kljn {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be positive and finite");
  }
}

// Fraction of a current entering the shunt node that leaves through a branch
// of resistance r_branch, the rest going down the shunt.
double branch_share(double r_branch, std::optional<double> r_shunt) {
  if (!r_shunt) return 1.0;
  return *r_shunt / (r_branch + *r_shunt);
}

// Mean square of the current at the `near` end per unit of 4 k T_eff B: the
// near source's own loop current plus the share of the far source's current
// that reaches the near end.
double closed_form_ms(double r_near, double r_far, std::optional<double> r_shunt) {
  const double own_loop = r_near + parallel_resistance(r_far, r_shunt);
  const double far_loop = r_far + parallel_resistance(r_near, r_shunt);
  const double share = branch_share(r_near, r_shunt);
  return r_near / (own_loop * own_loop) + share * share * r_far / (far_loop * far_loop);
}

// The ratio is taken before scaling so it does not depend on the unit system.
CurrentMoments make_moments(double unit_alice, double unit_bob, double scale) {
  CurrentMoments unit{unit_alice, unit_bob, 1.0};
  return {scale * unit_alice, scale * unit_bob, current_ratio(unit)};
}

}  // namespace

void AttenuatorConfig::validate() const {
  if (!(r_series >= 0.0) || !std::isfinite(r_series)) {
    throw std::invalid_argument("pad.r_series must be nonnegative and finite");
  }
  if (r_shunt) require_positive(*r_shunt, "pad.r_shunt");
}

void NetworkConfig::validate() const {
  require_positive(r_alice, "r_alice");
  require_positive(r_bob, "r_bob");
  if (pad) pad->validate();
}

NetworkConfig NetworkConfig::swapped() const {
  NetworkConfig out = *this;
  std::swap(out.r_alice, out.r_bob);
  return out;
}

double parallel_resistance(double r1, std::optional<double> r2) {
  if (!r2) return r1;
  const double sum = r1 + *r2;
  return sum == 0.0 ? 0.0 : r1 * *r2 / sum;
}

CurrentMoments analytic_mean_square_currents(const NetworkConfig& net, const NoiseSpec& noise) {
  net.validate();
  const auto shunt = net.r_shunt();
  return make_moments(closed_form_ms(net.r_alice, net.r_bob, shunt),
                      closed_form_ms(net.r_bob, net.r_alice, shunt), noise.unit_scale());
}

CurrentMoments exact_mean_square_currents(const NetworkConfig& net, const NoiseSpec& noise) {
  net.validate();
  // Source mean squares are 4 k T_eff B R; the network is linear in (u_A, u_B).
  const InstantState from_alice = solve_network_sample(1.0, 0.0, net);
  const InstantState from_bob = solve_network_sample(0.0, 1.0, net);
  const auto ms = [&](double g_alice, double g_bob) {
    return net.r_alice * g_alice * g_alice + net.r_bob * g_bob * g_bob;
  };
  return make_moments(ms(from_alice.i_alice, from_bob.i_alice), ms(from_alice.i_bob, from_bob.i_bob),
                      noise.unit_scale());
}

double current_ratio(const CurrentMoments& m) {
  const auto [lo, hi] = std::minmax(m.ms_alice, m.ms_bob);
  return hi / lo;
}

InstantState solve_network_sample(double u_alice, double u_bob, const NetworkConfig& net) {
  const double ra = net.r_alice + net.r_series();
  const double rb = net.r_bob + net.r_series();

  if (net.single_loop()) {
    const double i = (u_alice - u_bob) / (ra + rb);
    return {i, i, u_alice - i * ra};
  }

  const double g_shunt = 1.0 / *net.r_shunt();
  const double v = (u_alice / ra + u_bob / rb) / (1.0 / ra + 1.0 / rb + g_shunt);
  return {(u_alice - v) / ra, (v - u_bob) / rb, v};
}

AttenuatorConfig design_tee_pad(double loss_db, double z0) {
  if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) {
    throw std::invalid_argument("loss_db must be nonnegative and finite");
  }
  require_positive(z0, "z0");
  if (loss_db == 0.0) return {0.0, std::nullopt};

  // Voltage ratio input/output of the matched pad.
  const double k = std::pow(10.0, loss_db / 20.0);
  return {z0 * (k - 1.0) / (k + 1.0), 2.0 * z0 * k / (k * k - 1.0)};
}

std::optional<NetworkConfig> network_preset(std::string_view name) {
  if (name == "gaa-1db") {
    return NetworkConfig{1000.0, 10000.0, AttenuatorConfig{2.9, 500.0}, "gaa-1db"};
  }
  if (name == "gaa-0p1db") {
    return NetworkConfig{1000.0, 10000.0, design_tee_pad(0.1, 50.0), "gaa-0p1db"};
  }
  if (name == "lossless") {
    return NetworkConfig{1000.0, 10000.0, std::nullopt, "lossless"};
  }
  return std::nullopt;
}

std::vector<std::string_view> network_preset_names() { return {"gaa-1db", "gaa-0p1db", "lossless"}; }

}  // namespace kljn
