#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kljn/noise.hpp"

namespace kljn {

/// Symmetric T attenuator inserted between Alice and Bob: one series
/// element on each side of a shunt to ground. A missing shunt means the
/// shunt branch is open and the wire stays a single loop.
struct AttenuatorConfig {
  double r_series = 0.0;
  std::optional<double> r_shunt;

  void validate() const;
  bool operator==(const AttenuatorConfig&) const = default;
};

/// Alice's resistor, optional pad, Bob's resistor.
struct NetworkConfig {
  double r_alice = 0.0;
  double r_bob = 0.0;
  std::optional<AttenuatorConfig> pad;
  std::string label;

  /// True when no shunt splits the wire into two loops.
  bool single_loop() const { return !pad || !pad->r_shunt; }
  double r_series() const { return pad ? pad->r_series : 0.0; }
  std::optional<double> r_shunt() const { return pad ? pad->r_shunt : std::nullopt; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Same pad with Alice's and Bob's resistors exchanged.
  NetworkConfig swapped() const;

  bool operator==(const NetworkConfig&) const = default;
};

/// Mean-square end currents, in A^2 or in normalized units.
struct CurrentMoments {
  double ms_alice = 0.0;
  double ms_bob = 0.0;
  double ratio = 1.0;  // larger / smaller
};

/// Instantaneous solution of the network for one pair of source voltages.
/// i_alice flows out of Alice's source into the wire, i_bob flows from the
/// wire into Bob's source, v_node is the shunt node voltage.
struct InstantState {
  double i_alice = 0.0;
  double i_bob = 0.0;
  double v_node = 0.0;

  bool operator==(const InstantState&) const = default;
};

/// r1 || r2; an absent r2 is an open circuit.
double parallel_resistance(double r1, std::optional<double> r2);

/// Closed-form mean-square end currents with the series elements neglected.
CurrentMoments analytic_mean_square_currents(const NetworkConfig& net, const NoiseSpec& noise);

/// Mean-square end currents with the series elements kept, from the
/// superposition of the two independent sources through solve_network_sample.
CurrentMoments exact_mean_square_currents(const NetworkConfig& net, const NoiseSpec& noise);

double current_ratio(const CurrentMoments& m);

/// Nodal solution for source voltages u_alice, u_bob. Exact, including the
/// series elements. In a single loop both currents are the same value.
InstantState solve_network_sample(double u_alice, double u_bob, const NetworkConfig& net);

/// Symmetric T pad that is image-matched to z0 and attenuates the terminated
/// voltage by loss_db. A zero loss returns the identity pad (0, open).
AttenuatorConfig design_tee_pad(double loss_db, double z0);

/// Built-in networks: "gaa-1db", "gaa-0p1db", "lossless".
std::optional<NetworkConfig> network_preset(std::string_view name);
std::vector<std::string_view> network_preset_names();

}  // namespace kljn
