#ifndef EHBAND_SCENARIO_HPP
#define EHBAND_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ehband {

/// Network instance over a K-slot horizon: N energy-harvesting transmitters,
/// each broadcasting to a disjoint set of receivers. Gains and harvests are
/// assumed known for the whole horizon. All receiver indices are 0-based.
struct Scenario {
  int n_transmitters = 0;
  int n_receivers = 0;
  int horizon = 0;
  std::vector<std::vector<int>> receiver_sets;   // [n] -> receiver indices
  std::vector<std::vector<double>> harvest;      // [n][k], >= 0 energy units
  std::vector<std::vector<double>> gains;        // [m][k], > 0
  std::vector<double> battery_cap;               // [n], > 0
  std::vector<std::optional<double>> max_power;  // [n]; nullopt = unbounded
  std::vector<double> weights;                   // [m], >= 0
  double epsilon = 0.0;                          // minimal bandwidth share

  // Transmitter owning receiver m, or -1 if m is in no receiver set.
  int transmitter_of(int m) const;
  bool power_bounded(int n) const { return max_power[n].has_value(); }
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

// Returns every violated invariant; empty means the scenario is valid.
std::vector<ValidationIssue> validate(const Scenario& s);
// Throws invalid_scenario_error listing all issues.
void validate_or_throw(const Scenario& s);

/// Cumulative effective harvest per transmitter: the largest nondecreasing
/// sequence dominated by the raw cumulative harvest for which the causality/
/// battery/power constraint polytope is nonempty.
struct EffectiveEnergy {
  std::vector<std::vector<double>> cum;  // [n][k]

  double at(int n, int k) const { return k <= 0 ? 0.0 : cum[n][k - 1]; }
  double total(int n) const { return cum[n].empty() ? 0.0 : cum[n].back(); }
};

EffectiveEnergy effective_energy(const Scenario& s);

enum class ChannelMode { orthogonal, nonorthogonal };

const char* to_string(ChannelMode mode);
std::optional<ChannelMode> channel_mode_from_string(const std::string& name);

/// Joint energy/bandwidth decision. Orthogonal mode fills `energy` and
/// `bandwidth` per receiver. Non-orthogonal mode fills `tx_energy` and
/// `tx_bandwidth` per transmitter plus the derived per-receiver `energy`
/// split.
struct Allocation {
  ChannelMode mode = ChannelMode::orthogonal;
  std::vector<std::vector<double>> energy;        // [m][k]
  std::vector<std::vector<double>> bandwidth;     // [m][k] (orthogonal)
  std::vector<std::vector<double>> tx_energy;     // [n][k] (non-orthogonal)
  std::vector<std::vector<double>> tx_bandwidth;  // [n][k] (non-orthogonal)

  static Allocation zeros(const Scenario& s, ChannelMode mode);
};

struct RateReport {
  std::vector<double> per_receiver;  // R_m in nats, summed over the horizon
  double weighted_total = 0.0;       // sum_m W_m R_m
  double pf_utility = 0.0;           // sum_m log R_m; -inf if any R_m == 0
};

// Per-receiver rates for an orthogonal allocation. A term with a = 0 and
// p = 0 contributes 0; a = 0 with p > 0 throws degenerate_allocation_error.
RateReport rate_orthogonal(const Scenario& s, const Allocation& alloc);

// Superposition/SIC rates: messages on weaker channels are decoded first, so
// each receiver sees residual interference only from stronger channels in its
// own set.
RateReport rate_nonorthogonal(const Scenario& s, const Allocation& alloc);

// Serialization (JSON document; unbounded power encoded as an absent field).
std::string scenario_to_json(const Scenario& s, int indent = 2);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// Stable 64-bit FNV-1a hash of the canonical JSON form.
std::uint64_t scenario_hash(const Scenario& s);

}  // namespace ehband

#endif
