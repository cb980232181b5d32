#ifndef EHBAND_NONORTHO_HPP
#define EHBAND_NONORTHO_HPP

#include <optional>
#include <span>
#include <vector>

#include "ehband/envelope.hpp"
#include "ehband/water_filling.hpp"

namespace ehband {

struct TxEnergyResult {
  std::vector<double> tx_energy;  // total energy per slot
  WaterLevelProfile profile;
  double total_spend = 0.0;
};

/// Total-energy allocation of one non-orthogonal transmitter for fixed
/// bandwidths: water-filling with per-slot fill min{P, a * max_m[W_m w - 1/H_m]^+}
/// through the same boundary search as the orthogonal case.
TxEnergyResult solve_tx_energy(std::span<const double> cum_effective,
                               std::span<const double> tx_bandwidth,  // [k]
                               std::span<const EnvelopeSpec> envelopes,  // [k]
                               double battery_cap,
                               std::optional<double> max_power,
                               double tol = 1e-10);

/// Per-slot bandwidth split across transmitters: nested bisection, outer on
/// the dual price alpha with sum_n max{a_n(alpha), eps} = 1, inner solving
/// F(p/a) - F'(p/a) p/a = alpha per transmitter. Zero-energy slots fall back
/// to the uniform split.
std::vector<double> solve_tx_bandwidth_slot(
    std::span<const double> tx_energy,          // [n] slot totals
    std::span<const EnvelopeSpec> envelopes,    // [n] for this slot
    double epsilon, double tol = 1e-12);

}  // namespace ehband

#endif
