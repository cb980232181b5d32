#ifndef EHBAND_WATER_FILLING_HPP
#define EHBAND_WATER_FILLING_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ehband {

enum class BoundaryKind { depletion, full };

/// A pinned point of the cumulative-spend trajectory: at a depletion point the
/// battery is empty (spend equals effective harvest), at a full point the
/// battery sits at capacity. The water level may only increase across a
/// depletion point and only decrease across a full point.
struct BoundaryPoint {
  int slot = 0;  // trajectory position: cumulative spend through slot `slot`
  BoundaryKind kind = BoundaryKind::depletion;
  double cum_spend = 0.0;
};

struct WaterLevelProfile {
  std::vector<double> levels;      // water level per slot
  std::vector<double> cap_levels;  // xi-bar per slot, > 0 only where power-capped
  std::vector<BoundaryPoint> boundaries;  // internal boundaries, ascending
};

/// Per-slot fill behaviour of one transmitter. `fill` must be continuous and
/// nondecreasing in the level w, zero at or below `zero_level`, and saturate
/// at `cap` (+inf for an unbounded transmitter).
struct SlotFillModel {
  std::function<double(int k, double w)> fill;
  std::function<double(int k)> cap;
  std::function<double(int k)> zero_level;
};

struct SegmentLevelResult {
  double level = 0.0;     // representative water level
  double level_lo = 0.0;  // satisfiable level interval (degenerate segments
  double level_hi = 0.0;  // have a genuine interval; +inf when fully capped)
  bool fully_capped = false;
  std::vector<double> slot_spend;  // one entry per slot of the segment
};

/// Bisects the common water level of slots [k_begin, k_end) until the summed
/// spend matches `target` within `tol` (absolute, on the energy residual).
/// Throws segment_infeasible_error when the slots cannot absorb `target`.
SegmentLevelResult solve_segment_level(const SlotFillModel& model, int k_begin,
                                       int k_end, double target,
                                       double tol = 1e-10);

struct DynamicWfResult {
  std::vector<double> slot_spend;
  WaterLevelProfile profile;
  double total_spend = 0.0;
};

/// Boundary search for the battery-constrained water-filling problem: splits
/// segments at the earliest causality/overflow violation, merges boundaries
/// whose level jump contradicts their kind, and repeats to a fixed point.
/// `cum_effective` is the transmitter's nondecreasing effective harvest.
DynamicWfResult dynamic_water_filling(const SlotFillModel& model,
                                      std::span<const double> cum_effective,
                                      double battery_cap, double tol = 1e-10);

/// Two-dimensional single-slot fill: p_m = min{pbar_m, a_m [W_m w - 1/H_m]^+}
/// with pbar_m evaluated at the capped level 1/(1/w + xi_bar). One level
/// serves every receiver of the transmitter.
std::vector<double> slot_energy_at_level(double w, double xi_bar,
                                         std::span<const double> bandwidth,
                                         std::span<const double> weights,
                                         std::span<const double> gains);

struct TransmitterEnergyResult {
  std::vector<std::vector<double>> energy;  // [local receiver][k]
  WaterLevelProfile profile;
  double total_spend = 0.0;
};

/// Optimal energy allocation of one transmitter across its receivers and the
/// horizon, for fixed bandwidths (the orthogonal energy subproblem).
TransmitterEnergyResult solve_transmitter_energy(
    std::span<const double> cum_effective,
    const std::vector<std::vector<double>>& bandwidth,  // [local receiver][k]
    std::span<const double> weights,                    // [local receiver]
    const std::vector<std::vector<double>>& gains,      // [local receiver][k]
    double battery_cap, std::optional<double> max_power, double tol = 1e-10);

}  // namespace ehband

#endif
