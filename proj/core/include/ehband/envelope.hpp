#ifndef EHBAND_ENVELOPE_HPP
#define EHBAND_ENVELOPE_HPP

#include <optional>
#include <span>
#include <vector>

namespace ehband {

/// One piece of the upper envelope of the marginal-rate hyperbolas
/// f_m(p) = W_m/(p + 1/H_m): receiver `receiver` absorbs the marginal energy
/// on [lo, hi).
struct EnvelopeSegment {
  int receiver = 0;  // index into the weight/gain arrays the envelope was built from
  double lo = 0.0;
  double hi = 0.0;  // +inf on the last segment
};

/// Piecewise description of the optimal superposition rate F(p) of one
/// transmitter-slot: F'(p) = max_m W_m/(p + 1/H_m), the segments give the
/// optimal energy split, and the cutoffs are the per-receiver entry points
/// (+inf for receivers never on the envelope).
struct EnvelopeSpec {
  std::vector<EnvelopeSegment> segments;  // ascending lo, contiguous
  std::vector<double> cutoffs;            // [m]; segment entry point L_m
  std::vector<double> weights;            // [m]
  std::vector<double> gains;              // [m]

  /// F(p): closed-form integral of the envelope from 0 to p.
  double value(double p) const;
  /// F'(p) = max_m W_m/(p + 1/H_m).
  double derivative(double p) const;
  /// (F')^{-1}(1/w) = max_m [W_m w - 1/H_m]^+.
  double fill_at_level(double w) const;
  /// Level below which fill_at_level is zero: min_m 1/(W_m H_m).
  double zero_level() const;
  /// F(u) - u F'(u), the bandwidth stationarity value; increasing in u.
  double bandwidth_stationarity(double u) const;
  /// Optimal split of a total energy budget across the receivers.
  std::vector<double> split(double p_total) const;
};

/// Crossing point of two marginal-rate hyperbolas, if it lies in p >= 0.
/// Equal weights never cross; the larger gain dominates everywhere.
std::optional<double> intersection(double w_a, double h_a, double w_b, double h_b);

/// Upper envelope of the hyperbolas of one receiver set in one slot.
/// Gains must be pairwise distinct.
EnvelopeSpec build_envelope(std::span<const double> weights,
                            std::span<const double> gains);

}  // namespace ehband

#endif
