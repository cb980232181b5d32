#ifndef EHBAND_BANDWIDTH_HPP
#define EHBAND_BANDWIDTH_HPP

#include <span>
#include <vector>

namespace ehband {

/// Root of x - log(x) = y on (0, 1), for y > 1. The root is the SNR share
/// x = a/(a + pH) at the bandwidth stationarity point. Backed by a lookup
/// table (2^16 samples of y over [1, 64], linear interpolation) plus
/// safeguarded Newton refinement; throws out_of_domain_error for y <= 1.
double solve_x(double y, double tol = 1e-13);

/// Total bandwidth demanded at dual price alpha > 0:
///   G(alpha) = sum_{m: p_m > 0} max{eps, p_m H_m x/(1-x)},
/// with x = solve_x(alpha/W_m + 1). Continuous and decreasing in alpha
/// wherever some clamp is inactive.
double bandwidth_demand(double alpha, std::span<const double> slot_energy,
                        std::span<const double> gains,
                        std::span<const double> weights, double epsilon);

/// Optimal single-slot bandwidth split: receivers with p = 0 get exactly eps,
/// the rest get max{eps, p H x/(1-x)} at the dual price where the shares sum
/// to one. All-zero-energy slots return the uniform split.
std::vector<double> solve_bandwidth_slot(std::span<const double> slot_energy,
                                         std::span<const double> gains,
                                         std::span<const double> weights,
                                         double epsilon, double tol = 1e-12);

/// Stationarity value W*[log(1+pH/a) - pH/(a+pH)] of one receiver; equals the
/// common dual price on every unclamped coordinate of an optimal split.
double bandwidth_stationarity(double a, double p, double h, double w);

}  // namespace ehband

#endif
