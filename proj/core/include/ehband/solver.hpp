#ifndef EHBAND_SOLVER_HPP
#define EHBAND_SOLVER_HPP

#include <optional>
#include <vector>

#include "ehband/scenario.hpp"
#include "ehband/water_filling.hpp"

namespace ehband {

struct SolveOptions {
  ChannelMode mode = ChannelMode::orthogonal;
  // Decreasing bandwidth floors, ending at the scenario's epsilon. Empty means
  // the default: {epsilon} when epsilon > 0, else {1/(2M), 0} (1/(2N) in
  // non-orthogonal mode) so the zero-floor answer is reached by continuity.
  std::vector<double> epsilon_schedule;
  int max_outer_iters = 200;
  double objective_tol = 1e-8;
  double bandwidth_tol = 1e-12;
  double energy_tol = 1e-10;
  // Optional warm start (per receiver in orthogonal mode, per transmitter
  // otherwise); defaults to the uniform split.
  std::optional<std::vector<std::vector<double>>> initial_bandwidth;
};

struct SolveTrace {
  std::vector<double> objectives;  // after every half-iteration
  int outer_iterations = 0;
  bool converged = false;
  bool stalled = false;  // an iteration failed to improve before the tolerance
  double bandwidth_stationarity_residual = 0.0;  // max over unclamped coords
  std::vector<std::vector<BoundaryPoint>> boundaries;  // per transmitter
};

struct SolveResult {
  Allocation allocation;
  RateReport report;
  SolveTrace trace;
};

/// Block coordinate ascent on the weighted-throughput problem: alternately
/// solves every transmitter's energy subproblem (fixed bandwidth) and every
/// slot's bandwidth subproblem (fixed energy) until the relative objective
/// gain drops below the tolerance.
SolveResult solve(const Scenario& scenario, const SolveOptions& options = {});

/// Equal-weights strongest-channel reduction: per transmitter and slot only
/// the best-gain receiver is kept, giving a point-to-point scenario whose
/// optimum matches the original in either mode.
struct EqualWeightsReduction {
  Scenario reduced;  // one receiver per transmitter
  std::vector<std::vector<int>> kept;  // [n][k] original receiver index

  // Lift an allocation of `reduced` back to the original receiver indexing.
  Allocation expand(const Scenario& original, const Allocation& reduced_alloc) const;
};

EqualWeightsReduction reduce_equal_weights(const Scenario& scenario);

}  // namespace ehband

#endif
