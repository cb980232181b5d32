#include "ehband/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehband/bandwidth.hpp"
#include "ehband/envelope.hpp"
#include "ehband/errors.hpp"
#include "ehband/nonortho.hpp"

namespace ehband {

namespace {

std::vector<double> default_schedule(const Scenario& s, ChannelMode mode) {
  if (s.epsilon > 0.0) return {s.epsilon};
  const int shares = mode == ChannelMode::orthogonal ? s.n_receivers : s.n_transmitters;
  return {1.0 / (2.0 * shares), 0.0};
}

struct OrthoState {
  std::vector<std::vector<double>> energy;     // [m][k]
  std::vector<std::vector<double>> bandwidth;  // [m][k]
};

struct NonorthoState {
  std::vector<std::vector<double>> tx_energy;     // [n][k]
  std::vector<std::vector<double>> tx_bandwidth;  // [n][k]
};

double ortho_objective(const Scenario& s, const OrthoState& st) {
  double obj = 0.0;
  for (int m = 0; m < s.n_receivers; ++m) {
    for (int k = 0; k < s.horizon; ++k) {
      const double a = st.bandwidth[m][k];
      const double p = st.energy[m][k];
      if (a > 0.0 && p > 0.0)
        obj += s.weights[m] * a * std::log1p(p * s.gains[m][k] / a);
    }
  }
  return obj;
}

double nonortho_objective(const Scenario& s, const NonorthoState& st,
                          const std::vector<std::vector<EnvelopeSpec>>& envs) {
  double obj = 0.0;
  for (int n = 0; n < s.n_transmitters; ++n) {
    for (int k = 0; k < s.horizon; ++k) {
      const double a = st.tx_bandwidth[n][k];
      const double p = st.tx_energy[n][k];
      if (a > 0.0 && p > 0.0) obj += a * envs[n][k].value(p / a);
    }
  }
  return obj;
}

}  // namespace

SolveResult solve(const Scenario& scenario, const SolveOptions& options) {
  validate_or_throw(scenario);
  if (options.objective_tol <= 0.0)
    throw out_of_domain_error("objective_tol must be > 0");

  const auto eff = effective_energy(scenario);
  const int N = scenario.n_transmitters;
  const int M = scenario.n_receivers;
  const int K = scenario.horizon;

  std::vector<double> schedule = options.epsilon_schedule.empty()
                                     ? default_schedule(scenario, options.mode)
                                     : options.epsilon_schedule;
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    if (schedule[i] <= 0.0)
      throw out_of_domain_error("epsilon schedule must be positive before its last entry");
  }

  SolveResult result;
  SolveTrace& trace = result.trace;

  if (options.mode == ChannelMode::orthogonal) {
    OrthoState st;
    st.energy.assign(M, std::vector<double>(K, 0.0));
    st.bandwidth = options.initial_bandwidth.value_or(
        std::vector<std::vector<double>>(M, std::vector<double>(K, 1.0 / M)));

    std::vector<std::vector<BoundaryPoint>> bounds(N);
    double prev_obj = -std::numeric_limits<double>::infinity();
    for (double eps_step : schedule) {
      for (int iter = 0; iter < options.max_outer_iters; ++iter) {
        ++trace.outer_iterations;
        // Energy block: per transmitter, fixed bandwidth.
        for (int n = 0; n < N; ++n) {
          const auto& set = scenario.receiver_sets[n];
          std::vector<std::vector<double>> band(set.size()), gain(set.size());
          std::vector<double> w(set.size());
          for (std::size_t i = 0; i < set.size(); ++i) {
            band[i] = st.bandwidth[set[i]];
            gain[i] = scenario.gains[set[i]];
            w[i] = scenario.weights[set[i]];
          }
          auto res = solve_transmitter_energy(
              eff.cum[n], band, w, gain, scenario.battery_cap[n],
              scenario.max_power[n], options.energy_tol);
          for (std::size_t i = 0; i < set.size(); ++i)
            st.energy[set[i]] = std::move(res.energy[i]);
          bounds[n] = std::move(res.profile.boundaries);
        }
        trace.objectives.push_back(ortho_objective(scenario, st));

        // Bandwidth block: per slot, fixed energy.
        std::vector<double> p_k(M), h_k(M);
        for (int k = 0; k < K; ++k) {
          for (int m = 0; m < M; ++m) {
            p_k[m] = st.energy[m][k];
            h_k[m] = scenario.gains[m][k];
          }
          auto a = solve_bandwidth_slot(p_k, h_k, scenario.weights, eps_step,
                                        options.bandwidth_tol);
          for (int m = 0; m < M; ++m) st.bandwidth[m][k] = a[m];
        }
        const double obj = ortho_objective(scenario, st);
        trace.objectives.push_back(obj);

        const double gain_rel = (obj - prev_obj) / std::max(1.0, std::abs(obj));
        if (std::isfinite(prev_obj) && gain_rel < -1e-9) trace.stalled = true;
        const bool done = std::isfinite(prev_obj) &&
                          std::abs(obj - prev_obj) <=
                              options.objective_tol * std::max(1.0, std::abs(obj));
        prev_obj = obj;
        if (done) {
          trace.converged = true;
          break;
        }
      }
      prev_obj = -std::numeric_limits<double>::infinity();
    }

    // Final residual of the bandwidth stationarity condition on unclamped
    // coordinates (diagnostic, also asserted by the structure tests).
    double resid = 0.0;
    for (int k = 0; k < K; ++k) {
      double alpha_ref = -1.0;
      for (int m = 0; m < M; ++m) {
        const double a = st.bandwidth[m][k];
        const double p = st.energy[m][k];
        if (p > 0.0 && scenario.weights[m] > 0.0 &&
            a > scenario.epsilon + 1e-12) {
          const double v = bandwidth_stationarity(a, p, scenario.gains[m][k],
                                                  scenario.weights[m]);
          if (alpha_ref < 0.0)
            alpha_ref = v;
          else
            resid = std::max(resid, std::abs(v - alpha_ref));
        }
      }
    }
    trace.bandwidth_stationarity_residual = resid;
    trace.boundaries = std::move(bounds);

    result.allocation = Allocation::zeros(scenario, ChannelMode::orthogonal);
    result.allocation.energy = std::move(st.energy);
    result.allocation.bandwidth = std::move(st.bandwidth);
    result.report = rate_orthogonal(scenario, result.allocation);
    return result;
  }

  // Non-orthogonal mode.
  std::vector<std::vector<EnvelopeSpec>> envs(N, std::vector<EnvelopeSpec>(K));
  for (int n = 0; n < N; ++n) {
    const auto& set = scenario.receiver_sets[n];
    std::vector<double> w(set.size()), h(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) w[i] = scenario.weights[set[i]];
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < set.size(); ++i) h[i] = scenario.gains[set[i]][k];
      envs[n][k] = build_envelope(w, h);
    }
  }

  NonorthoState st;
  st.tx_energy.assign(N, std::vector<double>(K, 0.0));
  st.tx_bandwidth = options.initial_bandwidth.value_or(
      std::vector<std::vector<double>>(N, std::vector<double>(K, 1.0 / N)));

  std::vector<std::vector<BoundaryPoint>> bounds(N);
  double prev_obj = -std::numeric_limits<double>::infinity();
  for (double eps_step : schedule) {
    for (int iter = 0; iter < options.max_outer_iters; ++iter) {
      ++trace.outer_iterations;
      for (int n = 0; n < N; ++n) {
        auto res = solve_tx_energy(eff.cum[n], st.tx_bandwidth[n], envs[n],
                                   scenario.battery_cap[n], scenario.max_power[n],
                                   options.energy_tol);
        st.tx_energy[n] = std::move(res.tx_energy);
        bounds[n] = std::move(res.profile.boundaries);
      }
      trace.objectives.push_back(nonortho_objective(scenario, st, envs));

      std::vector<double> p_k(N);
      std::vector<EnvelopeSpec> env_k(N);
      for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
          p_k[n] = st.tx_energy[n][k];
          env_k[n] = envs[n][k];
        }
        auto a = solve_tx_bandwidth_slot(p_k, env_k, eps_step, options.bandwidth_tol);
        for (int n = 0; n < N; ++n) st.tx_bandwidth[n][k] = a[n];
      }
      const double obj = nonortho_objective(scenario, st, envs);
      trace.objectives.push_back(obj);

      const double gain_rel = (obj - prev_obj) / std::max(1.0, std::abs(obj));
      if (std::isfinite(prev_obj) && gain_rel < -1e-9) trace.stalled = true;
      const bool done = std::isfinite(prev_obj) &&
                        std::abs(obj - prev_obj) <=
                            options.objective_tol * std::max(1.0, std::abs(obj));
      prev_obj = obj;
      if (done) {
        trace.converged = true;
        break;
      }
    }
    prev_obj = -std::numeric_limits<double>::infinity();
  }
  trace.boundaries = std::move(bounds);

  result.allocation = Allocation::zeros(scenario, ChannelMode::nonorthogonal);
  result.allocation.tx_energy = st.tx_energy;
  result.allocation.tx_bandwidth = st.tx_bandwidth;
  // Per-receiver split of each transmitter's slot total (optimal SIC split).
  for (int n = 0; n < N; ++n) {
    const auto& set = scenario.receiver_sets[n];
    for (int k = 0; k < K; ++k) {
      const double a = st.tx_bandwidth[n][k];
      const double p = st.tx_energy[n][k];
      if (!(a > 0.0) || !(p > 0.0)) continue;
      auto parts = envs[n][k].split(p / a);
      for (std::size_t i = 0; i < set.size(); ++i)
        result.allocation.energy[set[i]][k] = a * parts[i];
    }
  }
  result.report = rate_nonorthogonal(scenario, result.allocation);
  return result;
}

EqualWeightsReduction reduce_equal_weights(const Scenario& scenario) {
  validate_or_throw(scenario);
  for (int m = 1; m < scenario.n_receivers; ++m) {
    if (scenario.weights[m] != scenario.weights[0])
      throw weights_not_equal_error(
          "strongest-channel reduction requires equal weights");
  }

  EqualWeightsReduction red;
  red.kept.assign(scenario.n_transmitters, std::vector<int>(scenario.horizon, -1));

  Scenario& r = red.reduced;
  r.n_transmitters = scenario.n_transmitters;
  r.n_receivers = scenario.n_transmitters;
  r.horizon = scenario.horizon;
  r.harvest = scenario.harvest;
  r.battery_cap = scenario.battery_cap;
  r.max_power = scenario.max_power;
  r.epsilon = scenario.epsilon;
  r.receiver_sets.assign(scenario.n_transmitters, {});
  r.gains.assign(scenario.n_transmitters,
                 std::vector<double>(scenario.horizon, 0.0));
  r.weights.assign(scenario.n_transmitters, scenario.weights[0]);
  for (int n = 0; n < scenario.n_transmitters; ++n) {
    r.receiver_sets[n] = {n};
    for (int k = 0; k < scenario.horizon; ++k) {
      int best = scenario.receiver_sets[n][0];
      for (int m : scenario.receiver_sets[n]) {
        if (scenario.gains[m][k] > scenario.gains[best][k]) best = m;
      }
      red.kept[n][k] = best;
      r.gains[n][k] = scenario.gains[best][k];
    }
  }
  return red;
}

Allocation EqualWeightsReduction::expand(const Scenario& original,
                                         const Allocation& reduced_alloc) const {
  Allocation full = Allocation::zeros(original, reduced_alloc.mode);
  const int N = original.n_transmitters;
  const int K = original.horizon;
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      const int m = kept[n][k];
      if (reduced_alloc.mode == ChannelMode::orthogonal) {
        full.energy[m][k] = reduced_alloc.energy[n][k];
        full.bandwidth[m][k] = reduced_alloc.bandwidth[n][k];
      } else {
        full.energy[m][k] = reduced_alloc.energy[n][k];
        full.tx_energy[n][k] = reduced_alloc.tx_energy[n][k];
        full.tx_bandwidth[n][k] = reduced_alloc.tx_bandwidth[n][k];
      }
    }
  }
  return full;
}

}  // namespace ehband
