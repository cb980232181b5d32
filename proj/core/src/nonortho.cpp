#include "ehband/nonortho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehband/errors.hpp"

namespace ehband {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TxEnergyResult solve_tx_energy(std::span<const double> cum_effective,
                               std::span<const double> tx_bandwidth,
                               std::span<const EnvelopeSpec> envelopes,
                               double battery_cap,
                               std::optional<double> max_power, double tol) {
  const int K = static_cast<int>(cum_effective.size());
  const double p_cap = max_power.value_or(kInf);

  SlotFillModel model;
  model.zero_level = [&](int k) {
    if (!(tx_bandwidth[k] > 0.0)) return kInf;
    return envelopes[k].zero_level();
  };
  model.cap = [&](int k) {
    if (!(tx_bandwidth[k] > 0.0) || !(envelopes[k].zero_level() < kInf))
      return 0.0;
    return p_cap;
  };
  model.fill = [&](int k, double w) {
    if (!(tx_bandwidth[k] > 0.0)) return 0.0;
    return std::min(p_cap, tx_bandwidth[k] * envelopes[k].fill_at_level(w));
  };

  auto wf = dynamic_water_filling(model, cum_effective, battery_cap, tol);

  TxEnergyResult res;
  res.tx_energy = std::move(wf.slot_spend);
  res.profile = std::move(wf.profile);
  res.total_spend = wf.total_spend;

  // Capped slots: the effective level reaching exactly the power limit has the
  // closed form min_m (P/a + 1/H_m)/W_m; store xi-bar from it.
  for (int k = 0; k < K; ++k) {
    const double w = res.profile.levels[k];
    if (!(w > 0.0) || !std::isfinite(w) || !(tx_bandwidth[k] > 0.0)) continue;
    const double uncapped = tx_bandwidth[k] * envelopes[k].fill_at_level(w);
    if (uncapped > p_cap) {
      double w_eff = kInf;
      const auto& env = envelopes[k];
      for (std::size_t m = 0; m < env.weights.size(); ++m) {
        if (env.weights[m] > 0.0)
          w_eff = std::min(w_eff, (p_cap / tx_bandwidth[k] + 1.0 / env.gains[m]) /
                                      env.weights[m]);
      }
      if (std::isfinite(w_eff) && w_eff < w)
        res.profile.cap_levels[k] = 1.0 / w_eff - 1.0 / w;
    }
  }
  return res;
}

std::vector<double> solve_tx_bandwidth_slot(std::span<const double> tx_energy,
                                            std::span<const EnvelopeSpec> envelopes,
                                            double epsilon, double tol) {
  const std::size_t n_count = tx_energy.size();
  std::vector<double> a(n_count, epsilon);

  std::vector<std::size_t> active;
  for (std::size_t n = 0; n < n_count; ++n) {
    if (tx_energy[n] > 0.0 && envelopes[n].zero_level() < kInf)
      active.push_back(n);
  }
  if (active.empty()) {
    std::fill(a.begin(), a.end(), 1.0 / static_cast<double>(n_count));
    return a;
  }
  if (active.size() == 1) {
    a[active[0]] = 1.0 - static_cast<double>(n_count - 1) * epsilon;
    return a;
  }
  if (1.0 - static_cast<double>(n_count) * epsilon <= 1e-15) {
    // every share is pinned at the minimum
    return a;
  }

  // a_n(alpha): unique bandwidth where the marginal value of band equals
  // alpha; solved on u = p/a where the stationarity value is increasing.
  auto band_at_price = [&](std::size_t n, double alpha) {
    const auto& env = envelopes[n];
    const double p = tx_energy[n];
    double u_lo = 0.0, u_hi = 1.0;
    int guard = 0;
    while (env.bandwidth_stationarity(u_hi) < alpha && guard++ < 2000) u_hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (u_lo + u_hi);
      if (env.bandwidth_stationarity(mid) < alpha)
        u_lo = mid;
      else
        u_hi = mid;
      if (u_hi - u_lo <= 1e-15 * u_hi) break;
    }
    const double u = 0.5 * (u_lo + u_hi);
    return u > 0.0 ? p / u : kInf;
  };

  auto total_band = [&](double alpha) {
    double s = static_cast<double>(n_count - active.size()) * epsilon;
    for (std::size_t n : active) s += std::max(band_at_price(n, alpha), epsilon);
    return s;
  };

  // Bracket the dual price: small alpha over-allocates, large alpha starves.
  double alpha_lo = 1e-8, alpha_hi = 1.0;
  int guard = 0;
  while (total_band(alpha_lo) < 1.0 && guard++ < 2000) alpha_lo *= 0.5;
  guard = 0;
  while (total_band(alpha_hi) > 1.0 && guard++ < 2000) alpha_hi *= 2.0;
  if (total_band(alpha_lo) < 1.0 || total_band(alpha_hi) > 1.0)
    throw bracket_failure_error("tx bandwidth dual bracket failed");

  double alpha = alpha_hi;
  for (int it = 0; it < 200; ++it) {
    alpha = 0.5 * (alpha_lo + alpha_hi);
    const double s = total_band(alpha);
    if (std::abs(s - 1.0) <= tol) break;
    if (s > 1.0)
      alpha_lo = alpha;
    else
      alpha_hi = alpha;
    if (alpha_hi - alpha_lo <= 1e-16 * alpha_hi) break;
  }

  for (std::size_t n : active) a[n] = std::max(band_at_price(n, alpha), epsilon);

  double sum = 0.0;
  for (double v : a) sum += v;
  const double slack = 1.0 - sum;
  double unclamped = 0.0;
  for (std::size_t n : active)
    if (a[n] > epsilon) unclamped += a[n];
  if (unclamped > 0.0) {
    for (std::size_t n : active)
      if (a[n] > epsilon) a[n] += slack * (a[n] / unclamped);
  } else {
    a[active[0]] += slack;
  }
  return a;
}

}  // namespace ehband
