#include "ehband/water_filling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehband/errors.hpp"

namespace ehband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_fill_sum(const SlotFillModel& model, int k_begin, int k_end,
                        double w) {
  double s = 0.0;
  for (int k = k_begin; k < k_end; ++k) s += model.fill(k, w);
  return s;
}

}  // namespace

SegmentLevelResult solve_segment_level(const SlotFillModel& model, int k_begin,
                                       int k_end, double target, double tol) {
  SegmentLevelResult res;
  res.slot_spend.assign(static_cast<std::size_t>(k_end - k_begin), 0.0);

  double zero_level = kInf;
  double cap_sum = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    zero_level = std::min(zero_level, model.zero_level(k));
    cap_sum += model.cap(k);
  }

  if (target <= tol) {
    res.level = zero_level;
    res.level_lo = 0.0;
    res.level_hi = zero_level;
    return res;
  }
  if (!(zero_level < kInf))
    throw segment_infeasible_error("segment has no receiver able to absorb energy");
  if (std::isfinite(cap_sum)) {
    if (target > cap_sum + std::max(tol, 1e-9)) {
      std::ostringstream os;
      os << "segment target " << target << " exceeds absorbable maximum " << cap_sum;
      throw segment_infeasible_error(os.str());
    }
    target = std::min(target, cap_sum);
  }

  double w_lo = zero_level;  // fill sum 0 here
  double w_hi = zero_level > 0.0 ? 2.0 * zero_level : 1.0;
  int guard = 0;
  while (segment_fill_sum(model, k_begin, k_end, w_hi) < target && guard++ < 2000)
    w_hi *= 2.0;
  if (guard >= 2000)
    throw segment_infeasible_error("water level bracket expansion failed");

  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (w_lo + w_hi);
    const double s = segment_fill_sum(model, k_begin, k_end, mid);
    if (s <= target)
      w_lo = mid;
    else
      w_hi = mid;
    if (std::abs(s - target) <= tol && s <= target) break;
    if (w_hi - w_lo <= 1e-16 * w_hi) break;
  }

  res.level = w_lo;  // the side with fill sum <= target
  double total = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    const double v = model.fill(k, res.level);
    res.slot_spend[static_cast<std::size_t>(k - k_begin)] = v;
    total += v;
  }
  res.fully_capped =
      std::isfinite(cap_sum) && target >= cap_sum - std::max(tol, 1e-9);
  res.level_lo = res.level;
  res.level_hi = res.fully_capped ? kInf : res.level;
  return res;
}

namespace {

struct Segment {
  int a = 0, b = 0;  // trajectory positions; slots a..b-1 (0-based)
  double cum_a = 0.0, cum_b = 0.0;
  SegmentLevelResult sol;
};

struct BandProblem {
  const SlotFillModel* model = nullptr;
  std::vector<double> lo, hi;  // pinned trajectory band, positions 0..K
  double tol = 1e-10;
  double viol_tol = 1e-7;
};

// Solve [a,b] with pinned endpoints, splitting at the earliest band violation.
void split_solve(const BandProblem& bp, int a, int b, double cum_a, double cum_b,
                 std::vector<Segment>& out, std::vector<BoundaryPoint>& bounds,
                 int depth) {
  if (depth > 4 * static_cast<int>(bp.lo.size()) + 64)
    throw error("wf-no-convergence", "boundary split recursion exceeded depth bound");

  Segment seg;
  seg.a = a;
  seg.b = b;
  seg.cum_a = cum_a;
  seg.cum_b = cum_b;
  seg.sol = solve_segment_level(*bp.model, a, b, cum_b - cum_a, bp.tol);

  int split_at = -1;
  BoundaryKind kind = BoundaryKind::depletion;
  double pinned = 0.0;
  double c = cum_a;
  for (int j = a + 1; j < b; ++j) {
    c += seg.sol.slot_spend[static_cast<std::size_t>(j - 1 - a)];
    if (c > bp.hi[j] + bp.viol_tol) {
      split_at = j;
      kind = BoundaryKind::depletion;
      pinned = bp.hi[j];
      break;
    }
    if (c < bp.lo[j] - bp.viol_tol) {
      split_at = j;
      kind = BoundaryKind::full;
      pinned = bp.lo[j];
      break;
    }
  }
  if (split_at < 0) {
    out.push_back(std::move(seg));
    return;
  }
  split_solve(bp, a, split_at, cum_a, pinned, out, bounds, depth + 1);
  bounds.push_back({split_at, kind, pinned});
  split_solve(bp, split_at, b, pinned, cum_b, out, bounds, depth + 1);
}

}  // namespace

DynamicWfResult dynamic_water_filling(const SlotFillModel& model,
                                      std::span<const double> cum_effective,
                                      double battery_cap, double tol) {
  const int K = static_cast<int>(cum_effective.size());
  DynamicWfResult res;
  res.slot_spend.assign(K, 0.0);
  res.profile.levels.assign(K, 0.0);
  res.profile.cap_levels.assign(K, 0.0);
  if (K == 0) return res;

  // Absorbable cumulative spend; clips both the terminal target and the
  // battery-full lower bound so receivers that can never take energy (zero
  // weight or zero bandwidth) do not make the band infeasible.
  std::vector<double> abs_cum(K + 1, 0.0);
  for (int k = 1; k <= K; ++k)
    abs_cum[k] = std::min(cum_effective[k - 1], abs_cum[k - 1] + model.cap(k - 1));

  BandProblem bp;
  bp.model = &model;
  bp.tol = tol;
  bp.viol_tol = std::max(1e-7, 1e3 * tol);
  bp.lo.assign(K + 1, 0.0);
  bp.hi.assign(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) {
    const double eng_e = std::min(cum_effective[k - 1], abs_cum[k] + battery_cap);
    bp.hi[k] = eng_e;
    bp.lo[k] = std::max(0.0, eng_e - battery_cap);
  }
  const double terminal = abs_cum[K];

  std::vector<Segment> segments;
  std::vector<BoundaryPoint> bounds;
  split_solve(bp, 0, K, 0.0, terminal, segments, bounds, 0);

  const int max_rounds = 4 * K * K + 64;
  bool settled = false;
  for (int round = 0; round < max_rounds && !settled; ++round) {
    // Validate level monotonicity at every internal boundary; merge the first
    // boundary whose level jump contradicts its kind and re-split the merged
    // stretch.
    int bad = -1;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      const auto& l = segments[i].sol;
      const auto& r = segments[i + 1].sol;
      const double eps = 1e-9 * (1.0 + std::max(l.level, r.level));
      const bool is_depletion = bounds[i].kind == BoundaryKind::depletion;
      const bool ok = is_depletion ? l.level_lo <= r.level_hi + eps
                                   : r.level_lo <= l.level_hi + eps;
      if (!ok) {
        bad = static_cast<int>(i);
        break;
      }
    }
    if (bad < 0) {
      settled = true;
      break;
    }

    Segment merged_l = segments[static_cast<std::size_t>(bad)];
    Segment merged_r = segments[static_cast<std::size_t>(bad + 1)];
    segments.erase(segments.begin() + bad, segments.begin() + bad + 2);
    bounds.erase(bounds.begin() + bad);

    std::vector<Segment> replacement;
    std::vector<BoundaryPoint> new_bounds;
    split_solve(bp, merged_l.a, merged_r.b, merged_l.cum_a, merged_r.cum_b,
                replacement, new_bounds, 0);
    segments.insert(segments.begin() + bad,
                    std::make_move_iterator(replacement.begin()),
                    std::make_move_iterator(replacement.end()));
    bounds.insert(bounds.begin() + bad, new_bounds.begin(), new_bounds.end());
  }
  if (!settled && !segments.empty() && segments.size() > 1)
    throw error("wf-no-convergence",
                "boundary merge/split loop did not reach a fixed point");

  for (const auto& seg : segments) {
    for (int k = seg.a; k < seg.b; ++k) {
      res.slot_spend[k] = seg.sol.slot_spend[static_cast<std::size_t>(k - seg.a)];
      res.profile.levels[k] = seg.sol.level;
      res.total_spend += res.slot_spend[k];
    }
  }
  res.profile.boundaries = std::move(bounds);
  return res;
}

std::vector<double> slot_energy_at_level(double w, double xi_bar,
                                         std::span<const double> bandwidth,
                                         std::span<const double> weights,
                                         std::span<const double> gains) {
  const std::size_t m_count = bandwidth.size();
  std::vector<double> p(m_count, 0.0);
  if (!(w > 0.0)) return p;
  const double w_eff = xi_bar > 0.0 ? 1.0 / (1.0 / w + xi_bar) : w;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (!(bandwidth[m] > 0.0) || !(weights[m] > 0.0)) continue;
    const double lvl = std::max(0.0, weights[m] * w - 1.0 / gains[m]);
    const double cap = std::max(0.0, weights[m] * w_eff - 1.0 / gains[m]);
    p[m] = bandwidth[m] * std::min(cap, lvl);
  }
  return p;
}

namespace {

// Uncapped per-slot total at level w.
double slot_total_uncapped(const std::vector<std::vector<double>>& bandwidth,
                           std::span<const double> weights,
                           const std::vector<std::vector<double>>& gains, int k,
                           double w) {
  double s = 0.0;
  for (std::size_t m = 0; m < bandwidth.size(); ++m) {
    if (!(bandwidth[m][k] > 0.0) || !(weights[m] > 0.0)) continue;
    s += bandwidth[m][k] * std::max(0.0, weights[m] * w - 1.0 / gains[m][k]);
  }
  return s;
}

}  // namespace

TransmitterEnergyResult solve_transmitter_energy(
    std::span<const double> cum_effective,
    const std::vector<std::vector<double>>& bandwidth,
    std::span<const double> weights,
    const std::vector<std::vector<double>>& gains, double battery_cap,
    std::optional<double> max_power, double tol) {
  const int K = static_cast<int>(cum_effective.size());
  const std::size_t m_count = bandwidth.size();
  const double p_cap = max_power.value_or(kInf);

  SlotFillModel model;
  model.zero_level = [&](int k) {
    double z = kInf;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (bandwidth[m][k] > 0.0 && weights[m] > 0.0)
        z = std::min(z, 1.0 / (weights[m] * gains[m][k]));
    }
    return z;
  };
  model.cap = [&](int k) {
    for (std::size_t m = 0; m < m_count; ++m)
      if (bandwidth[m][k] > 0.0 && weights[m] > 0.0) return p_cap;
    return 0.0;
  };
  model.fill = [&](int k, double w) {
    return std::min(p_cap, slot_total_uncapped(bandwidth, weights, gains, k, w));
  };

  auto wf = dynamic_water_filling(model, cum_effective, battery_cap, tol);

  TransmitterEnergyResult res;
  res.energy.assign(m_count, std::vector<double>(K, 0.0));
  res.profile = std::move(wf.profile);
  res.total_spend = wf.total_spend;

  std::vector<double> band_k(m_count), gain_k(m_count);
  for (int k = 0; k < K; ++k) {
    const double w = res.profile.levels[k];
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    double xi_bar = 0.0;
    const double uncapped = slot_total_uncapped(bandwidth, weights, gains, k, w);
    if (uncapped > p_cap) {
      // Capped slot: find the effective level where the slot absorbs exactly
      // the power limit (inner bisection on the level).
      double lo = model.zero_level(k), hi = w;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = slot_total_uncapped(bandwidth, weights, gains, k, mid);
        if (s <= p_cap)
          lo = mid;
        else
          hi = mid;
        if (std::abs(s - p_cap) <= tol || hi - lo <= 1e-16 * hi) break;
      }
      xi_bar = std::max(0.0, 1.0 / lo - 1.0 / w);
    }
    res.profile.cap_levels[k] = xi_bar;
    for (std::size_t m = 0; m < m_count; ++m) {
      band_k[m] = bandwidth[m][k];
      gain_k[m] = gains[m][k];
    }
    auto p = slot_energy_at_level(w, xi_bar, band_k, weights, gain_k);
    for (std::size_t m = 0; m < m_count; ++m) res.energy[m][k] = p[m];
  }
  return res;
}

}  // namespace ehband
