#include "ehband/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ehband {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::optional<double> intersection(double w_a, double h_a, double w_b, double h_b) {
  if (w_a == w_b) return std::nullopt;
  const double p = (h_b * w_b - h_a * w_a) / (h_b * h_a * (w_a - w_b));
  if (p < 0.0 || !std::isfinite(p)) return std::nullopt;
  return p;
}

EnvelopeSpec build_envelope(std::span<const double> weights,
                            std::span<const double> gains) {
  const std::size_t m_count = weights.size();
  EnvelopeSpec env;
  env.weights.assign(weights.begin(), weights.end());
  env.gains.assign(gains.begin(), gains.end());
  env.cutoffs.assign(m_count, kInf);

  std::vector<int> order;
  for (std::size_t m = 0; m < m_count; ++m)
    if (weights[m] > 0.0) order.push_back(static_cast<int>(m));
  if (order.empty()) return env;
  // Strongest channel first; along the envelope gains descend and weights
  // ascend, so candidates arrive in potential-segment order.
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return gains[a] > gains[b]; });

  struct Entry {
    int m;
    double start;
  };
  std::vector<Entry> stack;
  stack.push_back({order[0], 0.0});
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int r = order[i];
    while (!stack.empty()) {
      const Entry top = stack.back();
      if (weights[r] <= weights[top.m]) {
        // smaller gain and no larger weight: r is dominated everywhere
        break;
      }
      const auto cross =
          intersection(weights[top.m], gains[top.m], weights[r], gains[r]);
      if (!cross.has_value()) {
        // r is above top already at p = 0
        stack.pop_back();
        if (stack.empty()) stack.push_back({r, 0.0});
        continue;
      }
      if (*cross <= top.start) {
        stack.pop_back();
        if (stack.empty()) stack.push_back({r, 0.0});
        continue;
      }
      stack.push_back({r, *cross});
      break;
    }
    if (stack.empty()) stack.push_back({r, 0.0});
  }

  env.segments.reserve(stack.size());
  for (std::size_t i = 0; i < stack.size(); ++i) {
    EnvelopeSegment seg;
    seg.receiver = stack[i].m;
    seg.lo = stack[i].start;
    seg.hi = i + 1 < stack.size() ? stack[i + 1].start : kInf;
    env.segments.push_back(seg);
    env.cutoffs[static_cast<std::size_t>(seg.receiver)] = seg.lo;
  }
  return env;
}

double EnvelopeSpec::derivative(double p) const {
  double d = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] > 0.0) d = std::max(d, weights[m] / (p + 1.0 / gains[m]));
  }
  return d;
}

double EnvelopeSpec::fill_at_level(double w) const {
  double v = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] > 0.0)
      v = std::max(v, weights[m] * w - 1.0 / gains[m]);
  }
  return v;
}

double EnvelopeSpec::zero_level() const {
  double z = kInf;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] > 0.0) z = std::min(z, 1.0 / (weights[m] * gains[m]));
  }
  return z;
}

double EnvelopeSpec::value(double p) const {
  double v = 0.0;
  for (const auto& seg : segments) {
    if (!(p > seg.lo)) break;
    const double upper = std::min(p, seg.hi);
    const double inv_h = 1.0 / gains[static_cast<std::size_t>(seg.receiver)];
    v += weights[static_cast<std::size_t>(seg.receiver)] *
         (std::log(upper + inv_h) - std::log(seg.lo + inv_h));
  }
  return v;
}

double EnvelopeSpec::bandwidth_stationarity(double u) const {
  return value(u) - u * derivative(u);
}

std::vector<double> EnvelopeSpec::split(double p_total) const {
  std::vector<double> p(weights.size(), 0.0);
  for (const auto& seg : segments) {
    const double take = std::min(p_total, seg.hi) - seg.lo;
    if (take > 0.0) p[static_cast<std::size_t>(seg.receiver)] += take;
  }
  return p;
}

}  // namespace ehband
