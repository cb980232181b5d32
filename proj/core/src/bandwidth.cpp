#include "ehband/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehband/errors.hpp"

namespace ehband {

namespace {

constexpr double kTableYMax = 64.0;
constexpr int kTableSize = 1 << 16;

double residual(double x, double y) { return x - std::log(x) - y; }

// High-accuracy bisection used to seed the table and as refinement fallback.
double bisect_root(double lo, double hi, double y) {
  // invariant: residual(lo, y) >= 0 >= residual(hi, y); root in [lo, hi]
  for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (residual(mid, y) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct XRootTable {
  std::vector<double> x;

  XRootTable() : x(kTableSize) {
    const double step = (kTableYMax - 1.0) / (kTableSize - 1);
    for (int i = 0; i < kTableSize; ++i) {
      const double y = 1.0 + i * step;
      x[i] = i == 0 ? 1.0 : bisect_root(1e-300, i == 1 ? 1.0 : x[i - 1], y);
    }
  }

  double lookup(double y) const {
    const double step = (kTableYMax - 1.0) / (kTableSize - 1);
    double t = (y - 1.0) / step;
    int i = std::min(static_cast<int>(t), kTableSize - 2);
    double frac = t - i;
    return x[i] + frac * (x[i + 1] - x[i]);
  }
};

const XRootTable& table() {
  static const XRootTable t;
  return t;
}

}  // namespace

double solve_x(double y, double tol) {
  if (!(y > 1.0)) {
    std::ostringstream os;
    os << "solve_x requires y > 1, got " << y;
    throw out_of_domain_error(os.str());
  }
  const double d = y - 1.0;
  if (d < 1e-12) {
    // x = 1 - s with s^2/2 + s^3/3 + O(s^4) = d
    const double s = std::sqrt(2.0 * d);
    return 1.0 - s + (2.0 / 3.0) * d;
  }

  double guess;
  if (y >= kTableYMax) {
    // x ~ e^{x-y}: two fixed-point sweeps from e^{-y} are already at machine
    // precision for y this large.
    guess = std::exp(-y);
    guess = std::exp(guess - y);
    guess = std::exp(guess - y);
  } else {
    guess = table().lookup(y);
  }

  // Safeguarded Newton on f(x) = x - log x - y, f'(x) = 1 - 1/x < 0 on (0,1).
  double lo = 0.0, hi = 1.0;  // residual(lo) = +inf, residual(hi) = 1 - y < 0
  double x = std::clamp(guess, 1e-300, 1.0 - 1e-16);
  for (int it = 0; it < 60; ++it) {
    const double f = residual(x, y);
    if (std::abs(f) <= tol) return x;
    if (f >= 0.0)
      lo = x;
    else
      hi = x;
    const double fp = 1.0 - 1.0 / x;
    double next = x - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

double bandwidth_demand(double alpha, std::span<const double> slot_energy,
                        std::span<const double> gains,
                        std::span<const double> weights, double epsilon) {
  double g = 0.0;
  for (std::size_t m = 0; m < slot_energy.size(); ++m) {
    if (!(slot_energy[m] > 0.0)) continue;
    double share = 0.0;
    if (weights[m] > 0.0) {
      const double x = solve_x(alpha / weights[m] + 1.0);
      share = slot_energy[m] * gains[m] * x / (1.0 - x);
    }
    g += std::max(epsilon, share);
  }
  return g;
}

double bandwidth_stationarity(double a, double p, double h, double w) {
  const double ph = p * h;
  return w * (std::log1p(ph / a) - ph / (a + ph));
}

std::vector<double> solve_bandwidth_slot(std::span<const double> slot_energy,
                                         std::span<const double> gains,
                                         std::span<const double> weights,
                                         double epsilon, double tol) {
  const std::size_t m_count = slot_energy.size();
  std::vector<double> a(m_count, epsilon);

  std::vector<std::size_t> active;  // p > 0 and W > 0: bisection participants
  std::size_t n_positive = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (slot_energy[m] > 0.0) {
      ++n_positive;
      if (weights[m] > 0.0) active.push_back(m);
    }
  }

  // Objective is identically zero: uniform split by convention.
  if (n_positive == 0) {
    std::fill(a.begin(), a.end(), 1.0 / static_cast<double>(m_count));
    return a;
  }
  const double spare = 1.0 - static_cast<double>(m_count) * epsilon;
  if (active.empty() || spare <= 1e-15) {
    // Everything is clamped (or no weighted receiver wants band): park the
    // slack on the first energy-positive receiver to keep the simplex exact.
    for (std::size_t m = 0; m < m_count; ++m) {
      if (slot_energy[m] > 0.0) {
        a[m] += spare > 0.0 ? spare : 0.0;
        break;
      }
    }
    return a;
  }
  if (active.size() == 1) {
    // Forced by sum-to-one with every other receiver at the minimum.
    a[active[0]] = 1.0 - static_cast<double>(m_count - 1) * epsilon;
    return a;
  }

  const double target =
      1.0 - static_cast<double>(m_count - n_positive) * epsilon;
  auto eval = [&](double alpha) {
    return bandwidth_demand(alpha, slot_energy, gains, weights, epsilon);
  };

  // Bracket: the stationarity values at a = 1 under-price (demand above
  // target), large alpha over-prices.
  double alpha_lo = std::numeric_limits<double>::infinity();
  double alpha_hi = 0.0;
  for (std::size_t m : active) {
    const double v1 = bandwidth_stationarity(1.0, slot_energy[m], gains[m], weights[m]);
    alpha_lo = std::min(alpha_lo, v1);
    const double a_small = std::max(epsilon, 1e-3);
    const double v2 =
        bandwidth_stationarity(a_small, slot_energy[m], gains[m], weights[m]);
    alpha_hi = std::max(alpha_hi, v2);
  }
  alpha_lo = std::max(alpha_lo, 1e-300);
  alpha_hi = std::max(alpha_hi, 2.0 * alpha_lo);
  int guard = 0;
  while (eval(alpha_lo) < target && guard++ < 4000) alpha_lo *= 0.5;
  guard = 0;
  while (eval(alpha_hi) > target && guard++ < 4000) alpha_hi *= 2.0;
  if (eval(alpha_lo) < target || eval(alpha_hi) > target)
    throw bracket_failure_error("bandwidth dual bracket failed to straddle target");

  double alpha = alpha_hi;
  for (int it = 0; it < 200; ++it) {
    alpha = 0.5 * (alpha_lo + alpha_hi);
    const double g = eval(alpha);
    if (std::abs(g - target) <= tol) break;
    if (g > target)
      alpha_lo = alpha;
    else
      alpha_hi = alpha;
    if (alpha_hi - alpha_lo <= 1e-16 * alpha_hi) break;
  }

  for (std::size_t m : active) {
    const double x = solve_x(alpha / weights[m] + 1.0);
    a[m] = std::max(epsilon, slot_energy[m] * gains[m] * x / (1.0 - x));
  }

  // Fold the residual bisection error into the unclamped coordinates so the
  // simplex holds to machine precision.
  double sum = 0.0;
  for (double v : a) sum += v;
  double slack = 1.0 - sum;
  double unclamped = 0.0;
  for (std::size_t m : active)
    if (a[m] > epsilon) unclamped += a[m];
  if (unclamped > 0.0) {
    for (std::size_t m : active)
      if (a[m] > epsilon) a[m] += slack * (a[m] / unclamped);
  } else if (!active.empty()) {
    a[active[0]] += slack;
  }
  return a;
}

}  // namespace ehband
