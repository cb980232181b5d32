#include "ehband/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ehband/errors.hpp"

namespace ehband {

using nlohmann::json;

int Scenario::transmitter_of(int m) const {
  for (int n = 0; n < n_transmitters; ++n) {
    for (int r : receiver_sets[n]) {
      if (r == m) return n;
    }
  }
  return -1;
}

std::vector<ValidationIssue> validate(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  auto add = [&](const char* code, const std::string& msg) {
    issues.push_back({code, msg});
  };

  if (s.n_transmitters <= 0 || s.n_receivers <= 0 || s.horizon <= 0) {
    add("bad-shape", "n_transmitters, n_receivers and horizon must be positive");
    return issues;  // nothing else is well defined
  }
  const auto K = static_cast<std::size_t>(s.horizon);
  if (s.receiver_sets.size() != static_cast<std::size_t>(s.n_transmitters) ||
      s.harvest.size() != static_cast<std::size_t>(s.n_transmitters) ||
      s.battery_cap.size() != static_cast<std::size_t>(s.n_transmitters) ||
      s.max_power.size() != static_cast<std::size_t>(s.n_transmitters) ||
      s.gains.size() != static_cast<std::size_t>(s.n_receivers) ||
      s.weights.size() != static_cast<std::size_t>(s.n_receivers)) {
    add("bad-shape", "per-transmitter/per-receiver arrays have wrong lengths");
    return issues;
  }
  for (int n = 0; n < s.n_transmitters; ++n) {
    if (s.harvest[n].size() != K)
      add("bad-shape", "harvest[" + std::to_string(n) + "] must have horizon entries");
  }
  for (int m = 0; m < s.n_receivers; ++m) {
    if (s.gains[m].size() != K)
      add("bad-shape", "gains[" + std::to_string(m) + "] must have horizon entries");
  }
  if (!issues.empty()) return issues;

  // receiver_sets must partition {0..M-1}
  std::vector<int> owner(s.n_receivers, -1);
  bool partition_ok = true;
  for (int n = 0; n < s.n_transmitters; ++n) {
    for (int m : s.receiver_sets[n]) {
      if (m < 0 || m >= s.n_receivers) {
        add("bad-partition", "receiver index " + std::to_string(m) + " out of range");
        partition_ok = false;
        continue;
      }
      if (owner[m] != -1) {
        add("bad-partition", "receiver " + std::to_string(m) + " appears in two sets");
        partition_ok = false;
      }
      owner[m] = n;
    }
  }
  if (partition_ok) {
    for (int m = 0; m < s.n_receivers; ++m) {
      if (owner[m] == -1) {
        add("bad-partition", "receiver " + std::to_string(m) + " belongs to no transmitter");
        partition_ok = false;
      }
    }
  }

  if (s.epsilon < 0.0) add("negative-epsilon", "epsilon must be >= 0");
  if (s.n_receivers * s.epsilon > 1.0) {
    std::ostringstream os;
    os << "M*epsilon = " << s.n_receivers * s.epsilon
       << " > 1: bandwidth simplex with a >= epsilon is empty";
    add("infeasible-epsilon", os.str());
  }

  for (int n = 0; n < s.n_transmitters; ++n) {
    if (!(s.battery_cap[n] > 0.0))
      add("nonpositive-battery", "battery_cap[" + std::to_string(n) + "] must be > 0");
    if (s.max_power[n].has_value() && !(*s.max_power[n] > 0.0))
      add("nonpositive-power", "max_power[" + std::to_string(n) + "] must be > 0");
    for (double e : s.harvest[n]) {
      if (e < 0.0 || !std::isfinite(e)) {
        add("negative-harvest", "harvest[" + std::to_string(n) + "] has a negative entry");
        break;
      }
    }
  }
  for (int m = 0; m < s.n_receivers; ++m) {
    if (s.weights[m] < 0.0)
      add("negative-weight", "weights[" + std::to_string(m) + "] must be >= 0");
    for (double h : s.gains[m]) {
      if (!(h > 0.0) || !std::isfinite(h)) {
        add("nonpositive-gain", "gains[" + std::to_string(m) + "] has a nonpositive entry");
        break;
      }
    }
  }

  // Within one receiver set, gains must be pairwise distinct per slot (the SIC
  // decode order is defined by strict gain ordering).
  if (partition_ok) {
    for (int n = 0; n < s.n_transmitters; ++n) {
      const auto& set = s.receiver_sets[n];
      bool reported = false;
      for (int k = 0; k < s.horizon && !reported; ++k) {
        for (std::size_t i = 0; i < set.size() && !reported; ++i) {
          for (std::size_t j = i + 1; j < set.size(); ++j) {
            if (s.gains[set[i]][k] == s.gains[set[j]][k]) {
              std::ostringstream os;
              os << "receivers " << set[i] << " and " << set[j]
                 << " share gain " << s.gains[set[i]][k] << " in slot " << k;
              add("duplicate-gain", os.str());
              reported = true;
              break;
            }
          }
        }
      }
    }
  }
  return issues;
}

void validate_or_throw(const Scenario& s) {
  auto issues = validate(s);
  if (issues.empty()) return;
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& i : issues) os << " [" << i.code << "] " << i.message << ";";
  throw invalid_scenario_error(os.str());
}

EffectiveEnergy effective_energy(const Scenario& s) {
  EffectiveEnergy eff;
  eff.cum.assign(s.n_transmitters, {});
  for (int n = 0; n < s.n_transmitters; ++n) {
    auto& cum = eff.cum[n];
    cum.resize(s.horizon);
    if (!s.power_bounded(n)) {
      double c = 0.0;
      for (int k = 0; k < s.horizon; ++k) cum[k] = (c += s.harvest[n][k]);
      continue;
    }
    // Bounded power: clip so that every pair (j < k) satisfies
    // cum[k] <= cum[j] + (k-j)*P + B, the exact nonemptiness condition of the
    // causality/battery band with per-slot power caps.
    const double p_cap = *s.max_power[n];
    const double b_max = s.battery_cap[n];
    double prev = 0.0;
    double slack = 0.0;  // min_j (cum[j] - j*P), j < k
    for (int k = 1; k <= s.horizon; ++k) {
      double v = std::min(prev + s.harvest[n][k - 1], k * p_cap + b_max + slack);
      cum[k - 1] = v;
      slack = std::min(slack, v - k * p_cap);
      prev = v;
    }
  }
  return eff;
}

const char* to_string(ChannelMode mode) {
  return mode == ChannelMode::orthogonal ? "orthogonal" : "nonorthogonal";
}

std::optional<ChannelMode> channel_mode_from_string(const std::string& name) {
  if (name == "orthogonal" || name == "ortho" || name == "o")
    return ChannelMode::orthogonal;
  if (name == "nonorthogonal" || name == "nonortho" || name == "no")
    return ChannelMode::nonorthogonal;
  return std::nullopt;
}

Allocation Allocation::zeros(const Scenario& s, ChannelMode mode) {
  Allocation a;
  a.mode = mode;
  a.energy.assign(s.n_receivers, std::vector<double>(s.horizon, 0.0));
  if (mode == ChannelMode::orthogonal) {
    a.bandwidth.assign(s.n_receivers, std::vector<double>(s.horizon, 0.0));
  } else {
    a.tx_energy.assign(s.n_transmitters, std::vector<double>(s.horizon, 0.0));
    a.tx_bandwidth.assign(s.n_transmitters, std::vector<double>(s.horizon, 0.0));
  }
  return a;
}

namespace {

// a*log(1 + p*H/a), extended continuously by 0 at a = 0, p = 0.
double rate_term(double a, double p, double h) {
  if (a <= 0.0) {
    if (p > 0.0)
      throw degenerate_allocation_error(
          "zero bandwidth with positive energy: rate term undefined");
    return 0.0;
  }
  if (p <= 0.0) return 0.0;
  return a * std::log1p(p * h / a);
}

RateReport finish_report(const Scenario& s, std::vector<double> per_receiver) {
  RateReport r;
  r.per_receiver = std::move(per_receiver);
  r.weighted_total = 0.0;
  r.pf_utility = 0.0;
  for (int m = 0; m < s.n_receivers; ++m) {
    r.weighted_total += s.weights[m] * r.per_receiver[m];
    r.pf_utility += r.per_receiver[m] > 0.0
                        ? std::log(r.per_receiver[m])
                        : -std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace

RateReport rate_orthogonal(const Scenario& s, const Allocation& alloc) {
  std::vector<double> rates(s.n_receivers, 0.0);
  for (int m = 0; m < s.n_receivers; ++m) {
    for (int k = 0; k < s.horizon; ++k) {
      rates[m] += rate_term(alloc.bandwidth[m][k], alloc.energy[m][k], s.gains[m][k]);
    }
  }
  return finish_report(s, std::move(rates));
}

RateReport rate_nonorthogonal(const Scenario& s, const Allocation& alloc) {
  std::vector<double> rates(s.n_receivers, 0.0);
  for (int n = 0; n < s.n_transmitters; ++n) {
    const auto& set = s.receiver_sets[n];
    for (int k = 0; k < s.horizon; ++k) {
      const double band = alloc.tx_bandwidth[n][k];
      for (int m : set) {
        const double p = alloc.energy[m][k];
        if (band <= 0.0) {
          if (p > 0.0)
            throw degenerate_allocation_error(
                "zero transmitter bandwidth with positive energy");
          continue;
        }
        if (p <= 0.0) continue;
        const double h = s.gains[m][k];
        double interference = 0.0;  // transmissions to stronger channels
        for (int m0 : set) {
          if (s.gains[m0][k] > h) interference += alloc.energy[m0][k];
        }
        rates[m] += band * std::log1p(p * h / band / (interference * h / band + 1.0));
      }
    }
  }
  return finish_report(s, std::move(rates));
}

namespace {

json scenario_as_json(const Scenario& s) {
  json j;
  j["n_transmitters"] = s.n_transmitters;
  j["n_receivers"] = s.n_receivers;
  j["horizon"] = s.horizon;
  j["receiver_sets"] = s.receiver_sets;
  j["harvest"] = s.harvest;
  j["gains"] = s.gains;
  j["battery_cap"] = s.battery_cap;
  bool any_bounded = false;
  for (const auto& p : s.max_power) any_bounded |= p.has_value();
  if (any_bounded) {
    json mp = json::array();
    for (const auto& p : s.max_power) {
      if (p.has_value())
        mp.push_back(*p);
      else
        mp.push_back(nullptr);
    }
    j["max_power"] = mp;
  }
  j["weights"] = s.weights;
  j["epsilon"] = s.epsilon;
  return j;
}

}  // namespace

std::string scenario_to_json(const Scenario& s, int indent) {
  return scenario_as_json(s).dump(indent) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("scenario parse failure: ") + e.what());
  }
  Scenario s;
  try {
    s.n_transmitters = j.at("n_transmitters").get<int>();
    s.n_receivers = j.at("n_receivers").get<int>();
    s.horizon = j.at("horizon").get<int>();
    s.receiver_sets = j.at("receiver_sets").get<std::vector<std::vector<int>>>();
    s.harvest = j.at("harvest").get<std::vector<std::vector<double>>>();
    s.gains = j.at("gains").get<std::vector<std::vector<double>>>();
    s.battery_cap = j.at("battery_cap").get<std::vector<double>>();
    s.weights = j.at("weights").get<std::vector<double>>();
    s.epsilon = j.value("epsilon", 0.0);
    s.max_power.assign(s.battery_cap.size(), std::nullopt);
    if (j.contains("max_power")) {
      const auto& mp = j.at("max_power");
      if (mp.size() != s.max_power.size())
        throw io_error("max_power length does not match n_transmitters");
      for (std::size_t n = 0; n < s.max_power.size(); ++n) {
        if (!mp[n].is_null()) s.max_power[n] = mp[n].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw io_error(std::string("scenario field error: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write scenario file: " + path);
  out << scenario_to_json(s);
}

std::uint64_t scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s, -1);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ehband
