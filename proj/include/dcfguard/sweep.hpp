#pragma once

// Parameter sweeps over a base scenario: one run per (value, seed), executed
// on a pool of worker threads, aggregated into means with Student-t 95%
// confidence intervals across seeds.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dcfguard/config.hpp"
#include "dcfguard/csv.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/sim.hpp"

namespace dcfguard {

struct SweepSpec {
  std::string axis;                 // e.g. n_fair, controller.alpha
  std::vector<std::string> values;  // textual, parsed per axis
  std::vector<std::uint64_t> seeds;
  unsigned workers = 1;
};

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  StationId station_id = 0;
  std::string policy;
  double attempt_rate = 0.0;
  double goodput_bps = 0.0;
  double utility = 0.0;
};

/// Mean over seeds of the per-seed average across stations sharing a policy.
struct SweepAggregate {
  std::string value;
  std::string policy;
  std::size_t seeds = 0;
  double attempt_rate = 0.0;
  double attempt_rate_ci = std::nan("");  // half-width; NaN with fewer than two seeds
  double goodput_bps = 0.0;
  double goodput_bps_ci = std::nan("");
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"n_fair",         "n_misbehaving",           "controller.alpha",
                                             "controller.update_period_s", "controller.enabled", "p_capture",
                                             "payload_bytes",  "duration_s",              "estimator.epsilon",
                                             "measurement_mode"};
  return axes;
}

namespace detail {

inline std::vector<StationConfig> replicate(const StationConfig& proto, int count, StationId first_id) {
  std::vector<StationConfig> out;
  for (int i = 0; i < count; ++i) {
    StationConfig s = proto;
    s.id = first_id + static_cast<StationId>(i);
    out.push_back(s);
  }
  return out;
}

// n_fair / n_misbehaving keep the other group intact and renumber every
// station so misbehaving ones come first.
inline ScenarioConfig resize_group(const ScenarioConfig& base, bool fair_group, int count) {
  std::vector<StationConfig> fair;
  std::vector<StationConfig> bad;
  for (const auto& s : base.stations) (is_compliant(s.policy) ? fair : bad).push_back(s);
  auto& target = fair_group ? fair : bad;
  StationConfig proto = target.empty() ? StationConfig{} : target.front();
  if (target.empty() && !fair_group) proto.policy = policy::CWminHalved{};
  target = replicate(proto, count, 0);
  ScenarioConfig cfg = base;
  cfg.stations.clear();
  StationId next = 1;
  for (auto* group : {&bad, &fair})
    for (auto s : *group) {
      s.id = next++;
      cfg.stations.push_back(s);
    }
  return cfg;
}

}  // namespace detail

/// Base scenario with one axis set to `value`. Throws ConfigError for an
/// unknown axis or unparsable value.
inline ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, const std::string& value) {
  auto number = [&] {
    try {
      return detail::parse_number(value, axis);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  };
  auto count = [&] {
    const double v = number();
    if (v < 0 || v != std::floor(v)) throw ConfigError(axis + " needs a non-negative integer");
    return static_cast<int>(v);
  };
  ScenarioConfig cfg = base;
  if (axis == "n_fair") {
    cfg = detail::resize_group(base, true, count());
  } else if (axis == "n_misbehaving") {
    cfg = detail::resize_group(base, false, count());
  } else if (axis == "controller.alpha") {
    cfg.controller.alpha = number();
  } else if (axis == "controller.update_period_s") {
    cfg.controller.update_period_s = number();
  } else if (axis == "controller.enabled") {
    if (value != "true" && value != "false") throw ConfigError("controller.enabled takes true or false");
    cfg.policing = value == "true";
  } else if (axis == "p_capture") {
    cfg.p_capture = number();
  } else if (axis == "payload_bytes") {
    cfg.payload_bytes = count();
  } else if (axis == "duration_s") {
    cfg.duration_s = number();
  } else if (axis == "estimator.epsilon") {
    cfg.estimator.epsilon = number();
  } else if (axis == "measurement_mode") {
    try {
      cfg.measurement_mode = parse_measurement_mode(value);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  cfg.validate();
  return cfg;
}

/// Half-width of the two-sided 95% Student-t interval; NaN for n < 2.
inline double t_confidence_halfwidth(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return std::nan("");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(n));
}

inline std::vector<SweepAggregate> aggregate_sweep(const std::vector<SweepRow>& rows) {
  // (value, policy) -> seed -> per-station values
  std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, std::vector<const SweepRow*>>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.value, r.policy);
    if (!groups.contains(key)) order.push_back(key);
    groups[key][r.seed].push_back(&r);
  }
  std::vector<SweepAggregate> out;
  for (const auto& key : order) {
    std::vector<double> att;
    std::vector<double> gp;
    for (const auto& [seed, members] : groups[key]) {
      double a = 0.0;
      double g = 0.0;
      for (const auto* m : members) {
        a += m->attempt_rate;
        g += m->goodput_bps;
      }
      att.push_back(a / static_cast<double>(members.size()));
      gp.push_back(g / static_cast<double>(members.size()));
    }
    SweepAggregate agg;
    agg.value = key.first;
    agg.policy = key.second;
    agg.seeds = att.size();
    for (double a : att) agg.attempt_rate += a / static_cast<double>(att.size());
    for (double g : gp) agg.goodput_bps += g / static_cast<double>(gp.size());
    agg.attempt_rate_ci = t_confidence_halfwidth(att);
    agg.goodput_bps_ci = t_confidence_halfwidth(gp);
    out.push_back(agg);
  }
  return out;
}

/// Runs every (value, seed) point; rows come back in (value, seed, station) order
/// regardless of the worker count.
inline SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
  struct Job {
    std::string value;
    std::uint64_t seed;
    ScenarioConfig cfg;
  };
  std::vector<Job> jobs;
  for (const auto& v : spec.values)
    for (auto seed : spec.seeds) {
      ScenarioConfig cfg = apply_axis(base, spec.axis, v);
      cfg.seed = seed;
      jobs.push_back({v, seed, std::move(cfg)});
    }
  if (jobs.empty() && std::find(sweep_axes().begin(), sweep_axes().end(), spec.axis) == sweep_axes().end())
    throw ConfigError("unknown sweep axis '" + spec.axis + "'");

  std::vector<SimTrace> traces(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        traces[i] = Simulator(jobs[i].cfg).run();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SweepResult res;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::map<StationId, std::string> policies;
    for (const auto& s : jobs[i].cfg.stations) policies[s.id] = policy_name(s.policy);
    for (const auto& s : traces[i].summary)
      res.rows.push_back({jobs[i].value, jobs[i].seed, s.station_id, policies[s.station_id], s.mean_attempt_rate,
                          s.goodput_bps, s.utility});
  }
  res.aggregates = aggregate_sweep(res.rows);
  return res;
}

inline Table sweep_rows_table(const std::string& axis, const SweepResult& r) {
  Table t{{axis, "seed", "station_id", "policy", "mean_attempt_rate", "goodput_bps", "utility"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({row.value, std::to_string(row.seed), std::to_string(row.station_id), row.policy,
                      csv::number(row.attempt_rate), csv::number(row.goodput_bps), csv::number(row.utility)});
  return t;
}

inline Table sweep_aggregate_table(const std::string& axis, const SweepResult& r) {
  Table t{{axis, "policy", "seeds", "mean_attempt_rate", "attempt_rate_ci95", "goodput_bps", "goodput_bps_ci95"},
          {}};
  for (const auto& a : r.aggregates)
    t.rows.push_back({a.value, a.policy, std::to_string(a.seeds), csv::number(a.attempt_rate),
                      csv::number(a.attempt_rate_ci), csv::number(a.goodput_bps), csv::number(a.goodput_bps_ci)});
  return t;
}

}  // namespace dcfguard
