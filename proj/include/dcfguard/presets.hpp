#pragma once

// Named experiment presets. A preset expands to a list of simulator runs,
// an optional sweep, and an optional analytic table.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcfguard/config.hpp"
#include "dcfguard/curves.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/sweep.hpp"

namespace dcfguard {

struct PresetRun {
  std::string name;
  ScenarioConfig config;
};

struct PresetSweep {
  ScenarioConfig base;
  SweepSpec spec;
};

struct PresetPlan {
  std::string name;
  std::vector<PresetRun> runs;
  std::optional<PresetSweep> sweep;
  std::optional<Table> table;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "fig1",          "fig2",        "fig3",          "fig5",         "fig5-cwmin-halved", "fig5-fixed-cw",
      "fig5-aifs-sifs", "fig5-large-txop", "fig6",     "fig7",         "fig8",              "fig10-sweep",
      "fig11",         "fig12-sweep", "robustness"};
  return names;
}

namespace presets {

inline StationConfig station(StationId id, BehaviourPolicy policy = policy::Compliant{}) {
  StationConfig s;
  s.id = id;
  s.policy = std::move(policy);
  return s;
}

inline ScenarioConfig base(std::string name, std::uint64_t seed, std::string phy = "dot11b-11M",
                           int payload = 1000) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.phy_preset = std::move(phy);
  c.payload_bytes = payload;
  c.seed = seed;
  return c;
}

/// Policing off and on, with run names suffixed accordingly.
inline std::vector<PresetRun> on_off(const ScenarioConfig& cfg) {
  ScenarioConfig off = cfg;
  off.policing = false;
  ScenarioConfig on = cfg;
  on.policing = true;
  return {{cfg.name + "-nopolicing", off}, {cfg.name + "-policing", on}};
}

/// Two stations on 802.11b: one with W = 16, one compliant (W = 32).
inline ScenarioConfig fig1(std::uint64_t seed) {
  auto c = base("fig1", seed);
  c.stations = {station(1, policy::CWminHalved{}), station(2)};
  return c;
}

/// Three stations on 802.11g with 1500-byte frames, one with W = 16.
inline ScenarioConfig fig2(std::uint64_t seed) {
  auto c = base("fig2", seed, "dot11g-54M", 1500);
  c.stations = {station(1, policy::CWminHalved{}), station(2), station(3)};
  return c;
}

/// Three saturated 802.11b stations, station 1 misbehaving.
inline ScenarioConfig fig5(const std::string& name, BehaviourPolicy misbehaviour, std::uint64_t seed) {
  auto c = base(name, seed);
  c.stations = {station(1, std::move(misbehaviour)), station(2), station(3)};
  return c;
}

/// Stations 1 and 2 throughout, a W = 16 station 3 from 100 s to 300 s and
/// again from 420 s to 500 s, compliant station 4 from 200 s to 400 s.
inline ScenarioConfig fig8(std::uint64_t seed) {
  auto c = base("fig8", seed);
  c.duration_s = 520.0;
  auto s3 = station(3, policy::CWminHalved{});
  s3.sessions = {{100.0, 300.0}, {420.0, 500.0}};
  auto s4 = station(4);
  s4.sessions = {{200.0, 400.0}};
  c.stations = {station(1), station(2), s3, s4};
  return c;
}

/// Three compliant stations; station 1 wins every collision it takes part in.
inline ScenarioConfig fig11(std::uint64_t seed) {
  auto c = base("fig11", seed);
  c.stations = {station(1), station(2), station(3)};
  c.stations[0].capture_priority = 1;
  c.p_capture = 1.0;
  c.measurement_mode = MeasurementMode::Realistic;
  return c;
}

inline std::vector<std::uint64_t> seeds_from(std::uint64_t first, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

inline std::vector<std::string> range_values(int lo, int hi) {
  std::vector<std::string> out;
  for (int i = lo; i <= hi; ++i) out.push_back(std::to_string(i));
  return out;
}

inline void append(Table& into, const Table& more) { into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end()); }

}  // namespace presets

/// Expands a named preset. Sweep presets use seeds seed..seed+9.
/// Throws ConfigError for an unknown name.
inline PresetPlan make_preset(const std::string& name, std::uint64_t seed, unsigned workers = 1) {
  using namespace presets;
  PresetPlan plan;
  plan.name = name;
  auto fig5_runs = [&](const std::string& n, BehaviourPolicy p) { return on_off(fig5(n, std::move(p), seed)); };
  if (name == "fig1") {
    plan.runs = on_off(fig1(seed));
  } else if (name == "fig2") {
    plan.runs = {{"fig2", fig2(seed)}};
  } else if (name == "fig5-cwmin-halved") {
    plan.runs = fig5_runs(name, policy::CWminHalved{});
  } else if (name == "fig5-fixed-cw") {
    plan.runs = fig5_runs(name, policy::FixedCW{16});
  } else if (name == "fig5-aifs-sifs") {
    plan.runs = fig5_runs(name, policy::AifsSifs{});
  } else if (name == "fig5-large-txop") {
    plan.runs = fig5_runs(name, policy::LargeTxop{6413.0});
  } else if (name == "fig5") {
    for (const char* sub : {"fig5-cwmin-halved", "fig5-fixed-cw", "fig5-aifs-sifs", "fig5-large-txop"}) {
      auto part = make_preset(sub, seed, workers);
      plan.runs.insert(plan.runs.end(), part.runs.begin(), part.runs.end());
    }
  } else if (name == "fig8") {
    plan.runs = {{"fig8", fig8(seed)}};
  } else if (name == "fig11") {
    plan.runs = on_off(fig11(seed));
  } else if (name == "fig10-sweep") {
    auto b = fig1(seed);
    b.name = name;
    plan.sweep = PresetSweep{b, SweepSpec{"n_fair", range_values(1, 7), seeds_from(seed, 10), workers}};
  } else if (name == "fig12-sweep") {
    auto b = fig1(seed);
    b.name = name;
    plan.sweep = PresetSweep{b, SweepSpec{"n_misbehaving", range_values(1, 7), seeds_from(seed, 10), workers}};
  } else if (name == "fig3") {
    plan.table = suppression_response_table();
  } else if (name == "fig6") {
    plan.table = virtual_failure_table();
  } else if (name == "fig7") {
    Table t = observation_time_table(dot11b(1000));
    append(t, observation_time_table(dot11g(1500)));
    plan.table = t;
  } else if (name == "robustness") {
    const std::vector<double> grid{-0.5, 0.0, 0.5};
    plan.table = robustness_table(8, 5, 0.25, 0.5, grid);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return plan;
}

}  // namespace dcfguard
