#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "dcfguard/csv.hpp"
#include "dcfguard/presets.hpp"
#include "dcfguard/scenario.hpp"

using namespace dcfguard;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

constexpr const char* kMinimal =
    "duration_s: 60\n"
    "stations:\n"
    "  - id: 1\n"
    "  - id: 2\n"
    "    policy: cwmin-halved\n";

constexpr const char* kFull =
    "name: mixed\n"
    "phy: dot11g-54M\n"
    "payload_bytes: 1200\n"
    "duration_s: 120\n"
    "seed: 42\n"
    "p_capture: 0.5\n"
    "controller:\n"
    "  enabled: false\n"
    "  alpha: 0.25\n"
    "  update_period_s: 5\n"
    "  disassociation_threshold: 3\n"
    "  measurement_mode: oracle\n"
    "estimator: {z_score: 2.5, epsilon: 0.02}\n"
    "stations:\n"
    "  - id: 4\n"
    "    policy: fixed-cw:8\n"
    "    traffic: onoff:5,30\n"
    "    capture_priority: 1\n"
    "    join_time_s: 10\n"
    "    leave_time_s: 90\n"
    "  - id: 2\n"
    "    policy: large-txop:3000\n"
    "    traffic: cbr:500000\n"
    "    sessions: [[0, 20], [40]]\n"
    "    forced_p_nack: 0.25\n"
    "    initial_penalty: 1.5\n"
    "  - id: 3\n"
    "    policy: scripted:0,0.5,-0.5\n"
    "    traffic: bernoulli:0.002\n";

}  // namespace

TEST(ParseScenario, MinimalConfigUsesDefaults) {
  const ScenarioConfig cfg = parse_scenario(kMinimal);
  EXPECT_EQ(cfg.duration_s, 60.0);
  ASSERT_EQ(cfg.stations.size(), 2u);
  EXPECT_TRUE(is_compliant(cfg.stations[0].policy));
  EXPECT_TRUE(std::holds_alternative<policy::CWminHalved>(cfg.stations[1].policy));
  EXPECT_EQ(cfg.phy_preset, "dot11b-11M");
  EXPECT_EQ(cfg.payload_bytes, 1000);
  EXPECT_TRUE(cfg.policing);
  EXPECT_EQ(cfg.controller.alpha, 0.1);
  EXPECT_EQ(cfg.stations[0].sessions, (std::vector<Session>{Session{}}));
}

TEST(ParseScenario, FullConfig) {
  const ScenarioConfig cfg = parse_scenario(kFull);
  EXPECT_EQ(cfg.name, "mixed");
  EXPECT_EQ(cfg.payload_bytes, 1200);
  EXPECT_FALSE(cfg.policing);
  EXPECT_EQ(cfg.measurement_mode, MeasurementMode::Oracle);
  EXPECT_EQ(cfg.estimator.epsilon, 0.02);
  EXPECT_EQ(cfg.stations[0].policy, BehaviourPolicy{policy::FixedCW{8}});
  EXPECT_EQ(cfg.stations[0].traffic, TrafficSource{(traffic::OnOff{5.0, 30.0})});
  EXPECT_EQ(cfg.stations[0].sessions, (std::vector<Session>{{10.0, 90.0}}));
  EXPECT_EQ(cfg.stations[1].sessions, (std::vector<Session>{{0.0, 20.0}, {40.0, kForever}}));
  EXPECT_EQ(cfg.stations[1].forced_p_nack, 0.25);
  EXPECT_EQ(cfg.stations[1].initial_penalty, 1.5);
  EXPECT_EQ(cfg.stations[2].policy, BehaviourPolicy{(policy::Scripted{{0.0, 0.5, -0.5}})});
}

TEST(ParseScenario, DuplicateIdNamesTheIdAndLine) {
  const std::string err = error_of("duration_s: 10\nstations:\n  - id: 7\n  - id: 7\n");
  EXPECT_NE(err.find("duplicate station id 7"), std::string::npos) << err;
  EXPECT_EQ(err.rfind("line 4:", 0), 0u) << err;
}

TEST(ParseScenario, UnknownPolicyIsLocated) {
  const std::string err = error_of("duration_s: 10\nstations:\n  - id: 1\n    policy: greedy\n");
  EXPECT_EQ(err.rfind("line 4:", 0), 0u) << err;
  EXPECT_NE(err.find("greedy"), std::string::npos) << err;
}

TEST(ParseScenario, MissingFields) {
  EXPECT_NE(error_of("stations:\n  - id: 1\n").find("duration_s"), std::string::npos);
  EXPECT_NE(error_of("duration_s: 5\n").find("stations"), std::string::npos);
  const std::string err = error_of("duration_s: 5\nstations:\n  - policy: compliant\n");
  EXPECT_NE(err.find("'id'"), std::string::npos) << err;
  EXPECT_EQ(err.rfind("line 3:", 0), 0u) << err;
}

TEST(ParseScenario, UnknownKeyIsLocated) {
  const std::string err = error_of("duration_s: 5\nstations:\n  - id: 1\n    colour: red\n");
  EXPECT_EQ(err.rfind("line 4:", 0), 0u) << err;
  EXPECT_NE(err.find("colour"), std::string::npos);
  EXPECT_NE(error_of("duration_s: 5\nspeed: 3\nstations: []\n").find("line 2:"), std::string::npos);
}

TEST(ParseScenario, InvalidValues) {
  EXPECT_NE(error_of("duration_s: 0\nstations: []\n"), "");
  EXPECT_NE(error_of("duration_s: x\nstations: []\n"), "");
  EXPECT_NE(error_of("duration_s: 5\nphy: dot11n\nstations: []\n"), "");
  EXPECT_NE(error_of("duration_s: 5\ncontroller: {alpha: 2}\nstations: []\n"), "");
  EXPECT_NE(error_of("duration_s: 5\nstations:\n  - id: 1\n    join_time_s: 5\n    leave_time_s: 5\n"), "");
  EXPECT_NE(error_of("duration_s: 5\nstations:\n  - id: 1\n    sessions: [[0, 10], [5, 20]]\n"), "");
  EXPECT_NE(error_of("duration_s: 5\nstations:\n  - id: 1\n    traffic: cbr:-3\n"), "");
  EXPECT_NE(error_of("duration_s: [5\n"), "");
}

TEST(SerializeScenario, CanonicalFormIsIdempotent) {
  for (const char* text : {kMinimal, kFull}) {
    const ScenarioConfig cfg = parse_scenario(text);
    const std::string canon = serialize_scenario(cfg);
    EXPECT_EQ(parse_scenario(canon), cfg);
    EXPECT_EQ(serialize_scenario(parse_scenario(canon)), canon);
  }
}

TEST(SerializeScenario, PresetsRoundTrip) {
  for (const auto& name : preset_names()) {
    const PresetPlan plan = make_preset(name, 3);
    for (const auto& r : plan.runs) EXPECT_EQ(parse_scenario(serialize_scenario(r.config)), r.config) << r.name;
  }
}

TEST(Presets, Fig5CwminHalvedExpansion) {
  const PresetPlan plan = make_preset("fig5-cwmin-halved", 1);
  ASSERT_EQ(plan.runs.size(), 2u);
  for (const auto& r : plan.runs) {
    const ScenarioConfig& c = r.config;
    EXPECT_EQ(c.phy_preset, "dot11b-11M");
    ASSERT_EQ(c.stations.size(), 3u);
    int w16 = 0;
    for (const auto& s : c.stations) {
      EXPECT_TRUE(std::holds_alternative<traffic::Saturated>(s.traffic));
      if (apply_policy(s.policy).cw_min == 16) ++w16;
    }
    EXPECT_EQ(w16, 1);
  }
  EXPECT_FALSE(plan.runs[0].config.policing);
  EXPECT_TRUE(plan.runs[1].config.policing);
}

TEST(Presets, UnknownNameAndShapes) {
  EXPECT_THROW(make_preset("fig99", 1), ConfigError);
  EXPECT_EQ(make_preset("fig5", 1).runs.size(), 8u);
  EXPECT_TRUE(make_preset("fig10-sweep", 1).sweep.has_value());
  EXPECT_EQ(make_preset("fig10-sweep", 1).sweep->spec.seeds.size(), 10u);
  EXPECT_TRUE(make_preset("fig6", 1).table.has_value());
  EXPECT_EQ(make_preset("fig2", 1).runs[0].config.phy_preset, "dot11g-54M");
  EXPECT_EQ(make_preset("fig2", 1).runs[0].config.payload_bytes, 1500);
}

TEST(Csv, Quoting) {
  EXPECT_EQ(csv::quote("plain"), "plain");
  EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv::quote("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv::number(std::nan("")), "");
  EXPECT_EQ(csv::number(0.1), "0.1");
}

TEST(Csv, TraceGoldenFile) {
  SimTrace t;
  t.rows.push_back({10.0, 0, 1, 5009, 4732, 4732, 45124, 0.125, 0.0625, 0.1, 0.1, Escalation::Continue, false});
  t.rows.push_back({20.5, 1, 2, 7, 5, 0, 40000, 0.000175, std::nan(""), 1.25, 1.0, Escalation::DropDataToo, false});
  std::ostringstream out;
  write_trace_csv(out, t);
  EXPECT_EQ(out.str(), slurp(DCFGUARD_SOURCE_DIR "/tests/golden/trace.csv"));
}

TEST(Csv, SummaryGoldenFile) {
  SimTrace a;
  a.summary.push_back({1, 2, 0.05, 400000.0, std::log(400000.0)});
  SimTrace b;
  b.summary.push_back({3, 1, 0.0, 0.0, std::log(0.0)});
  std::ostringstream out;
  write_summary_csv(out, {{"fig1,policing", a}, {"say \"hi\"", b}});
  EXPECT_EQ(out.str(), slurp(DCFGUARD_SOURCE_DIR "/tests/golden/summary.csv"));
}
