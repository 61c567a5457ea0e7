#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcfguard/csv.hpp"
#include "dcfguard/presets.hpp"
#include "dcfguard/sim.hpp"

using namespace dcfguard;

namespace {

ScenarioConfig compliant_network(int n, double duration_s = 30.0, std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.duration_s = duration_s;
  cfg.seed = seed;
  for (int i = 1; i <= n; ++i) cfg.stations.push_back(presets::station(static_cast<StationId>(i)));
  return cfg;
}

std::string csv_of(const SimTrace& t) {
  std::ostringstream s;
  write_trace_csv(s, t);
  return s.str();
}

}  // namespace

TEST(Simulator, SameSeedSameTrace) {
  const auto cfg = presets::fig1(5);
  EXPECT_EQ(csv_of(run(cfg)), csv_of(run(cfg)));
  auto other = cfg;
  other.seed = 6;
  EXPECT_NE(csv_of(run(cfg)), csv_of(run(other)));
}

TEST(Simulator, CounterConservation) {
  auto cfg = presets::fig5("t", policy::CWminHalved{}, 2);
  cfg.duration_s = 60.0;
  Simulator sim(cfg);
  const SimTrace t = sim.run();
  for (const auto& r : t.rows) {
    EXPECT_GE(r.attempts, r.fcs_successes);
    EXPECT_GE(r.fcs_successes, r.acked);
    EXPECT_GT(r.contention_slots, 0u);
  }
  for (const auto& s : sim.stations()) {
    std::uint64_t attempts = 0;
    for (const auto& r : t.rows)
      if (r.station_id == s.id) attempts += r.attempts;
    EXPECT_EQ(attempts + s.window.attempts, s.total.attempts);
  }
  std::uint64_t slots = 0;
  for (const auto& w : t.windows) slots += w.slots.total();
  EXPECT_LE(slots, t.slots.total());
  EXPECT_LE(t.slots.contention, t.slots.total());
  EXPECT_NEAR(t.sim_time_s, 60.0, 0.01);
}

TEST(Simulator, NoPolicingAcksEveryDecodedFrame) {
  auto cfg = presets::fig1(3);
  cfg.policing = false;
  for (const auto& r : run(cfg).rows) {
    EXPECT_EQ(r.fcs_successes, r.acked);
    EXPECT_EQ(r.penalty, 0.0);
  }
}

TEST(Simulator, SummaryRecomputableFromRows) {
  const auto cfg = presets::fig8(2);
  const SimTrace t = run(cfg);
  const auto again = summarise(t.rows, cfg.controller.update_period_s, cfg.phy());
  ASSERT_EQ(again.size(), t.summary.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_EQ(again[i].station_id, t.summary[i].station_id);
    EXPECT_EQ(again[i].windows, t.summary[i].windows);
    EXPECT_EQ(again[i].goodput_bps, t.summary[i].goodput_bps);
    EXPECT_EQ(again[i].mean_attempt_rate, t.summary[i].mean_attempt_rate);
  }
}

TEST(Simulator, RowsTimeOrdered) {
  const SimTrace t = run(presets::fig8(1));
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i - 1].time_s, t.rows[i].time_s);
}

TEST(Simulator, AttemptRateNearFixedPointShortRun) {
  // 3 stations, 60 s: about 280k contention slots per station
  const SimTrace t = run(compliant_network(3, 60.0, 9));
  const double x = homogeneous_fixed_point(3).x;
  for (const auto& s : t.summary) {
    std::uint64_t slots = 0;
    for (const auto& r : t.rows)
      if (r.station_id == s.station_id) slots += r.contention_slots;
    const double sigma = std::sqrt(x * (1.0 - x) / static_cast<double>(slots));
    EXPECT_LT(std::abs(s.mean_attempt_rate - x), 4.0 * sigma) << s.station_id;
  }
}

TEST(Simulator, ForcedSuppressionBlocksAllAcks) {
  auto cfg = compliant_network(2);
  cfg.stations[0].forced_p_nack = 1.0;
  const SimTrace t = run(cfg);
  for (const auto& r : t.rows)
    if (r.station_id == 1) {
      EXPECT_EQ(r.acked, 0u);
      EXPECT_GT(r.fcs_successes, 0u);
      EXPECT_EQ(r.p_nack, 1.0);
    }
}

TEST(Simulator, CaptureResolution) {
  auto cfg = compliant_network(3);
  cfg.stations[0].capture_priority = 2;
  cfg.stations[1].capture_priority = 1;
  Simulator sim(cfg);
  EXPECT_EQ(sim.capture_resolve({0, 1, 2}), std::optional<std::size_t>(0));
  EXPECT_EQ(sim.capture_resolve({1, 2}), std::optional<std::size_t>(1));
  EXPECT_EQ(sim.capture_resolve({2}), std::nullopt);  // priority 0 never captures

  cfg.stations[1].capture_priority = 2;
  Simulator tie(cfg);
  EXPECT_EQ(tie.capture_resolve({0, 1}), std::nullopt);

  cfg.p_capture = 0.0;
  cfg.stations[1].capture_priority = 1;
  Simulator never(cfg);
  EXPECT_EQ(never.capture_resolve({0, 1}), std::nullopt);
}

TEST(Simulator, EmptyNetworkWindowsAreEstimationFailures) {
  auto cfg = compliant_network(2, 50.0);
  for (auto& s : cfg.stations) s.sessions = {{25.0, kForever}};
  const SimTrace t = run(cfg);
  ASSERT_GE(t.windows.size(), 4u);
  EXPECT_FALSE(t.windows[0].estimate_ok);
  EXPECT_FALSE(t.windows[1].estimate_ok);
  EXPECT_TRUE(t.windows[3].estimate_ok);
  EXPECT_TRUE(std::isnan(t.windows[0].f1));
  const auto failures = std::count_if(t.events.begin(), t.events.end(),
                                      [](const SimEvent& e) { return e.what == "estimation-failure"; });
  EXPECT_EQ(failures, 2);
  for (const auto& r : t.rows) EXPECT_GE(r.time_s, 25.0);
}

TEST(Simulator, LoneStationGetsZeroCollisionEstimate) {
  const SimTrace t = run(compliant_network(1, 20.0));
  for (const auto& w : t.windows) {
    ASSERT_TRUE(w.estimate_ok);
    EXPECT_LT(w.f1, 0.02);
  }
}

TEST(Simulator, SessionsAndRejoinRestorePenalty) {
  auto cfg = compliant_network(2, 60.0);
  auto s3 = presets::station(3, policy::CWminHalved{});
  s3.sessions = {{0.0, 30.0}, {40.0, 60.0}};
  cfg.stations.push_back(s3);
  Simulator sim(cfg);
  double archived = -1.0;
  while (sim.clock().sim_time_us < 60e6) {
    sim.step_slot();
    if (archived < 0.0 && sim.clock().sim_time_us > 35e6) {
      ASSERT_NE(sim.controller().archive().find(3), nullptr);
      archived = sim.controller().archive().find(3)->penalty;
    }
    if (archived >= 0.0 && sim.station(3).active) {
      EXPECT_EQ(sim.controller().find(3)->penalty, archived);
      break;
    }
  }
  EXPECT_GT(archived, 0.0);
}

TEST(Simulator, FixedWindowStationIsDisassociated) {
  const SimTrace t = run(presets::fig5("t", policy::FixedCW{16}, 1));
  const auto it = std::find_if(t.events.begin(), t.events.end(),
                               [](const SimEvent& e) { return e.what == "disassociate"; });
  ASSERT_NE(it, t.events.end());
  EXPECT_EQ(it->station_id, 1u);
  for (const auto& r : t.rows)
    if (r.station_id == 1) EXPECT_LE(r.time_s, it->time_s + 1e-9);
}

TEST(Simulator, InitialPenaltyIsApplied) {
  auto cfg = compliant_network(3, 10.0);
  cfg.stations[0].initial_penalty = 0.5;
  const SimTrace t = run(cfg);
  EXPECT_LT(t.rows[0].penalty, 0.5);
  EXPECT_GT(t.rows[0].penalty, 0.3);
}

TEST(Simulator, TrafficSourcesLimitLoad) {
  auto cfg = compliant_network(2, 30.0);
  cfg.stations[1].traffic = traffic::Cbr{1e6};
  const SimTrace t = run(cfg);
  for (const auto& s : t.summary)
    if (s.station_id == 2) EXPECT_NEAR(s.goodput_bps, 1e6, 0.05e6);
  cfg.stations[1].traffic = traffic::Bernoulli{0.001};
  for (const auto& s : run(cfg).summary)
    if (s.station_id == 2) EXPECT_LT(s.goodput_bps, 0.2e6);
}

TEST(Simulator, LargeTxopSendsBursts) {
  auto cfg = presets::fig5("t", policy::LargeTxop{6413.0}, 1);
  cfg.policing = false;
  Simulator sim(cfg);
  int bursts = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto o = sim.step_slot();
    if (o.kind == SlotOutcome::Kind::Success && o.stations.front() == 1) {
      EXPECT_EQ(o.frames_in_burst, sim.timing().frames_per_txop(6413.0));
      ++bursts;
    }
  }
  EXPECT_GT(bursts, 0);
  EXPECT_GT(sim.timing().frames_per_txop(6413.0), 1);
}

TEST(Simulator, ScriptedStationTracksTarget) {
  auto cfg = compliant_network(2, 60.0);
  auto s = presets::station(3, policy::Scripted{{0.0, 0.0, 1.0, 1.0, 0.0, 0.0}});
  cfg.stations.push_back(s);
  cfg.policing = false;
  cfg.measurement_mode = MeasurementMode::Oracle;
  const SimTrace t = run(cfg);
  std::vector<double> ratio;
  for (const auto& r : t.rows)
    if (r.station_id == 3) ratio.push_back(r.measured_rate / r.fair_rate);
  ASSERT_EQ(ratio.size(), 6u);
  EXPECT_NEAR(ratio[1], 1.0, 0.15);
  EXPECT_NEAR(ratio[3], 2.0, 0.3);
}

TEST(Simulator, RejectsInvalidConfig) {
  auto cfg = compliant_network(2);
  cfg.stations[1].id = 1;
  EXPECT_THROW(Simulator{cfg}, ConfigError);
  cfg = compliant_network(2);
  cfg.duration_s = 0.0;
  EXPECT_THROW(Simulator{cfg}, ConfigError);
}
