#include <gtest/gtest.h>

#include <cmath>

#include "dcfguard/analytics.hpp"
#include "dcfguard/controller.hpp"

using namespace dcfguard;

namespace {

RateMeasurement meas(StationId id, double measured, double fair) { return {id, measured, fair, 0}; }

}  // namespace

TEST(UpdatePenalty, AdditiveStep) {
  const ControllerConfig cfg;
  PenaltyState s{1};
  s = update_penalty(s, meas(1, 0.2, 0.1), cfg);
  EXPECT_NEAR(s.penalty, 0.1, 1e-15);
  EXPECT_NEAR(s.p_nack, 0.1, 1e-15);
  s = update_penalty(s, meas(1, 0.05, 0.1), cfg);
  EXPECT_NEAR(s.penalty, 0.05, 1e-15);
}

TEST(UpdatePenalty, FloorsAtZero) {
  PenaltyState s{1};
  s = update_penalty(s, meas(1, 0.0, 0.1), ControllerConfig{});
  EXPECT_EQ(s.penalty, 0.0);
  EXPECT_EQ(s.p_nack, 0.0);
}

TEST(UpdatePenalty, PenaltyCarriesBeyondOne) {
  ControllerConfig cfg;
  cfg.alpha = 0.5;
  PenaltyState s{1, 0.9, 0.9, 0};
  s = update_penalty(s, meas(1, 0.3, 0.1), cfg);
  EXPECT_NEAR(s.penalty, 1.9, 1e-15);
  EXPECT_EQ(s.p_nack, 1.0);
  EXPECT_EQ(s.windows_at_full_suppression, 1);
  s = update_penalty(s, meas(1, 0.05, 0.1), cfg);
  EXPECT_NEAR(s.penalty, 1.65, 1e-15);
  EXPECT_EQ(s.windows_at_full_suppression, 2);
}

TEST(UpdatePenalty, UnusableFairRate) {
  const PenaltyState s{1};
  EXPECT_THROW(update_penalty(s, meas(1, 0.1, 0.0), ControllerConfig{}), EstimationError);
  EXPECT_THROW(update_penalty(s, meas(1, 0.1, std::nan("")), ControllerConfig{}), EstimationError);
}

TEST(ShouldAck, Threshold) {
  const PenaltyState s{1, 0.3, 0.3, 0};
  EXPECT_FALSE(should_ack(s, 0.29));
  EXPECT_TRUE(should_ack(s, 0.3));
  EXPECT_TRUE(should_ack(PenaltyState{1}, 0.0));
}

TEST(Escalation, Ladder) {
  ControllerConfig cfg;
  EXPECT_EQ(escalation_check(PenaltyState{1, 0.5, 0.5, 0}, cfg), Escalation::Continue);
  EXPECT_EQ(escalation_check(PenaltyState{1, 1.2, 1.0, 1}, cfg), Escalation::DropDataToo);
  EXPECT_EQ(escalation_check(PenaltyState{1, 1.2, 1.0, 6}, cfg), Escalation::Disassociate);
  EXPECT_EQ(to_string(Escalation::DropDataToo), "drop-data");
}

TEST(PolicingController, ArchiveRestoresExactState) {
  PolicingController c;
  c.associate(7);
  c.set_penalty(7, 0.4375);
  c.disassociate(7);
  EXPECT_FALSE(c.associated(7));
  ASSERT_NE(c.archive().find(7), nullptr);
  EXPECT_EQ(c.archive().find(7)->penalty, 0.4375);
  const PenaltyState back = c.associate(7);
  EXPECT_EQ(back.penalty, 0.4375);
  EXPECT_EQ(back.p_nack, 0.4375);
  EXPECT_EQ(c.archive().size(), 0u);
}

TEST(PolicingController, FreshStationStartsAtZero) {
  PolicingController c;
  EXPECT_EQ(c.associate(3).penalty, 0.0);
  EXPECT_THROW(c.update(meas(4, 0.1, 0.1)), std::out_of_range);
}

TEST(PolicingController, SkippedUpdateLeavesStateAndLogs) {
  PolicingController c;
  int logged = 0;
  c.set_logger([&](std::string_view) { ++logged; });
  c.associate(1);
  c.set_penalty(1, 0.2);
  const auto rec = c.update(meas(1, 0.1, 0.0));
  EXPECT_TRUE(rec.skipped);
  EXPECT_EQ(rec.state.penalty, 0.2);
  EXPECT_EQ(logged, 1);
}

TEST(PolicingController, CompliantResponseDrivesPenaltyDown) {
  // A compliant station answers suppression with x/x̄ = normalized_attempt(f, P) < 1.
  for (double f : {0.1, 0.3}) {
    PolicingController c;
    c.associate(1);
    c.set_penalty(1, 1.0);
    double prev = 1.0;
    for (int w = 0; w < 100; ++w) {
      const double p = c.find(1)->p_nack;
      c.update(meas(1, normalized_attempt(f, p), 1.0));
      EXPECT_LE(c.find(1)->penalty, prev);
      prev = c.find(1)->penalty;
    }
    EXPECT_LT(prev, 1e-2);
  }
}

TEST(ControllerConfig, Validation) {
  EXPECT_THROW(PolicingController(ControllerConfig{0.0, 10.0, 6}), DomainError);
  EXPECT_THROW(PolicingController(ControllerConfig{0.1, 0.0, 6}), DomainError);
  EXPECT_THROW(PolicingController(ControllerConfig{0.1, 10.0, 0}), DomainError);
}
