#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oio/control/flight_controller.hpp"
#include "oio/control/kinematics.hpp"
#include "oio/control/pir.hpp"

using namespace oio;
using namespace oio::control;
using nav::Action;

namespace {

UavPose hover_at(double x, double y, double heading) {
  UavPose p;
  p.position = {x, y, 1.0};
  p.heading_deg = heading;
  return p;
}

// Last time the response sits outside the +-band around the command.
double settling_time(const StepTrace& tr, double band) {
  double last_out = 0.0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (std::abs(tr.response[i] - tr.command[i]) > band * std::abs(tr.command[i])) {
      last_out = tr.t[i];
    }
  }
  return last_out;
}

struct WallAt {
  double x_wall;
  Vec3 wind(const Vec3&, double) const { return {}; }
  bool move_is_free(Vec2, Vec2 to) const { return to.x > x_wall; }
};

}  // namespace

TEST(Pir, ProportionalIntegralAndRateTerms) {
  PirController c({2.0, 0.5, 0.1}, 0.1);
  // First step: e = 1, integral 0.1, no rate yet.
  EXPECT_DOUBLE_EQ(c.step(1.0, 0.0), 2.0 + 0.5 * 0.1);
  // Second: measurement moved 0.2, e = 0.8, integral 0.18, rate 2.
  EXPECT_DOUBLE_EQ(c.step(1.0, 0.2), 2.0 * 0.8 + 0.5 * 0.18 - 0.1 * 2.0);
  EXPECT_DOUBLE_EQ(c.integral(), 0.18);
}

TEST(Pir, CommandStepDoesNotKickTheRateTerm) {
  PirController a({0.0, 0.0, 1.0}, 0.1);
  a.step(0.0, 0.5);
  EXPECT_DOUBLE_EQ(a.step(10.0, 0.5), 0.0);
}

TEST(Pir, IntegralIsClamped) {
  PirController c({0.0, 1.0, 0.0}, 0.1, 0.3);
  for (int i = 0; i < 100; ++i) c.step(1.0, 0.0);
  EXPECT_DOUBLE_EQ(c.integral(), 0.3);
  c.reset();
  EXPECT_DOUBLE_EQ(c.integral(), 0.0);
}

TEST(Gains, TableValues) {
  const GainTable g;
  EXPECT_TRUE(g.valid());
  EXPECT_DOUBLE_EQ(g.altitude.kp, 0.070);
  EXPECT_DOUBLE_EQ(g.altitude.ki, 0.015);
  EXPECT_DOUBLE_EQ(g.pitch.kp, 0.011);
  EXPECT_DOUBLE_EQ(g.pitch.ki, 0.002);
  EXPECT_DOUBLE_EQ(g.yaw.ki, 0.012);
}

TEST(Kinematics, DtOutsideRangeThrows) {
  EXPECT_THROW(kinematics_step(UavPose{}, Controls{}, Vec3{}, 0.0), std::domain_error);
  EXPECT_THROW(kinematics_step(UavPose{}, Controls{}, Vec3{}, 0.5), std::domain_error);
}

TEST(Kinematics, WindDriftScalesWithKDrift) {
  UavPose p = hover_at(1.0, 1.0, 0.0);
  const UavPose n = kinematics_step(p, Controls{}, Vec3{2.0, 0.0, 0.0}, 0.1);
  EXPECT_NEAR(n.position.x - 1.0, 0.1 * 0.05 * 2.0, 1e-15);
}

TEST(Kinematics, BodyFrameRotation) {
  const Vec3 f = body_to_world(90.0, 1.0, 0.0, 0.0);
  EXPECT_NEAR(f.x, 0.0, 1e-15);
  EXPECT_NEAR(f.y, 1.0, 1e-15);
  const Vec3 l = body_to_world(0.0, 0.0, 1.0, 0.0);
  EXPECT_NEAR(l.y, 1.0, 1e-15);
}

TEST(StepResponse, AltitudeSettlesWithinFivePercent) {
  const auto tr = axis_step_response(GainTable{}.altitude, altitude_plant(), 1.0, 60.0, 0.1, 2.0);
  EXPECT_LT(settling_time(tr, 0.05), 30.0);
  for (double y : tr.response) EXPECT_LT(std::abs(y), 2.0);
  EXPECT_NEAR(tr.response.back(), 1.0, 0.05);
}

TEST(StepResponse, PitchSettlesWithinFivePercent) {
  const auto tr = axis_step_response(GainTable{}.pitch, pitch_plant(), 5.0, 60.0, 0.1);
  EXPECT_LT(settling_time(tr, 0.05), 30.0);
  for (double y : tr.response) EXPECT_LT(std::abs(y), 10.0);
  EXPECT_NEAR(tr.response.back(), 5.0, 0.25);
}

TEST(StepResponse, YawSettles) {
  const auto tr = axis_step_response(GainTable{}.yaw, yaw_plant(), 45.0, 60.0, 0.1, 5.0);
  EXPECT_LT(settling_time(tr, 0.05), 30.0);
}

class PrimitiveDisplacement : public ::testing::TestWithParam<double> {};

TEST_P(PrimitiveDisplacement, TranslationsMoveThirtyCentimetres) {
  const FlightController fc;
  const CalmWorld calm;
  const double heading = GetParam();
  for (Action a : {Action::Surge, Action::CastLeft, Action::CastRight}) {
    const UavPose start = hover_at(5.0, 5.0, heading);
    const auto r = fc.execute_primitive(start, a, calm);
    EXPECT_FALSE(r.collision);
    EXPECT_FALSE(r.timed_out) << nav::name(a);
    const Vec3 d = r.pose.position - start.position;
    EXPECT_NEAR(d.norm_xy(), 0.30, 0.01) << nav::name(a);
    const double lateral = a == Action::CastLeft ? 0.3 : a == Action::CastRight ? -0.3 : 0.0;
    const double forward = a == Action::Surge ? 0.3 : 0.0;
    const Vec3 want = body_to_world(heading, forward, lateral, 0.0);
    EXPECT_NEAR(d.x, want.x, 0.01);
    EXPECT_NEAR(d.y, want.y, 0.01);
    EXPECT_NEAR(wrap_deg(r.pose.heading_deg - heading), 0.0, 1.0);
  }
}

TEST_P(PrimitiveDisplacement, TurnsRotateInPlace) {
  const FlightController fc;
  const CalmWorld calm;
  const double heading = GetParam();
  for (Action a : {Action::TurnLeft45, Action::TurnRight45, Action::TurnLeft90,
                   Action::TurnRight90}) {
    const UavPose start = hover_at(5.0, 5.0, heading);
    const auto r = fc.execute_primitive(start, a, calm);
    EXPECT_FALSE(r.timed_out) << nav::name(a);
    EXPECT_NEAR(wrap_deg(r.pose.heading_deg - heading - nav::turn_angle(a)), 0.0, 1.0);
    EXPECT_LT((r.pose.position - start.position).norm_xy(), 0.01);
  }
}

INSTANTIATE_TEST_SUITE_P(Headings, PrimitiveDisplacement,
                         ::testing::Values(0.0, 45.0, 180.0, -135.0, -90.0));

TEST(Primitives, SurgeHoldsAgainstCrosswind) {
  const FlightController fc;
  CalmWorld breeze;
  breeze.wind_vector = {0.0, 1.0, 0.0};
  const UavPose start = hover_at(5.0, 5.0, 180.0);
  const auto r = fc.execute_primitive(start, Action::Surge, breeze);
  EXPECT_NEAR((r.pose.position - start.position).norm_xy(), 0.30, 0.01);
}

TEST(Primitives, PauseHoldsForOneSecond) {
  const FlightController fc;
  const UavPose start = hover_at(3.0, 3.0, 0.0);
  int ticks = 0;
  const auto r = fc.execute_primitive(start, Action::Pause, CalmWorld{}, 10.0,
                                      [&](const TickSample&) { ++ticks; });
  EXPECT_EQ(ticks, 10);
  EXPECT_NEAR(r.duration, 1.0, 1e-12);
  EXPECT_LT((r.pose.position - start.position).norm(), 1e-9);
}

TEST(Primitives, LandDescendsToTheGround) {
  const FlightController fc;
  const auto r = fc.execute_primitive(hover_at(3.0, 3.0, 0.0), Action::Land, CalmWorld{});
  EXPECT_TRUE(r.landed);
  EXPECT_LT(r.pose.position.z, 0.02);
}

TEST(Primitives, CollisionRestoresTheStartPose) {
  const FlightController fc;
  const UavPose start = hover_at(5.1, 5.0, 180.0);
  const auto r = fc.execute_primitive(start, Action::Surge, WallAt{5.0});
  EXPECT_TRUE(r.collision);
  EXPECT_EQ(r.pose.position, start.position);
  EXPECT_EQ(r.pose.heading_deg, start.heading_deg);
}

TEST(Primitives, TicksAreReportedOnTheInnerLoopGrid) {
  const FlightController fc;
  std::vector<double> ts;
  fc.execute_primitive(hover_at(3.0, 3.0, 0.0), Action::Surge, CalmWorld{}, 2.0,
                       [&](const TickSample& s) { ts.push_back(s.t); });
  ASSERT_FALSE(ts.empty());
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(ts[i], 2.0 + 0.1 * (i + 1), 1e-12);
}
