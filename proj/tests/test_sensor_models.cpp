#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oio/plume/field.hpp"
#include "oio/sensors/ec.hpp"
#include "oio/sensors/mox.hpp"
#include "oio/sensors/stereo.hpp"

using namespace oio;
using namespace oio::sensors;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(MoxResistance, EqualSplitGivesLoadResistance) {
  EXPECT_DOUBLE_EQ(mox_resistance(5.0, 2.5, 10e3), 10e3);
}

TEST(MoxResistance, FullDropGivesZero) { EXPECT_DOUBLE_EQ(mox_resistance(5.0, 5.0, 10e3), 0.0); }

TEST(MoxResistance, HandEvaluation) {
  // (5 / 1 - 1) * 4.7k
  EXPECT_NEAR(mox_resistance(5.0, 1.0, 4.7e3), 18.8e3, 1e-9);
}

TEST(MoxResistance, NonPhysicalVoltagesThrow) {
  EXPECT_THROW(mox_resistance(5.0, 0.0, 1e3), std::domain_error);
  EXPECT_THROW(mox_resistance(5.0, -1.0, 1e3), std::domain_error);
  EXPECT_THROW(mox_resistance(5.0, 5.1, 1e3), std::domain_error);
}

TEST(MoxResistance, DividerRoundTrip) {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double vc = 1.0 + 10.0 * uniform01(rng);
    const double rl = 100.0 + 1e5 * uniform01(rng);
    const double rs = 1e6 * uniform01(rng) * uniform01(rng);
    const double vrl = vc * rl / (rs + rl);
    const double back = mox_resistance(vc, vrl, rl);
    EXPECT_NEAR(back, rs, 1e-9 * std::max(rs, rl));
  }
}

TEST(MoxRead, TargetVoltageIsMonotoneAndBounded) {
  const MoxParams p;
  double prev = -1.0;
  for (double c = 0.0; c < 50.0; c += 0.25) {
    const double v = mox_target_voltage(p, c);
    EXPECT_GT(v, prev);
    EXPECT_LE(v, p.circuit_voltage);
    prev = v;
  }
}

TEST(MoxRead, ResponseInvertsTheSteadyState) {
  const MoxParams p;
  for (double c : {0.0, 0.01, 0.3, 2.0}) {
    EXPECT_NEAR(mox_response(p, mox_target_voltage(p, c)), p.sensitivity * c, 1e-9);
  }
}

TEST(MoxRead, ConstantInputSettlesOnTarget) {
  MoxParams p;
  p.noise_sigma = 0.01;
  MoxState s;
  Rng rng(3);
  mox_read(s, p, 0.0, 0.1, &rng);
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto r = mox_read(s, p, 0.5, 0.1, &rng);
    if (i >= 1000) {
      sum += r.value;
      ++n;
    }
  }
  const double target = mox_target_voltage(p, 0.5);
  EXPECT_NEAR(s.voltage, target, 1e-12);
  EXPECT_NEAR(sum / n, target, 4.0 * p.noise_sigma / std::sqrt(n));
}

TEST(MoxRead, StepReaches632PercentAfterOneTimeConstant) {
  const MoxParams p;
  MoxState s;
  const double v0 = mox_read(s, p, 0.0, 0.1, nullptr).value;
  const double v_inf = mox_target_voltage(p, 1.0);
  // Ten sub-steps adding up to tau.
  double v = v0;
  for (int i = 0; i < 10; ++i) v = mox_read(s, p, 1.0, p.response_tau / 10.0, nullptr).value;
  EXPECT_NEAR((v - v0) / (v_inf - v0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR((v - v0) / (v_inf - v0), 0.632, 1e-3);
}

TEST(MoxRead, NoiseFreeSequenceMatchesClosedForm) {
  const MoxParams p;
  MoxState s;
  const double v0 = mox_read(s, p, 0.0, 0.1, nullptr).value;
  const double v_inf = mox_target_voltage(p, 0.7);
  const double dt = 0.05;
  for (int k = 1; k <= 100; ++k) {
    const double v = mox_read(s, p, 0.7, dt, nullptr).value;
    const double oracle = v_inf + (v0 - v_inf) * std::exp(-k * dt / p.response_tau);
    EXPECT_NEAR(v, oracle, 1e-12) << k;
  }
}

TEST(MoxRead, NonPositiveDtThrows) {
  MoxState s;
  EXPECT_THROW(mox_read(s, MoxParams{}, 0.1, 0.0, nullptr), std::domain_error);
}

TEST(Cottrell, QuadrupledTimeHalvesCurrent) {
  const EcParams p;
  for (double t : {0.01, 0.3, 1.0, 5.0}) {
    EXPECT_NEAR(cottrell_current(p, 4.0 * t), 0.5 * cottrell_current(p, t),
                1e-15 * cottrell_current(p, t));
  }
}

TEST(Cottrell, LinearInConcentrationElectronsAreaAndRootDiffusion) {
  const EcParams p;
  const double base = cottrell_current(p, 0.5);
  EcParams q = p;
  q.concentration *= 2.0;
  EXPECT_NEAR(cottrell_current(q, 0.5), 2.0 * base, 1e-15 * base);
  q = p;
  q.electrons *= 3.0;
  EXPECT_NEAR(cottrell_current(q, 0.5), 3.0 * base, 1e-15 * base);
  q = p;
  q.area *= 0.5;
  EXPECT_NEAR(cottrell_current(q, 0.5), 0.5 * base, 1e-15 * base);
  q = p;
  q.diffusion *= 4.0;
  EXPECT_NEAR(cottrell_current(q, 0.5), 2.0 * base, 1e-15 * base);
}

TEST(Cottrell, HandEvaluation) {
  EcParams p;
  p.electrons = 2.0;
  p.area = 2.25;
  p.concentration = 1e-6;
  p.diffusion = 1e-5;
  // 2 * 96485 * 2.25 * 1e-6 * sqrt(1e-5) / sqrt(pi * 1)
  const double oracle = 0.4341825 * 0.0031622776601683794 / 1.7724538509055159;
  EXPECT_NEAR(cottrell_current(p, 1.0), oracle, 1e-15);
  EXPECT_NEAR(cottrell_current(p, 1.0), 7.7463e-4, 1e-8);
}

TEST(Cottrell, NonPositiveTimeThrows) {
  EXPECT_THROW(cottrell_current(EcParams{}, 0.0), std::domain_error);
  EXPECT_THROW(cottrell_current(EcParams{}, -1.0), std::domain_error);
}

TEST(EcFastInfer, NoiselessTraceIsReproducedOverTheFullCurve) {
  const EcParams p;
  const auto window = chronoamperometry_trace(p, 100.0, 1.0, nullptr);
  ASSERT_EQ(window.size(), 100u);
  const auto fit = ec_fast_infer(window, p);
  ASSERT_EQ(fit.predicted.size(), 600u);
  double se = 0.0, ref = 0.0;
  for (const auto& s : fit.predicted) {
    const double truth = cottrell_current(p, s.t);
    se += (s.current - truth) * (s.current - truth);
    ref += truth * truth;
  }
  EXPECT_LE(std::sqrt(se / ref), 1e-6);
  EXPECT_NEAR(fit.amplitude, cottrell_amplitude(p), 1e-9 * cottrell_amplitude(p));
  EXPECT_NEAR(fit.offset, 0.0, 1e-9 * cottrell_amplitude(p));
}

TEST(EcFastInfer, OnePercentNoiseMedianAmplitudeErrorBelowThreePercent) {
  const EcParams p;
  const double truth = cottrell_amplitude(p);
  std::vector<double> err;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const auto fit = ec_fast_infer(chronoamperometry_trace(p, 100.0, 1.0, &rng), p);
    err.push_back(std::abs(fit.amplitude - truth) / truth);
  }
  EXPECT_LE(median(err), 0.03);
}

TEST(EcFastInfer, HundredHertzIsNoWorseThanTenHertz) {
  const EcParams p;
  const double truth = cottrell_amplitude(p);
  std::vector<double> e100, e10;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const auto trace = chronoamperometry_trace(p, 100.0, 1.0, &rng);
    // The 10 Hz trace keeps every tenth sample of the same noisy record.
    std::vector<TimedCurrent> thin;
    for (std::size_t i = 9; i < trace.size(); i += 10) thin.push_back(trace[i]);
    e100.push_back(std::abs(ec_fast_infer(trace, p).amplitude - truth) / truth);
    e10.push_back(std::abs(ec_fast_infer(thin, p).amplitude - truth) / truth);
  }
  EXPECT_LE(median(e100), median(e10));
}

TEST(EcFastInfer, RejectsShortOrOutOfWindowInput) {
  const EcParams p;
  auto w = chronoamperometry_trace(p, 100.0, 1.0, nullptr);
  std::vector<TimedCurrent> few(w.begin(), w.begin() + 9);
  EXPECT_THROW(ec_fast_infer(few, p), FitError);
  w.push_back({1.5, 0.0});
  EXPECT_THROW(ec_fast_infer(w, p), FitError);
  std::vector<TimedCurrent> same(12, TimedCurrent{0.5, 1.0});
  EXPECT_THROW(ec_fast_infer(same, p), FitError);
}

TEST(EcParams, CutoffMustPrecedeFullDuration) {
  EcParams p;
  p.cutoff = 6.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

namespace {

plume::PlumeField calm_field() {
  plume::PlumeConfig c;
  c.turbulence_intensity = 0.0;
  return plume::PlumeField(c, 1);
}

}  // namespace

TEST(SampleStereo, CentrelineUpwindReadsEqual) {
  const auto field = calm_field();
  control::UavPose pose;
  pose.position = {8.0, 5.0, 1.0};
  pose.heading_deg = 180.0;
  const auto r = sample_stereo(StereoGeometry{}, field, pose, 400.0);
  EXPECT_GT(r.left.response, 0.0);
  EXPECT_NEAR(r.left.response, r.right.response, 1e-12 * r.left.response);
}

TEST(SampleStereo, PlumeOnTheLeftReadsHigherLeft) {
  const auto field = calm_field();
  control::UavPose pose;
  pose.heading_deg = 180.0;  // facing upwind, so +y is on the right
  pose.position = {8.0, 5.6, 1.0};
  const auto r = sample_stereo(StereoGeometry{}, field, pose, 400.0);
  EXPECT_GT(r.left.response, r.right.response);
  pose.position.y = 4.4;
  const auto s = sample_stereo(StereoGeometry{}, field, pose, 400.0);
  EXPECT_LT(s.left.response, s.right.response);
}

TEST(SampleStereo, OutOfBoundsPoseThrows) {
  const auto field = calm_field();
  control::UavPose pose;
  pose.position = {25.0, 5.0, 1.0};
  EXPECT_THROW(sample_stereo(StereoGeometry{}, field, pose, 10.0), std::domain_error);
}

TEST(StereoRig, MoxSchedulesOneSamplePerSecondWithoutJitter) {
  const auto field = calm_field();
  RigParams params;
  StereoRig rig(params, 4);
  const double t0 = 300.0;
  rig.start(t0);
  control::UavPose pose;
  pose.position = {8.0, 5.0, 1.0};
  pose.heading_deg = 180.0;
  std::vector<double> stamps;
  // Ticks over the half-open window [t0, t0 + 10).
  for (int k = 1; k < 100; ++k) {
    for (const auto& r : rig.advance(field, pose, t0 + 0.1 * k)) {
      EXPECT_EQ(r.left.t, r.right.t);
      EXPECT_EQ(r.left.channel, Channel::Left);
      EXPECT_EQ(r.right.channel, Channel::Right);
      stamps.push_back(r.left.t);
    }
  }
  ASSERT_EQ(stamps.size(), 10u);
  for (std::size_t k = 0; k < stamps.size(); ++k) EXPECT_EQ(stamps[k], t0 + 1.0 * k);
}

TEST(StereoRig, EcReportsEveryTwoSecondsAfterTheCutoff) {
  const auto field = calm_field();
  RigParams params;
  params.kind = SensorKind::Ec;
  StereoRig rig(params, 4);
  const double t0 = 300.0;
  rig.start(t0);
  control::UavPose pose;
  pose.position = {8.0, 5.0, 1.0};
  pose.heading_deg = 180.0;
  std::vector<double> stamps;
  for (int k = 1; k <= 100; ++k) {
    for (const auto& r : rig.advance(field, pose, t0 + 0.1 * k)) {
      EXPECT_GT(r.left.response, 0.0);
      stamps.push_back(r.left.t);
    }
  }
  ASSERT_EQ(stamps.size(), 5u);
  for (std::size_t k = 0; k < stamps.size(); ++k) EXPECT_EQ(stamps[k], t0 + 2.0 * k + 1.0);
}

TEST(StereoRig, SameSeedSameReadings) {
  const auto field = calm_field();
  auto run = [&](std::uint64_t seed) {
    StereoRig rig(RigParams{}, seed);
    rig.start(300.0);
    control::UavPose pose;
    pose.position = {8.0, 5.2, 1.0};
    std::vector<double> v;
    for (int k = 1; k <= 50; ++k) {
      for (const auto& r : rig.advance(field, pose, 300.0 + 0.1 * k)) {
        v.push_back(r.left.value);
        v.push_back(r.right.value);
      }
    }
    return v;
  };
  EXPECT_EQ(run(8), run(8));
  EXPECT_NE(run(8), run(9));
}

TEST(StereoGeometry, BaselineIsAbsoluteSeparation) {
  StereoGeometry g;
  EXPECT_DOUBLE_EQ(g.separation(), 0.2);
  EXPECT_DOUBLE_EQ(g.baseline(), 0.2);
  std::swap(g.left_lateral, g.right_lateral);
  EXPECT_DOUBLE_EQ(g.separation(), -0.2);
  EXPECT_DOUBLE_EQ(g.baseline(), 0.2);
  g.right_lateral = g.left_lateral;
  EXPECT_THROW(g.validate(), ConfigError);
}
