#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oio/mission/trial.hpp"
#include "oio/nav/plume_task.hpp"
#include "oio/nav/tabular.hpp"
#include "oio/plume/blanks.hpp"
#include "oio/plume/env.hpp"
#include "oio/plume/field.hpp"

using namespace oio;
using namespace oio::plume;

namespace {

// Smooth plume: no gusts, no blanks.
PlumeConfig calm_config() {
  PlumeConfig c;
  c.turbulence_intensity = 0.0;
  c.sparsity = 0.0;
  return c;
}

// A long open strip for far-field checks.
PlumeConfig strip_config() {
  PlumeConfig c = calm_config();
  c.bounds = {130.0, 40.0, 3.0};
  c.source_position = {5.0, 20.0};
  c.initial_spread = 0.0;
  return c;
}

}  // namespace

TEST(ConcentrationAt, BriggsClassDAt100mMatchesHandEvaluation) {
  // Oracle: the closed form written out once more with the class D
  // open-country coefficients and the table values u = 1, Q = 1, H = 1.
  const double x = 100.0;
  const double sy = 0.08 * x / std::sqrt(1.0 + 0.0001 * x);
  const double sz = 0.06 * x / std::sqrt(1.0 + 0.0015 * x);
  const double z = 1.0, H = 1.0, Q = 1.0, u = 1.0;
  const double pi = 3.14159265358979323846;
  const double expected = Q / (2.0 * pi * u * sy * sz) *
                          (std::exp(-(z - H) * (z - H) / (2.0 * sz * sz)) +
                           std::exp(-(z + H) * (z + H) / (2.0 * sz * sz)));

  const PlumeField field(strip_config(), 1);
  const double got = field.concentration_at({5.0 + x, 20.0, z}, 1000.0);
  EXPECT_NEAR(got, expected, 1e-12 * expected);
}

TEST(ConcentrationAt, CentrelineExceedsThreeSigmaOffset) {
  const PlumeField field(calm_config(), 1);
  const auto& cfg = field.config();
  for (double downwind : {1.0, 4.0, 10.0}) {
    const double sy = plume_sigmas(cfg, downwind).y;
    const double x = cfg.source_position.x + downwind;
    const double on = field.concentration_at({x, 5.0, 1.0}, 400.0);
    const double off = field.concentration_at({x, 5.0 + 3.0 * sy, 1.0}, 400.0);
    EXPECT_GT(on, off) << downwind;
  }
}

TEST(ConcentrationAt, LateralSymmetry) {
  const PlumeField field(calm_config(), 3);
  for (double x = 3.0; x < 20.0; x += 0.7) {
    for (double yc = 0.1; yc < 4.9; yc += 0.45) {
      const double a = field.concentration_at({x, 5.0 + yc, 1.2}, 400.0);
      const double b = field.concentration_at({x, 5.0 - yc, 1.2}, 400.0);
      EXPECT_NEAR(a, b, 1e-12 * std::max(a, b));
    }
  }
}

TEST(ConcentrationAt, CentrelineDecaysMonotonically) {
  const PlumeField field(calm_config(), 3);
  double prev = std::numeric_limits<double>::infinity();
  for (double x = 2.55; x <= 20.0; x += 0.05) {
    const double c = field.concentration_at({x, 5.0, 1.0}, 400.0);
    EXPECT_LT(c, prev) << x;
    prev = c;
  }
}

TEST(ConcentrationAt, LinearInEmissionRate) {
  PlumeConfig a = calm_config();
  PlumeConfig b = a;
  b.emission_rate = 2.0 * a.emission_rate;
  const PlumeField fa(a, 5), fb(b, 5);
  for (double x = 0.5; x < 20.0; x += 1.3) {
    for (double y = 0.5; y < 10.0; y += 1.1) {
      const Vec3 p{x, y, 0.8};
      EXPECT_DOUBLE_EQ(fb.concentration_at(p, 300.0), 2.0 * fa.concentration_at(p, 300.0));
    }
  }
}

TEST(ConcentrationAt, ZeroUpwindAndNonNegativeEverywhere) {
  PlumeConfig c;
  c.sparsity = 0.3;
  const PlumeField field(c, 11);
  for (double x = 0.0; x <= 20.0; x += 0.5) {
    for (double y = 0.0; y <= 10.0; y += 0.5) {
      const double v = field.concentration_at({x, y, 1.0}, 350.0);
      EXPECT_GE(v, 0.0);
      if (x <= c.source_position.x) { EXPECT_EQ(v, 0.0); }
    }
  }
}

TEST(ConcentrationAt, InsideBlankIsZero) {
  PlumeConfig c = calm_config();
  c.sparsity = 0.5;
  const PlumeField field(c, 2);
  int checked = 0;
  for (double x = 3.0; x < 20.0 && checked < 20; x += 0.05) {
    const Vec3 p{x, 5.0, 1.0};
    if (field.blanks().masked(p, 400.0)) {
      EXPECT_EQ(field.concentration_at(p, 400.0), 0.0);
      ++checked;
    } else {
      EXPECT_GT(field.concentration_at(p, 400.0), 0.0);
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(ConcentrationAt, OutOfBoundsThrows) {
  const PlumeField field(calm_config(), 1);
  EXPECT_THROW(field.concentration_at({-1.0, 5.0, 1.0}, 10.0), std::domain_error);
  EXPECT_THROW(field.concentration_at({5.0, 11.0, 1.0}, 10.0), std::domain_error);
  EXPECT_THROW(field.concentration_at({5.0, 5.0, 3.5}, 10.0), std::domain_error);
  EXPECT_THROW(field.concentration_at({5.0, 5.0, 1.0}, -1.0), std::domain_error);
}

TEST(PlumeConfig, RejectsInvalidValues) {
  PlumeConfig c;
  c.sparsity = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PlumeConfig{};
  c.emission_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PlumeConfig{};
  c.bounds.z = 4.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PlumeConfig{};
  c.source_position = {25.0, 5.0};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(WindAt, ZeroTurbulenceIsMeanWind) {
  const PlumeField field(calm_config(), 9);
  for (double t = 0.0; t < 100.0; t += 0.1) {
    const Vec3 w = field.wind_at({5.0, 5.0, 1.0}, t);
    EXPECT_EQ(w.x, 1.0);
    EXPECT_EQ(w.y, 0.0);
    EXPECT_EQ(w.z, 0.0);
  }
}

TEST(WindAt, LongRunMeanWithinThreeStandardErrors) {
  PlumeConfig c;
  c.turbulence_intensity = 0.2;
  c.horizon = 1e4;  // 10^5 ticks
  const PlumeField field(c, 21);
  // Gusts are autocorrelated over tens of seconds, so the standard error
  // comes from batch means.
  constexpr int kBatches = 50, kPerBatch = 2000;
  std::vector<double> means;
  for (int b = 0; b < kBatches; ++b) {
    double s = 0.0;
    for (int i = 0; i < kPerBatch; ++i) {
      s += field.wind_at({}, (b * kPerBatch + i) * c.tick).x;
    }
    means.push_back(s / kPerBatch);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= kBatches;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double se = std::sqrt(ss / (kBatches - 1) / kBatches);
  EXPECT_GT(se, 0.0);
  EXPECT_NEAR(mean, c.wind_speed, 3.0 * se);
}

TEST(WindAt, IdenticalSeedsGiveIdenticalGusts) {
  PlumeConfig c;
  c.turbulence_intensity = 0.1;
  const PlumeField a(c, 77), b(c, 77), other(c, 78);
  bool differs = false;
  for (double t = 0.0; t < 600.0; t += 0.1) {
    const Vec3 wa = a.wind_at({}, t), wb = b.wind_at({}, t);
    EXPECT_EQ(wa, wb);
    if (!(wa == other.wind_at({}, t))) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(InsertBlanks, ZeroSparsityIsEmpty) {
  Rng rng = make_rng(1, Stream::Blanks);
  const BlankMask m = insert_blanks(rng, 0.0, {20, 10, 3}, 600.0, 1.0);
  EXPECT_TRUE(m.empty());
  EXPECT_FALSE(m.masked({5, 5, 1}, 10.0));
}

TEST(InsertBlanks, FullSparsityMasksEverything) {
  Rng rng = make_rng(1, Stream::Blanks);
  const BlankMask m = insert_blanks(rng, 1.0, {20, 10, 3}, 600.0, 1.0);
  Rng probe(5);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(m.masked({20 * uniform01(probe), 10 * uniform01(probe), 3 * uniform01(probe)},
                         600 * uniform01(probe)));
  }
}

TEST(InsertBlanks, MaskedFractionConvergesToSparsity) {
  const Vec3 bounds{20, 10, 3};
  Rng rng = make_rng(4, Stream::Blanks);
  const BlankMask m = insert_blanks(rng, 0.3, bounds, 600.0, 1.0);
  Rng probe(123);
  constexpr int kSamples = 1'000'000;
  int hits = 0;
  for (int i = 0; i < kSamples; ++i) {
    const Vec3 p{bounds.x * uniform01(probe), bounds.y * uniform01(probe),
                 bounds.z * uniform01(probe)};
    if (m.masked(p, 600.0 * uniform01(probe))) ++hits;
  }
  EXPECT_NEAR(static_cast<double>(hits) / kSamples, 0.3, 0.01);
}

TEST(InsertBlanks, BlanksAreContiguousBlobs) {
  Rng rng = make_rng(4, Stream::Blanks);
  const BlankMask m = insert_blanks(rng, 0.3, {20, 10, 3}, 600.0, 1.0);
  // Along a line, masked samples come in runs much longer than one 5 cm step.
  int runs = 0, masked = 0;
  bool prev = false;
  for (double x = 0.0; x < 20.0; x += 0.05) {
    const bool now = m.masked({x, 5.0, 1.0}, 100.0);
    masked += now;
    if (now && !prev) ++runs;
    prev = now;
  }
  ASSERT_GT(runs, 0);
  EXPECT_GT(static_cast<double>(masked) / runs, 5.0);
}

TEST(InsertBlanks, RejectsOutOfRangeSparsity) {
  Rng rng(1);
  EXPECT_THROW(insert_blanks(rng, -0.1, {20, 10, 3}, 10.0, 1.0), std::domain_error);
  EXPECT_THROW(insert_blanks(rng, 1.1, {20, 10, 3}, 10.0, 1.0), std::domain_error);
}

TEST(EnvReset, SameSeedSameObservation) {
  PlumeEnv a{EnvConfig{}}, b{EnvConfig{}};
  const Observation oa = a.reset(42), ob = b.reset(42);
  EXPECT_EQ(oa.left_concentration, ob.left_concentration);
  EXPECT_EQ(oa.right_concentration, ob.right_concentration);
  EXPECT_EQ(oa.wind_local, ob.wind_local);
  EXPECT_EQ(oa.time, ob.time);
  EXPECT_EQ(oa.time, 300.0);
}

TEST(EnvReset, NoPredispersionMeansNoGasAtStart) {
  EnvConfig cfg;
  cfg.warmup = 0.0;
  PlumeEnv env(cfg);
  const Observation o = env.reset(3);
  EXPECT_EQ(o.left_concentration, 0.0);
  EXPECT_EQ(o.right_concentration, 0.0);
}

TEST(EnvReset, DefaultStartIsBelowOnPlumeThreshold) {
  mission::TrialConfig cfg;
  mission::sync_plume_to_course(cfg);
  cfg.env.plume.turbulence_intensity = 0.0;
  const auto thresholds = mission::calibrated_thresholds(cfg);
  PlumeEnv env(cfg.env);
  const Observation o = env.reset(cfg.seed);
  // Response units: sensitivity times concentration.
  const double gain = cfg.rig.mox.sensitivity;
  EXPECT_LT(gain * o.left_concentration, thresholds.off);
  EXPECT_LT(gain * o.right_concentration, thresholds.off);
}

TEST(EnvReset, InvalidCourseIsAConfigError) {
  EnvConfig cfg;
  cfg.course.start.position = {10.0, 2.0, 1.0};  // inside the dividing wall
  EXPECT_THROW(PlumeEnv{cfg}, ConfigError);
  EnvConfig boxed;
  boxed.course.walls.push_back({9.9, 4.0, 10.1, 6.0});  // doorway closed
  EXPECT_THROW(PlumeEnv{boxed}, ConfigError);
}

TEST(EnvStep, PauseHoldsPoseAndAdvancesOneDecisionTick) {
  PlumeEnv env{EnvConfig{}};
  env.reset(1);
  const auto before = env.pose();
  const double t0 = env.time();
  const auto r = env.step(nav::Action::Pause);
  EXPECT_EQ(env.pose().position, before.position);
  EXPECT_EQ(env.pose().heading_deg, before.heading_deg);
  EXPECT_NEAR(env.time() - t0, env.config().decision_dwell, 1e-9);
  EXPECT_FALSE(r.info.collision);
  EXPECT_EQ(env.steps(), 1u);
}

TEST(EnvStep, MovingIntoAWallIsBlocked) {
  EnvConfig cfg;
  cfg.course.start.position = {10.5, 2.0, 1.0};
  cfg.course.start.heading_deg = 180.0;  // facing the dividing wall
  PlumeEnv env(cfg);
  env.reset(1);
  const auto before = env.pose();
  const auto r = env.step(nav::Action::Surge);
  EXPECT_TRUE(r.info.collision);
  EXPECT_EQ(env.pose().position, before.position);
}

TEST(EnvStep, IdealMoveIntoAWallIsBlocked) {
  EnvConfig cfg = miniature_env();
  cfg.course.start.position = {0.1, 0.1, 1.0};
  cfg.course.start.heading_deg = 180.0;
  PlumeEnv env(cfg);
  env.reset(1);
  const auto r = env.step(nav::Action::Surge);
  EXPECT_TRUE(r.info.collision);
  EXPECT_EQ(env.pose().position, cfg.course.start.position);
}

TEST(EnvStep, InvalidActionIsADomainError) {
  PlumeEnv env{EnvConfig{}};
  env.reset(1);
  EXPECT_THROW(env.step(static_cast<nav::Action>(42)), std::domain_error);
}

TEST(EnvStep, StepBeforeResetIsAStateError) {
  PlumeEnv env{EnvConfig{}};
  EXPECT_THROW(env.step(nav::Action::Pause), StateError);
}

TEST(EnvStep, RewardIsRunningMaxGainMinusStepCost) {
  EnvConfig cfg = miniature_env();
  PlumeEnv env(cfg);
  env.reset(1);
  for (int i = 0; i < 4; ++i) {
    const double before = env.running_max();
    const auto r = env.step(nav::Action::Surge);
    const double gain = env.running_max() - before;
    EXPECT_GE(gain, 0.0);
    const double bonus = r.info.at_source ? cfg.terminal_bonus : 0.0;
    EXPECT_NEAR(r.reward, gain - cfg.step_cost + bonus, 1e-15);
  }
}

TEST(EnvStep, BudgetEndsTheEpisode) {
  EnvConfig cfg = miniature_env(0.0, 3);
  PlumeEnv env(cfg);
  env.reset(1);
  env.step(nav::Action::TurnLeft90);
  env.step(nav::Action::TurnLeft90);
  const auto r = env.step(nav::Action::TurnLeft90);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.info.budget_exhausted);
  EXPECT_THROW(env.step(nav::Action::Surge), StateError);
}

namespace {

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::pair<int, int> cell{};
};

// Exhaustive search over every action string of length <= depth.
void search(const PlumeEnv& env, int depth, double acc, Best& best) {
  if (acc > best.value) {
    best.value = acc;
    best.cell = cell_of(env.config(), env.pose().position);
  }
  if (depth == 0 || env.done()) return;
  for (std::size_t i = 0; i < nav::kTabularActions; ++i) {
    PlumeEnv next = env;
    const auto r = next.step(nav::action_from_index(i));
    search(next, depth - 1, acc + r.reward, best);
  }
}

}  // namespace

TEST(EnvStep, GreedyRolloutReachesTheExhaustiveSearchCell) {
  PlumeEnv root(miniature_env());
  root.reset(5);
  constexpr int kDepth = 6;

  Best best;
  search(root, kDepth, 0.0, best);

  // Greedy policy of a tabular agent trained on the same course.
  nav::TdParams p;
  p.learning_rate = 0.1;
  p.epsilon_decay = 0.995;
  p.epsilon_min = 0.05;
  nav::TabularAgent agent(nav::Learner::QLambda, p);
  nav::TabularPlumeTask task(miniature_env());
  nav::train(agent, task, 5000, 5, 40);
  nav::greedy_rollout(agent, task, 5, 40);
  const PlumeEnv& env = task.env();
  EXPECT_EQ(cell_of(env.config(), env.pose().position), best.cell);
  const auto src = cell_of(env.config(), {1.5 * 0.3, 5.0 * 0.3, 1.0});
  EXPECT_EQ(best.cell, src);
}

TEST(EnvDeterminism, SameSeedSameTrace) {
  auto trace = [](std::uint64_t seed) {
    EnvConfig cfg;
    cfg.plume.sparsity = 0.2;
    PlumeEnv env(cfg);
    env.reset(seed);
    std::vector<double> out;
    const nav::Action seq[] = {nav::Action::Surge, nav::Action::CastLeft, nav::Action::TurnLeft45,
                               nav::Action::Surge, nav::Action::CastRight, nav::Action::Pause};
    for (auto a : seq) {
      const auto r = env.step(a);
      out.insert(out.end(), {r.obs.left_concentration, r.obs.right_concentration, r.reward,
                             env.pose().position.x, env.pose().position.y, env.time()});
    }
    return out;
  };
  EXPECT_EQ(trace(9), trace(9));
}
