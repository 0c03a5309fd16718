#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "oio/core.hpp"
#include "oio/filters/filter_bank.hpp"
#include "oio/mission/config.hpp"
#include "oio/mission/policy_io.hpp"
#include "oio/nav/oio.hpp"
#include "oio/nav/state.hpp"
#include "oio/nav/tabular.hpp"
#include "oio/plume/env.hpp"
#include "oio/sensors/stereo.hpp"
#include "oio/termination.hpp"

namespace oio::mission {

enum class Outcome { SourceFound, MissedSource, BudgetExhausted, Crashed };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::SourceFound: return "source_found";
    case Outcome::MissedSource: return "missed_source";
    case Outcome::BudgetExhausted: return "budget_exhausted";
    default: return "crashed";
  }
}

// One navigation decision.
struct DecisionRow {
  std::size_t step = 0;
  double t = 0.0;
  control::UavPose pose{};
  double left = 0.0;   // smoothed channel responses
  double right = 0.0;
  double c = 0.0;       // combined channel and its two EMAs
  double e_fast = 0.0;
  double e_slow = 0.0;
  std::size_t state = 0;
  nav::Action action = nav::Action::Pause;
  double d = 0.0;
  double s = 0.0;
  filters::BoutSignal bout = filters::BoutSignal::Neutral;
  double tau = 0.0;
  double phi = 0.0;
  filters::HeadingMode heading_mode = filters::HeadingMode::Hold;
  nav::OioMode mode = nav::OioMode::Sweep;
  double m = 0.0;
  std::size_t k = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool terminate = false;
  bool candidate = false;
  bool vision_checked = false;
  bool collision = false;
  double reward = 0.0;
};

// One sensor sample pair as delivered to the filters.
struct SensorRow {
  double t = 0.0;
  double left_value = 0.0;
  double right_value = 0.0;
  double left_response = 0.0;
  double right_response = 0.0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;
  std::string agent;
  std::string sensor;
  bool vision = false;
  std::string room;
  Outcome outcome = Outcome::BudgetExhausted;
  double elapsed = 0.0;         // s of simulated flight after takeoff
  double final_distance = 0.0;  // m, ground truth
  std::size_t steps = 0;
  std::optional<std::size_t> first_candidate_step;
  std::optional<std::size_t> first_vision_step;
  bool vision_confirmed = false;
  std::string error;
  nav::BandThresholds thresholds{};
  std::vector<DecisionRow> rows;
  std::vector<SensorRow> sensor_rows;
};

// Camera stand-in: the source is "seen" within `radius` and line of sight.
inline bool vision_confirm(const control::UavPose& pose, Vec2 source, double radius,
                           const plume::Course& course) {
  if (!(radius > 0.0)) throw std::domain_error("vision_confirm: radius must be > 0");
  const Vec2 p{pose.position.x, pose.position.y};
  if (std::hypot(p.x - source.x, p.y - source.y) > radius) return false;
  return course.line_of_sight(p, source);
}

// Response-domain noise of the rig in clean air, estimated by sampling.
inline double clean_air_noise(const sensors::RigParams& rig, std::uint64_t seed = 1) {
  if (!rig.noise) return 0.0;
  Rng rng = make_rng(seed, Stream::Episode, 99);
  std::vector<double> v;
  constexpr int kDraws = 400;
  for (int i = 0; i < kDraws; ++i) {
    if (rig.kind == sensors::SensorKind::Mox) {
      const double vrl = sensors::mox_target_voltage(rig.mox, 0.0) +
                         rig.mox.noise_sigma * standard_normal(rng);
      v.push_back(sensors::mox_response(rig.mox, vrl));
    } else {
      v.push_back(sensors::ec_read(rig.ec, 0.0, &rng).response);
    }
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= kDraws;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (kDraws - 1));
}

// Noise-free responses over the plume body (within two crosswind sigmas,
// downwind of the source, in free space) at flight altitude.
inline std::vector<double> calibration_samples(const plume::PlumeConfig& plume,
                                               const plume::Course& course, double gain,
                                               double z, double res = 0.25) {
  std::vector<double> out;
  for (double x = 0.5 * res; x < plume.bounds.x; x += res) {
    const double downwind = x - plume.source_position.x;
    if (downwind <= 0.0) continue;
    const double sy = plume::plume_sigmas(plume, downwind).y;
    for (double y = 0.5 * res; y < plume.bounds.y; y += res) {
      const double cross = y - plume.source_position.y;
      if (std::abs(cross) > 2.0 * sy || !course.is_free(x, y)) continue;
      out.push_back(gain * plume::gaussian_plume(plume, downwind, cross, z));
    }
  }
  return out;
}

inline nav::BandThresholds calibrated_thresholds(const TrialConfig& cfg) {
  const double gain =
      cfg.rig.kind == sensors::SensorKind::Mox ? cfg.rig.mox.sensitivity : cfg.rig.ec.sensitivity;
  const auto samples =
      calibration_samples(cfg.env.plume, cfg.env.course, gain, cfg.env.twin.cruise_altitude);
  const double floor = 4.0 * clean_air_noise(cfg.rig);
  if (samples.empty()) {
    nav::BandThresholds t;
    t.off = std::max(t.off, floor);
    t.high = std::max(t.high, 2.0 * t.off);
    return t;
  }
  nav::BandThresholds t = nav::calibrate_thresholds(samples, floor);
  t.equal_floor = floor;
  return t;
}

// Samples by which the fast-smoothed level trails the gas at the antennas:
// the EMA's mean delay plus the sensor's own response time.
inline std::size_t peak_delay(const TrialConfig& cfg) {
  const double ema = 0.5 * static_cast<double>(cfg.filters.periods.fast - 1);
  const double sensor = cfg.rig.kind == sensors::SensorKind::Mox
                            ? cfg.rig.mox.response_tau * cfg.rig.mox.sample_rate
                            : 0.0;
  return static_cast<std::size_t>(std::lround(ema + sensor));
}

// One seeded flight: plume, sensors, filters, agent, termination and twin
// wired into a single episode.
inline TrialRecord run_trial(const TrialConfig& cfg) {
  cfg.validate();
  TrialRecord rec;
  rec.seed = cfg.seed;
  rec.digest = config_digest(cfg);
  rec.agent = to_string(cfg.agent);
  rec.sensor = sensors::to_string(cfg.rig.kind);
  rec.vision = cfg.vision.enabled;
  rec.room = plume::to_string(cfg.env.course.source_room);

  std::optional<nav::TabularAgent> policy;
  if (cfg.agent != AgentKind::Oio) policy = load_policy(cfg.policy_file).agent;

  nav::OioParams oio_params = cfg.oio;
  if (cfg.calibrate_thresholds) oio_params.thresholds = calibrated_thresholds(cfg);
  rec.thresholds = oio_params.thresholds;

  plume::PlumeEnv env(cfg.env);
  sensors::StereoRig rig(cfg.rig, cfg.seed);
  filters::FilterBank bank(cfg.filters);
  termination::TerminationTracker tracker(cfg.termination.tracker);
  nav::OioNavigator navigator(oio_params);
  navigator.reset();

  const Vec2 source = cfg.env.course.source_xy();
  const double upwind = rad2deg(std::atan2(0.0, -1.0));  // mean wind blows +x
  const double baseline = cfg.rig.geometry.baseline();

  filters::FilterOutput last{};
  Vec2 best_xy{};
  bool new_max = false;
  // The tracker runs on the Kalman-smoothed level; the best pose follows the
  // faster EMA level, shifted back by its delay.
  const std::size_t lag_samples = peak_delay(cfg);
  std::deque<Vec2> recent_xy;
  double peak_level = 0.0;

  try {
    env.reset(cfg.seed);
    rig.start(env.time());
    env.set_tick_observer([&](const control::TickSample& s) {
      for (const auto& r : rig.advance(env.field(), s.pose, s.t)) {
        last = bank.update(r.left.response, r.right.response);
        rec.sensor_rows.push_back(
            {r.left.t, r.left.value, r.right.value, r.left.response, r.right.response});
        recent_xy.push_back({s.pose.position.x, s.pose.position.y});
        if (recent_xy.size() > lag_samples + 1) recent_xy.pop_front();
        const bool plume = navigator.on_plume(last);
        const double level = std::max(last.smoothed_left, last.smoothed_right);
        if (plume && level > peak_level) {
          peak_level = level;
          best_xy = recent_xy.front();
        }
        if (tracker.observe(last.kalman, plume)) new_max = true;
      }
      bank.push_lag_sample(rig.raw_left(), rig.raw_right());
    });

    int stall = 0;
    bool candidate_seen = false;
    bool committed = false;
    bool collided = false;
    const double t_takeoff = env.time();

    while (!env.done()) {
      DecisionRow row;
      row.step = env.steps();
      row.t = env.time();
      row.pose = env.pose();

      const auto est = tracker.estimate();
      const bool candidate = tracker.k() > 0 && stall >= cfg.termination.candidate_stall;
      if (candidate && !candidate_seen) {
        candidate_seen = true;
        rec.first_candidate_step = row.step;
      }

      const auto heading = bank.heading(std::max(cfg.env.plume.wind_speed, 0.0), baseline);
      nav::Action action = nav::Action::Pause;
      if (!committed && candidate_seen && cfg.vision.enabled) {
        row.vision_checked = true;
        if (!rec.first_vision_step) rec.first_vision_step = row.step;
        if (vision_confirm(env.pose(), source, cfg.vision.radius, cfg.env.course)) {
          rec.vision_confirmed = true;
          committed = true;
          navigator.go_home(source);
        }
      }
      if (!committed && candidate && est.terminate) {
        committed = true;
        navigator.go_home(best_xy);
      }

      nav::OioInputs in;
      in.filt = last;
      in.heading = heading;
      in.pose = env.pose();
      in.collided = collided;
      in.upwind_deg = upwind;
      if (tracker.k() > 0) in.anchor = best_xy;
      const std::size_t state = nav::encode_state(last.smoothed_left, last.smoothed_right,
                                                  oio_params.thresholds);
      if (!bank.warmed_up() && !committed) {
        action = nav::Action::Pause;
      } else if (policy && !committed) {
        action = nav::action_from_index(nav::greedy_index(policy->q[state]));
      } else {
        action = navigator.decide(in);
      }

      new_max = false;
      const auto res = env.step(action);
      if (new_max) {
        stall = 0;
      } else if (tracker.k() > 0 && bank.warmed_up()) {
        ++stall;
      }
      collided = res.info.collision;

      row.left = last.smoothed_left;
      row.right = last.smoothed_right;
      row.c = last.combined;
      row.e_fast = last.fast;
      row.e_slow = last.slow;
      row.state = state;
      row.action = action;
      row.d = last.d;
      row.s = last.s;
      row.bout = last.bout;
      row.tau = heading.tau_hat;
      row.phi = heading.phi;
      row.heading_mode = heading.mode;
      row.mode = navigator.mode();
      row.m = est.m;
      row.k = est.k;
      row.lo = est.ci.lo;
      row.hi = est.ci.hi;
      row.terminate = est.terminate;
      row.candidate = candidate;
      row.collision = res.info.collision;
      row.reward = res.reward;
      rec.rows.push_back(row);

      if (res.done) {
        if (res.info.landed) {
          rec.outcome = res.info.at_source ? Outcome::SourceFound : Outcome::MissedSource;
        } else {
          rec.outcome = Outcome::BudgetExhausted;
        }
      }
    }
    if (cfg.env.step_budget == 0) rec.outcome = Outcome::BudgetExhausted;
    rec.elapsed = env.time() - t_takeoff;
    rec.steps = env.steps();
    rec.final_distance = env.distance_to_source();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rec.outcome = Outcome::Crashed;
    rec.error = e.what();
    rec.elapsed = std::max(0.0, env.time() - cfg.env.warmup);
    rec.steps = env.steps();
    rec.final_distance = std::hypot(env.pose().position.x - source.x,
                                    env.pose().position.y - source.y);
  }
  return rec;
}

}  // namespace oio::mission
