#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "oio/control/flight_controller.hpp"
#include "oio/core.hpp"
#include "oio/nav/action.hpp"
#include "oio/plume/course.hpp"
#include "oio/plume/field.hpp"
#include "oio/sensors/stereo.hpp"

namespace oio::plume {

struct Observation {
  double left_concentration = 0.0;
  double right_concentration = 0.0;
  Vec3 wind_local{};
  double forward_range = 0.0;  // m to the first obstacle ahead
  bool contact = false;        // forward_range below the body radius
  double time = 0.0;
};

struct EnvConfig {
  PlumeConfig plume{};
  Course course = default_course();
  control::GainTable gains{};
  control::TwinParams twin{};
  sensors::StereoGeometry geometry{};
  double warmup = 300.0;          // s of dispersion before takeoff
  std::size_t step_budget = 600;  // decisions per episode
  double step_cost = 0.01;
  double terminal_bonus = 10.0;
  double success_radius = 1.0;    // m
  double decision_dwell = 1.0;    // s of hover after each primitive
  bool use_twin = true;           // false: ideal kinematic moves, for fast RL
  bool end_at_source = false;     // episode ends on reaching the source
  double max_range = 4.0;         // m, forward range sensor

  void validate() const {
    plume.validate();
    course.validate();
    if (!(warmup >= 0.0)) throw ConfigError("env: warmup must be >= 0");
    if (!(success_radius > 0.0)) throw ConfigError("env: success radius must be > 0");
    if (!(decision_dwell >= 0.0)) throw ConfigError("env: decision dwell must be >= 0");
    if (!(step_cost >= 0.0)) throw ConfigError("env: step cost must be >= 0");
    if (course.bounds.x != plume.bounds.x || course.bounds.y != plume.bounds.y ||
        course.bounds.z != plume.bounds.z) {
      throw ConfigError("env: course and plume bounds differ");
    }
    const Vec2 src = course.source_xy();
    if (src.x != plume.source_position.x || src.y != plume.source_position.y) {
      throw ConfigError("env: plume source does not match the course source");
    }
  }

  // Longest simulated time an episode can reach.
  double episode_span() const {
    const double per_step =
        std::max(decision_dwell, twin.dt) + (use_twin ? twin.primitive_timeout : 0.0);
    return warmup + static_cast<double>(step_budget) * per_step + 1.0;
  }
};

struct StepInfo {
  bool collision = false;
  bool at_source = false;
  bool landed = false;
  bool budget_exhausted = false;
  double distance_to_source = 0.0;
  control::PrimitiveResult primitive{};
};

struct StepResult {
  Observation obs{};
  double reward = 0.0;
  bool done = false;
  StepInfo info{};
};

// Episodic environment: one decision per step, each a motion primitive
// flown by the twin (or an ideal move) followed by a hover dwell.
class PlumeEnv {
 public:
  using TickObserver = std::function<void(const control::TickSample&)>;

  // The gust and blank horizon is stretched to cover the longest episode.
  explicit PlumeEnv(EnvConfig cfg) : cfg_(std::move(cfg)), fc_(cfg_.gains, cfg_.twin) {
    cfg_.plume.horizon = std::max(cfg_.plume.horizon, cfg_.episode_span());
    cfg_.validate();
  }

  const EnvConfig& config() const { return cfg_; }
  const PlumeField& field() const {
    if (!field_) throw StateError("env: reset() has not been called");
    return *field_;
  }
  const control::UavPose& pose() const { return pose_; }
  double time() const { return t_; }
  std::size_t steps() const { return steps_; }
  bool done() const { return done_; }
  double running_max() const { return running_max_; }

  void set_tick_observer(TickObserver obs) { on_tick_ = std::move(obs); }

  Observation reset(std::uint64_t seed) {
    field_ = std::make_shared<const PlumeField>(cfg_.plume, seed);
    return begin();
  }

  // Reuses an existing field (cheap resets when only the start differs).
  Observation reset(std::shared_ptr<const PlumeField> field) {
    if (!field) throw ConfigError("env: null field");
    field_ = std::move(field);
    return begin();
  }

  double distance_to_source() const {
    const Vec2 s = cfg_.course.source_xy();
    return std::hypot(pose_.position.x - s.x, pose_.position.y - s.y);
  }

  StepResult step(nav::Action action) {
    if (!field_) throw StateError("env: reset() has not been called");
    if (done_) throw StateError("env: episode is done");
    if (!nav::is_valid(action)) throw std::domain_error("env: invalid action");

    StepResult out;
    const double before = running_max_;
    if (action == nav::Action::Pause) {
      // Hover in place for one decision tick.
      const double dt = cfg_.twin.dt;
      const int n = static_cast<int>(std::lround(std::max(cfg_.decision_dwell, dt) / dt));
      hover(n);
    } else if (cfg_.use_twin) {
      World w{field_.get(), &cfg_.course};
      const double t0 = t_;
      const auto res = fc_.execute_primitive(pose_, action, w, t0, [&](const control::TickSample& s) {
        if (on_tick_) on_tick_(s);
      });
      out.info.primitive = res;
      out.info.collision = res.collision;
      // A blocked primitive restores the start pose but still costs its time.
      t_ = t0 + res.duration;
      pose_ = res.pose;
      hover(static_cast<int>(std::lround(cfg_.decision_dwell / cfg_.twin.dt)));
    } else {
      out.info.collision = !ideal_move(action);
      t_ += cfg_.decision_dwell;
    }
    ++steps_;

    out.obs = observe();
    running_max_ = std::max(running_max_, std::max(out.obs.left_concentration,
                                                   out.obs.right_concentration));
    out.info.distance_to_source = distance_to_source();
    out.info.at_source = out.info.distance_to_source <= cfg_.success_radius;
    out.info.landed = action == nav::Action::Land;
    out.info.budget_exhausted = steps_ >= cfg_.step_budget;

    const bool found = out.info.at_source && (out.info.landed || cfg_.end_at_source);
    out.done = out.info.landed || found || out.info.budget_exhausted;
    out.reward = (running_max_ - before) - cfg_.step_cost + (found ? cfg_.terminal_bonus : 0.0);
    done_ = out.done;
    return out;
  }

  Observation observe() const {
    Observation o;
    const auto [pl, pr] = sensors::antenna_positions(cfg_.geometry, pose_);
    o.left_concentration = field_->concentration_at(sensors::clamp_to_field(*field_, pl), t_);
    o.right_concentration = field_->concentration_at(sensors::clamp_to_field(*field_, pr), t_);
    o.wind_local = field_->wind_at(pose_.position, t_);
    o.forward_range = cfg_.course.forward_range({pose_.position.x, pose_.position.y},
                                                pose_.heading_deg, cfg_.max_range);
    o.contact = o.forward_range <= cfg_.course.uav_radius;
    o.time = t_;
    return o;
  }

 private:
  struct World {
    const PlumeField* field;
    const Course* course;
    Vec3 wind(const Vec3& p, double t) const { return field->wind_at(p, t); }
    bool move_is_free(Vec2 a, Vec2 b) const { return course->move_is_free(a, b); }
  };

  Observation begin() {
    pose_ = control::UavPose{};
    pose_.position = cfg_.course.start.position;
    pose_.heading_deg = wrap_deg(cfg_.course.start.heading_deg);
    t_ = cfg_.warmup;
    steps_ = 0;
    done_ = cfg_.step_budget == 0;
    const Observation o = observe();
    running_max_ = std::max(o.left_concentration, o.right_concentration);
    return o;
  }

  void hover(int ticks) {
    for (int k = 0; k < ticks; ++k) {
      t_ += cfg_.twin.dt;
      if (on_tick_) on_tick_(control::TickSample{t_, pose_});
    }
  }

  // Exact 0.30 m translation or heading change; false when blocked.
  bool ideal_move(nav::Action a) {
    using nav::Action;
    if (nav::is_turn(a)) {
      pose_.heading_deg = wrap_deg(pose_.heading_deg + nav::turn_angle(a));
      return true;
    }
    if (a == Action::Land) {
      pose_.position.z = 0.0;
      return true;
    }
    const double L = cfg_.twin.step_length;
    const double fwd = a == Action::Surge ? L : 0.0;
    const double lat = a == Action::CastLeft ? L : a == Action::CastRight ? -L : 0.0;
    const Vec3 d = control::body_to_world(pose_.heading_deg, fwd, lat, 0.0);
    const Vec2 from{pose_.position.x, pose_.position.y};
    const Vec2 to{from.x + d.x, from.y + d.y};
    if (!cfg_.course.move_is_free(from, to)) return false;
    pose_.position.x = to.x;
    pose_.position.y = to.y;
    return true;
  }

  EnvConfig cfg_;
  control::FlightController fc_;
  std::shared_ptr<const PlumeField> field_;
  control::UavPose pose_{};
  double t_ = 0.0;
  std::size_t steps_ = 0;
  bool done_ = false;
  double running_max_ = 0.0;
  TickObserver on_tick_;
};

// A 3 m x 3 m room of 10 x 10 cells of one step length, with the source on
// the centre line at the upwind end and the start six cells downwind of it.
// Turbulence is off so the field is smooth; blanks follow `sparsity`.
inline EnvConfig miniature_env(double sparsity = 0.0, std::size_t budget = 40) {
  EnvConfig e;
  const double cell = 0.30;
  e.course = Course{};
  e.course.bounds = {10 * cell, 10 * cell, 3.0};
  e.course.walls.clear();
  e.course.obstacles.clear();
  e.course.uav_radius = 0.05;
  e.course.source_room = Room::Room2;
  e.course.source_room2 = {1.5 * cell, 5.0 * cell};
  e.course.source_room1 = e.course.source_room2;
  e.course.start.position = {7.5 * cell, 5.0 * cell, 1.0};
  e.course.start.heading_deg = 180.0;
  e.plume.bounds = e.course.bounds;
  e.plume.source_position = e.course.source_room2;
  e.plume.obstacle_count = 0;
  e.plume.sparsity = sparsity;
  e.plume.turbulence_intensity = 0.0;
  e.plume.initial_spread = 0.3;
  e.plume.blank_shape = {0.3, 0.3, 0.3};
  e.warmup = 10.0;
  e.step_budget = budget;
  e.decision_dwell = 1.0;
  e.use_twin = false;
  e.end_at_source = true;
  e.success_radius = 0.5 * cell;
  e.plume.horizon = e.episode_span();
  return e;
}

inline std::pair<int, int> cell_of(const EnvConfig& cfg, const Vec3& p) {
  const double cell = cfg.twin.step_length;
  return {static_cast<int>(std::floor(p.x / cell)), static_cast<int>(std::floor(p.y / cell))};
}

}  // namespace oio::plume
